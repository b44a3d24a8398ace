#pragma once

#include <doctest.h>

#include "unitkit/errors.hpp"

// Asserts that `expr` throws ValidationError with the given kind tag.
#define CHECK_KIND(expr, expected_kind)                               \
    do {                                                              \
        try {                                                         \
            (void)(expr);                                             \
            FAIL("expected ValidationError " << (expected_kind));     \
        } catch (const unitkit::ValidationError& e_) {                \
            CHECK(e_.kind() == (expected_kind));                      \
        }                                                             \
    } while (0)

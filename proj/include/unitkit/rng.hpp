#pragma once

#include <cstdint>
#include <random>

namespace unitkit {

// Seeded generator with fully specified output. std::mt19937_64 is pinned by
// the standard; the distributions here are hand-rolled because the std::
// distribution objects are implementation-defined and would break byte-stable
// results across toolchains.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t next_index(std::uint64_t n) {
        const auto idx = static_cast<std::uint64_t>(next_double() *
                                                    static_cast<double>(n));
        return idx < n ? idx : n - 1;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace unitkit

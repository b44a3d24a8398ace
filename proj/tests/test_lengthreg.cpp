#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "test_util.hpp"
#include "unitkit/lengthreg.hpp"
#include "unitkit/rng.hpp"

using namespace unitkit;

TEST_CASE("round_half_away rounds .5 up on non-negative reals") {
    CHECK(round_half_away(0.5) == 1);
    CHECK(round_half_away(2.4) == 2);
    CHECK(round_half_away(2.5) == 3);
    CHECK(round_half_away(3.5) == 4);
    CHECK(round_half_away(2.6) == 3);
    CHECK(round_half_away(0.0) == 0);
}

TEST_CASE("allocate_proportional is the identity when the sum matches") {
    const RealDurations out =
        allocate_proportional({2.2, 1.8, 2.3, 2.7}, 9);
    REQUIRE(out.size() == 4);
    CHECK(out[0] == doctest::Approx(2.2).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(1.8).epsilon(1e-12));
    CHECK(out[2] == doctest::Approx(2.3).epsilon(1e-12));
    CHECK(out[3] == doctest::Approx(2.7).epsilon(1e-12));
}

TEST_CASE("allocate_proportional splits symmetric durations evenly") {
    const RealDurations out = allocate_proportional({1.0, 1.0}, 10);
    CHECK(out[0] == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("allocate_proportional follows the ratio") {
    const RealDurations out = allocate_proportional({3.0, 1.0}, 10);
    CHECK(out[0] == doctest::Approx(7.5).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("allocate_proportional output sums to the target") {
    SeededRng rng(21);
    for (int it = 0; it < 300; ++it) {
        const std::size_t n = 1 + rng.next_index(32);
        RealDurations d(n);
        for (double& v : d) v = 0.05 + 20.0 * rng.next_double();
        const auto target = static_cast<std::int64_t>(1 + rng.next_index(400));
        const RealDurations out = allocate_proportional(d, target);
        const double sum = std::accumulate(out.begin(), out.end(), 0.0);
        CHECK(std::abs(sum - static_cast<double>(target)) <=
              1e-9 * static_cast<double>(target));
    }
}

TEST_CASE("allocate_proportional validates its input") {
    CHECK_KIND(allocate_proportional({}, 5), "EmptyInput");
    CHECK_KIND(allocate_proportional({1.0}, 0), "NonPositiveTarget");
    CHECK_KIND(allocate_proportional({1.0}, -3), "NonPositiveTarget");
    CHECK_KIND(allocate_proportional({1.0, 0.0}, 5), "NonPositiveDuration");
    CHECK_KIND(allocate_proportional({-1.0}, 5), "NonPositiveDuration");
    CHECK_KIND(allocate_proportional(
                   {std::numeric_limits<double>::quiet_NaN()}, 5),
               "NonPositiveDuration");
    CHECK_KIND(allocate_proportional(
                   {std::numeric_limits<double>::infinity()}, 5),
               "NonPositiveDuration");
}

TEST_CASE("integerize_bounded reproduces the worked trace") {
    const BoundedAllocation out = integerize_bounded({2.2, 1.8, 2.3, 2.7}, 10);
    CHECK(out.durations == IntDurations{2, 2, 3, 3});
    CHECK(out.target == 10);
}

TEST_CASE("integerize_bounded keeps an already exact integral input") {
    CHECK(integerize_bounded({2.0, 3.0, 5.0}, 10).durations ==
          IntDurations{2, 3, 5});
}

TEST_CASE("integerize_bounded can drop a clamped fractional unit") {
    CHECK(integerize_bounded({0.2, 9.8}, 10).durations == IntDurations{0, 10});
}

TEST_CASE("integerize_bounded breaks DIFF ties by lowest index") {
    CHECK(integerize_bounded({1.5, 1.5, 1.5, 1.5}, 6).durations ==
          IntDurations{1, 1, 2, 2});
    CHECK(integerize_bounded({1.5, 1.5, 1.5, 1.5}, 10).durations ==
          IntDurations{3, 3, 2, 2});
}

TEST_CASE("integerize_bounded rejects more adjustments than units") {
    CHECK_KIND(integerize_bounded({0.2, 0.2}, 10), "InfeasibleAdjustment");
    CHECK_KIND(integerize_bounded({10.0, 10.0}, 2), "InfeasibleAdjustment");
}

TEST_CASE("integerize_bounded accepts zero entries") {
    // Zero is a legal predicted value; the min=1 clamp lifts it.
    CHECK(integerize_bounded({0.0, 3.0}, 4).durations == IntDurations{1, 3});
}

TEST_CASE("bound_durations composes normalization and integerization") {
    const BoundedAllocation out = bound_durations({2.2, 1.8, 2.3, 2.7}, 10);
    CHECK(out.durations == IntDurations{2, 2, 3, 3});
}

TEST_CASE("bound_durations lets a single unit absorb the budget") {
    CHECK(bound_durations({1.0}, 7).durations == IntDurations{7});
}

TEST_CASE("bound_durations keeps a uniform exact fit") {
    CHECK(bound_durations({1.0, 1.0, 1.0}, 3).durations ==
          IntDurations{1, 1, 1});
}

TEST_CASE("bound_durations sums to the target on fuzzed inputs") {
    SeededRng rng(22);
    for (int it = 0; it < 500; ++it) {
        const std::size_t n = 1 + rng.next_index(48);
        RealDurations d(n);
        for (double& v : d) v = 0.01 + 15.0 * rng.next_double();
        const auto target = static_cast<std::int64_t>(1 + rng.next_index(300));
        const BoundedAllocation out = bound_durations(d, target);
        CHECK(std::accumulate(out.durations.begin(), out.durations.end(),
                              std::int64_t{0}) == target);
        const double total = std::accumulate(d.begin(), d.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(out.durations[i] >= 0);
            // Round (0.5) + clamp (1) + adjustment (1) keep every entry
            // within 2 frames of its normalized share.
            const double share = d[i] * static_cast<double>(target) / total;
            CHECK(std::fabs(static_cast<double>(out.durations[i]) - share) <=
                  2.0);
        }
    }
}

TEST_CASE("bound_durations is invariant under duration rescaling") {
    SeededRng rng(23);
    for (int it = 0; it < 200; ++it) {
        const std::size_t n = 1 + rng.next_index(24);
        RealDurations d(n);
        for (double& v : d) v = 0.1 + 9.0 * rng.next_double();
        const auto target = static_cast<std::int64_t>(1 + rng.next_index(200));
        const IntDurations base = bound_durations(d, target).durations;
        for (const double c : {0.5, 2.0, 7.3}) {
            RealDurations scaled(d);
            for (double& v : scaled) v *= c;
            CHECK(bound_durations(scaled, target).durations == base);
        }
    }
}

TEST_CASE("early_stop truncates at the budget") {
    CHECK(early_stop({2.0, 3.0, 4.0}, 7) == IntDurations{2, 3, 2});
}

TEST_CASE("early_stop undershoots a generous budget") {
    CHECK(early_stop({2.0, 3.0}, 10) == IntDurations{2, 3});
}

TEST_CASE("early_stop keeps an exact fit") {
    CHECK(early_stop({5.0}, 5) == IntDurations{5});
}

TEST_CASE("early_stop zeroes units past the cut") {
    CHECK(early_stop({2.0, 3.0, 4.0, 1.0}, 5) == IntDurations{2, 3, 0, 0});
    CHECK(early_stop({0.4, 0.4}, 1) == IntDurations{1, 0});
}

TEST_CASE("early_stop realizes min(natural length, target)") {
    SeededRng rng(24);
    for (int it = 0; it < 300; ++it) {
        const std::size_t n = 1 + rng.next_index(32);
        RealDurations d(n);
        std::int64_t natural = 0;
        for (double& v : d) {
            v = 0.05 + 8.0 * rng.next_double();
            natural += std::max<std::int64_t>(1, round_half_away(v));
        }
        const auto target = static_cast<std::int64_t>(1 + rng.next_index(200));
        const IntDurations out = early_stop(d, target);
        const std::int64_t sum =
            std::accumulate(out.begin(), out.end(), std::int64_t{0});
        CHECK(sum == std::min(natural, target));
        CHECK(sum <= target);
    }
}

TEST_CASE("fit_duration_table takes per-unit means with a global fallback") {
    const DurationTable table = fit_duration_table(
        {{OrigUnitSeq{{1, 2}}, {2, 4}}, {OrigUnitSeq{{1}}, {3}}});
    CHECK(table.mean_duration.size() == 2);
    CHECK(table.mean_duration.at(1) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(table.mean_duration.at(2) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(table.fallback == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("fit_duration_table handles a one-observation corpus") {
    const DurationTable table = fit_duration_table({{OrigUnitSeq{{5}}, {1}}});
    CHECK(table.mean_duration.at(5) == 1.0);
    CHECK(table.fallback == 1.0);
}

TEST_CASE("fit_duration_table validates the corpus") {
    CHECK_KIND(fit_duration_table({}), "EmptyCorpus");
    CHECK_KIND(fit_duration_table({{OrigUnitSeq{{1, 2}}, {1}}}),
               "LengthMismatch");
}

TEST_CASE("predict_durations looks up means and falls back") {
    DurationTable table;
    table.mean_duration = {{1, 2.5}, {2, 4.0}};
    table.fallback = 3.0;
    CHECK(predict_durations(table, OrigUnitSeq{{1, 2, 9}}) ==
          RealDurations{2.5, 4.0, 3.0});
    CHECK(predict_durations(table, OrigUnitSeq{}).empty());
}

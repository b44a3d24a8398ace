#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "unitkit/unitcore.hpp"

namespace unitkit {

// Empirical mean run length per unit, with a global-mean fallback for units
// never seen at fit time. Immutable after fit_duration_table.
struct DurationTable {
    std::unordered_map<UnitId, double> mean_duration;
    double fallback = 1.0;
};

// Integer durations whose sum is exactly `target`.
struct BoundedAllocation {
    IntDurations durations;
    std::int64_t target = 0;

    bool operator==(const BoundedAllocation&) const = default;
};

// Rounding rule used throughout regulation: half away from zero on
// non-negative reals (2.5 -> 3). Half-even would change outputs.
std::int64_t round_half_away(double x);

// Proportional allocation: output_i = d_i * target / sum(d).
// The output sums to `target` up to floating tolerance; no re-normalization.
RealDurations allocate_proportional(const RealDurations& d, std::int64_t target);

// Integer rounding with exact-sum repair:
//   PRED = clamp(round(dprime), min=1); DIFF = dprime - PRED;
//   if sum(PRED) > target, decrement the k = sum-target indices with the
//   most negative DIFF; if sum(PRED) < target, increment the k indices with
//   the largest DIFF. Ties in DIFF are broken by lowest index. Each index is
//   adjusted at most once; InfeasibleAdjustment if k exceeds the unit count.
BoundedAllocation integerize_bounded(const RealDurations& dprime,
                                     std::int64_t target);

// Full bounded regulation: integerize_bounded(allocate_proportional(d, T), T).
BoundedAllocation bound_durations(const RealDurations& d, std::int64_t target);

// Baseline truncation: natural durations clamp(round(d), min=1) are consumed
// left to right until the cumulative sum reaches `target`; the unit at the
// cut may be shortened and everything after it gets 0. Never overshoots;
// undershoots whenever the natural length is below target.
IntDurations early_stop(const RealDurations& d, std::int64_t target);

// Table-based duration model standing in for a learned predictor.
DurationTable fit_duration_table(
    const std::vector<std::pair<OrigUnitSeq, IntDurations>>& corpus);

RealDurations predict_durations(const DurationTable& table,
                                const OrigUnitSeq& u);

}  // namespace unitkit

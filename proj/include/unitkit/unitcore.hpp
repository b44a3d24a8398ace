#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "unitkit/errors.hpp"

namespace unitkit {

using UnitId = std::int64_t;

// Realized (integer) and predicted (real) per-unit durations, always aligned
// 1:1 with an OrigUnitSeq.
using IntDurations = std::vector<std::int64_t>;
using RealDurations = std::vector<double>;

// Frame-level unit stream: one unit id per fixed-size frame (default 20 ms).
struct ContinuousUnitSeq {
    std::vector<UnitId> units;
    int frame_ms = 20;

    std::size_t size() const noexcept { return units.size(); }
    bool operator==(const ContinuousUnitSeq&) const = default;
};

// Deduplicated unit stream: no two adjacent entries equal.
struct OrigUnitSeq {
    std::vector<UnitId> units;

    std::size_t size() const noexcept { return units.size(); }
    bool operator==(const OrigUnitSeq&) const = default;

    // Validating constructor for externally supplied sequences.
    // Throws ValidationError("AdjacentDuplicate") on a repeated neighbor.
    static OrigUnitSeq from_units(std::vector<UnitId> units);
};

// Run-length collapse: [7,7,3,3,3,9] -> ([7,3,9], [2,3,1]).
// Durations are the run lengths, so they always sum to the input length.
std::pair<OrigUnitSeq, IntDurations> collapse(const ContinuousUnitSeq& z);

// Inverse of collapse: repeat units[i] exactly durations[i] times.
// A zero duration drops its unit from the output entirely.
ContinuousUnitSeq expand(const OrigUnitSeq& u, const IntDurations& durations,
                         int frame_ms = 20);

}  // namespace unitkit

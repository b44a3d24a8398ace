#include "unitkit/unitcore.hpp"

#include <numeric>
#include <string>

namespace unitkit {

OrigUnitSeq OrigUnitSeq::from_units(std::vector<UnitId> units) {
    for (std::size_t i = 1; i < units.size(); ++i) {
        if (units[i] == units[i - 1]) {
            throw ValidationError(
                "AdjacentDuplicate",
                "unit " + std::to_string(units[i]) + " repeats at position " +
                    std::to_string(i));
        }
    }
    return OrigUnitSeq{std::move(units)};
}

std::pair<OrigUnitSeq, IntDurations> collapse(const ContinuousUnitSeq& z) {
    OrigUnitSeq out;
    IntDurations durations;
    for (const UnitId id : z.units) {
        if (!out.units.empty() && out.units.back() == id) {
            ++durations.back();
        } else {
            out.units.push_back(id);
            durations.push_back(1);
        }
    }
    return {std::move(out), std::move(durations)};
}

ContinuousUnitSeq expand(const OrigUnitSeq& u, const IntDurations& durations,
                         int frame_ms) {
    if (u.units.size() != durations.size()) {
        throw ValidationError("LengthMismatch",
                              std::to_string(u.units.size()) + " units vs " +
                                  std::to_string(durations.size()) +
                                  " durations");
    }
    for (std::size_t i = 0; i < durations.size(); ++i) {
        if (durations[i] < 0) {
            throw ValidationError("NegativeDuration",
                                  "duration " + std::to_string(durations[i]) +
                                      " at position " + std::to_string(i));
        }
    }
    ContinuousUnitSeq out;
    out.frame_ms = frame_ms;
    const auto total =
        std::accumulate(durations.begin(), durations.end(), std::int64_t{0});
    out.units.reserve(static_cast<std::size_t>(total));
    for (std::size_t i = 0; i < u.units.size(); ++i) {
        out.units.insert(out.units.end(), static_cast<std::size_t>(durations[i]),
                         u.units[i]);
    }
    return out;
}

}  // namespace unitkit

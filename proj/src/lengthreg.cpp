#include "unitkit/lengthreg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace unitkit {

namespace {

void check_regulation_input(const RealDurations& d, std::int64_t target,
                            bool require_positive) {
    if (d.empty()) {
        throw ValidationError("EmptyInput", "duration sequence is empty");
    }
    if (target < 1) {
        throw ValidationError("NonPositiveTarget",
                              "target " + std::to_string(target));
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!std::isfinite(d[i]) || d[i] < 0.0 ||
            (require_positive && d[i] == 0.0)) {
            throw ValidationError("NonPositiveDuration",
                                  "duration " + std::to_string(d[i]) +
                                      " at position " + std::to_string(i));
        }
    }
}

}  // namespace

std::int64_t round_half_away(double x) {
    return static_cast<std::int64_t>(std::llround(x));
}

RealDurations allocate_proportional(const RealDurations& d,
                                    std::int64_t target) {
    check_regulation_input(d, target, /*require_positive=*/true);
    const double total = std::accumulate(d.begin(), d.end(), 0.0);
    RealDurations out(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        out[i] = d[i] * static_cast<double>(target) / total;
    }
    return out;
}

BoundedAllocation integerize_bounded(const RealDurations& dprime,
                                     std::int64_t target) {
    check_regulation_input(dprime, target, /*require_positive=*/false);
    const std::size_t n = dprime.size();

    IntDurations pred(n);
    std::vector<double> diff(n);
    std::int64_t pred_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        pred[i] = std::max<std::int64_t>(1, round_half_away(dprime[i]));
        diff[i] = dprime[i] - static_cast<double>(pred[i]);
        pred_sum += pred[i];
    }

    IntDurations out = pred;
    if (pred_sum != target) {
        const bool shrink = pred_sum > target;
        const std::int64_t k = shrink ? pred_sum - target : target - pred_sum;
        if (k > static_cast<std::int64_t>(n)) {
            throw ValidationError(
                "InfeasibleAdjustment",
                "need " + std::to_string(k) + " adjustments over " +
                    std::to_string(n) + " units");
        }
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        // Most negative DIFF first when shrinking, largest first when growing;
        // equal DIFF resolves to the lowest index.
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) {
                      if (diff[a] != diff[b]) {
                          return shrink ? diff[a] < diff[b] : diff[a] > diff[b];
                      }
                      return a < b;
                  });
        for (std::int64_t j = 0; j < k; ++j) {
            out[order[static_cast<std::size_t>(j)]] += shrink ? -1 : 1;
        }
    }
    return BoundedAllocation{std::move(out), target};
}

BoundedAllocation bound_durations(const RealDurations& d, std::int64_t target) {
    return integerize_bounded(allocate_proportional(d, target), target);
}

IntDurations early_stop(const RealDurations& d, std::int64_t target) {
    check_regulation_input(d, target, /*require_positive=*/true);
    IntDurations out(d.size(), 0);
    std::int64_t used = 0;
    for (std::size_t i = 0; i < d.size() && used < target; ++i) {
        const std::int64_t natural =
            std::max<std::int64_t>(1, round_half_away(d[i]));
        out[i] = std::min(natural, target - used);
        used += out[i];
    }
    return out;
}

DurationTable fit_duration_table(
    const std::vector<std::pair<OrigUnitSeq, IntDurations>>& corpus) {
    if (corpus.empty()) {
        throw ValidationError("EmptyCorpus", "no (units, durations) pairs");
    }
    std::unordered_map<UnitId, double> sums;
    std::unordered_map<UnitId, std::int64_t> counts;
    double global_sum = 0.0;
    std::int64_t global_count = 0;
    for (const auto& [units, durations] : corpus) {
        if (units.size() != durations.size()) {
            throw ValidationError("LengthMismatch",
                                  std::to_string(units.size()) + " units vs " +
                                      std::to_string(durations.size()) +
                                      " durations");
        }
        for (std::size_t i = 0; i < units.units.size(); ++i) {
            sums[units.units[i]] += static_cast<double>(durations[i]);
            ++counts[units.units[i]];
            global_sum += static_cast<double>(durations[i]);
            ++global_count;
        }
    }
    if (global_count == 0) {
        throw ValidationError("EmptyCorpus", "corpus holds no units");
    }
    DurationTable table;
    for (const auto& [unit, sum] : sums) {
        table.mean_duration[unit] = sum / static_cast<double>(counts[unit]);
    }
    table.fallback = global_sum / static_cast<double>(global_count);
    return table;
}

RealDurations predict_durations(const DurationTable& table,
                                const OrigUnitSeq& u) {
    RealDurations out;
    out.reserve(u.units.size());
    for (const UnitId id : u.units) {
        const auto it = table.mean_duration.find(id);
        out.push_back(it != table.mean_duration.end() ? it->second
                                                      : table.fallback);
    }
    return out;
}

}  // namespace unitkit

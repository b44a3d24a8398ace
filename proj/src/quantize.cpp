#include "unitkit/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <utility>

#include "unitkit/rng.hpp"

namespace unitkit {

namespace {

double dist2_to_centroid(const FeatureMatrix& x, std::size_t row,
                         const double* centroid) {
    const float* p = x.row(row);
    double acc = 0.0;
    for (std::size_t j = 0; j < x.dims; ++j) {
        const double delta = static_cast<double>(p[j]) - centroid[j];
        acc += delta * delta;
    }
    return acc;
}

std::size_t nearest_centroid(const FeatureMatrix& x, std::size_t row,
                             const Codebook& cb) {
    std::size_t best = 0;
    double best_d = dist2_to_centroid(x, row, cb.centroid(0));
    for (std::size_t c = 1; c < cb.k; ++c) {
        const double d = dist2_to_centroid(x, row, cb.centroid(c));
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

// Chunked parallel map over rows; results land in pre-sized output slots, so
// the outcome is independent of scheduling.
template <typename Fn>
void for_each_row(std::size_t n, int threads, Fn fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

void check_finite(const FeatureMatrix& x) {
    for (const float v : x.data) {
        if (!std::isfinite(v)) {
            throw ValidationError("NonFiniteInput",
                                  "feature matrix holds a non-finite value");
        }
    }
}

Codebook kmeanspp_seed(const FeatureMatrix& x, std::size_t k,
                       std::uint64_t seed) {
    SeededRng rng(seed);
    const std::size_t n = x.rows;
    Codebook cb;
    cb.k = k;
    cb.dims = x.dims;
    cb.centroids.resize(k * x.dims);

    std::vector<bool> chosen(n, false);
    auto adopt = [&](std::size_t c, std::size_t row) {
        const float* p = x.row(row);
        for (std::size_t j = 0; j < x.dims; ++j) {
            cb.centroids[c * x.dims + j] = static_cast<double>(p[j]);
        }
        chosen[row] = true;
    };

    adopt(0, rng.next_index(n));

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
        d2[i] = dist2_to_centroid(x, i, cb.centroid(0));
    }

    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += d2[i];

        std::size_t pick = n;
        if (total > 0.0) {
            const double r = rng.next_double() * total;
            double cum = 0.0;
            std::size_t last_positive = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (d2[i] <= 0.0) continue;
                last_positive = i;
                cum += d2[i];
                if (r < cum) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) pick = last_positive;
        }
        if (pick == n) {
            // All remaining mass is zero (duplicated rows); take the first
            // unchosen row so k centroids always exist.
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i]) {
                    pick = i;
                    break;
                }
            }
        }
        adopt(c, pick);
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], dist2_to_centroid(x, i, cb.centroid(c)));
        }
    }
    return cb;
}

}  // namespace

KMeansResult kmeans_fit(const FeatureMatrix& x, std::size_t k, int max_iters,
                        std::uint64_t seed, int threads) {
    if (k < 1) {
        throw ValidationError("TooFewPoints", "k must be at least 1");
    }
    if (x.rows < k) {
        throw ValidationError("TooFewPoints",
                              std::to_string(x.rows) + " points for k=" +
                                  std::to_string(k));
    }
    if (x.dims < 1) {
        throw ValidationError("DimMismatch", "feature dimension is zero");
    }
    if (max_iters < 1) {
        throw ValidationError("InvalidArgument", "max_iters must be positive");
    }
    check_finite(x);

    KMeansResult res;
    res.codebook = kmeanspp_seed(x, k, seed);
    Codebook& cb = res.codebook;
    const std::size_t n = x.rows;

    std::vector<UnitId> assign(n, -1);
    std::vector<UnitId> prev(n, -1);
    std::vector<std::int64_t> counts(k);
    std::vector<double> sums(k * x.dims);

    auto assign_all = [&] {
        for_each_row(n, threads, [&](std::size_t i) {
            assign[i] = static_cast<UnitId>(nearest_centroid(x, i, cb));
        });
    };
    auto wcss_of = [&] {
        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            wcss += dist2_to_centroid(
                x, i, cb.centroid(static_cast<std::size_t>(assign[i])));
        }
        return wcss;
    };

    for (int iter = 0; iter < max_iters; ++iter) {
        assign_all();
        if (assign == prev) break;

        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[static_cast<std::size_t>(assign[i])];
        }

        // Revive empty clusters from the globally farthest point, skipping
        // clusters that would themselves be emptied by the donation.
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t donor = n;
            double worst = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto owner = static_cast<std::size_t>(assign[i]);
                if (counts[owner] < 2) continue;
                const double d = dist2_to_centroid(x, i, cb.centroid(owner));
                if (d > worst) {
                    worst = d;
                    donor = i;
                }
            }
            if (donor == n) break;  // nothing left to split
            --counts[static_cast<std::size_t>(assign[donor])];
            assign[donor] = static_cast<UnitId>(c);
            counts[c] = 1;
        }

        // Serial accumulation in ascending row order keeps results
        // bit-identical across thread counts.
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(assign[i]);
            const float* p = x.row(i);
            for (std::size_t j = 0; j < x.dims; ++j) {
                sums[c * x.dims + j] += static_cast<double>(p[j]);
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;  // keep the previous centroid
            const double inv = 1.0 / static_cast<double>(counts[c]);
            for (std::size_t j = 0; j < x.dims; ++j) {
                cb.centroids[c * x.dims + j] = sums[c * x.dims + j] * inv;
            }
        }

        res.wcss_history.push_back(wcss_of());
        prev = assign;
    }

    // One more assignment against the final centroids, so the reported
    // objective is exactly what quantize_assign on the fit data reproduces.
    assign_all();
    res.assignments = assign;
    res.final_wcss = wcss_of();
    res.iterations = static_cast<int>(res.wcss_history.size());
    return res;
}

ContinuousUnitSeq quantize_assign(const Codebook& cb, const FeatureMatrix& x,
                                  int threads) {
    if (cb.dims != x.dims) {
        throw ValidationError("DimMismatch",
                              "codebook dims " + std::to_string(cb.dims) +
                                  " vs feature dims " + std::to_string(x.dims));
    }
    ContinuousUnitSeq out;
    out.units.resize(x.rows);
    for_each_row(x.rows, threads, [&](std::size_t i) {
        out.units[i] = static_cast<UnitId>(nearest_centroid(x, i, cb));
    });
    return out;
}

namespace {

void check_label_args(const std::vector<std::int64_t>& a,
                      const std::vector<std::int64_t>& b) {
    if (a.size() != b.size()) {
        throw ValidationError("LengthMismatch",
                              std::to_string(a.size()) + " labels vs " +
                                  std::to_string(b.size()) + " cluster ids");
    }
    if (a.empty()) {
        throw ValidationError("EmptyInput", "no labeled points");
    }
}

}  // namespace

double purity(const std::vector<std::int64_t>& reference_labels,
              const std::vector<std::int64_t>& cluster_ids) {
    check_label_args(reference_labels, cluster_ids);
    const std::size_t n = reference_labels.size();
    std::map<std::int64_t, std::map<std::int64_t, std::int64_t>> by_cluster;
    for (std::size_t i = 0; i < n; ++i) {
        ++by_cluster[cluster_ids[i]][reference_labels[i]];
    }
    std::int64_t majority_total = 0;
    for (const auto& [cluster, label_counts] : by_cluster) {
        std::int64_t best = 0;
        for (const auto& [label, count] : label_counts) {
            best = std::max(best, count);
        }
        majority_total += best;
    }
    return static_cast<double>(majority_total) / static_cast<double>(n);
}

double nmi(const std::vector<std::int64_t>& reference_labels,
           const std::vector<std::int64_t>& cluster_ids) {
    check_label_args(reference_labels, cluster_ids);
    const auto n = static_cast<double>(reference_labels.size());

    std::map<std::int64_t, std::int64_t> label_counts;
    std::map<std::int64_t, std::int64_t> cluster_counts;
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> joint;
    for (std::size_t i = 0; i < reference_labels.size(); ++i) {
        ++label_counts[reference_labels[i]];
        ++cluster_counts[cluster_ids[i]];
        ++joint[{reference_labels[i], cluster_ids[i]}];
    }

    auto entropy = [n](const std::map<std::int64_t, std::int64_t>& counts) {
        double h = 0.0;
        for (const auto& [key, count] : counts) {
            const double p = static_cast<double>(count) / n;
            h -= p * std::log(p);
        }
        return h;
    };
    const double h_labels = entropy(label_counts);
    const double h_clusters = entropy(cluster_counts);
    if (h_labels == 0.0 && h_clusters == 0.0) return 1.0;
    if (h_labels == 0.0 || h_clusters == 0.0) return 0.0;

    double mi = 0.0;
    for (const auto& [pair, count] : joint) {
        const double p = static_cast<double>(count) / n;
        const double pl = static_cast<double>(label_counts[pair.first]) / n;
        const double pc = static_cast<double>(cluster_counts[pair.second]) / n;
        mi += p * std::log(p / (pl * pc));
    }
    return std::clamp(mi / (0.5 * (h_labels + h_clusters)), 0.0, 1.0);
}

}  // namespace unitkit

#pragma once

#include <cstdint>
#include <vector>

#include "unitkit/unitcore.hpp"

namespace unitkit {

// Row-major n x d feature frames. Matches the on-disk float32 layout.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t dims = 0;
    std::vector<float> data;

    const float* row(std::size_t i) const { return data.data() + i * dims; }
};

// K x d centroid matrix. Immutable after fit; shareable across threads.
struct Codebook {
    std::size_t k = 0;
    std::size_t dims = 0;
    std::vector<double> centroids;

    const double* centroid(std::size_t j) const {
        return centroids.data() + j * dims;
    }
};

struct KMeansResult {
    Codebook codebook;
    std::vector<UnitId> assignments;
    // Objective after each centroid update; non-increasing by construction.
    std::vector<double> wcss_history;
    double final_wcss = 0.0;
    int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding. Deterministic for a given
// (x, k, max_iters, seed) and identical for any thread count: the assignment
// step may run chunked in parallel, centroid accumulation is always serial in
// ascending row order. Empty clusters are reseeded to the point farthest from
// its assigned centroid (drawn from clusters with at least two members).
KMeansResult kmeans_fit(const FeatureMatrix& x, std::size_t k, int max_iters,
                        std::uint64_t seed, int threads = 1);

// Nearest-centroid assignment by squared Euclidean distance; equidistant
// ties go to the lowest centroid index.
ContinuousUnitSeq quantize_assign(const Codebook& cb, const FeatureMatrix& x,
                                  int threads = 1);

// Clustering quality against reference labels.
double purity(const std::vector<std::int64_t>& reference_labels,
              const std::vector<std::int64_t>& cluster_ids);

// Mutual information normalized by the arithmetic mean of the two entropies
// (natural log). Both partitions single-class -> 1.0; exactly one -> 0.0.
double nmi(const std::vector<std::int64_t>& reference_labels,
           const std::vector<std::int64_t>& cluster_ids);

}  // namespace unitkit

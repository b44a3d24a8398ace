#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unitkit/errors.hpp"

namespace unitkit {

// (predicted_length, reference_length) pairs; lengths are >= 1.
using LengthPairCorpus =
    std::vector<std::pair<std::int64_t, std::int64_t>>;

// Visual/audio embedding pair of equal dimension.
struct EmbeddingPair {
    std::vector<double> v;
    std::vector<double> a;
};

struct EvalReport {
    double lr = 0.0;
    std::vector<std::pair<double, double>> lc;  // (k percent, compliance %)
    std::optional<double> bleu;
    std::optional<std::int64_t> repeats;
};

// Mean of per-sample predicted/reference ratios.
double length_ratio(const LengthPairCorpus& corpus);

// Percentage of pairs with |pred - ref| <= k% of ref (boundary inclusive).
double length_compliance(const LengthPairCorpus& corpus, double k_percent);

using TokenSeq = std::vector<std::int64_t>;

// Corpus-level BLEU in [0, 100]: clipped n-gram precisions (n = 1..4) pooled
// over the corpus, geometric mean, brevity penalty exp(1 - ref/hyp) when the
// hypothesis side is shorter. No smoothing: any zero precision gives 0.
double corpus_bleu(const std::vector<TokenSeq>& hypotheses,
                   const std::vector<TokenSeq>& references);

// Cosine-style similarity (v . a) / max(|v||a|, eps).
double sync_similarity(const EmbeddingPair& p, double eps);

// Mean of -log(clamp(similarity, floor, 1)) over pairs. The floor keeps the
// log finite when a similarity is zero or negative.
double sync_loss(const std::vector<EmbeddingPair>& pairs, double eps,
                 double floor = 1e-6);

// N frames of identical shape, flattened row-major; shape[0] is N.
struct FrameTensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    std::size_t frames() const { return shape.empty() ? 0 : shape[0]; }
};

// Mean over frames of the L1 norm of the per-frame difference.
double lip_l1(const FrameTensor& real_frames, const FrameTensor& gen_frames);

enum class GanMode {
    // Both discriminator terms use log(1 - D), matching the printed formula.
    AsWritten,
    // Standard non-saturating discriminator: -[E log D + E log(1 - D)].
    Canonical,
};

struct GanLosses {
    double generator = 0.0;
    double discriminator = 0.0;
};

// Probabilities are clamped to [eps, 1-eps] with eps = 1e-7 before the logs.
GanLosses gan_losses(const std::vector<double>& d_on_real,
                     const std::vector<double>& d_on_gen,
                     GanMode mode = GanMode::Canonical);

// (1 - ls - lg) * lip + ls * sync + lg * gen.
double combined_loss(double l_lip, double l_sync, double l_g,
                     double lambda_sync = 0.03, double lambda_gen = 0.07);

// Negative sum of per-step target log-probabilities.
double s2ut_nll(const std::vector<double>& stepwise_target_logprobs);

// Report JSON with pinned precision: lr to 3 decimals, lc/bleu to 2.
std::string format_eval_report(const EvalReport& report);

}  // namespace unitkit

#include "unitkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

namespace unitkit {

namespace {

constexpr int kBleuOrder = 4;
constexpr double kGanEps = 1e-7;

void check_length_corpus(const LengthPairCorpus& corpus) {
    if (corpus.empty()) {
        throw ValidationError("EmptyCorpus", "no length pairs");
    }
    for (const auto& [pred, ref] : corpus) {
        if (pred < 1 || ref < 1) {
            throw ValidationError("InvalidLength",
                                  "lengths must be >= 1, got (" +
                                      std::to_string(pred) + ", " +
                                      std::to_string(ref) + ")");
        }
    }
}

}  // namespace

double length_ratio(const LengthPairCorpus& corpus) {
    check_length_corpus(corpus);
    double acc = 0.0;
    for (const auto& [pred, ref] : corpus) {
        acc += static_cast<double>(pred) / static_cast<double>(ref);
    }
    return acc / static_cast<double>(corpus.size());
}

double length_compliance(const LengthPairCorpus& corpus, double k_percent) {
    check_length_corpus(corpus);
    if (k_percent <= 0.0) {
        throw ValidationError("InvalidArgument", "k must be positive");
    }
    std::int64_t accepted = 0;
    for (const auto& [pred, ref] : corpus) {
        const double deviation =
            100.0 * static_cast<double>(std::llabs(pred - ref));
        if (deviation <= k_percent * static_cast<double>(ref)) ++accepted;
    }
    return 100.0 * static_cast<double>(accepted) /
           static_cast<double>(corpus.size());
}

double corpus_bleu(const std::vector<TokenSeq>& hypotheses,
                   const std::vector<TokenSeq>& references) {
    if (hypotheses.size() != references.size()) {
        throw ValidationError("LengthMismatch",
                              std::to_string(hypotheses.size()) +
                                  " hypotheses vs " +
                                  std::to_string(references.size()) +
                                  " references");
    }
    if (hypotheses.empty()) {
        throw ValidationError("EmptyCorpus", "no sentences");
    }

    std::int64_t correct[kBleuOrder] = {0};
    std::int64_t total[kBleuOrder] = {0};
    std::int64_t hyp_len = 0;
    std::int64_t ref_len = 0;

    std::map<TokenSeq, std::int64_t> hyp_counts;
    std::map<TokenSeq, std::int64_t> ref_counts;
    for (std::size_t s = 0; s < hypotheses.size(); ++s) {
        const TokenSeq& hyp = hypotheses[s];
        const TokenSeq& ref = references[s];
        hyp_len += static_cast<std::int64_t>(hyp.size());
        ref_len += static_cast<std::int64_t>(ref.size());
        for (int n = 1; n <= kBleuOrder; ++n) {
            hyp_counts.clear();
            ref_counts.clear();
            for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
                ++hyp_counts[TokenSeq(hyp.begin() + i, hyp.begin() + i + n)];
            }
            for (std::size_t i = 0; i + n <= ref.size(); ++i) {
                ++ref_counts[TokenSeq(ref.begin() + i, ref.begin() + i + n)];
            }
            if (hyp.size() + 1 > static_cast<std::size_t>(n)) {
                total[n - 1] +=
                    static_cast<std::int64_t>(hyp.size()) - n + 1;
            }
            for (const auto& [gram, count] : hyp_counts) {
                const auto it = ref_counts.find(gram);
                if (it != ref_counts.end()) {
                    correct[n - 1] += std::min(count, it->second);
                }
            }
        }
    }

    double log_precision = 0.0;
    for (int n = 0; n < kBleuOrder; ++n) {
        if (correct[n] == 0 || total[n] == 0) return 0.0;
        log_precision += std::log(static_cast<double>(correct[n]) /
                                  static_cast<double>(total[n])) /
                         kBleuOrder;
    }
    double brevity = 1.0;
    if (hyp_len < ref_len) {
        brevity = std::exp(1.0 - static_cast<double>(ref_len) /
                                     static_cast<double>(hyp_len));
    }
    return 100.0 * brevity * std::exp(log_precision);
}

double sync_similarity(const EmbeddingPair& p, double eps) {
    if (p.v.size() != p.a.size() || p.v.empty()) {
        throw ValidationError("LengthMismatch",
                              "embedding dims " + std::to_string(p.v.size()) +
                                  " vs " + std::to_string(p.a.size()));
    }
    if (eps <= 0.0) {
        throw ValidationError("InvalidArgument", "eps must be positive");
    }
    double dot = 0.0;
    double nv = 0.0;
    double na = 0.0;
    for (std::size_t i = 0; i < p.v.size(); ++i) {
        if (!std::isfinite(p.v[i]) || !std::isfinite(p.a[i])) {
            throw ValidationError("NonFiniteInput", "embedding value");
        }
        dot += p.v[i] * p.a[i];
        nv += p.v[i] * p.v[i];
        na += p.a[i] * p.a[i];
    }
    return dot / std::max(std::sqrt(nv) * std::sqrt(na), eps);
}

double sync_loss(const std::vector<EmbeddingPair>& pairs, double eps,
                 double floor) {
    if (pairs.empty()) {
        throw ValidationError("EmptyInput", "no embedding pairs");
    }
    if (floor <= 0.0 || floor >= 1.0) {
        throw ValidationError("InvalidArgument", "floor must be in (0, 1)");
    }
    double acc = 0.0;
    for (const EmbeddingPair& p : pairs) {
        const double sim = std::clamp(sync_similarity(p, eps), floor, 1.0);
        acc += -std::log(sim);
    }
    return acc / static_cast<double>(pairs.size());
}

double lip_l1(const FrameTensor& real_frames, const FrameTensor& gen_frames) {
    if (real_frames.shape != gen_frames.shape ||
        real_frames.data.size() != gen_frames.data.size()) {
        throw ValidationError("ShapeMismatch", "frame tensors differ in shape");
    }
    const std::size_t n = real_frames.frames();
    if (n == 0) {
        throw ValidationError("EmptyInput", "no frames");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < real_frames.data.size(); ++i) {
        acc += std::abs(real_frames.data[i] - gen_frames.data[i]);
    }
    return acc / static_cast<double>(n);
}

GanLosses gan_losses(const std::vector<double>& d_on_real,
                     const std::vector<double>& d_on_gen, GanMode mode) {
    if (d_on_real.empty() || d_on_gen.empty()) {
        throw ValidationError("EmptyInput", "need discriminator outputs");
    }
    auto mean_log = [](const std::vector<double>& probs, bool one_minus) {
        double acc = 0.0;
        for (const double p : probs) {
            const double clamped = std::clamp(p, kGanEps, 1.0 - kGanEps);
            acc += std::log(one_minus ? 1.0 - clamped : clamped);
        }
        return acc / static_cast<double>(probs.size());
    };

    GanLosses out;
    out.generator = mean_log(d_on_gen, /*one_minus=*/true);
    if (mode == GanMode::AsWritten) {
        out.discriminator = mean_log(d_on_real, /*one_minus=*/true) +
                            mean_log(d_on_gen, /*one_minus=*/true);
    } else {
        out.discriminator = -(mean_log(d_on_real, /*one_minus=*/false) +
                              mean_log(d_on_gen, /*one_minus=*/true));
    }
    return out;
}

double combined_loss(double l_lip, double l_sync, double l_g,
                     double lambda_sync, double lambda_gen) {
    if (lambda_sync < 0.0 || lambda_gen < 0.0 ||
        lambda_sync + lambda_gen >= 1.0) {
        throw ValidationError("InvalidWeights",
                              "need lambda_sync, lambda_gen >= 0 with sum < 1");
    }
    // Same as (1 - ls - lg)*lip + ls*sync + lg*gen, arranged so equal inputs
    // return that value exactly regardless of how the weights round.
    return l_lip + lambda_sync * (l_sync - l_lip) + lambda_gen * (l_g - l_lip);
}

double s2ut_nll(const std::vector<double>& stepwise_target_logprobs) {
    if (stepwise_target_logprobs.empty()) {
        throw ValidationError("EmptyInput", "no log-probabilities");
    }
    double acc = 0.0;
    for (const double lp : stepwise_target_logprobs) {
        if (lp > 0.0) {
            throw ValidationError("PositiveLogProb",
                                  "log-probability " + std::to_string(lp));
        }
        acc += lp;
    }
    return -acc;
}

namespace {

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

std::string format_threshold_key(double k) {
    if (k == std::floor(k) && std::abs(k) < 1e15) {
        return std::to_string(static_cast<long long>(k));
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", k);
    return buf;
}

}  // namespace

std::string format_eval_report(const EvalReport& report) {
    std::string out = "{\"lr\": " + format_fixed(report.lr, 3) + ", \"lc\": {";
    for (std::size_t i = 0; i < report.lc.size(); ++i) {
        if (i > 0) out += ", ";
        out += "\"" + format_threshold_key(report.lc[i].first) +
               "\": " + format_fixed(report.lc[i].second, 2);
    }
    out += "}, \"bleu\": ";
    out += report.bleu ? format_fixed(*report.bleu, 2) : "null";
    out += ", \"repeats\": ";
    out += report.repeats ? std::to_string(*report.repeats) : "null";
    out += "}";
    return out;
}

}  // namespace unitkit

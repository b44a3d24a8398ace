#include "unitkit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "unitkit/rng.hpp"
#include "unitkit/schedule.hpp"

namespace unitkit {

SyntheticSpec SyntheticSpec::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("InvalidSpec", e.what());
    }
    SyntheticSpec spec;
    try {
        spec.n_sequences = doc.at("n_sequences").get<std::int64_t>();
        spec.vocab_size = doc.at("vocab_size").get<std::int64_t>();
        spec.mean_length = doc.at("mean_length").get<double>();
        spec.geometric_p = doc.at("geometric_p").get<double>();
        spec.jitter_percent = doc.at("jitter_percent").get<double>();
        spec.seed = doc.value("seed", std::uint64_t{0});
        for (const auto& [key, value] : doc.items()) {
            if (key != "n_sequences" && key != "vocab_size" &&
                key != "mean_length" && key != "geometric_p" &&
                key != "jitter_percent" && key != "seed") {
                throw ValidationError("InvalidSpec", "unknown key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("InvalidSpec", e.what());
    }
    return spec;
}

namespace {

constexpr double kMinGeometricP = 0.01;

void check_spec(const SyntheticSpec& spec) {
    if (spec.n_sequences < 1) {
        throw ValidationError("InvalidSpec", "n_sequences must be positive");
    }
    if (spec.vocab_size < 2) {
        throw ValidationError("InvalidSpec",
                              "vocab_size must be >= 2 so neighbors can differ");
    }
    if (!(spec.mean_length >= 1.0)) {
        throw ValidationError("InvalidSpec", "mean_length must be >= 1");
    }
    if (!(spec.geometric_p >= kMinGeometricP) || spec.geometric_p > 1.0) {
        throw ValidationError("InvalidSpec",
                              "geometric_p must be in [0.01, 1]");
    }
    if (spec.jitter_percent < 0.0 || spec.jitter_percent >= 100.0) {
        throw ValidationError("InvalidSpec",
                              "jitter_percent must be in [0, 100)");
    }
}

// Geometric on {1, 2, ...} by inverse CDF.
std::int64_t sample_geometric(SeededRng& rng, double p) {
    if (p >= 1.0) return 1;
    const double u = rng.next_double();
    const double draw = std::ceil(std::log1p(-u) / std::log1p(-p));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(draw));
}

}  // namespace

std::vector<SyntheticSample> generate_corpus(const SyntheticSpec& spec) {
    check_spec(spec);
    SeededRng rng(spec.seed);
    std::vector<SyntheticSample> corpus;
    corpus.reserve(static_cast<std::size_t>(spec.n_sequences));

    // Uniform on [1, 2*mean-1] keeps the requested mean without needing a
    // platform-specified heavy-tail sampler.
    const auto len_span =
        std::max<std::int64_t>(1, 2 * std::llround(spec.mean_length) - 1);

    for (std::int64_t s = 0; s < spec.n_sequences; ++s) {
        SyntheticSample sample;
        const auto len =
            1 + static_cast<std::int64_t>(rng.next_index(
                    static_cast<std::uint64_t>(len_span)));
        sample.units.units.reserve(static_cast<std::size_t>(len));
        sample.durations.reserve(static_cast<std::size_t>(len));
        UnitId prev = -1;
        std::int64_t natural = 0;
        for (std::int64_t i = 0; i < len; ++i) {
            UnitId unit;
            if (prev < 0) {
                unit = static_cast<UnitId>(rng.next_index(
                    static_cast<std::uint64_t>(spec.vocab_size)));
            } else {
                // Offset draw over the other vocab_size-1 ids.
                const auto step = 1 + static_cast<std::int64_t>(rng.next_index(
                                          static_cast<std::uint64_t>(
                                              spec.vocab_size - 1)));
                unit = (prev + step) % spec.vocab_size;
            }
            const std::int64_t dur = sample_geometric(rng, spec.geometric_p);
            sample.units.units.push_back(unit);
            sample.durations.push_back(dur);
            natural += dur;
            prev = unit;
        }
        const double jitter =
            (2.0 * rng.next_double() - 1.0) * spec.jitter_percent / 100.0;
        sample.target = std::max<std::int64_t>(
            1, std::llround(static_cast<double>(natural) * (1.0 + jitter)));
        corpus.push_back(std::move(sample));
    }
    return corpus;
}

RegulationMode parse_regulation_mode(const std::string& name) {
    if (name == "bounded") return RegulationMode::Bounded;
    if (name == "early_stop") return RegulationMode::EarlyStop;
    if (name == "unbounded") return RegulationMode::Unbounded;
    throw ValidationError("InvalidArgument", "unknown mode '" + name + "'");
}

std::string regulation_mode_name(RegulationMode mode) {
    switch (mode) {
        case RegulationMode::Bounded: return "bounded";
        case RegulationMode::EarlyStop: return "early_stop";
        case RegulationMode::Unbounded: return "unbounded";
    }
    return "unknown";
}

IntDurations regulate_sample(const RealDurations& d, std::int64_t target,
                             RegulationMode mode) {
    switch (mode) {
        case RegulationMode::Bounded:
            return bound_durations(d, target).durations;
        case RegulationMode::EarlyStop:
            return early_stop(d, target);
        case RegulationMode::Unbounded: {
            IntDurations out(d.size());
            for (std::size_t i = 0; i < d.size(); ++i) {
                out[i] = std::max<std::int64_t>(1, round_half_away(d[i]));
            }
            return out;
        }
    }
    throw ValidationError("InvalidArgument", "unknown regulation mode");
}

EvalReport run_isometry_eval(const std::vector<SyntheticSample>& corpus,
                             RegulationMode mode) {
    if (corpus.empty()) {
        throw ValidationError("EmptyCorpus", "no samples");
    }
    LengthPairCorpus lengths;
    lengths.reserve(corpus.size());
    std::int64_t repeats = 0;
    for (const SyntheticSample& sample : corpus) {
        RealDurations predicted(sample.durations.begin(),
                                sample.durations.end());
        const IntDurations realized =
            regulate_sample(predicted, sample.target, mode);
        const std::int64_t frames =
            std::accumulate(realized.begin(), realized.end(), std::int64_t{0});
        lengths.emplace_back(frames, sample.target);

        // Reference reuse at the 40-ms video rate: the source clip supplies
        // ceil(target/2) reference frames; overlong output wraps.
        const std::int64_t n_video = (frames + 1) / 2;
        const std::int64_t n_ref = (sample.target + 1) / 2;
        repeats +=
            assign_reference_frames(n_video, n_ref, RefPolicy::Wrap).repeats;
    }
    EvalReport report;
    report.lr = length_ratio(lengths);
    for (const double k : {5.0, 10.0, 20.0}) {
        report.lc.emplace_back(k, length_compliance(lengths, k));
    }
    report.repeats = repeats;
    return report;
}

std::map<std::string, EvalReport> run_isometry_eval(
    const std::vector<SyntheticSample>& corpus,
    const std::vector<RegulationMode>& modes) {
    std::map<std::string, EvalReport> out;
    for (const RegulationMode mode : modes) {
        out[regulation_mode_name(mode)] = run_isometry_eval(corpus, mode);
    }
    return out;
}

IntDurations reference_bound_durations(const RealDurations& d,
                                       std::int64_t target) {
    if (d.empty()) {
        throw ValidationError("EmptyInput", "duration sequence is empty");
    }
    if (target < 1) {
        throw ValidationError("NonPositiveTarget", std::to_string(target));
    }
    const std::size_t n = d.size();

    // Step 1: proportional share of the target budget.
    double total = 0.0;
    for (const double value : d) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw ValidationError("NonPositiveDuration",
                                  std::to_string(value));
        }
        total += value;
    }
    std::vector<double> allocated(n);
    for (std::size_t i = 0; i < n; ++i) {
        allocated[i] = d[i] * static_cast<double>(target) / total;
    }

    // Step 2: round half away from zero, floor at one frame.
    IntDurations out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double rounded = std::floor(allocated[i]);
        if (allocated[i] - rounded >= 0.5) rounded += 1.0;
        out[i] = std::max<std::int64_t>(1, static_cast<std::int64_t>(rounded));
    }

    // Steps 3-4: repair the sum one frame at a time, always taking the index
    // whose rounding residual is most extreme (lowest index on ties). Each
    // index may move only once.
    std::int64_t sum = std::accumulate(out.begin(), out.end(), std::int64_t{0});
    const std::int64_t k = sum > target ? sum - target : target - sum;
    if (k > static_cast<std::int64_t>(n)) {
        throw ValidationError("InfeasibleAdjustment",
                              "need " + std::to_string(k) +
                                  " adjustments over " + std::to_string(n) +
                                  " units");
    }
    std::vector<bool> touched(n, false);
    for (std::int64_t step = 0; step < k; ++step) {
        std::size_t pick = n;
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (touched[i]) continue;
            const double residual = allocated[i] - static_cast<double>(out[i]);
            const double score = sum > target ? -residual : residual;
            if (pick == n || score > best) {
                best = score;
                pick = i;
            }
        }
        touched[pick] = true;
        out[pick] += sum > target ? -1 : 1;
    }
    return out;
}

OracleDiagnostics oracle_bound_check(const RealDurations& d,
                                     std::int64_t target) {
    OracleDiagnostics diag;
    diag.actual = bound_durations(d, target).durations;
    diag.expected = reference_bound_durations(d, target);
    for (std::size_t i = 0; i < diag.expected.size(); ++i) {
        if (i >= diag.actual.size() || diag.actual[i] != diag.expected[i]) {
            diag.pass = false;
            diag.first_divergence = i;
            break;
        }
    }
    if (diag.pass && diag.actual.size() != diag.expected.size()) {
        diag.pass = false;
        diag.first_divergence = diag.expected.size();
    }
    return diag;
}

}  // namespace unitkit

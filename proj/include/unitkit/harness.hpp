#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "unitkit/lengthreg.hpp"
#include "unitkit/metrics.hpp"
#include "unitkit/unitcore.hpp"

namespace unitkit {

// Parameters for the synthetic regulation corpora.
struct SyntheticSpec {
    std::int64_t n_sequences = 0;
    std::int64_t vocab_size = 0;     // >= 2 so adjacent units can differ
    double mean_length = 0.0;        // mean units per sequence
    double geometric_p = 0.0;        // run-length distribution, support >= 1
    double jitter_percent = 0.0;     // targets drawn in +-jitter% of natural
    std::uint64_t seed = 0;

    static SyntheticSpec from_json(const std::string& text);
};

struct SyntheticSample {
    OrigUnitSeq units;
    IntDurations durations;     // ground-truth run lengths, all >= 1
    std::int64_t target = 0;    // desired frame count
};

enum class RegulationMode { Bounded, EarlyStop, Unbounded };

RegulationMode parse_regulation_mode(const std::string& name);
std::string regulation_mode_name(RegulationMode mode);

// Realizes one duration sequence under the given mode: bounded (sum equals
// target exactly), early_stop (left-to-right truncation at target), or
// unbounded (clamp(round(d), 1), target ignored).
IntDurations regulate_sample(const RealDurations& d, std::int64_t target,
                             RegulationMode mode);

// Deterministic under spec.seed; adjacent units always distinct; durations
// geometric with support >= 1; target = round(natural * (1 + jitter)) with
// jitter uniform in +-jitter_percent/100, floored at 1 frame.
std::vector<SyntheticSample> generate_corpus(const SyntheticSpec& spec);

// Regulates each sample with the given mode, realizes the frame count, and
// reports LR and LC@{5,10,20} against the sample targets. `repeats` counts
// wrapped reference-frame reuse over the corpus at the 40-ms video rate.
EvalReport run_isometry_eval(const std::vector<SyntheticSample>& corpus,
                             RegulationMode mode);

std::map<std::string, EvalReport> run_isometry_eval(
    const std::vector<SyntheticSample>& corpus,
    const std::vector<RegulationMode>& modes);

// Plain re-derivation of the bounded regulation steps, kept independent of
// the lengthreg implementation so the two can cross-check each other.
IntDurations reference_bound_durations(const RealDurations& d,
                                       std::int64_t target);

struct OracleDiagnostics {
    bool pass = true;
    std::optional<std::size_t> first_divergence;
    IntDurations actual;
    IntDurations expected;
};

// Runs both routes on (d, target) and compares elementwise.
OracleDiagnostics oracle_bound_check(const RealDurations& d,
                                     std::int64_t target);

}  // namespace unitkit

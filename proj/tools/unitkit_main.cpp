// unitkit — batch toolkit for discrete-unit streams: run-length coding,
// bounded duration regulation, k-means quantization, frame scheduling,
// length/BLEU reporting, and synthetic isometry experiments.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "unitkit/errors.hpp"
#include "unitkit/harness.hpp"
#include "unitkit/io.hpp"
#include "unitkit/lengthreg.hpp"
#include "unitkit/metrics.hpp"
#include "unitkit/quantize.hpp"
#include "unitkit/schedule.hpp"
#include "unitkit/unitcore.hpp"

namespace {

using namespace unitkit;

constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;

[[noreturn]] void fail_line(std::size_t line_no, const ValidationError& e) {
    throw ValidationError(e.kind(), "line " + std::to_string(line_no) + ": " +
                                        (e.detail().empty() ? e.kind()
                                                            : e.detail()));
}

void require_aligned(std::size_t got, std::size_t want,
                     const std::string& what) {
    if (got != want) {
        throw ValidationError("LengthMismatch",
                              what + ": " + std::to_string(got) +
                                  " lines vs " + std::to_string(want));
    }
}

std::vector<double> parse_threshold_list(const std::string& csv) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t comma = csv.find(',', start);
        const std::string item =
            csv.substr(start, comma == std::string::npos ? std::string::npos
                                                         : comma - start);
        if (item.empty()) {
            throw ValidationError("InvalidArgument",
                                  "empty entry in threshold list '" + csv +
                                      "'");
        }
        try {
            std::size_t used = 0;
            const double value = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(value);
        } catch (const std::exception&) {
            throw ValidationError("InvalidArgument",
                                  "bad threshold '" + item + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) {
        throw ValidationError("InvalidArgument", "no lc thresholds given");
    }
    return out;
}

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t comma = csv.find(',', start);
        out.push_back(csv.substr(
            start,
            comma == std::string::npos ? std::string::npos : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

struct GlobalOpts {
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool quiet = false;
};

// --- quantize ---------------------------------------------------------------

void run_quantize(const GlobalOpts& g, const std::string& features_path,
                  std::int64_t k, int iters, int threads,
                  const std::string& out_codebook,
                  const std::string& out_units) {
    const FeatureMatrix x = read_feature_file(features_path);
    if (k < 1) {
        throw ValidationError("TooFewPoints", "k must be >= 1");
    }
    const KMeansResult res =
        kmeans_fit(x, static_cast<std::size_t>(k), iters, g.seed, threads);
    write_codebook_file(out_codebook, res.codebook);
    atomic_write(out_units, format_unit_lines({res.assignments}));
    if (!g.quiet) {
        std::printf("wcss %.17g\n", res.final_wcss);
    }
}

// --- dedup ------------------------------------------------------------------

void run_dedup(const std::string& units_path, const std::string& out_units,
               const std::string& out_durations) {
    const auto lines = read_unit_lines(units_path);
    std::vector<std::vector<UnitId>> unit_lines;
    std::vector<IntDurations> duration_lines;
    unit_lines.reserve(lines.size());
    duration_lines.reserve(lines.size());
    for (const auto& line : lines) {
        auto [u, d] = collapse(ContinuousUnitSeq{line});
        unit_lines.push_back(std::move(u.units));
        duration_lines.push_back(std::move(d));
    }
    atomic_write(out_units, format_unit_lines(unit_lines));
    atomic_write(out_durations, format_int_duration_lines(duration_lines));
}

// --- expand -----------------------------------------------------------------

void run_expand(const std::string& units_path,
                const std::string& durations_path, const std::string& out) {
    const auto units = read_unit_lines(units_path);
    const auto durations = read_int_duration_lines(durations_path);
    require_aligned(durations.size(), units.size(),
                    "durations vs units");
    std::vector<std::vector<UnitId>> out_lines;
    out_lines.reserve(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
        try {
            const OrigUnitSeq u = OrigUnitSeq::from_units(units[i]);
            out_lines.push_back(expand(u, durations[i]).units);
        } catch (const ValidationError& e) {
            fail_line(i + 1, e);
        }
    }
    atomic_write(out, format_unit_lines(out_lines));
}

// --- fit-durations ----------------------------------------------------------

void run_fit_durations(const std::string& units_path,
                       const std::string& durations_path,
                       const std::string& out) {
    const auto units = read_unit_lines(units_path);
    const auto durations = read_int_duration_lines(durations_path);
    require_aligned(durations.size(), units.size(), "durations vs units");
    std::vector<std::pair<OrigUnitSeq, IntDurations>> corpus;
    corpus.reserve(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
        try {
            OrigUnitSeq u = OrigUnitSeq::from_units(units[i]);
            if (durations[i].size() != u.size()) {
                throw ValidationError(
                    "LengthMismatch",
                    std::to_string(u.size()) + " units vs " +
                        std::to_string(durations[i].size()) + " durations");
            }
            for (const std::int64_t v : durations[i]) {
                if (v < 1) {
                    throw ValidationError("NonPositiveDuration",
                                          "run length " + std::to_string(v));
                }
            }
            corpus.emplace_back(std::move(u), durations[i]);
        } catch (const ValidationError& e) {
            fail_line(i + 1, e);
        }
    }
    atomic_write(out, format_duration_table(fit_duration_table(corpus)));
}

// --- regulate ---------------------------------------------------------------

void run_regulate(const std::string& units_path,
                  const std::string& durations_path,
                  const std::string& table_path,
                  const std::string& targets_path, const std::string& mode_name,
                  const std::string& out) {
    const RegulationMode mode = parse_regulation_mode(mode_name);
    const auto units = read_unit_lines(units_path);

    if (durations_path.empty() == table_path.empty()) {
        throw ValidationError(
            "InvalidArgument",
            "exactly one of --durations and --table is required");
    }
    std::vector<RealDurations> durations;
    DurationTable table;
    if (!durations_path.empty()) {
        durations = read_duration_lines(durations_path);
        require_aligned(durations.size(), units.size(), "durations vs units");
    } else {
        table = read_duration_table(table_path);
    }

    const bool needs_targets = mode != RegulationMode::Unbounded;
    std::vector<std::int64_t> targets;
    if (needs_targets) {
        if (targets_path.empty()) {
            throw ValidationError("InvalidArgument",
                                  "--targets is required for mode " +
                                      mode_name);
        }
        targets = read_length_lines(targets_path);
        require_aligned(targets.size(), units.size(), "targets vs units");
    }

    std::vector<IntDurations> out_lines;
    out_lines.reserve(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
        try {
            if (units[i].empty()) {
                throw ValidationError("EmptyInput", "empty unit sequence");
            }
            const OrigUnitSeq u = OrigUnitSeq::from_units(units[i]);
            RealDurations d;
            if (!durations_path.empty()) {
                if (durations[i].size() != u.size()) {
                    throw ValidationError(
                        "LengthMismatch",
                        std::to_string(u.size()) + " units vs " +
                            std::to_string(durations[i].size()) +
                            " durations");
                }
                d = durations[i];
            } else {
                d = predict_durations(table, u);
            }
            switch (mode) {
                case RegulationMode::Bounded:
                    out_lines.push_back(
                        bound_durations(d, targets[i]).durations);
                    break;
                case RegulationMode::EarlyStop:
                    out_lines.push_back(early_stop(d, targets[i]));
                    break;
                case RegulationMode::Unbounded: {
                    IntDurations natural;
                    natural.reserve(d.size());
                    for (const double v : d) {
                        if (!std::isfinite(v)) {
                            throw ValidationError("NonFiniteInput",
                                                  "non-finite duration");
                        }
                        natural.push_back(
                            std::max<std::int64_t>(1, round_half_away(v)));
                    }
                    out_lines.push_back(std::move(natural));
                    break;
                }
            }
        } catch (const ValidationError& e) {
            fail_line(i + 1, e);
        }
    }
    atomic_write(out, format_int_duration_lines(out_lines));
}

// --- timeline ---------------------------------------------------------------

void run_timeline(const std::string& units_path, std::int64_t n_ref,
                  const std::string& policy_name, const std::string& out) {
    const auto lines = read_unit_lines(units_path);
    const RefPolicy policy = parse_ref_policy(policy_name);
    std::string doc;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            FrameTimeline t = build_timeline(ContinuousUnitSeq{lines[i]});
            if (n_ref > 0) {
                t.ref_indices =
                    assign_reference_frames(
                        static_cast<std::int64_t>(t.video_units.size()), n_ref,
                        policy)
                        .ref_indices;
            }
            doc += timeline_to_json(t);
            doc += '\n';
        } catch (const ValidationError& e) {
            fail_line(i + 1, e);
        }
    }
    atomic_write(out, doc);
}

// --- report -----------------------------------------------------------------

void run_report(const std::string& pred_path, const std::string& ref_units_path,
                const std::string& ref_lengths_path, const std::string& lc_csv,
                const std::string& out) {
    if (ref_units_path.empty() == ref_lengths_path.empty()) {
        throw ValidationError(
            "InvalidArgument",
            "exactly one of --ref-units and --ref-lengths is required");
    }
    const auto thresholds = parse_threshold_list(lc_csv);
    const auto pred = read_unit_lines(pred_path);

    LengthPairCorpus lengths;
    lengths.reserve(pred.size());
    EvalReport report;
    if (!ref_units_path.empty()) {
        const auto ref = read_unit_lines(ref_units_path);
        require_aligned(ref.size(), pred.size(), "references vs predictions");
        for (std::size_t i = 0; i < pred.size(); ++i) {
            lengths.emplace_back(static_cast<std::int64_t>(pred[i].size()),
                                 static_cast<std::int64_t>(ref[i].size()));
        }
        report.bleu = corpus_bleu(pred, ref);
    } else {
        const auto ref = read_length_lines(ref_lengths_path);
        require_aligned(ref.size(), pred.size(), "references vs predictions");
        for (std::size_t i = 0; i < pred.size(); ++i) {
            lengths.emplace_back(static_cast<std::int64_t>(pred[i].size()),
                                 ref[i]);
        }
    }
    report.lr = length_ratio(lengths);
    for (const double k : thresholds) {
        report.lc.emplace_back(k, length_compliance(lengths, k));
    }
    atomic_write(out, format_eval_report(report) + "\n");
}

// --- simulate ---------------------------------------------------------------

void run_simulate(const GlobalOpts& g, const std::string& spec_path,
                  const std::string& modes_csv, const std::string& out) {
    SyntheticSpec spec = SyntheticSpec::from_json(read_text_file(spec_path));
    if (g.seed_given) spec.seed = g.seed;

    std::vector<RegulationMode> modes;
    std::vector<std::string> names;
    for (const auto& name : split_csv(modes_csv)) {
        modes.push_back(parse_regulation_mode(name));
        names.push_back(regulation_mode_name(modes.back()));
    }
    const auto corpus = generate_corpus(spec);
    const auto reports = run_isometry_eval(corpus, modes);

    std::string doc = "{";
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) doc += ", ";
        doc += "\"" + names[i] + "\": " + format_eval_report(reports.at(names[i]));
    }
    doc += "}\n";
    atomic_write(out, doc);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete-unit stream toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    auto* seed_opt =
        app.add_option("--seed", g.seed, "seed for all randomness")
            ->capture_default_str();
    app.add_flag("--quiet", g.quiet, "suppress informational output");

    // quantize
    auto* quantize = app.add_subcommand(
        "quantize", "fit a k-means codebook and assign unit ids");
    std::string q_features, q_out_codebook, q_out_units;
    std::int64_t q_k = 0;
    int q_iters = 100;
    int q_threads = 1;
    quantize->add_option("--features", q_features, "feature file")->required();
    quantize->add_option("--k", q_k, "number of clusters")->required();
    quantize->add_option("--iters", q_iters, "maximum Lloyd iterations")
        ->capture_default_str();
    quantize->add_option("--threads", q_threads, "assignment worker threads")
        ->capture_default_str();
    quantize->add_option("--out-codebook", q_out_codebook, "codebook output")
        ->required();
    quantize->add_option("--out-units", q_out_units, "unit text output")
        ->required();

    // dedup
    auto* dedup = app.add_subcommand(
        "dedup", "run-length collapse frame-level unit sequences");
    std::string d_units, d_out_units, d_out_durations;
    dedup->add_option("--units", d_units, "frame-level unit file")->required();
    dedup->add_option("--out-units", d_out_units, "deduplicated unit output")
        ->required();
    dedup->add_option("--out-durations", d_out_durations, "run-length output")
        ->required();

    // expand
    auto* expand_cmd = app.add_subcommand(
        "expand", "expand deduplicated units by integer durations");
    std::string e_units, e_durations, e_out;
    expand_cmd->add_option("--units", e_units, "deduplicated unit file")
        ->required();
    expand_cmd->add_option("--durations", e_durations, "integer durations")
        ->required();
    expand_cmd->add_option("--out", e_out, "frame-level unit output")
        ->required();

    // fit-durations
    auto* fit = app.add_subcommand(
        "fit-durations", "fit a mean-duration table from aligned corpora");
    std::string f_units, f_durations, f_out;
    fit->add_option("--units", f_units, "deduplicated unit file")->required();
    fit->add_option("--durations", f_durations, "integer durations")
        ->required();
    fit->add_option("--out", f_out, "duration table JSON output")->required();

    // regulate
    auto* regulate = app.add_subcommand(
        "regulate", "realize integer durations under a length budget");
    std::string r_units, r_durations, r_table, r_targets, r_out;
    std::string r_mode = "bounded";
    regulate->add_option("--units", r_units, "deduplicated unit file")
        ->required();
    regulate->add_option("--durations", r_durations, "real durations file");
    regulate->add_option("--table", r_table, "duration table JSON");
    regulate->add_option("--targets", r_targets, "target frame counts");
    regulate
        ->add_option("--mode", r_mode, "bounded, early_stop, or unbounded")
        ->capture_default_str();
    regulate->add_option("--out", r_out, "realized durations output")
        ->required();

    // timeline
    auto* timeline = app.add_subcommand(
        "timeline", "derive the dual-rate audio/video schedule");
    std::string t_units, t_out;
    std::string t_policy = "one_to_one";
    std::int64_t t_n_ref = 0;
    timeline->add_option("--units", t_units, "frame-level unit file")
        ->required();
    timeline->add_option("--n-ref", t_n_ref,
                         "reference frame count (omit to skip assignment)");
    timeline
        ->add_option("--policy", t_policy,
                     "one_to_one, wrap, or pingpong")
        ->capture_default_str();
    timeline->add_option("--out", t_out, "JSON-lines output")->required();

    // report
    auto* report = app.add_subcommand(
        "report", "score predictions against references");
    std::string p_pred, p_ref_units, p_ref_lengths, p_out;
    std::string p_lc = "5,10,20";
    report->add_option("--pred", p_pred, "predicted unit file")->required();
    report->add_option("--ref-units", p_ref_units, "reference unit file");
    report->add_option("--ref-lengths", p_ref_lengths,
                       "reference length file");
    report->add_option("--lc", p_lc, "compliance thresholds (percent)")
        ->capture_default_str();
    report->add_option("--out", p_out, "report JSON output")->required();

    // simulate
    auto* simulate = app.add_subcommand(
        "simulate", "run regulation modes over a synthetic corpus");
    std::string s_spec, s_out;
    std::string s_modes = "bounded,early_stop";
    simulate->add_option("--spec", s_spec, "synthetic corpus spec JSON")
        ->required();
    simulate->add_option("--modes", s_modes, "comma-separated modes")
        ->capture_default_str();
    simulate->add_option("--out", s_out, "per-mode report JSON output")
        ->required();

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
        g.seed_given = seed_opt->count() > 0;
        if (quantize->parsed()) {
            run_quantize(g, q_features, q_k, q_iters, q_threads,
                         q_out_codebook, q_out_units);
        } else if (dedup->parsed()) {
            run_dedup(d_units, d_out_units, d_out_durations);
        } else if (expand_cmd->parsed()) {
            run_expand(e_units, e_durations, e_out);
        } else if (fit->parsed()) {
            run_fit_durations(f_units, f_durations, f_out);
        } else if (regulate->parsed()) {
            run_regulate(r_units, r_durations, r_table, r_targets, r_mode,
                         r_out);
        } else if (timeline->parsed()) {
            run_timeline(t_units, t_n_ref, t_policy, t_out);
        } else if (report->parsed()) {
            run_report(p_pred, p_ref_units, p_ref_lengths, p_lc, p_out);
        } else if (simulate->parsed()) {
            run_simulate(g, s_spec, s_modes, s_out);
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

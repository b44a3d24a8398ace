#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "unitkit/io.hpp"
#include "unitkit/quantize.hpp"
#include "unitkit/rng.hpp"

using namespace unitkit;
namespace fs = std::filesystem;

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        dir_ = fs::temp_directory_path() /
               ("unitkit_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(dir_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(dir_, ec);
    }
    std::string path(const std::string& name) const {
        return (dir_ / name).string();
    }

private:
    fs::path dir_;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

CmdResult run_cli(const TempDir& tmp, const std::string& args) {
    const std::string out_path = tmp.path("_stdout");
    const std::string err_path = tmp.path("_stderr");
    const std::string command = std::string(UNITKIT_CLI_PATH) + " " + args +
                                " >" + out_path + " 2>" + err_path;
    const int status = std::system(command.c_str());
    CmdResult res;
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = slurp(out_path);
    res.err = slurp(err_path);
    return res;
}

FeatureMatrix blob_features() {
    FeatureMatrix x;
    x.dims = 2;
    SeededRng rng(0);
    const double centers[3][2] = {{0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}};
    for (const auto& c : centers) {
        for (int i = 0; i < 100; ++i) {
            x.data.push_back(
                static_cast<float>(c[0] + 0.02 * (rng.next_double() - 0.5)));
            x.data.push_back(
                static_cast<float>(c[1] + 0.02 * (rng.next_double() - 0.5)));
        }
    }
    x.rows = 300;
    return x;
}

}  // namespace

TEST_CASE("quantize writes a codebook and one unit line") {
    TempDir tmp;
    write_feature_file(tmp.path("x.bin"), blob_features());
    const CmdResult res = run_cli(
        tmp, "quantize --features " + tmp.path("x.bin") +
                 " --k 3 --iters 50 --out-codebook " + tmp.path("cb.bin") +
                 " --out-units " + tmp.path("units.txt"));
    CHECK(res.exit_code == 0);
    CHECK(res.out.substr(0, 5) == "wcss ");

    const auto units = read_unit_lines(tmp.path("units.txt"));
    REQUIRE(units.size() == 1);
    CHECK(units[0].size() == 300);
    const Codebook cb = read_codebook_file(tmp.path("cb.bin"));
    CHECK(cb.k == 3);
    CHECK(cb.dims == 2);
}

TEST_CASE("quantize is byte-stable across reruns and thread counts") {
    TempDir tmp;
    write_feature_file(tmp.path("x.bin"), blob_features());
    const std::string base = "quantize --features " + tmp.path("x.bin") +
                             " --k 3 --iters 50 --seed 5 ";
    const CmdResult a = run_cli(
        tmp, base + "--out-codebook " + tmp.path("cb_a.bin") +
                 " --out-units " + tmp.path("units_a.txt"));
    const CmdResult b = run_cli(
        tmp, base + "--threads 8 --out-codebook " + tmp.path("cb_b.bin") +
                 " --out-units " + tmp.path("units_b.txt"));
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(slurp(tmp.path("units_a.txt")) == slurp(tmp.path("units_b.txt")));
    CHECK(slurp(tmp.path("cb_a.bin")) == slurp(tmp.path("cb_b.bin")));
}

TEST_CASE("quantize rejects k above the point count") {
    TempDir tmp;
    write_feature_file(tmp.path("x.bin"), FeatureMatrix{2, 1, {0.0F, 1.0F}});
    const CmdResult res = run_cli(
        tmp, "quantize --features " + tmp.path("x.bin") +
                 " --k 3 --out-codebook " + tmp.path("cb.bin") +
                 " --out-units " + tmp.path("u.txt"));
    CHECK(res.exit_code == 3);
    CHECK(res.err.find("TooFewPoints") != std::string::npos);
    CHECK(!fs::exists(tmp.path("cb.bin")));
}

TEST_CASE("quantize reports missing inputs as I/O failures") {
    TempDir tmp;
    const CmdResult res = run_cli(
        tmp, "quantize --features " + tmp.path("missing.bin") +
                 " --k 2 --out-codebook " + tmp.path("cb.bin") +
                 " --out-units " + tmp.path("u.txt"));
    CHECK(res.exit_code == 2);
}

TEST_CASE("dedup and expand invert each other") {
    TempDir tmp;
    const std::string frames = "7 7 3 3 3 9\n5\n\n1 2 2 1\n";
    spit(tmp.path("frames.txt"), frames);
    CmdResult res = run_cli(tmp, "dedup --units " + tmp.path("frames.txt") +
                                     " --out-units " + tmp.path("u.txt") +
                                     " --out-durations " + tmp.path("d.txt"));
    CHECK(res.exit_code == 0);
    CHECK(slurp(tmp.path("u.txt")) == "7 3 9\n5\n\n1 2 1\n");
    CHECK(slurp(tmp.path("d.txt")) == "2 3 1\n1\n\n1 2 1\n");

    res = run_cli(tmp, "expand --units " + tmp.path("u.txt") +
                           " --durations " + tmp.path("d.txt") + " --out " +
                           tmp.path("roundtrip.txt"));
    CHECK(res.exit_code == 0);
    CHECK(slurp(tmp.path("roundtrip.txt")) == frames);
}

TEST_CASE("dedup output is idempotent byte for byte") {
    TempDir tmp;
    spit(tmp.path("frames.txt"), "4 4 4 2\n");
    run_cli(tmp, "dedup --units " + tmp.path("frames.txt") + " --out-units " +
                     tmp.path("u1.txt") + " --out-durations " +
                     tmp.path("d1.txt"));
    run_cli(tmp, "dedup --units " + tmp.path("frames.txt") + " --out-units " +
                     tmp.path("u2.txt") + " --out-durations " +
                     tmp.path("d2.txt"));
    CHECK(slurp(tmp.path("u1.txt")) == slurp(tmp.path("u2.txt")));
    CHECK(slurp(tmp.path("d1.txt")) == slurp(tmp.path("d2.txt")));
}

TEST_CASE("expand rejects adjacent duplicates with a line number") {
    TempDir tmp;
    spit(tmp.path("u.txt"), "1 2\n3 3\n");
    spit(tmp.path("d.txt"), "1 1\n1 1\n");
    const CmdResult res = run_cli(
        tmp, "expand --units " + tmp.path("u.txt") + " --durations " +
                 tmp.path("d.txt") + " --out " + tmp.path("out.txt"));
    CHECK(res.exit_code == 3);
    CHECK(res.err.find("AdjacentDuplicate") != std::string::npos);
    CHECK(res.err.find("line 2") != std::string::npos);
    CHECK(!fs::exists(tmp.path("out.txt")));
}

TEST_CASE("regulate bounded reproduces the worked example") {
    TempDir tmp;
    spit(tmp.path("u.txt"), "7 3 9 5\n");
    spit(tmp.path("d.txt"), "2.2 1.8 2.3 2.7\n");
    spit(tmp.path("t.txt"), "10\n");
    const CmdResult res = run_cli(
        tmp, "regulate --units " + tmp.path("u.txt") + " --durations " +
                 tmp.path("d.txt") + " --targets " + tmp.path("t.txt") +
                 " --mode bounded --out " + tmp.path("out.txt"));
    CHECK(res.exit_code == 0);
    CHECK(slurp(tmp.path("out.txt")) == "2 2 3 3\n");
}

TEST_CASE("regulate unbounded ignores the targets file") {
    TempDir tmp;
    spit(tmp.path("u.txt"), "7 3 9 5\n");
    spit(tmp.path("d.txt"), "2.2 1.8 2.3 2.7\n");
    const CmdResult res = run_cli(
        tmp, "regulate --units " + tmp.path("u.txt") + " --durations " +
                 tmp.path("d.txt") + " --mode unbounded --out " +
                 tmp.path("out.txt"));
    CHECK(res.exit_code == 0);
    CHECK(slurp(tmp.path("out.txt")) == "2 2 2 3\n");
}

TEST_CASE("regulate early_stop truncates at the budget") {
    TempDir tmp;
    spit(tmp.path("u.txt"), "1 2 3\n");
    spit(tmp.path("d.txt"), "2.0 3.0 4.0\n");
    spit(tmp.path("t.txt"), "7\n");
    const CmdResult res = run_cli(
        tmp, "regulate --units " + tmp.path("u.txt") + " --durations " +
                 tmp.path("d.txt") + " --targets " + tmp.path("t.txt") +
                 " --mode early_stop --out " + tmp.path("out.txt"));
    CHECK(res.exit_code == 0);
    CHECK(slurp(tmp.path("out.txt")) == "2 3 2\n");
}

TEST_CASE("regulate can predict durations from a fitted table") {
    TempDir tmp;
    spit(tmp.path("train_u.txt"), "7 3\n3 9\n");
    spit(tmp.path("train_d.txt"), "2 4\n2 1\n");
    CmdResult res = run_cli(
        tmp, "fit-durations --units " + tmp.path("train_u.txt") +
                 " --durations " + tmp.path("train_d.txt") + " --out " +
                 tmp.path("table.json"));
    CHECK(res.exit_code == 0);

    spit(tmp.path("u.txt"), "9 5\n");
    spit(tmp.path("t.txt"), "6\n");
    res = run_cli(tmp, "regulate --units " + tmp.path("u.txt") + " --table " +
                           tmp.path("table.json") + " --targets " +
                           tmp.path("t.txt") + " --mode bounded --out " +
                           tmp.path("out.txt"));
    CHECK(res.exit_code == 0);
    // Means: unit 9 -> 1.0, unit 5 unseen -> fallback 2.25; normalized to
    // [1.846, 4.154] which rounds straight to [2, 4].
    CHECK(slurp(tmp.path("out.txt")) == "2 4\n");
}

TEST_CASE("regulate rejects an empty units line") {
    TempDir tmp;
    spit(tmp.path("u.txt"), "\n");
    spit(tmp.path("d.txt"), "\n");
    spit(tmp.path("t.txt"), "5\n");
    const CmdResult res = run_cli(
        tmp, "regulate --units " + tmp.path("u.txt") + " --durations " +
                 tmp.path("d.txt") + " --targets " + tmp.path("t.txt") +
                 " --mode bounded --out " + tmp.path("out.txt"));
    CHECK(res.exit_code == 3);
    CHECK(res.err.find("EmptyInput") != std::string::npos);
    CHECK(res.err.find("line 1") != std::string::npos);
}

TEST_CASE("regulate rejects misaligned corpora") {
    TempDir tmp;
    spit(tmp.path("u.txt"), "1 2\n3 4\n");
    spit(tmp.path("d.txt"), "1.0 2.0\n");
    spit(tmp.path("t.txt"), "5\n5\n");
    const CmdResult res = run_cli(
        tmp, "regulate --units " + tmp.path("u.txt") + " --durations " +
                 tmp.path("d.txt") + " --targets " + tmp.path("t.txt") +
                 " --mode bounded --out " + tmp.path("out.txt"));
    CHECK(res.exit_code == 3);
    CHECK(res.err.find("LengthMismatch") != std::string::npos);
}

TEST_CASE("regulate requires exactly one duration source") {
    TempDir tmp;
    spit(tmp.path("u.txt"), "1 2\n");
    spit(tmp.path("t.txt"), "5\n");
    const CmdResult res = run_cli(
        tmp, "regulate --units " + tmp.path("u.txt") + " --targets " +
                 tmp.path("t.txt") + " --mode bounded --out " +
                 tmp.path("out.txt"));
    CHECK(res.exit_code == 3);
    CHECK(res.err.find("InvalidArgument") != std::string::npos);
}

TEST_CASE("timeline emits one JSON object per line") {
    TempDir tmp;
    spit(tmp.path("z.txt"), "1 1 2 2 3\n4 4\n");
    const CmdResult res = run_cli(
        tmp, "timeline --units " + tmp.path("z.txt") +
                 " --n-ref 3 --policy one_to_one --out " + tmp.path("t.json"));
    CHECK(res.exit_code == 0);
    CHECK(slurp(tmp.path("t.json")) ==
          "{\"audio_units\":[1,1,2,2,3],\"video_units\":[1,2,3],"
          "\"ref_indices\":[0,1,2]}\n"
          "{\"audio_units\":[4,4],\"video_units\":[4],"
          "\"ref_indices\":[0]}\n");
}

TEST_CASE("timeline without references leaves ref_indices empty") {
    TempDir tmp;
    spit(tmp.path("z.txt"), "9\n");
    const CmdResult res = run_cli(tmp, "timeline --units " + tmp.path("z.txt") +
                                           " --out " + tmp.path("t.json"));
    CHECK(res.exit_code == 0);
    CHECK(slurp(tmp.path("t.json")) ==
          "{\"audio_units\":[9],\"video_units\":[9],\"ref_indices\":[]}\n");
}

TEST_CASE("timeline surfaces isometry violations with line numbers") {
    TempDir tmp;
    spit(tmp.path("z.txt"), "1 1 2 2 3 3 4 4\n");
    const CmdResult res = run_cli(
        tmp, "timeline --units " + tmp.path("z.txt") +
                 " --n-ref 3 --policy one_to_one --out " + tmp.path("t.json"));
    CHECK(res.exit_code == 3);
    CHECK(res.err.find("NotIsometric") != std::string::npos);
    CHECK(res.err.find("line 1") != std::string::npos);
}

TEST_CASE("report on a perfect corpus pins the JSON bytes") {
    TempDir tmp;
    spit(tmp.path("pred.txt"), "1 2 3 4 5\n6 7 8 9\n");
    const CmdResult res = run_cli(
        tmp, "report --pred " + tmp.path("pred.txt") + " --ref-units " +
                 tmp.path("pred.txt") + " --out " + tmp.path("report.json"));
    CHECK(res.exit_code == 0);
    CHECK(slurp(tmp.path("report.json")) ==
          "{\"lr\": 1.000, \"lc\": {\"5\": 100.00, \"10\": 100.00, "
          "\"20\": 100.00}, \"bleu\": 100.00, \"repeats\": null}\n");
}

TEST_CASE("report against reference lengths skips BLEU") {
    TempDir tmp;
    spit(tmp.path("pred.txt"), "1 2 3\n");
    spit(tmp.path("lens.txt"), "3\n");
    const CmdResult res = run_cli(
        tmp, "report --pred " + tmp.path("pred.txt") + " --ref-lengths " +
                 tmp.path("lens.txt") + " --out " + tmp.path("report.json"));
    CHECK(res.exit_code == 0);
    CHECK(slurp(tmp.path("report.json")) ==
          "{\"lr\": 1.000, \"lc\": {\"5\": 100.00, \"10\": 100.00, "
          "\"20\": 100.00}, \"bleu\": null, \"repeats\": null}\n");
}

TEST_CASE("report accepts custom compliance thresholds") {
    TempDir tmp;
    spit(tmp.path("pred.txt"), "1 2 3 4 5 6 7 8 9\n");
    spit(tmp.path("lens.txt"), "10\n");
    const CmdResult res = run_cli(
        tmp, "report --pred " + tmp.path("pred.txt") + " --ref-lengths " +
                 tmp.path("lens.txt") + " --lc 5,10 --out " +
                 tmp.path("report.json"));
    CHECK(res.exit_code == 0);
    CHECK(slurp(tmp.path("report.json")) ==
          "{\"lr\": 0.900, \"lc\": {\"5\": 0.00, \"10\": 100.00}, "
          "\"bleu\": null, \"repeats\": null}\n");
}

TEST_CASE("report rejects misaligned corpora") {
    TempDir tmp;
    spit(tmp.path("pred.txt"), "1 2\n3 4\n");
    spit(tmp.path("ref.txt"), "1 2\n");
    const CmdResult res = run_cli(
        tmp, "report --pred " + tmp.path("pred.txt") + " --ref-units " +
                 tmp.path("ref.txt") + " --out " + tmp.path("report.json"));
    CHECK(res.exit_code == 3);
    CHECK(res.err.find("LengthMismatch") != std::string::npos);
}

TEST_CASE("bounded regulation scores perfectly against its own targets") {
    TempDir tmp;
    spit(tmp.path("u.txt"), "7 3 9 5\n1 2\n8 1 4\n");
    spit(tmp.path("d.txt"), "2.2 1.8 2.3 2.7\n1.0 4.0\n0.5 0.5 0.5\n");
    spit(tmp.path("t.txt"), "10\n7\n5\n");
    CmdResult res = run_cli(
        tmp, "regulate --units " + tmp.path("u.txt") + " --durations " +
                 tmp.path("d.txt") + " --targets " + tmp.path("t.txt") +
                 " --mode bounded --out " + tmp.path("real.txt"));
    REQUIRE(res.exit_code == 0);

    res = run_cli(tmp, "expand --units " + tmp.path("u.txt") +
                           " --durations " + tmp.path("real.txt") + " --out " +
                           tmp.path("frames.txt"));
    REQUIRE(res.exit_code == 0);

    res = run_cli(tmp, "report --pred " + tmp.path("frames.txt") +
                           " --ref-lengths " + tmp.path("t.txt") + " --out " +
                           tmp.path("report.json"));
    CHECK(res.exit_code == 0);
    const std::string report = slurp(tmp.path("report.json"));
    CHECK(report.find("\"lr\": 1.000") != std::string::npos);
    CHECK(report.find("\"5\": 100.00") != std::string::npos);
    CHECK(report.find("\"10\": 100.00") != std::string::npos);
    CHECK(report.find("\"20\": 100.00") != std::string::npos);
}

TEST_CASE("simulate writes one report per requested mode") {
    TempDir tmp;
    spit(tmp.path("spec.json"),
         R"({"n_sequences": 50, "vocab_size": 20, "mean_length": 8,
             "geometric_p": 0.5, "jitter_percent": 20, "seed": 4})");
    const CmdResult res = run_cli(
        tmp, "simulate --spec " + tmp.path("spec.json") +
                 " --modes bounded,early_stop --out " + tmp.path("sim.json"));
    CHECK(res.exit_code == 0);
    const std::string sim = slurp(tmp.path("sim.json"));
    CHECK(sim.find("\"bounded\": {\"lr\": 1.000") != std::string::npos);
    CHECK(sim.find("\"early_stop\": {\"lr\": ") != std::string::npos);
    CHECK(sim.find("\"repeats\": ") != std::string::npos);

    const CmdResult again = run_cli(
        tmp, "simulate --spec " + tmp.path("spec.json") +
                 " --modes bounded,early_stop --out " + tmp.path("sim2.json"));
    CHECK(again.exit_code == 0);
    CHECK(slurp(tmp.path("sim2.json")) == sim);
}

TEST_CASE("simulate honors a seed override") {
    TempDir tmp;
    spit(tmp.path("spec.json"),
         R"({"n_sequences": 50, "vocab_size": 20, "mean_length": 8,
             "geometric_p": 0.5, "jitter_percent": 20, "seed": 4})");
    const CmdResult a = run_cli(
        tmp, "simulate --spec " + tmp.path("spec.json") +
                 " --modes early_stop --out " + tmp.path("a.json"));
    const CmdResult b = run_cli(
        tmp, "--seed 999 simulate --spec " + tmp.path("spec.json") +
                 " --modes early_stop --out " + tmp.path("b.json"));
    const CmdResult c = run_cli(
        tmp, "simulate --seed 999 --spec " + tmp.path("spec.json") +
                 " --modes early_stop --out " + tmp.path("c.json"));
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    CHECK(c.exit_code == 0);
    CHECK(slurp(tmp.path("b.json")) == slurp(tmp.path("c.json")));
}

TEST_CASE("simulate rejects unknown modes") {
    TempDir tmp;
    spit(tmp.path("spec.json"),
         R"({"n_sequences": 5, "vocab_size": 4, "mean_length": 3,
             "geometric_p": 0.5, "jitter_percent": 0})");
    const CmdResult res = run_cli(
        tmp, "simulate --spec " + tmp.path("spec.json") +
                 " --modes turbo --out " + tmp.path("sim.json"));
    CHECK(res.exit_code == 3);
    CHECK(res.err.find("InvalidArgument") != std::string::npos);
}

TEST_CASE("unwritable output paths exit with the I/O code") {
    TempDir tmp;
    spit(tmp.path("z.txt"), "1 2\n");
    const CmdResult res = run_cli(
        tmp, "dedup --units " + tmp.path("z.txt") +
                 " --out-units /nonexistent_dir_unitkit/u.txt"
                 " --out-durations /nonexistent_dir_unitkit/d.txt");
    CHECK(res.exit_code == 2);
}

#include "synthetic.hpp"

#include "iqa/diagnostics.hpp"
#include "iqa/harness/commands.hpp"
#include "iqa/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct WarningCapture {
    std::vector<std::string> messages;
    iqa::WarningHandler previous;
    WarningCapture() {
        previous = iqa::set_warning_handler([this](const std::string& m) { messages.push_back(m); });
    }
    ~WarningCapture() { iqa::set_warning_handler(previous); }
    bool saw(const std::string& needle) const {
        return std::any_of(messages.begin(), messages.end(),
                           [&](const std::string& m) { return m.find(needle) != std::string::npos; });
    }
};

// One corpus shared by the tests in this file.
const synth::Corpus& corpus() {
    static const synth::Corpus c = [] {
        synth::CorpusSpec spec;
        spec.n_clean = 4;
        spec.noise_hu = {20.0, 80.0};
        return synth::make_corpus(synth::scratch_dir("harness"), spec);
    }();
    return c;
}

iqa::MetricTable toy_table(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    iqa::MetricTable t;
    t.metrics = {{"MSE", iqa::MetricClass::Pixel},      {"SSIM", iqa::MetricClass::Pixel},
                 {"VIF", iqa::MetricClass::Perceptual}, {"FID", iqa::MetricClass::Distribution},
                 {"SNR", iqa::MetricClass::NoReference}, {"NIQE", iqa::MetricClass::NoReference}};
    t.values.resize(n, 6);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = g(rng), b = g(rng), c = g(rng);
        t.values.row(i) << a + 0.1 * g(rng), -a + 0.3 * g(rng), b, a + 0.2 * g(rng), b + 0.5 * c, c;
        char id[16];
        std::snprintf(id, sizeof id, "img%03ld", static_cast<long>(i));
        t.image_ids.push_back(id);
        t.patient_ids.push_back("P" + std::to_string(i % 5));
    }
    return t;
}

}  // namespace

TEST_CASE("config overlays partial documents and round-trips") {
    const iqa::Config d;
    const auto back = iqa::parse_config(iqa::config_to_json(d));
    CHECK(iqa::config_to_json(back) == iqa::config_to_json(d));

    const auto c = iqa::parse_config(R"({"seed": 9, "ssim": {"k1": 0.02}, "tree": {"max_depth": null},
                                         "raps": {"embedding": "linear"}, "strength_edges": [0.2, 0.5, 0.7]})");
    CHECK(c.seed == 9);
    CHECK(c.ssim.k1 == 0.02);
    CHECK(c.ssim.k2 == d.ssim.k2);
    CHECK(c.tree.max_depth == iqa::TreeParams::unlimited);
    CHECK(c.raps_embedding == iqa::CurveEmbedding::LinearPower);
    CHECK(c.edges.moderate == 0.5);
    CHECK(iqa::config_to_json(iqa::parse_config(iqa::config_to_json(c))) == iqa::config_to_json(c));

    // overlays stack: a second document only touches its own keys
    const auto c2 = iqa::parse_config(R"({"cv": {"folds": 4}})", c);
    CHECK(c2.seed == 9);
    CHECK(c2.cv_folds == 4);

    CHECK_THROWS_AS(iqa::parse_config(R"({"sede": 1})"), std::runtime_error);
    CHECK_THROWS_AS(iqa::parse_config(R"({"ssim": {"radius": 5, "extra": 1}})"), std::runtime_error);
    CHECK_THROWS_AS(iqa::parse_config(R"({"cv": {"folds": 1}})"), std::runtime_error);
    CHECK_THROWS_AS(iqa::parse_config(R"({"strength_edges": [0.5, 0.3, 0.8]})"), std::runtime_error);
    CHECK_THROWS_AS(iqa::parse_config(R"({"preprocess": {"window_width": 0}})"), std::runtime_error);
    CHECK_THROWS_AS(iqa::parse_config("{not json"), std::runtime_error);
    CHECK_THROWS_AS(iqa::parse_config(R"({"seed": "nine"})"), std::runtime_error);
}

TEST_CASE("manifest resolves relative paths and rejects bad entries") {
    const auto& c = corpus();
    REQUIRE(c.manifest.entries.size() == 8);
    for (const auto& e : c.manifest.entries) {
        CHECK(fs::exists(e.denoised));
        CHECK(e.reference.has_value());
        CHECK(!e.patient_id.empty());
    }
    CHECK(c.manifest.inception.has_value());
    CHECK(c.manifest.niqe_model.has_value());

    const auto dir = c.dir;
    const std::string one = R"({"image_id": "a", "low_dose": "img/s0_low.iqai", "denoised": "img/s0_low.iqai"})";
    CHECK_NOTHROW(iqa::parse_manifest("{\"entries\": [" + one + "]}", dir));
    CHECK_THROWS_AS(iqa::parse_manifest("{\"entries\": [" + one + "," + one + "]}", dir), std::runtime_error);
    CHECK_THROWS_AS(iqa::parse_manifest(R"({"entries": [{"image_id": "a", "low_dose": "nope.iqai",
                                                         "denoised": "img/s0_low.iqai"}]})",
                                        dir),
                    std::runtime_error);
    CHECK_THROWS_AS(iqa::parse_manifest(R"({"models": {"niqe": "missing.json"}})", dir), std::runtime_error);
    CHECK_THROWS_AS(iqa::parse_manifest(R"({"entries": [], "bogus": 1})", dir), std::runtime_error);

    // serialized manifests hold absolute paths and parse anywhere
    const auto again = iqa::parse_manifest(iqa::manifest_to_json(c.manifest), "/");
    CHECK(again.entries.size() == c.manifest.entries.size());
    CHECK(again.entries[3].denoised == c.manifest.entries[3].denoised);
}

TEST_CASE("metric selection") {
    CHECK(iqa::parse_metric_selection("all").size() == 15);
    CHECK(iqa::parse_metric_selection("unpaired") ==
          std::vector<std::string>{"FID", "KID", "IS", "SNR", "BRISQUE", "RAPS-FD", "PaQ-2-PiQ", "NIQE"});
    CHECK(iqa::parse_metric_selection("paired").size() == 7);
    CHECK(iqa::parse_metric_selection(" ssim, mse ,raps-fd") == std::vector<std::string>{"MSE", "SSIM", "RAPS-FD"});
    CHECK_THROWS_AS(iqa::parse_metric_selection("MSE,PSNRR"), std::invalid_argument);
    CHECK_THROWS_AS(iqa::parse_metric_selection(" , "), std::invalid_argument);
}

TEST_CASE("preprocess windows HU rasters and leaves normalized ones alone") {
    iqa::Config cfg;
    cfg.resize = 8;
    const auto hu = iqa::Image::constant(16, 16, -500.0, iqa::Domain::HU);
    const auto out = iqa::preprocess(hu, cfg);
    CHECK(out.domain() == iqa::Domain::Normalized);
    CHECK(out.width() == 8);
    CHECK(out.values().abs().maxCoeff() < 1e-12);  // window center maps to 0

    cfg.resize_first = true;
    CHECK(iqa::preprocess(hu, cfg).values().isApprox(out.values()));

    const auto norm = iqa::Image::constant(8, 8, 0.25);
    CHECK(iqa::preprocess(norm, cfg).values().isApprox(norm.values()));
    cfg.resize = 0;
    CHECK(iqa::preprocess(hu, cfg).width() == 16);
}

TEST_CASE("score: three triplets, five metrics, no missing cells") {
    const auto& c = corpus();
    iqa::Manifest m = c.manifest;
    m.entries.resize(3);
    const std::vector<std::string> metrics = {"MSE", "PSNR", "SSIM", "RAPS-FD", "SNR"};
    const auto out_dir = c.dir / "score3";
    const auto res = iqa::run_score(m, metrics, c.config, out_dir);
    CHECK(res.table.rows() == 3);
    CHECK(res.table.cols() == 5);
    CHECK_FALSE(res.partial());
    CHECK(res.table.missing_reasons.empty());
    CHECK(res.table.values.allFinite());
    CHECK(std::is_sorted(res.table.image_ids.begin(), res.table.image_ids.end()));

    const auto back = iqa::read_metric_table_csv(out_dir / "scores.csv");
    CHECK(back.image_ids == res.table.image_ids);
    CHECK(back.values == res.table.values);
    const auto csv = synth::slurp(out_dir / "scores.csv");
    CHECK(csv.rfind("# schema: iqa.metric_table.v1\n# config: {", 0) == 0);
    CHECK(csv.find("\"seed\":" + std::to_string(c.config.seed)) != std::string::npos);
    CHECK(synth::slurp(out_dir / "scores.json").find("iqa.metric_table.v1") != std::string::npos);
}

TEST_CASE("score: every metric on the synthetic corpus") {
    const auto& c = corpus();
    const auto table = iqa::score_corpus(c.manifest, iqa::parse_metric_selection("all"), c.config);
    CHECK(table.cols() == 15);
    CHECK(table.rows() == 8);
    for (const auto& [cell, why] : table.missing_reasons) MESSAGE(table.metrics[cell.second].name << ": " << why);
    CHECK(table.missing_reasons.empty());
    CHECK(table.values.allFinite());
    // sanity of a few scales
    const auto col = [&](const char* n) { return table.values.col(table.column(n)); };
    CHECK((col("SSIM").array() <= 1.0).all());
    CHECK((col("IS").array() >= 1.0 - 1e-12).all());
    CHECK((col("IS").array() <= 4.0 + 1e-12).all());
    CHECK((col("MSE").array() > 0.0).all());
    CHECK((col("LPIPS1").array() > 0.0).all());
}

TEST_CASE("score: a missing reference masks only the paired cells") {
    const auto& c = corpus();
    iqa::Manifest m = c.manifest;
    m.entries.resize(3);
    m.entries[1].reference.reset();
    const auto res = iqa::run_score(m, {"MSE", "SSIM", "LPIPS2", "SNR", "IS"}, c.config, c.dir / "noref");
    CHECK(res.partial());
    const auto row = std::find(res.table.image_ids.begin(), res.table.image_ids.end(), m.entries[1].image_id) -
                     res.table.image_ids.begin();
    for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 5; ++j) {
            const bool paired = j < 3;
            CHECK(std::isnan(res.table.values(i, j)) == (paired && i == row));
        }
    REQUIRE(res.table.missing_reasons.size() == 3);
    CHECK(res.table.missing_reasons.at({row, 0}).find("reference") != std::string::npos);
    CHECK(synth::slurp(c.dir / "noref" / "scores.json").find("no reference image") != std::string::npos);
}

TEST_CASE("score: empty manifest gives an empty table and a warning") {
    WarningCapture w;
    const auto t = iqa::score_corpus(iqa::Manifest{}, {"MSE", "SNR"}, iqa::Config{});
    CHECK(t.rows() == 0);
    CHECK(t.cols() == 2);
    CHECK(w.saw("empty manifest"));
}

TEST_CASE("score: unpaired metrics never read reference files") {
    const auto& c = corpus();
    std::set<fs::path> references;
    for (const auto& e : c.manifest.entries) references.insert(*e.reference);

    synth::RecordingLoader loader;
    const auto t = iqa::score_corpus(c.manifest, iqa::parse_metric_selection("unpaired"), c.config, 2, loader);
    CHECK(t.values.allFinite());
    CHECK_FALSE(loader.seen->empty());
    for (const auto& p : *loader.seen) CHECK(references.count(p) == 0);

    // references pointing nowhere do not matter either
    iqa::Manifest m = c.manifest;
    for (auto& e : m.entries) e.reference = c.dir / "does_not_exist.iqai";
    const auto t2 = iqa::score_corpus(m, iqa::parse_metric_selection("unpaired"), c.config, 1, loader);
    CHECK(t2.values == t.values);

    // the paired side does read them, which keeps the recorder honest
    synth::RecordingLoader paired;
    iqa::score_corpus(c.manifest, {"MSE"}, c.config, 1, paired);
    CHECK(std::count_if(paired.seen->begin(), paired.seen->end(),
                        [&](const fs::path& p) { return references.count(p) > 0; }) == 8);
}

TEST_CASE("score: missing resources are fatal") {
    const auto& c = corpus();
    iqa::Manifest m = c.manifest;
    m.brisque_model.reset();
    m.inception.reset();
    m.lpips3.reset();
    m.paq2piq_scores.reset();
    m.niqe_model.reset();
    for (const char* metric : {"BRISQUE", "FID", "KID", "IS", "LPIPS3", "PaQ-2-PiQ", "NIQE"})
        CHECK_THROWS_AS(iqa::score_corpus(m, {metric}, c.config), std::runtime_error);
    CHECK_NOTHROW(iqa::score_corpus(m, {"LPIPS1"}, c.config));

    iqa::Manifest bad = c.manifest;
    bad.entries[0].denoised = c.dir / "gone.iqai";
    CHECK_THROWS_AS(iqa::score_corpus(bad, {"SNR"}, c.config), std::runtime_error);
}

TEST_CASE("score: output is byte-identical across runs and worker counts") {
    const auto& c = corpus();
    const auto metrics = iqa::parse_metric_selection("all");
    iqa::run_score(c.manifest, metrics, c.config, c.dir / "det1", 1);
    iqa::Manifest reversed = c.manifest;
    std::reverse(reversed.entries.begin(), reversed.entries.end());
    iqa::run_score(reversed, metrics, c.config, c.dir / "det3", 3);
    for (const char* f : {"scores.csv", "scores.json"})
        CHECK(synth::slurp(c.dir / "det1" / f) == synth::slurp(c.dir / "det3" / f));
}

TEST_CASE("correlate: file outputs match the in-process matrices") {
    const auto t = toy_table(40, 3);
    const auto dir = synth::scratch_dir("correlate");
    const iqa::Config cfg;
    const auto files = iqa::run_correlate(t, cfg, dir);
    CHECK(files.size() == 9);
    for (const char* f : {"correlation_unpaired.csv", "correlation_paired.json", "group_average.txt"})
        CHECK(fs::exists(dir / f));

    const auto direct = iqa::correlation_matrix(t, {"FID", "SNR", "NIQE"});
    CHECK(synth::slurp(dir / "correlation_unpaired.csv") == iqa::correlation_to_csv(direct, iqa::config_to_json(cfg)));
    // every cell agrees with a standalone pair call
    std::istringstream csv(synth::slurp(dir / "correlation_unpaired.csv"));
    std::string line;
    std::vector<std::vector<std::string>> cells;
    while (std::getline(csv, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("metric,", 0) == 0) continue;
        std::vector<std::string> row;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) row.push_back(f);
        cells.push_back(row);
    }
    REQUIRE(cells.size() == 3);
    const std::vector<std::string> names = {"FID", "SNR", "NIQE"};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const auto& cell = cells[i][j + 2];
            if (i == j) {
                CHECK(cell == "-");
                continue;
            }
            const auto u = t.values.col(t.column(names[i])), v = t.values.col(t.column(names[j]));
            const std::span<const double> su(u.data(), u.size()), sv(v.data(), v.size());
            const double expect = i > j ? std::abs(iqa::plcc(su, sv)) : std::abs(iqa::srocc(su, sv));
            CHECK(cell.substr(0, 2) == (i > j ? "L:" : "U:"));
            CHECK(std::stod(cell.substr(2)) == doctest::Approx(expect).epsilon(1e-12));
        }

    // identical inputs, identical bytes
    const auto dir2 = synth::scratch_dir("correlate2");
    iqa::run_correlate(t, cfg, dir2);
    for (const auto& f : files) CHECK(synth::slurp(f) == synth::slurp(dir2 / f.filename()));
}

TEST_CASE("correlate: constant columns are excluded with a warning") {
    auto t = toy_table(20, 4);
    t.values.col(t.column("SNR")).setConstant(3.0);
    WarningCapture w;
    const auto dir = synth::scratch_dir("constant");
    iqa::run_correlate(t, iqa::Config{}, dir);
    CHECK(w.saw("SNR excluded"));
    const auto csv = synth::slurp(dir / "correlation_unpaired.csv");
    CHECK(csv.find("SNR") == std::string::npos);
    CHECK(csv.find("NIQE") != std::string::npos);
    CHECK(synth::slurp(dir / "group_average.csv").find("SNR") == std::string::npos);
}

TEST_CASE("correlate: too few rows or usable metrics") {
    const iqa::Config cfg;
    CHECK_THROWS_AS(iqa::run_correlate(toy_table(2, 1), cfg, synth::scratch_dir("few")), std::invalid_argument);

    auto t = toy_table(10, 5);
    t.values.col(t.column("MSE")).setConstant(1.0);
    t.values.col(t.column("VIF")).setConstant(1.0);
    WarningCapture w;
    const auto dir = synth::scratch_dir("onepaired");
    const auto files = iqa::run_correlate(t, cfg, dir);
    CHECK(w.saw("correlation_paired skipped"));
    CHECK_FALSE(fs::exists(dir / "correlation_paired.csv"));
    CHECK(fs::exists(dir / "group_average.csv"));
    CHECK(files.size() == 6);
}

TEST_CASE("importance: end-to-end through files") {
    // label MSE equals the FID column exactly
    auto t = toy_table(60, 6);
    t.values.col(t.column("MSE")) = t.values.col(t.column("FID"));
    iqa::Config cfg;
    const auto dir = synth::scratch_dir("importance");
    const auto out = iqa::run_importance(t, cfg, dir);
    REQUIRE(out.reports.size() == 3);
    const auto& mse = out.reports[0];
    CHECK(mse.label == "MSE");
    CHECK(mse.features[mse.ranking[0]] == "FID");
    CHECK(mse.importance(mse.ranking[0]) > 0.9);
    CHECK(mse.mean_nrmse < 0.05);
    for (const char* f : {"importance.json", "importance.csv", "importance.svg"}) CHECK(fs::exists(dir / f));
    const auto svg = synth::slurp(dir / "importance.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("data-label=\"VIF\"") != std::string::npos);

    // a different seed reshuffles the folds, the perfect feature stays first
    cfg.seed = 12345;
    const auto other = iqa::run_importance(t, cfg, synth::scratch_dir("importance_seed"));
    CHECK(other.reports[0].features[other.reports[0].ranking[0]] == "FID");
    CHECK(other.reports[0].fold_nrmse != mse.fold_nrmse);

    // deterministic bytes for a fixed seed
    cfg.seed = 0;
    const auto dir2 = synth::scratch_dir("importance_again");
    iqa::run_importance(t, cfg, dir2);
    for (const char* f : {"importance.json", "importance.csv", "importance.svg"})
        CHECK(synth::slurp(dir / f) == synth::slurp(dir2 / f));
}

TEST_CASE("importance: a single paired label gives a single clove") {
    auto t = toy_table(30, 8);
    t.values.col(t.column("SSIM")).setConstant(0.5);
    t.values.col(t.column("VIF")).setConstant(0.5);
    WarningCapture w;
    const auto dir = synth::scratch_dir("clove");
    const auto out = iqa::run_importance(t, iqa::Config{}, dir);
    REQUIRE(out.reports.size() == 1);
    const auto svg = synth::slurp(dir / "importance.svg");
    std::size_t cloves = 0;
    for (auto at = svg.find("class=\"clove\""); at != std::string::npos; at = svg.find("class=\"clove\"", at + 1))
        ++cloves;
    CHECK(cloves == 1);
}

TEST_CASE("importance: folds beyond the sample count are an error") {
    iqa::Config cfg;
    cfg.cv_folds = 11;
    CHECK_THROWS(iqa::run_importance(toy_table(10, 9), cfg, synth::scratch_dir("kbig")));
    cfg.cv_folds = 10;
    const auto out = iqa::run_importance(toy_table(10, 9), cfg, synth::scratch_dir("kloo"));
    CHECK(out.reports[0].fold_nrmse.size() == 10);

    auto t = toy_table(10, 9);
    t.metrics.erase(t.metrics.begin() + 3, t.metrics.end());
    t.values.conservativeResize(Eigen::NoChange, 3);
    CHECK_THROWS_AS(iqa::run_importance(t, iqa::Config{}, synth::scratch_dir("nofeat")), std::invalid_argument);
}

TEST_CASE("bench: repetitions, warmup and the report shape") {
    const auto& c = corpus();
    const auto report = iqa::run_bench(c.manifest, {"MSE", "SSIM", "SNR"}, c.config, 10, 1);
    REQUIRE(report.metrics.size() == 3);
    for (const auto& m : report.metrics) {
        CHECK(m.seconds_per_slice.size() == 10);
        CHECK(std::isfinite(m.mean));
        CHECK(m.mean > 0.0);
        CHECK(m.std >= 0.0);
        CHECK(m.slices == 8);
    }
    const auto text = iqa::timing_to_text(report);
    CHECK(text.find("Average computational time per slice") != std::string::npos);
    CHECK(text.find("SSIM") != std::string::npos);
    CHECK(text.find("\xC2\xB1") != std::string::npos);
    const auto files = iqa::write_timing(report, c.config, c.dir / "bench");
    CHECK(synth::slurp(files[0]).find("MSE,pixel,") != std::string::npos);

    CHECK_THROWS_AS(iqa::run_bench(c.manifest, {"MSE"}, c.config, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(iqa::run_bench(c.manifest, {"MSE"}, c.config, 5, 0), std::invalid_argument);
    CHECK_THROWS_AS(iqa::run_bench(iqa::Manifest{}, {"MSE"}, c.config, 5, 1), std::invalid_argument);
}

TEST_CASE("bench: two runs agree within 50 percent") {
    const auto& c = corpus();
    const auto a = iqa::run_bench(c.manifest, {"SSIM"}, c.config, 10, 2);
    const auto b = iqa::run_bench(c.manifest, {"SSIM"}, c.config, 10, 2);
    const double ratio = a.metrics[0].mean / b.metrics[0].mean;
    CHECK(ratio > 0.5);
    CHECK(ratio < 1.5);
}

TEST_CASE("preprocess command writes IQAI files and a usable manifest") {
    const auto& c = corpus();
    iqa::Manifest m = c.manifest;
    m.entries.resize(2);
    const auto path = iqa::run_preprocess(m, c.config, c.dir / "pre");
    const auto pre = iqa::load_manifest(path);
    REQUIRE(pre.entries.size() == 2);
    const auto img = iqa::load_image(pre.entries[0].denoised);
    CHECK(img.domain() == iqa::Domain::Normalized);
    CHECK(img.width() == c.config.resize);
    // scoring the preprocessed copy gives the same numbers up to float storage
    const auto a = iqa::score_corpus(m, {"MSE", "SSIM"}, c.config);
    const auto b = iqa::score_corpus(pre, {"MSE", "SSIM"}, c.config);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("cli exit codes") {
    const auto& c = corpus();
    const std::string cli = IQA_CLI_PATH;
    auto run = [&](const std::string& args) {
        const int status = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    const auto out = (c.dir / "cli").string();
    CHECK(run("score --manifest " + c.manifest_path.string() + " --metrics MSE,SNR --out-dir " + out) == 0);
    CHECK(fs::exists(c.dir / "cli" / "scores.csv"));

    // one entry without a reference: partial
    auto j = nlohmann::json::parse(synth::slurp(c.manifest_path));
    j["entries"][0].erase("reference");
    const auto partial = c.dir / "partial_manifest.json";
    std::ofstream(partial) << j.dump();
    CHECK(run("score --manifest " + partial.string() + " --metrics MSE,SNR --out-dir " + out + "_p") == 2);

    CHECK(run("score --manifest " + (c.dir / "missing.json").string()) == 1);
    CHECK(run("score --manifest " + c.manifest_path.string() + " --metrics NOPE --out-dir " + out) == 1);
    CHECK(run("bench --manifest " + c.manifest_path.string() + " --metrics MSE --reps 3 --out-dir " + out) == 1);
    CHECK(run("frobnicate") == 1);

    const auto cfg_path = c.dir / "cli_config.json";
    std::ofstream(cfg_path) << R"({"preprocess": {"resize": 96}, "nss": {"niqe_patch": 16, "niqe_sharpness": 0.5}, "cv": {"folds": 4}})";
    const std::string cfg = " --config " + cfg_path.string();
    CHECK(run("report --manifest " + c.manifest_path.string() + cfg +
              " --metrics MSE,SSIM,VIF,SNR,IS,NIQE --seed 3 --out-dir " + out + "_r") == 0);
    for (const char* f : {"scores.csv", "correlation_unpaired.csv", "group_average.csv", "importance.svg"})
        CHECK(fs::exists(c.dir / "cli_r" / f));
    const auto scores = synth::slurp(c.dir / "cli_r" / "scores.csv");
    CHECK(scores.find("\"seed\":3") != std::string::npos);
    CHECK(run("correlate --table " + (c.dir / "cli_r" / "scores.csv").string() + cfg + " --seed 3 --out-dir " + out +
              "_c") == 0);
    CHECK(synth::slurp(c.dir / "cli_c" / "correlation_unpaired.csv") ==
          synth::slurp(c.dir / "cli_r" / "correlation_unpaired.csv"));
}

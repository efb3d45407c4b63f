// iqa: score, correlate and analyze CT denoising quality metrics.

#include "iqa/harness/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    fs::path out_dir = "iqa_out";
};

struct Analysis {
    std::optional<int> folds;
    bool by_patient = false;
    bool refit_final = false;
};

iqa::Config make_config(const Common& c, const Analysis* a = nullptr) {
    iqa::Config cfg = c.config_path.empty() ? iqa::Config{} : iqa::load_config(c.config_path);
    if (c.seed) cfg.seed = *c.seed;
    if (a) {
        if (a->folds) cfg.cv_folds = *a->folds;
        if (a->by_patient) cfg.by_patient = true;
        if (a->refit_final) cfg.refit_final = true;
    }
    // round trip through the parser so flag values get the same validation
    return iqa::parse_config(iqa::config_to_json(cfg));
}

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "Seed for fold assignment and KID subsets");
    cmd->add_option("--out-dir", c.out_dir, "Output directory")->capture_default_str();
}

void add_analysis(CLI::App* cmd, Analysis& a) {
    cmd->add_option("--folds,-k", a.folds, "Cross-validation folds");
    cmd->add_flag("--by-patient", a.by_patient, "Keep each patient's images in one fold");
    cmd->add_flag("--refit-final", a.refit_final, "Importances from one tree fitted on all rows");
}

void print_written(const std::vector<fs::path>& files) {
    for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CT denoising image quality assessment toolkit"};
    app.require_subcommand(1);

    Common common;
    Analysis analysis;
    std::string manifest_path, table_path, metrics = "all";
    int jobs = 1, reps = 10, warmup = 1;

    auto* score = app.add_subcommand("score", "Score every manifest entry for the selected metrics");
    score->add_option("--manifest", manifest_path, "Corpus manifest JSON")->required()->check(CLI::ExistingFile);
    score->add_option("--metrics", metrics, "Comma list of metrics, or all / paired / unpaired")
        ->capture_default_str();
    score->add_option("--jobs,-j", jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    add_common(score, common);

    auto* correlate = app.add_subcommand("correlate", "PLCC/SROCC matrices and class averages of a score table");
    correlate->add_option("--table", table_path, "Score table CSV")->required()->check(CLI::ExistingFile);
    add_common(correlate, common);

    auto* importance = app.add_subcommand("importance", "Cross-validated tree importance of unpaired metrics");
    importance->add_option("--table", table_path, "Score table CSV")->required()->check(CLI::ExistingFile);
    add_common(importance, common);
    add_analysis(importance, analysis);

    auto* bench = app.add_subcommand("bench", "Per-slice timing of each metric");
    bench->add_option("--manifest", manifest_path, "Corpus manifest JSON")->required()->check(CLI::ExistingFile);
    bench->add_option("--metrics", metrics, "Comma list of metrics, or all / paired / unpaired")
        ->capture_default_str();
    bench->add_option("--reps", reps, "Timed repetitions (>= 5)")->capture_default_str();
    bench->add_option("--warmup", warmup, "Discarded warmup passes (>= 1)")->capture_default_str();
    add_common(bench, common);

    auto* report = app.add_subcommand("report", "score (with --manifest) then correlate and importance");
    auto* report_src = report->add_option_group("source")->require_option(1);
    report_src->add_option("--manifest", manifest_path, "Corpus manifest JSON")->check(CLI::ExistingFile);
    report_src->add_option("--table", table_path, "Existing score table CSV")->check(CLI::ExistingFile);
    report->add_option("--metrics", metrics, "Metrics to score when starting from a manifest")
        ->capture_default_str();
    report->add_option("--jobs,-j", jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    add_common(report, common);
    add_analysis(report, analysis);

    auto* prep = app.add_subcommand("preprocess", "Window, normalize and resize the corpus into IQAI files");
    prep->add_option("--manifest", manifest_path, "Corpus manifest JSON")->required()->check(CLI::ExistingFile);
    add_common(prep, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? iqa::kExitOk : iqa::kExitFatal;
    }

    try {
        int code = iqa::kExitOk;
        if (score->parsed()) {
            const auto cfg = make_config(common);
            const auto out = iqa::run_score(iqa::load_manifest(manifest_path), iqa::parse_metric_selection(metrics),
                                            cfg, common.out_dir, jobs);
            print_written(out.written);
            if (out.partial()) {
                std::cerr << "partial: " << out.table.missing_reasons.size() << " cells could not be scored\n";
                code = iqa::kExitPartial;
            }
        } else if (correlate->parsed()) {
            const auto cfg = make_config(common);
            print_written(iqa::run_correlate(iqa::read_metric_table_csv(table_path), cfg, common.out_dir));
        } else if (importance->parsed()) {
            const auto cfg = make_config(common, &analysis);
            print_written(iqa::run_importance(iqa::read_metric_table_csv(table_path), cfg, common.out_dir).written);
        } else if (bench->parsed()) {
            const auto cfg = make_config(common);
            const auto timing = iqa::run_bench(iqa::load_manifest(manifest_path),
                                               iqa::parse_metric_selection(metrics), cfg, reps, warmup);
            std::cout << iqa::timing_to_text(timing);
            print_written(iqa::write_timing(timing, cfg, common.out_dir));
        } else if (report->parsed()) {
            const auto cfg = make_config(common, &analysis);
            iqa::MetricTable table;
            if (!manifest_path.empty()) {
                auto out = iqa::run_score(iqa::load_manifest(manifest_path), iqa::parse_metric_selection(metrics),
                                          cfg, common.out_dir, jobs);
                print_written(out.written);
                if (out.partial()) code = iqa::kExitPartial;
                table = std::move(out.table);
            } else {
                table = iqa::read_metric_table_csv(table_path);
            }
            print_written(iqa::run_correlate(table, cfg, common.out_dir));
            print_written(iqa::run_importance(table, cfg, common.out_dir).written);
        } else if (prep->parsed()) {
            const auto cfg = make_config(common);
            std::cout << "wrote " << iqa::run_preprocess(iqa::load_manifest(manifest_path), cfg, common.out_dir).string()
                      << '\n';
        }
        return code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return iqa::kExitFatal;
    }
}

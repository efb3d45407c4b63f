#pragma once

// The CLI subcommands as library calls. Every writer stamps a schema line and
// the configuration in effect; outputs are byte-stable for fixed inputs.

#include "iqa/harness/config.hpp"
#include "iqa/harness/manifest.hpp"
#include "iqa/harness/scoring.hpp"
#include "iqa/metric_table.hpp"
#include "iqa/tree.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace iqa {

enum ExitCode : int { kExitOk = 0, kExitFatal = 1, kExitPartial = 2 };

struct ScoreOutcome {
    MetricTable table;
    std::vector<std::filesystem::path> written;  // scores.csv, scores.json
    bool partial() const { return table.values.array().isNaN().any(); }
};

ScoreOutcome run_score(const Manifest& manifest, const std::vector<std::string>& metrics, const Config& config,
                       const std::filesystem::path& out_dir, int jobs = 1, const ImageLoader& loader = {});

/// Writes correlation_{unpaired,paired}.{csv,json,txt} and
/// group_average.{csv,json,txt}. Constant columns and columns with fewer than
/// 3 finite values are excluded with a warning; a class left with fewer than
/// two metrics gets no matrix. Throws std::invalid_argument below 3 rows.
std::vector<std::filesystem::path> run_correlate(const MetricTable& table, const Config& config,
                                                 const std::filesystem::path& out_dir);

/// One report per paired column (label) against every unpaired column;
/// writes importance.{json,csv,svg}.
struct ImportanceOutcome {
    std::vector<ImportanceReport> reports;
    std::vector<std::filesystem::path> written;
};
ImportanceOutcome run_importance(const MetricTable& table, const Config& config,
                                 const std::filesystem::path& out_dir);

struct MetricTiming {
    std::string metric;
    MetricClass cls = MetricClass::Pixel;
    std::vector<double> seconds_per_slice;  // one entry per timed repetition
    double mean = 0.0;
    double std = 0.0;  // population std over repetitions
    Eigen::Index slices = 0;
};

struct TimingReport {
    std::vector<MetricTiming> metrics;
    int repetitions = 0;
    int warmup = 0;
    std::string environment;
};

/// Times each metric over the whole corpus per repetition on one thread with
/// a monotonic clock; images are loaded and preprocessed beforehand and the
/// warmup passes are discarded. Requires repetitions >= 5 and warmup >= 1.
TimingReport run_bench(const Manifest& manifest, const std::vector<std::string>& metrics, const Config& config,
                       int repetitions, int warmup, const ImageLoader& loader = {});

std::string timing_to_csv(const TimingReport& report, const std::string& config_json = "{}");
std::string timing_to_json(const TimingReport& report, const std::string& config_json = "{}");
std::string timing_to_text(const TimingReport& report);
std::vector<std::filesystem::path> write_timing(const TimingReport& report, const Config& config,
                                                const std::filesystem::path& out_dir);

/// Writes the preprocessed images as IQAI files under out_dir/images plus a
/// manifest.json pointing at them (embedding, score and model paths kept).
std::filesystem::path run_preprocess(const Manifest& manifest, const Config& config,
                                     const std::filesystem::path& out_dir, const ImageLoader& loader = {});

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace iqa

#include "iqa/harness/commands.hpp"

#include "iqa/diagnostics.hpp"
#include "iqa/image_io.hpp"
#include "iqa/stats.hpp"
#include "text_format.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace iqa {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

ScoreOutcome run_score(const Manifest& manifest, const std::vector<std::string>& metrics, const Config& config,
                       const fs::path& out_dir, int jobs, const ImageLoader& loader) {
    ScoreOutcome out;
    out.table = score_corpus(manifest, metrics, config, jobs, loader);
    const auto cfg = config_to_json(config);
    fs::create_directories(out_dir);
    write_metric_table_csv(out_dir / "scores.csv", out.table, cfg);
    write_text_file(out_dir / "scores.json", metric_table_to_json(out.table, cfg));
    out.written = {out_dir / "scores.csv", out_dir / "scores.json"};
    return out;
}

namespace {

// Columns that can enter a correlation or regression: at least 3 finite
// values that are not all equal.
MetricTable usable_columns(const MetricTable& table) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < table.cols(); ++j) {
        const auto& name = table.metrics[static_cast<std::size_t>(j)].name;
        const auto col = table.values.col(j).array();
        const auto finite = col.isFinite();
        const auto count = finite.count();
        if (count < 3) {
            warn("metric " + name + " excluded: fewer than 3 finite scores");
            continue;
        }
        double lo = HUGE_VAL, hi = -HUGE_VAL;
        for (Eigen::Index i = 0; i < col.size(); ++i)
            if (finite(i)) {
                lo = std::min(lo, col(i));
                hi = std::max(hi, col(i));
            }
        if (lo == hi) {
            warn("metric " + name + " excluded: constant column");
            continue;
        }
        keep.push_back(j);
    }
    MetricTable out;
    out.image_ids = table.image_ids;
    out.patient_ids = table.patient_ids;
    out.values.resize(table.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        out.metrics.push_back(table.metrics[static_cast<std::size_t>(keep[c])]);
        out.values.col(static_cast<Eigen::Index>(c)) = table.values.col(keep[c]);
    }
    return out;
}

std::vector<std::string> unpaired_names(const MetricTable& t) {
    auto names = t.names_of_class(MetricClass::Distribution);
    const auto nr = t.names_of_class(MetricClass::NoReference);
    names.insert(names.end(), nr.begin(), nr.end());
    return names;
}

std::vector<std::string> paired_names(const MetricTable& t) {
    auto names = t.names_of_class(MetricClass::Pixel);
    const auto pe = t.names_of_class(MetricClass::Perceptual);
    names.insert(names.end(), pe.begin(), pe.end());
    return names;
}

}  // namespace

std::vector<fs::path> run_correlate(const MetricTable& table, const Config& config, const fs::path& out_dir) {
    table.validate();
    if (table.rows() < 3) throw std::invalid_argument("correlate: need at least 3 images, got " +
                                                      std::to_string(table.rows()));
    const MetricTable t = usable_columns(table);
    const auto cfg = config_to_json(config);
    std::vector<fs::path> written;
    auto emit = [&](const std::string& stem, const std::string& csv, const std::string& js, const std::string& txt) {
        for (const auto& [ext, text] : {std::pair{".csv", csv}, std::pair{".json", js}, std::pair{".txt", txt}}) {
            const auto path = out_dir / (stem + ext);
            write_text_file(path, text);
            written.push_back(path);
        }
    };

    const auto unpaired = unpaired_names(t);
    const auto paired = paired_names(t);
    for (const auto& [stem, names] : {std::pair{std::string("correlation_unpaired"), unpaired},
                                      std::pair{std::string("correlation_paired"), paired}}) {
        if (names.size() < 2) {
            warn(stem + " skipped: fewer than 2 usable metrics");
            continue;
        }
        const auto m = correlation_matrix(t, names);
        emit(stem, correlation_to_csv(m, cfg), correlation_to_json(m, cfg), correlation_to_text(m, config.edges));
    }
    const auto groups = default_paired_groups(t);
    if (unpaired.empty() || groups.empty()) {
        warn("group_average skipped: needs usable paired and unpaired metrics");
    } else {
        const auto g = group_average(t, unpaired, groups);
        emit("group_average", group_average_to_csv(g, cfg), group_average_to_json(g, cfg),
             group_average_to_text(g, config.edges));
    }
    return written;
}

ImportanceOutcome run_importance(const MetricTable& table, const Config& config, const fs::path& out_dir) {
    table.validate();
    const MetricTable t = usable_columns(table);
    const auto features = unpaired_names(t);
    const auto labels = paired_names(t);
    if (features.empty() || labels.empty())
        throw std::invalid_argument("importance: table needs at least one usable paired and one unpaired metric");
    ImportanceOutcome out;
    for (const auto& label : labels) out.reports.push_back(cross_validated_importance(t, label, features, config.cv()));
    const auto cfg = config_to_json(config);
    const std::vector<std::pair<std::string, std::string>> files = {
        {"importance.json", importance_to_json(out.reports, cfg)},
        {"importance.csv", importance_to_csv(out.reports, cfg)},
        {"importance.svg", importance_to_svg(out.reports, cfg)}};
    for (const auto& [name, text] : files) {
        write_text_file(out_dir / name, text);
        out.written.push_back(out_dir / name);
    }
    return out;
}

TimingReport run_bench(const Manifest& manifest, const std::vector<std::string>& metrics, const Config& config,
                       int repetitions, int warmup, const ImageLoader& loader) {
    if (repetitions < 5) throw std::invalid_argument("bench: repetitions must be >= 5");
    if (warmup < 1) throw std::invalid_argument("bench: warmup must be >= 1");
    if (manifest.entries.empty()) throw std::invalid_argument("bench: empty corpus");

    const MetricScorer scorer(manifest, metrics, config, loader);
    std::vector<EntryImages> images;
    for (const auto& e : manifest.entries) images.push_back(scorer.load(e));

    TimingReport report;
    report.repetitions = repetitions;
    report.warmup = warmup;
    using clock = std::chrono::steady_clock;
    for (const auto& m : metrics) {
        const bool paired = is_paired(*standard_metric_class(m));
        std::vector<std::size_t> use;
        for (std::size_t i = 0; i < manifest.entries.size(); ++i)
            if (!paired || manifest.entries[i].reference) use.push_back(i);
        if (use.empty()) {
            warn("bench: " + m + " skipped, no entry has a reference");
            continue;
        }
        MetricTiming timing;
        timing.metric = m;
        timing.cls = *standard_metric_class(m);
        timing.slices = static_cast<Eigen::Index>(use.size());
        double sink = 0.0;
        for (int rep = 0; rep < warmup + repetitions; ++rep) {
            const auto t0 = clock::now();
            for (auto i : use) {
                try {
                    sink += scorer.score(m, manifest.entries[i], images[i]);
                } catch (const std::exception& e) {
                    throw std::runtime_error("bench: " + m + " failed on '" + manifest.entries[i].image_id +
                                             "': " + e.what());
                }
            }
            const std::chrono::duration<double> dt = clock::now() - t0;
            if (rep >= warmup) timing.seconds_per_slice.push_back(dt.count() / static_cast<double>(use.size()));
        }
        // keeps the scored values observable so the loop cannot be elided
        if (std::isnan(sink)) warn("bench: " + m + " produced NaN scores");
        const auto& s = timing.seconds_per_slice;
        for (double v : s) timing.mean += v;
        timing.mean /= static_cast<double>(s.size());
        for (double v : s) timing.std += (v - timing.mean) * (v - timing.mean);
        timing.std = std::sqrt(timing.std / static_cast<double>(s.size()));
        report.metrics.push_back(std::move(timing));
    }

    std::ostringstream env;
    env << "single thread, steady_clock; compiler " << __VERSION__;
#ifdef NDEBUG
    env << ", optimized build";
#else
    env << ", debug build";
#endif
    env << ", " << std::thread::hardware_concurrency() << " hardware threads, " << manifest.entries.size()
        << " slices";
    report.environment = env.str();
    return report;
}

std::string timing_to_csv(const TimingReport& report, const std::string& config_json) {
    std::ostringstream out;
    out << "# schema: iqa.timing.v1\n";
    out << "# config: " << json::parse(config_json).dump() << '\n';
    out << "# environment: " << report.environment << '\n';
    out << "# repetitions: " << report.repetitions << ", warmup: " << report.warmup << '\n';
    out << "metric,class,mean_seconds_per_slice,std_seconds_per_slice,repetitions,slices\n";
    for (const auto& m : report.metrics)
        out << m.metric << ',' << to_string(m.cls) << ',' << detail::format_number(m.mean) << ','
            << detail::format_number(m.std) << ',' << m.seconds_per_slice.size() << ',' << m.slices << '\n';
    return out.str();
}

std::string timing_to_json(const TimingReport& report, const std::string& config_json) {
    json j;
    j["schema"] = "iqa.timing.v1";
    j["config"] = json::parse(config_json);
    j["environment"] = report.environment;
    j["repetitions"] = report.repetitions;
    j["warmup"] = report.warmup;
    json rows = json::array();
    for (const auto& m : report.metrics)
        rows.push_back({{"metric", m.metric},
                        {"class", to_string(m.cls)},
                        {"mean", m.mean},
                        {"std", m.std},
                        {"slices", m.slices},
                        {"seconds_per_slice", m.seconds_per_slice}});
    j["metrics"] = rows;
    return j.dump(2) + "\n";
}

std::string timing_to_text(const TimingReport& report) {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        if (v > 0 && v < 1e-5) std::snprintf(buf, sizeof buf, "%.2e", v);
        return std::string(buf);
    };
    std::ostringstream out;
    out << "Average computational time per slice [s], mean \xC2\xB1 std over " << report.repetitions
        << " repetitions (" << report.warmup << " warmup discarded)\n";
    out << report.environment << "\n\n";
    const std::vector<std::pair<MetricClass, const char*>> sections = {{MetricClass::Pixel, "Pixel-based"},
                                                                       {MetricClass::Perceptual, "Perceptual"},
                                                                       {MetricClass::Distribution, "Distribution"},
                                                                       {MetricClass::NoReference, "No-reference"}};
    for (const auto& [cls, title] : sections) {
        bool header = false;
        for (const auto& m : report.metrics) {
            if (m.cls != cls) continue;
            if (!header) out << title << '\n';
            header = true;
            std::string name = m.metric;
            name.resize(std::max<std::size_t>(name.size(), 10), ' ');
            out << "  " << name << ' ' << fmt(m.mean) << " \xC2\xB1 " << fmt(m.std) << '\n';
        }
    }
    return out.str();
}

std::vector<fs::path> write_timing(const TimingReport& report, const Config& config, const fs::path& out_dir) {
    const auto cfg = config_to_json(config);
    std::vector<fs::path> written = {out_dir / "timing.csv", out_dir / "timing.json", out_dir / "timing.txt"};
    write_text_file(written[0], timing_to_csv(report, cfg));
    write_text_file(written[1], timing_to_json(report, cfg));
    write_text_file(written[2], timing_to_text(report));
    return written;
}

fs::path run_preprocess(const Manifest& manifest, const Config& config, const fs::path& out_dir,
                        const ImageLoader& loader) {
    const ImageLoader load = loader ? loader : ImageLoader([](const fs::path& p) { return load_image(p); });
    const auto dir = fs::absolute(out_dir);
    fs::create_directories(dir / "images");
    Manifest out = manifest;
    auto convert = [&](const fs::path& src, const std::string& id, const char* role) {
        const auto dst = dir / "images" / (id + "_" + role + ".iqai");
        write_iqai(dst, preprocess(load(src), config).cast<float>());
        return dst;
    };
    for (auto& e : out.entries) {
        e.low_dose = convert(e.low_dose, e.image_id, "low_dose");
        e.denoised = convert(e.denoised, e.image_id, "denoised");
        if (e.reference) e.reference = convert(*e.reference, e.image_id, "reference");
    }
    const auto path = dir / "manifest.json";
    write_text_file(path, manifest_to_json(out) + "\n");
    return path;
}

}  // namespace iqa

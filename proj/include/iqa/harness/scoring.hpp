#pragma once

// Per-image scoring of a manifest. Images are fetched through an ImageLoader
// so tests can observe exactly which files a run touches.

#include "iqa/harness/config.hpp"
#include "iqa/harness/manifest.hpp"
#include "iqa/metric_table.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace iqa {

using ImageLoader = std::function<Image(const std::filesystem::path&)>;

/// Canonical metric names from a comma list. Accepts the standard names
/// case-insensitively plus "all", "paired" and "unpaired". Order follows the
/// standard list; unknown names throw std::invalid_argument.
std::vector<std::string> parse_metric_selection(const std::string& list);

/// Window/normalize/resize for HU rasters (order per config); normalized
/// rasters are only resized when their size differs from the target.
Image preprocess(const Image& img, const Config& config);

/// Models, embedding files and score maps required by a metric selection,
/// loaded once. Throws std::runtime_error when something required is absent.
class MetricResources;

/// Which images a selection needs per entry.
struct ImageNeeds {
    bool denoised = false;
    bool low_dose = false;
    bool reference = false;
};
ImageNeeds image_needs(const std::vector<std::string>& metrics);

/// Loaded, preprocessed images of one entry; absent ones are not read.
struct EntryImages {
    std::optional<Image> low_dose, denoised, reference;
};

class MetricScorer {
public:
    MetricScorer(const Manifest& manifest, std::vector<std::string> metrics, Config config,
                 ImageLoader loader = {});
    ~MetricScorer();
    MetricScorer(const MetricScorer&) = delete;
    MetricScorer& operator=(const MetricScorer&) = delete;

    const std::vector<std::string>& metrics() const { return metrics_; }
    const Config& config() const { return config_; }

    EntryImages load(const ManifestEntry& entry) const;

    /// One score. Throws when the metric cannot be computed for the entry.
    double score(const std::string& metric, const ManifestEntry& entry, const EntryImages& images) const;

private:
    std::vector<std::string> metrics_;
    Config config_;
    ImageLoader loader_;
    std::unique_ptr<MetricResources> resources_;
};

/// Scores every entry for every selected metric with `jobs` workers. Rows
/// are sorted by image id. Cells that fail are NaN with a reason; an empty
/// manifest gives an empty table and a warning.
MetricTable score_corpus(const Manifest& manifest, const std::vector<std::string>& metrics, const Config& config,
                         int jobs = 1, const ImageLoader& loader = {});

}  // namespace iqa

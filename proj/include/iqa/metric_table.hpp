#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace iqa {

enum class MetricClass { Pixel, Perceptual, Distribution, NoReference };

std::string to_string(MetricClass c);
MetricClass metric_class_from_string(const std::string& s);
inline bool is_paired(MetricClass c) { return c == MetricClass::Pixel || c == MetricClass::Perceptual; }

/// Class of one of the fifteen standard metrics, by canonical name
/// (MSE, PSNR, SSIM, VIF, LPIPS1-3, FID, KID, IS, SNR, BRISQUE, RAPS-FD,
/// PaQ-2-PiQ, NIQE).
std::optional<MetricClass> standard_metric_class(const std::string& name);
const std::vector<std::string>& standard_metric_names();

struct MetricInfo {
    std::string name;
    MetricClass cls = MetricClass::Pixel;
};

/// Per-image scores: rows are images, columns metrics. Missing cells are NaN
/// and may carry a reason.
struct MetricTable {
    std::vector<std::string> image_ids;
    std::vector<std::string> patient_ids;  // parallel to image_ids; may be empty strings
    std::vector<MetricInfo> metrics;
    Eigen::MatrixXd values;
    std::map<std::pair<Eigen::Index, Eigen::Index>, std::string> missing_reasons;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }

    /// Column index of `name`; throws std::out_of_range when absent.
    Eigen::Index column(const std::string& name) const;
    bool has_metric(const std::string& name) const;
    bool is_missing(Eigen::Index row, Eigen::Index col) const { return std::isnan(values(row, col)); }
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> missing_mask() const { return values.array().isNaN(); }
    std::vector<std::string> names_of_class(MetricClass c) const;

    /// Checks dimension consistency; throws std::invalid_argument.
    void validate() const;

    /// Copy with rows reordered by image id.
    MetricTable sorted_by_id() const;
};

/// CSV with "# " header lines (schema, config, metric classes), then
/// image_id,patient_id,<metric>... Missing cells are empty fields.
void write_metric_table_csv(const std::filesystem::path& path, const MetricTable& table,
                            const std::string& config_json = "{}");
MetricTable read_metric_table_csv(const std::filesystem::path& path);

/// JSON with schema, config, rows and missing-cell reasons.
std::string metric_table_to_json(const MetricTable& table, const std::string& config_json = "{}");

}  // namespace iqa

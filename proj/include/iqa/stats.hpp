#pragma once

// Correlation analysis between metrics: PLCC, SROCC, the triangular
// |PLCC| / |SROCC| matrix, strength bins and class-averaged summaries.

#include "iqa/metric_table.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace iqa {

/// Pearson product-moment coefficient. Requires equal lengths >= 3 and
/// non-constant inputs.
double plcc(std::span<const double> u, std::span<const double> v);

/// 1-based ranks with ties receiving the average of their positions.
Eigen::VectorXd average_ranks(std::span<const double> values);

/// Pearson coefficient of the average ranks.
double srocc(std::span<const double> u, std::span<const double> v);

/// Square matrix over `names`: |PLCC| below the diagonal, |SROCC| above,
/// NaN on the diagonal. Each pair uses the rows where both scores are finite.
struct CorrelationMatrix {
    std::vector<MetricInfo> metrics;
    Eigen::MatrixXd entries;
    Eigen::MatrixXi pair_counts;  // rows used per pair
};

CorrelationMatrix correlation_matrix(const MetricTable& table, const std::vector<std::string>& names);

enum class Strength { Poor, Fair, Moderate, Strong };
std::string to_string(Strength s);

/// Lower edges of the fair, moderate and strong bins; the bins are the
/// half-open intervals [0, fair), [fair, moderate), [moderate, strong),
/// [strong, 1].
struct StrengthEdges {
    double fair = 0.3;
    double moderate = 0.6;
    double strong = 0.8;
};

Strength classify_strength(double r, const StrengthEdges& edges = {});

struct GroupStat {
    double plcc_mean = 0.0;
    double plcc_std = 0.0;
    double srocc_mean = 0.0;
    double srocc_std = 0.0;
};

using PairedGroups = std::vector<std::pair<std::string, std::vector<std::string>>>;

/// cells[u][g]: mean and population std of |PLCC| and |SROCC| between
/// unpaired metric u and each member of paired group g.
struct GroupAverageTable {
    std::vector<std::string> unpaired;
    std::vector<std::string> groups;
    std::vector<std::vector<GroupStat>> cells;
};

GroupAverageTable group_average(const MetricTable& table, const std::vector<std::string>& unpaired,
                                const PairedGroups& paired_groups);

/// Pixel-based, perceptual-based and all-paired groups drawn from the table.
PairedGroups default_paired_groups(const MetricTable& table);

// Report renderers. Every renderer prefixes the schema and configuration.
std::string correlation_to_csv(const CorrelationMatrix& m, const std::string& config_json = "{}");
std::string correlation_to_json(const CorrelationMatrix& m, const std::string& config_json = "{}");
std::string correlation_to_text(const CorrelationMatrix& m, const StrengthEdges& edges = {});
std::string group_average_to_csv(const GroupAverageTable& t, const std::string& config_json = "{}");
std::string group_average_to_json(const GroupAverageTable& t, const std::string& config_json = "{}");
std::string group_average_to_text(const GroupAverageTable& t, const StrengthEdges& edges = {});

}  // namespace iqa

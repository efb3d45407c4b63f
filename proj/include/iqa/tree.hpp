#pragma once

// CART regression trees, cross-validated feature importance and the ring
// chart export.

#include "iqa/metric_table.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace iqa {

struct TreeParams {
    static constexpr int unlimited = -1;

    int max_depth = 8;  // root has depth 0; `unlimited` disables the limit
    Eigen::Index min_samples_leaf = 5;
    double min_impurity_decrease = 0.0;  // compared against gain / total samples
};

/// Leaves have feature == -1. gain is N*Var(node) - N_L*Var(L) - N_R*Var(R)
/// for internal nodes and 0 for leaves.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // mean of the training targets reaching the node
    Eigen::Index n_samples = 0;
    double gain = 0.0;

    bool is_leaf() const { return feature < 0; }
};

/// nodes[0] is the root. Children always follow their parent.
struct RegressionTree {
    std::vector<TreeNode> nodes;
    Eigen::Index n_features = 0;
    TreeParams params;

    bool fitted() const { return !nodes.empty(); }
    int depth() const;
};

/// Greedy variance-reduction growth. Ties within a relative 1e-12 keep the
/// lowest feature index, then the lowest threshold. Thresholds are midpoints
/// between consecutive distinct values; x[f] <= threshold routes left.
RegressionTree fit_tree(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXd>& y,
                        const TreeParams& params = {});

double predict(const RegressionTree& tree, const Eigen::Ref<const Eigen::VectorXd>& x);
/// One prediction per row of X.
Eigen::VectorXd predict_rows(const RegressionTree& tree, const Eigen::Ref<const Eigen::MatrixXd>& X);

/// Per-feature sum of split gains normalized to 1; zeros for a single leaf.
Eigen::VectorXd feature_importance(const RegressionTree& tree);

struct CvParams {
    int k = 10;
    std::uint64_t seed = 0;
    bool by_patient = false;   // keep all images of a patient in one fold
    bool refit_final = false;  // importances from one tree on all rows
    TreeParams tree;
};

struct ImportanceReport {
    std::string label;
    std::vector<std::string> features;
    Eigen::VectorXd importance;             // sums to 1, or all zero
    std::vector<Eigen::Index> ranking;      // feature indices, most important first
    std::vector<double> fold_nrmse;         // NaN for excluded folds
    std::vector<double> fold_baseline_nrmse;  // constant training-mean predictor
    std::vector<int> excluded_folds;
    double mean_nrmse = 0.0;
    double baseline_nrmse = 0.0;
    Eigen::Index n_samples = 0;
    int k = 0;
};

/// Seeded shuffled fold index per sample. With `groups`, whole groups are
/// assigned to folds (sorted group ids are shuffled).
std::vector<int> assign_folds(Eigen::Index n, int k, std::uint64_t seed, const std::vector<std::string>& groups = {});

/// NRMSE = RMSE(test) / (max - min of training targets). A fold whose
/// training targets are constant is excluded from the means with a warning.
ImportanceReport cross_validated_importance(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                            const Eigen::Ref<const Eigen::VectorXd>& y,
                                            const std::vector<std::string>& feature_names, const std::string& label,
                                            const CvParams& params = {}, const std::vector<std::string>& groups = {});

/// Uses the rows where the label and every feature are finite.
ImportanceReport cross_validated_importance(const MetricTable& table, const std::string& label,
                                            const std::vector<std::string>& features, const CvParams& params = {});

std::string importance_to_json(const std::vector<ImportanceReport>& reports, const std::string& config_json = "{}");
std::string importance_to_csv(const std::vector<ImportanceReport>& reports, const std::string& config_json = "{}");

/// Pie of one clove per label; within a clove, concentric rings hold the
/// features by rank with the most important outermost. Ring color encodes the
/// feature, clove captions read "LABEL (NRMSE)".
std::string importance_to_svg(const std::vector<ImportanceReport>& reports, const std::string& config_json = "{}");

}  // namespace iqa

#pragma once

// No-reference scores: SNR, BRISQUE regression and NIQE.

#include "iqa/image.hpp"
#include "iqa/nss.hpp"

#include <utility>
#include <vector>

namespace iqa {

/// mean(img over tissue) / population std(img over air). A noiseless air
/// region gives +infinity.
double snr(const Image& img, const Mask& tissue, const Mask& air);

struct SnrMaskParams {
    double tissue_threshold = -0.3;
    Eigen::Index corner = 16;
};

/// Tissue: largest 4-connected component above the threshold. Air: the four
/// corner squares. Corner pixels are removed from the tissue mask.
std::pair<Mask, Mask> default_snr_masks(const Image& img, const SnrMaskParams& params = {});

/// RBF support-vector regressor over min-max scaled features.
struct SvrModel {
    Eigen::MatrixXd support_vectors;  // k x d, already in scaled feature space
    Eigen::VectorXd dual_coeffs;      // k
    double gamma = 0.0;
    double bias = 0.0;
    Eigen::VectorXd feature_min;  // d
    Eigen::VectorXd feature_max;  // d
    double score_lo = 0.0;
    double score_hi = 100.0;
};

/// Throws std::invalid_argument when shapes or ranges are inconsistent.
void validate(const SvrModel& model);

/// Maps each feature onto [-1, 1] using the model's training ranges.
Eigen::VectorXd scale_features(const Eigen::Ref<const Eigen::VectorXd>& features,
                               const SvrModel& model);

/// sum_i c_i exp(-gamma ||f~ - sv_i||^2) + bias, clamped to the score range.
double brisque_score(const NssFeatureVector& features, const SvrModel& model);

/// Multivariate Gaussian over NSS feature vectors.
struct MvgModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    Eigen::Index n = 0;
    bool rank_deficient = false;
};

/// Mean and unbiased covariance of a corpus of at least 37 vectors. A
/// singular covariance is flagged (and warned about), not rejected.
MvgModel fit_niqe_model(const std::vector<NssFeatureVector>& corpus);

/// sqrt(d' ((S1 + S2)/2)^-1 d) with d = m1 - m2. A singular pooled
/// covariance uses the pseudo-inverse when allowed, otherwise throws.
double mvg_distance(const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1,
                    const Eigen::VectorXd& mean2, const Eigen::MatrixXd& cov2,
                    bool allow_pseudo_inverse = true);

double niqe_score(const std::vector<NssFeatureVector>& test_features, const MvgModel& natural,
                  bool allow_pseudo_inverse = true);

}  // namespace iqa

#pragma once

// Distribution-based scores over externally produced embeddings. Embedding
// sets are matrices with one sample per row.

#include <Eigen/Dense>

#include <cstdint>

namespace iqa {

struct GaussianStats {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;  // unbiased, symmetric
    Eigen::Index n = 0;
};

GaussianStats gaussian_stats(const Eigen::Ref<const Eigen::MatrixXd>& embeddings);

/// ||m_a - m_b||^2 + tr(C_a + C_b - 2 (C_a^{1/2} C_b C_a^{1/2})^{1/2}).
/// Eigenvalues down to -1e-6 (relative to the largest) are clamped to zero;
/// anything more negative is reported as a non-PSD covariance.
double fid(const GaussianStats& a, const GaussianStats& b);

struct KidParams {
    Eigen::Index subset_size = 100;
    Eigen::Index n_subsets = 10;
    std::uint64_t seed = 0;
};

struct KidResult {
    double mean = 0.0;
    double std = 0.0;  // population std over subsets
};

/// Unbiased MMD^2 with the cubic kernel k(u, v) = (u.v / d + 1)^3.
double mmd2_unbiased(const Eigen::Ref<const Eigen::MatrixXd>& x,
                     const Eigen::Ref<const Eigen::MatrixXd>& y);

/// MMD^2 averaged over random equal-size subsets drawn without replacement.
KidResult kid(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::MatrixXd>& y,
              const KidParams& params = {});

/// exp(mean_i KL(p_i || p_marginal)); rows are class-probability vectors.
double inception_score(const Eigen::Ref<const Eigen::MatrixXd>& probs);

}  // namespace iqa

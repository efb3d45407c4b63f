#include "iqa/distribution.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace iqa {

namespace {

// Symmetric square root through an eigendecomposition, clamping round-off
// negatives. Returns eigen values as well so the caller can take the trace.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> psd_eigen(const Eigen::MatrixXd& m, const char* what) {
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success) throw std::runtime_error(std::string(what) + ": eigensolver failed");
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-6 * scale)
        throw std::domain_error(std::string(what) + ": covariance is not positive semidefinite");
    return es;
}

Eigen::MatrixXd sample_rows(const Eigen::Ref<const Eigen::MatrixXd>& m, Eigen::Index count,
                            std::mt19937_64& rng) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(m.rows()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    for (Eigen::Index i = 0; i < count; ++i) {
        const auto remaining = static_cast<std::uint64_t>(m.rows() - i);
        const auto j = i + static_cast<Eigen::Index>(rng() % remaining);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    Eigen::MatrixXd out(count, m.cols());
    for (Eigen::Index i = 0; i < count; ++i) out.row(i) = m.row(idx[static_cast<std::size_t>(i)]);
    return out;
}

}  // namespace

GaussianStats gaussian_stats(const Eigen::Ref<const Eigen::MatrixXd>& embeddings) {
    if (embeddings.rows() < 2) throw std::invalid_argument("gaussian_stats: need at least 2 samples");
    if (embeddings.cols() < 1) throw std::invalid_argument("gaussian_stats: empty embeddings");
    GaussianStats s;
    s.n = embeddings.rows();
    s.mean = embeddings.colwise().mean().transpose();
    const Eigen::MatrixXd centered = embeddings.rowwise() - s.mean.transpose();
    s.cov = (centered.transpose() * centered) / static_cast<double>(s.n - 1);
    s.cov = 0.5 * (s.cov + s.cov.transpose());
    return s;
}

double fid(const GaussianStats& a, const GaussianStats& b) {
    if (a.mean.size() != b.mean.size() || a.cov.rows() != b.cov.rows())
        throw std::invalid_argument("fid: dimension mismatch");

    const auto ea = psd_eigen(a.cov, "fid");
    const Eigen::VectorXd root_a = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd sqrt_a = ea.eigenvectors() * root_a.asDiagonal() * ea.eigenvectors().transpose();
    psd_eigen(b.cov, "fid");

    const auto em = psd_eigen(sqrt_a * b.cov * sqrt_a, "fid");
    const double trace_sqrt = em.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    const double d = (a.mean - b.mean).squaredNorm() + a.cov.trace() + b.cov.trace() - 2.0 * trace_sqrt;
    return std::max(d, 0.0);
}

double mmd2_unbiased(const Eigen::Ref<const Eigen::MatrixXd>& x,
                     const Eigen::Ref<const Eigen::MatrixXd>& y) {
    if (x.cols() != y.cols()) throw std::invalid_argument("kid: embedding dimensions differ");
    const Eigen::Index m = x.rows();
    const Eigen::Index n = y.rows();
    if (m < 2 || n < 2) throw std::invalid_argument("kid: need at least 2 samples per set");
    const double inv_d = 1.0 / static_cast<double>(x.cols());

    auto kernel = [inv_d](const auto& u, const auto& v) {
        return ((u * v.transpose()).array() * inv_d + 1.0).cube().matrix().eval();
    };
    const Eigen::MatrixXd kxx = kernel(x, x);
    const Eigen::MatrixXd kyy = kernel(y, y);
    const Eigen::MatrixXd kxy = kernel(x, y);

    const double sxx = (kxx.sum() - kxx.trace()) / static_cast<double>(m * (m - 1));
    const double syy = (kyy.sum() - kyy.trace()) / static_cast<double>(n * (n - 1));
    const double sxy = kxy.sum() / static_cast<double>(m * n);
    return sxx + syy - 2.0 * sxy;
}

KidResult kid(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::MatrixXd>& y,
              const KidParams& params) {
    if (params.subset_size < 2) throw std::invalid_argument("kid: subset_size must be >= 2");
    if (params.n_subsets < 1) throw std::invalid_argument("kid: n_subsets must be >= 1");
    if (params.subset_size > x.rows() || params.subset_size > y.rows())
        throw std::invalid_argument("kid: subset_size exceeds embedding set size");

    std::mt19937_64 rng(params.seed);
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(params.n_subsets));
    for (Eigen::Index s = 0; s < params.n_subsets; ++s) {
        const Eigen::MatrixXd xs = sample_rows(x, params.subset_size, rng);
        const Eigen::MatrixXd ys = sample_rows(y, params.subset_size, rng);
        values.push_back(mmd2_unbiased(xs, ys));
    }
    const Eigen::Map<const Eigen::ArrayXd> v(values.data(), static_cast<Eigen::Index>(values.size()));
    KidResult r;
    r.mean = v.mean();
    r.std = std::sqrt((v - r.mean).square().mean());
    return r;
}

double inception_score(const Eigen::Ref<const Eigen::MatrixXd>& probs) {
    if (probs.rows() < 1 || probs.cols() < 1) throw std::invalid_argument("inception_score: empty matrix");
    if ((probs.array() < -1e-12).any() || (probs.array() > 1.0 + 1e-12).any())
        throw std::invalid_argument("inception_score: probabilities outside [0, 1]");
    for (Eigen::Index i = 0; i < probs.rows(); ++i)
        if (std::abs(probs.row(i).sum() - 1.0) > 1e-6)
            throw std::invalid_argument("inception_score: row does not sum to 1");

    const Eigen::RowVectorXd marginal = probs.colwise().mean();
    double kl_sum = 0.0;
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
        double kl = 0.0;
        for (Eigen::Index k = 0; k < probs.cols(); ++k) {
            const double p = probs(i, k);
            if (p > 0.0) kl += p * std::log(p / marginal(k));
        }
        kl_sum += std::max(kl, 0.0);
    }
    return std::exp(kl_sum / static_cast<double>(probs.rows()));
}

}  // namespace iqa

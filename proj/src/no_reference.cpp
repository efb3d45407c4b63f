#include "iqa/no_reference.hpp"

#include "iqa/diagnostics.hpp"
#include "iqa/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace iqa {

double snr(const Image& img, const Mask& tissue, const Mask& air) {
    if (tissue.rows() != img.height() || tissue.cols() != img.width() || air.rows() != img.height() ||
        air.cols() != img.width())
        throw std::invalid_argument("snr: mask shape differs from image");
    if ((tissue && air).any()) throw std::invalid_argument("snr: tissue and air masks overlap");
    const Eigen::Index n_tissue = tissue.count();
    const Eigen::Index n_air = air.count();
    if (n_tissue < 2 || n_air < 2) throw std::invalid_argument("snr: each mask must select >= 2 pixels");

    const auto& v = img.values();
    const double signal = tissue.select(v, 0.0).sum() / static_cast<double>(n_tissue);
    const double air_mean = air.select(v, 0.0).sum() / static_cast<double>(n_air);
    const double air_var =
        air.select((v - air_mean).square(), 0.0).sum() / static_cast<double>(n_air);
    if (air_var == 0.0) return std::numeric_limits<double>::infinity();
    return signal / std::sqrt(air_var);
}

std::pair<Mask, Mask> default_snr_masks(const Image& img, const SnrMaskParams& params) {
    const Eigen::Index h = img.height();
    const Eigen::Index w = img.width();
    const Eigen::Index c = params.corner;
    if (c < 1 || 2 * c > h || 2 * c > w) throw std::invalid_argument("snr: corner size does not fit image");

    Mask air = Mask::Constant(h, w, false);
    air.topLeftCorner(c, c).setConstant(true);
    air.topRightCorner(c, c).setConstant(true);
    air.bottomLeftCorner(c, c).setConstant(true);
    air.bottomRightCorner(c, c).setConstant(true);

    const Mask candidate = (img.values() > params.tissue_threshold) && !air;

    // Largest 4-connected component; the first one found in row-major order wins ties.
    Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> label =
        Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(h, w);
    int best_label = 0;
    Eigen::Index best_size = 0;
    int next = 0;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> stack;
    for (Eigen::Index r = 0; r < h; ++r) {
        for (Eigen::Index col = 0; col < w; ++col) {
            if (!candidate(r, col) || label(r, col) != 0) continue;
            ++next;
            Eigen::Index size = 0;
            stack.assign(1, {r, col});
            label(r, col) = next;
            while (!stack.empty()) {
                const auto [y, x] = stack.back();
                stack.pop_back();
                ++size;
                constexpr int dy[4] = {-1, 1, 0, 0};
                constexpr int dx[4] = {0, 0, -1, 1};
                for (int k = 0; k < 4; ++k) {
                    const Eigen::Index ny = y + dy[k];
                    const Eigen::Index nx = x + dx[k];
                    if (ny < 0 || nx < 0 || ny >= h || nx >= w) continue;
                    if (!candidate(ny, nx) || label(ny, nx) != 0) continue;
                    label(ny, nx) = next;
                    stack.emplace_back(ny, nx);
                }
            }
            if (size > best_size) {
                best_size = size;
                best_label = next;
            }
        }
    }
    Mask tissue = best_label == 0 ? Mask(Mask::Constant(h, w, false)) : Mask(label == best_label);
    return {std::move(tissue), std::move(air)};
}

void validate(const SvrModel& m) {
    const Eigen::Index d = m.feature_min.size();
    if (m.support_vectors.rows() < 1) throw std::invalid_argument("svr model: no support vectors");
    if (m.support_vectors.cols() != d || m.feature_max.size() != d)
        throw std::invalid_argument("svr model: feature dimension mismatch");
    if (m.dual_coeffs.size() != m.support_vectors.rows())
        throw std::invalid_argument("svr model: dual coefficient count mismatch");
    if (!((m.feature_max - m.feature_min).array() > 0.0).all())
        throw std::invalid_argument("svr model: feature_max must exceed feature_min");
    if (!(m.gamma >= 0.0)) throw std::invalid_argument("svr model: gamma must be non-negative");
    if (!(m.score_hi >= m.score_lo)) throw std::invalid_argument("svr model: invalid score range");
}

Eigen::VectorXd scale_features(const Eigen::Ref<const Eigen::VectorXd>& features, const SvrModel& m) {
    if (features.size() != m.feature_min.size())
        throw std::invalid_argument("svr model: feature vector dimension mismatch");
    return (-1.0 + 2.0 * (features - m.feature_min).array() / (m.feature_max - m.feature_min).array())
        .matrix();
}

double brisque_score(const NssFeatureVector& features, const SvrModel& model) {
    validate(model);
    const Eigen::VectorXd f = scale_features(features, model);
    double score = model.bias;
    for (Eigen::Index i = 0; i < model.support_vectors.rows(); ++i) {
        const double dist2 = (model.support_vectors.row(i).transpose() - f).squaredNorm();
        const double k = dist2 == 0.0 ? 1.0 : std::exp(-model.gamma * dist2);
        score += model.dual_coeffs(i) * k;
    }
    return std::clamp(score, model.score_lo, model.score_hi);
}

namespace {

Eigen::MatrixXd stack_features(const std::vector<NssFeatureVector>& rows) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), 36);
    for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return m;
}

}  // namespace

MvgModel fit_niqe_model(const std::vector<NssFeatureVector>& corpus) {
    if (corpus.size() < 37) throw std::invalid_argument("fit_niqe_model: need at least 37 feature vectors");
    const GaussianStats s = gaussian_stats(stack_features(corpus));
    MvgModel m{s.mean, s.cov, s.n, false};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.cov, Eigen::EigenvaluesOnly);
    const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
    if (es.eigenvalues().minCoeff() <= 1e-12 * top) {
        m.rank_deficient = true;
        warn("fit_niqe_model: corpus covariance is rank-deficient; scoring will use a pseudo-inverse");
    }
    return m;
}

double mvg_distance(const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1, const Eigen::VectorXd& mean2,
                    const Eigen::MatrixXd& cov2, bool allow_pseudo_inverse) {
    if (mean1.size() != mean2.size() || cov1.rows() != mean1.size() || cov2.rows() != mean2.size())
        throw std::invalid_argument("mvg_distance: dimension mismatch");
    const Eigen::VectorXd d = mean1 - mean2;
    const Eigen::MatrixXd pooled = 0.5 * (cov1 + cov2);
    const Eigen::MatrixXd sym = 0.5 * (pooled + pooled.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double tol = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 1.0);
    if (ev.minCoeff() <= tol && !allow_pseudo_inverse)
        throw std::domain_error("mvg_distance: pooled covariance is singular");

    const Eigen::VectorXd proj = es.eigenvectors().transpose() * d;
    double q = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > tol) q += proj(i) * proj(i) / ev(i);
    return std::sqrt(q);
}

double niqe_score(const std::vector<NssFeatureVector>& test_features, const MvgModel& natural,
                  bool allow_pseudo_inverse) {
    if (test_features.size() < 2) throw std::invalid_argument("niqe_score: need at least 2 test vectors");
    const GaussianStats t = gaussian_stats(stack_features(test_features));
    return mvg_distance(natural.mean, natural.cov, t.mean, t.cov, allow_pseudo_inverse);
}

}  // namespace iqa

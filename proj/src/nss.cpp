#include "iqa/nss.hpp"

#include "iqa/filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iqa {

namespace {

constexpr double kAlphaMin = 0.05;
constexpr double kAlphaStep = 0.001;
constexpr int kAlphaCount = 9951;  // 0.05 .. 10.0 inclusive

struct ShapeTable {
    std::vector<double> alpha;
    std::vector<double> ratio;  // gamma(1/a) gamma(3/a) / gamma(2/a)^2
};

const ShapeTable& shape_table() {
    static const ShapeTable table = [] {
        ShapeTable t;
        t.alpha.resize(kAlphaCount);
        t.ratio.resize(kAlphaCount);
        for (int i = 0; i < kAlphaCount; ++i) {
            const double a = kAlphaMin + kAlphaStep * i;
            t.alpha[i] = a;
            t.ratio[i] = std::exp(std::lgamma(1.0 / a) + std::lgamma(3.0 / a) -
                                  2.0 * std::lgamma(2.0 / a));
        }
        return t;
    }();
    return table;
}

template <typename F>
double argmin_alpha(F&& distance) {
    const auto& t = shape_table();
    std::size_t best = 0;
    double best_d = distance(t.ratio[0]);
    for (std::size_t i = 1; i < t.ratio.size(); ++i) {
        const double d = distance(t.ratio[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return t.alpha[best];
}

// Products of each coefficient with its neighbour at (dr, dc), valid region only.
std::vector<double> paired_products(const Eigen::ArrayXXd& m, int dr, int dc) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(m.size()));
    const Eigen::Index r0 = std::max(0, -dr);
    const Eigen::Index r1 = m.rows() - std::max(0, dr);
    const Eigen::Index c0 = std::max(0, -dc);
    const Eigen::Index c1 = m.cols() - std::max(0, dc);
    for (Eigen::Index r = r0; r < r1; ++r)
        for (Eigen::Index c = c0; c < c1; ++c) out.push_back(m(r, c) * m(r + dr, c + dc));
    return out;
}

std::vector<double> to_vector(const Eigen::ArrayXXd& m) {
    // Row-major order so that results do not depend on Eigen storage order.
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) v.push_back(m(r, c));
    return v;
}

}  // namespace

MscnMaps mscn_maps(const Eigen::ArrayXXd& intensity, const MscnParams& params) {
    if (params.radius < 1) throw std::invalid_argument("mscn: radius must be >= 1");
    if (!(params.stabilizer > 0.0)) throw std::invalid_argument("mscn: stabilizer must be positive");
    const Eigen::VectorXd w = gaussian_kernel(params.radius, params.sigma);
    const Eigen::ArrayXXd mu = filter_replicate(intensity, w);
    const Eigen::ArrayXXd var = (filter_replicate(intensity.square(), w) - mu.square()).cwiseMax(0.0);
    MscnMaps maps;
    maps.local_sigma = var.sqrt();
    maps.coefficients = (intensity - mu) / (maps.local_sigma + params.stabilizer);
    return maps;
}

Image mscn(const Image& img, double sigma, Eigen::Index radius, double stabilizer) {
    const MscnMaps maps = mscn_maps(img.values(), MscnParams{sigma, radius, stabilizer});
    return Image(Image::Array(maps.coefficients), Domain::HU);
}

GgdFit fit_ggd(std::span<const double> samples) {
    if (samples.size() < 2) throw std::invalid_argument("fit_ggd: need at least 2 samples");
    double sq = 0.0;
    double abs_sum = 0.0;
    for (double x : samples) {
        sq += x * x;
        abs_sum += std::abs(x);
    }
    const double n = static_cast<double>(samples.size());
    const double second = sq / n;
    const double first = abs_sum / n;
    if (!(second > 0.0) || !(first > 0.0))
        throw std::invalid_argument("fit_ggd: zero-variance input");
    const double rho = second / (first * first);
    return {argmin_alpha([rho](double r) { return std::abs(rho - r); }), std::sqrt(second)};
}

AggdFit fit_aggd(std::span<const double> samples) {
    if (samples.size() < 2) throw std::invalid_argument("fit_aggd: need at least 2 samples");
    double left_sq = 0.0, right_sq = 0.0, abs_sum = 0.0;
    std::size_t left_n = 0, right_n = 0;
    for (double x : samples) {
        if (x < 0.0) {
            left_sq += x * x;
            ++left_n;
        } else if (x > 0.0) {
            right_sq += x * x;
            ++right_n;
        }
        abs_sum += std::abs(x);
    }
    if (left_n == 0 || right_n == 0)
        throw std::invalid_argument("fit_aggd: samples must contain both signs");

    const double n = static_cast<double>(samples.size());
    const double sigma_l = std::sqrt(left_sq / static_cast<double>(left_n));
    const double sigma_r = std::sqrt(right_sq / static_cast<double>(right_n));
    const double gamma_hat = sigma_l / sigma_r;
    const double r_hat = (abs_sum / n) * (abs_sum / n) / ((left_sq + right_sq) / n);
    const double r_norm = r_hat * (std::pow(gamma_hat, 3) + 1.0) * (gamma_hat + 1.0) /
                          std::pow(gamma_hat * gamma_hat + 1.0, 2);

    const double alpha = argmin_alpha([r_norm](double r) { return std::abs(r_norm - 1.0 / r); });
    const double g1 = std::tgamma(1.0 / alpha);
    const double g2 = std::tgamma(2.0 / alpha);
    const double g3 = std::tgamma(3.0 / alpha);
    const double eta = (sigma_r - sigma_l) * (g2 / g1) * std::sqrt(g1 / g3);
    return {alpha, sigma_l, sigma_r, eta};
}

NssScaleFeatures nss_scale_features(const Eigen::ArrayXXd& m) {
    NssScaleFeatures f;
    const std::vector<double> coeffs = to_vector(m);
    const GgdFit g = fit_ggd(coeffs);
    f(0) = g.alpha;
    f(1) = g.sigma * g.sigma;

    constexpr int shifts[4][2] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};  // H, V, D1, D2
    for (int s = 0; s < 4; ++s) {
        const std::vector<double> prod = paired_products(m, shifts[s][0], shifts[s][1]);
        const AggdFit a = fit_aggd(prod);
        f(2 + 4 * s) = a.alpha;
        f(3 + 4 * s) = a.eta;
        f(4 + 4 * s) = a.sigma_l * a.sigma_l;
        f(5 + 4 * s) = a.sigma_r * a.sigma_r;
    }
    return f;
}

Eigen::ArrayXXd nss_intensity(const Image& img) {
    Eigen::ArrayXXd v = img.values();
    if (img.domain() == Domain::Normalized) v = (v + 1.0) * 127.5;
    return v;
}

NssFeatureVector brisque_features(const Image& img, const MscnParams& params) {
    if (img.width() < 16 || img.height() < 16)
        throw std::invalid_argument("brisque_features: image must be at least 16x16");
    const Eigen::ArrayXXd full = nss_intensity(img);
    NssFeatureVector f;
    f.head<18>() = nss_scale_features(mscn_maps(full, params).coefficients);
    f.tail<18>() = nss_scale_features(mscn_maps(downsample_half(full), params).coefficients);
    return f;
}

std::vector<bool> niqe_patch_selection(const Image& img, const NiqeParams& params) {
    if (params.patch < 2 || params.patch % 2 != 0)
        throw std::invalid_argument("niqe: patch size must be even and >= 2");
    if (!(params.sharpness_fraction > 0.0) || params.sharpness_fraction > 1.0)
        throw std::invalid_argument("niqe: sharpness_fraction must lie in (0, 1]");
    const Eigen::Index per_row = img.width() / params.patch;
    const Eigen::Index per_col = img.height() / params.patch;
    if (per_row < 1 || per_col < 1) throw std::invalid_argument("niqe: patch larger than image");

    const MscnMaps maps = mscn_maps(nss_intensity(img), params.mscn);
    std::vector<double> sharpness;
    for (Eigen::Index py = 0; py < per_col; ++py)
        for (Eigen::Index px = 0; px < per_row; ++px)
            sharpness.push_back(maps.local_sigma
                                    .block(py * params.patch, px * params.patch, params.patch,
                                           params.patch)
                                    .mean());
    const double threshold =
        params.sharpness_fraction * *std::max_element(sharpness.begin(), sharpness.end());
    std::vector<bool> keep(sharpness.size());
    for (std::size_t i = 0; i < sharpness.size(); ++i) keep[i] = sharpness[i] >= threshold;
    return keep;
}

std::vector<NssFeatureVector> niqe_patch_features(const Image& img, const NiqeParams& params) {
    const std::vector<bool> keep = niqe_patch_selection(img, params);
    const Eigen::Index per_row = img.width() / params.patch;
    const Eigen::Index half = params.patch / 2;

    const Eigen::ArrayXXd full = nss_intensity(img);
    const Eigen::ArrayXXd fine = mscn_maps(full, params.mscn).coefficients;
    const Eigen::ArrayXXd coarse = mscn_maps(downsample_half(full), params.mscn).coefficients;

    std::vector<NssFeatureVector> out;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (!keep[i]) continue;
        const Eigen::Index py = static_cast<Eigen::Index>(i) / per_row;
        const Eigen::Index px = static_cast<Eigen::Index>(i) % per_row;
        NssFeatureVector f;
        f.head<18>() = nss_scale_features(
            fine.block(py * params.patch, px * params.patch, params.patch, params.patch));
        f.tail<18>() = nss_scale_features(coarse.block(py * half, px * half, half, half));
        out.push_back(f);
    }
    if (out.empty()) throw std::runtime_error("niqe: no patch survived sharpness selection");
    return out;
}

std::vector<NssFeatureVector> niqe_patch_features(const Image& img, Eigen::Index patch,
                                                  double sharpness_fraction) {
    NiqeParams p;
    p.patch = patch;
    p.sharpness_fraction = sharpness_fraction;
    return niqe_patch_features(img, p);
}

}  // namespace iqa

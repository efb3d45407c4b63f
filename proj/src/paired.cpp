#include "iqa/paired.hpp"

#include "iqa/filter.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace iqa {

namespace {

template <typename Scalar>
void require_same_shape(const ImageGrid<Scalar>& a, const ImageGrid<Scalar>& b, const char* op) {
    if (!a.same_shape(b)) throw std::invalid_argument(std::string(op) + ": image dimensions differ");
}

Eigen::ArrayXXd to_intensity_array(const Image& img) {
    Eigen::ArrayXXd v = img.values();
    if (img.domain() == Domain::Normalized) v = (v + 1.0) * 127.5;
    return v;
}

Eigen::ArrayXXd decimate(const Eigen::ArrayXXd& src) {
    const Eigen::Index r = (src.rows() + 1) / 2;
    const Eigen::Index c = (src.cols() + 1) / 2;
    Eigen::ArrayXXd out(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) out(i, j) = src(2 * i, 2 * j);
    return out;
}

}  // namespace

template <typename Scalar>
double mse(const ImageGrid<Scalar>& a, const ImageGrid<Scalar>& b) {
    require_same_shape(a, b, "mse");
    const auto diff = a.values().template cast<double>() - b.values().template cast<double>();
    return diff.square().mean();
}

template <typename Scalar>
double psnr(const ImageGrid<Scalar>& a, const ImageGrid<Scalar>& b, double peak) {
    if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be positive");
    const double err = mse(a, b);
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / err);
}

template <typename Scalar>
double psnr_image_peak(const ImageGrid<Scalar>& test, const ImageGrid<Scalar>& reference) {
    const double peak = static_cast<double>(test.values().abs().maxCoeff());
    const double err = mse(test, reference);
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    if (!(peak > 0.0)) throw std::domain_error("psnr: test image has zero peak intensity");
    return 10.0 * std::log10(peak * peak / err);
}

template <typename Scalar>
double ssim(const ImageGrid<Scalar>& a, const ImageGrid<Scalar>& b, const SsimParams& p) {
    require_same_shape(a, b, "ssim");
    if (!(p.c1() > 0.0) || !(p.c2() > 0.0))
        throw std::invalid_argument("ssim: stabilizers must be positive");
    const Eigen::Index side = 2 * p.window_radius + 1;
    if (side > a.width() || side > a.height())
        throw std::invalid_argument("ssim: window larger than image");

    const Eigen::VectorXd w = gaussian_kernel(p.window_radius, p.window_sigma);
    const Eigen::ArrayXXd x = a.values().template cast<double>();
    const Eigen::ArrayXXd y = b.values().template cast<double>();

    const Eigen::ArrayXXd mu_x = filter_valid(x, w);
    const Eigen::ArrayXXd mu_y = filter_valid(y, w);
    const Eigen::ArrayXXd var_x = filter_valid(x * x, w) - mu_x.square();
    const Eigen::ArrayXXd var_y = filter_valid(y * y, w) - mu_y.square();
    const Eigen::ArrayXXd cov = filter_valid(x * y, w) - mu_x * mu_y;

    const double c1 = p.c1();
    const double c2 = p.c2();
    const Eigen::ArrayXXd map = ((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)) /
                                ((mu_x.square() + mu_y.square() + c1) * (var_x + var_y + c2));
    return map.mean();
}

double vif(const Image& reference, const Image& test, int n_scales) {
    require_same_shape(reference, test, "vif");
    if (n_scales < 1) throw std::invalid_argument("vif: n_scales must be >= 1");

    constexpr double sigma_nsq = 2.0;
    constexpr double eps = 1e-10;

    Eigen::ArrayXXd ref = to_intensity_array(reference);
    Eigen::ArrayXXd dist = to_intensity_array(test);
    double num = 0.0;
    double den = 0.0;

    for (int scale = 1; scale <= n_scales; ++scale) {
        const Eigen::Index side = (Eigen::Index{1} << (n_scales - scale + 1)) + 1;
        const Eigen::VectorXd win = gaussian_kernel(side / 2, static_cast<double>(side) / 5.0);

        if (scale > 1) {
            if (ref.rows() < side || ref.cols() < side)
                throw std::invalid_argument("vif: image too small for the requested scales");
            ref = decimate(filter_valid(ref, win));
            dist = decimate(filter_valid(dist, win));
        }
        if (ref.rows() < side || ref.cols() < side)
            throw std::invalid_argument("vif: image too small for the requested scales");

        const Eigen::ArrayXXd mu1 = filter_valid(ref, win);
        const Eigen::ArrayXXd mu2 = filter_valid(dist, win);
        Eigen::ArrayXXd s1 = filter_valid(ref * ref, win) - mu1.square();
        Eigen::ArrayXXd s2 = filter_valid(dist * dist, win) - mu2.square();
        const Eigen::ArrayXXd s12 = filter_valid(ref * dist, win) - mu1 * mu2;
        s1 = s1.cwiseMax(0.0);
        s2 = s2.cwiseMax(0.0);

        for (Eigen::Index i = 0; i < s1.size(); ++i) {
            double var_ref = s1(i);
            double g = s12(i) / (var_ref + eps);
            double sv = s2(i) - g * s12(i);
            if (var_ref < eps) {
                g = 0.0;
                sv = s2(i);
                var_ref = 0.0;
            }
            if (s2(i) < eps) {
                g = 0.0;
                sv = 0.0;
            }
            if (g < 0.0) {
                sv = s2(i);
                g = 0.0;
            }
            sv = std::max(sv, eps);
            num += std::log10(1.0 + g * g * var_ref / (sv + sigma_nsq));
            den += std::log10(1.0 + var_ref / sigma_nsq);
        }
    }
    if (!(den > 0.0)) throw std::domain_error("vif: reference image carries no information");
    return num / den;
}

double lpips(const ActivationStack& a, const ActivationStack& b) {
    if (a.layers.size() != b.layers.size())
        throw std::invalid_argument("lpips: activation stacks have different layer counts");
    double total = 0.0;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        const auto& la = a.layers[l];
        const auto& lb = b.layers[l];
        if (la.channels != lb.channels || la.rows != lb.rows || la.cols != lb.cols ||
            la.values.size() != lb.values.size() ||
            la.values.size() != la.channels * la.rows * la.cols || la.values.size() == 0)
            throw std::invalid_argument("lpips: layer shape mismatch at '" + la.name + "'");
        const double layer_mse =
            (la.values.cast<double>() - lb.values.cast<double>()).squaredNorm() /
            static_cast<double>(la.values.size());
        total += layer_mse / static_cast<double>(la.rows * la.cols);
    }
    return total;
}

template double mse(const ImageGrid<float>&, const ImageGrid<float>&);
template double mse(const ImageGrid<double>&, const ImageGrid<double>&);
template double psnr(const ImageGrid<float>&, const ImageGrid<float>&, double);
template double psnr(const ImageGrid<double>&, const ImageGrid<double>&, double);
template double psnr_image_peak(const ImageGrid<float>&, const ImageGrid<float>&);
template double psnr_image_peak(const ImageGrid<double>&, const ImageGrid<double>&);
template double ssim(const ImageGrid<float>&, const ImageGrid<float>&, const SsimParams&);
template double ssim(const ImageGrid<double>&, const ImageGrid<double>&, const SsimParams&);

}  // namespace iqa

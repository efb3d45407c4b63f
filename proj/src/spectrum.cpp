#include "iqa/spectrum.hpp"

#include "iqa/frechet.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace iqa {

namespace {

// Signed frequency index of DFT bin k for length n.
double signed_frequency(Eigen::Index k, Eigen::Index n) {
    const Eigen::Index s = k <= (n - 1) / 2 ? k : k - n;
    return static_cast<double>(s) / static_cast<double>(n);
}

}  // namespace

Eigen::ArrayXXd power_spectrum(const Image& img) {
    const Eigen::Index h = img.height();
    const Eigen::Index w = img.width();
    Eigen::FFT<double> fft;
    Eigen::MatrixXcd spec(h, w);

    std::vector<std::complex<double>> in, out;
    in.resize(static_cast<std::size_t>(w));
    for (Eigen::Index r = 0; r < h; ++r) {
        for (Eigen::Index c = 0; c < w; ++c) in[static_cast<std::size_t>(c)] = img(r, c);
        fft.fwd(out, in);
        for (Eigen::Index c = 0; c < w; ++c) spec(r, c) = out[static_cast<std::size_t>(c)];
    }
    in.resize(static_cast<std::size_t>(h));
    for (Eigen::Index c = 0; c < w; ++c) {
        for (Eigen::Index r = 0; r < h; ++r) in[static_cast<std::size_t>(r)] = spec(r, c);
        fft.fwd(out, in);
        for (Eigen::Index r = 0; r < h; ++r) spec(r, c) = out[static_cast<std::size_t>(r)];
    }
    return spec.array().abs2();
}

RapsCurve raps(const Image& img, const RapsParams& params) {
    if (params.n_bins < 2) throw std::invalid_argument("raps: need at least 2 bins");
    if (!(params.max_radius > 0.0)) throw std::invalid_argument("raps: max_radius must be positive");
    if (img.width() != img.height()) throw std::invalid_argument("raps: image must be square (resample first)");

    const Eigen::Index n = img.width();
    const Eigen::ArrayXXd power = power_spectrum(img);
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(params.n_bins);
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(params.n_bins);
    const double bin_width = params.max_radius / static_cast<double>(params.n_bins);

    for (Eigen::Index r = 0; r < n; ++r) {
        const double fy = signed_frequency(r, n);
        for (Eigen::Index c = 0; c < n; ++c) {
            if (r == 0 && c == 0) continue;  // DC
            const double fx = signed_frequency(c, n);
            const double radius = std::sqrt(fx * fx + fy * fy);
            if (radius > params.max_radius) continue;
            const auto bin = std::min<Eigen::Index>(static_cast<Eigen::Index>(radius / bin_width),
                                                    params.n_bins - 1);
            sums(bin) += power(r, c);
            ++counts(bin);
        }
    }

    RapsCurve curve;
    curve.max_radius = params.max_radius;
    const Eigen::Index filled = (counts.array() > 0).count();
    curve.radius.resize(filled);
    curve.power.resize(filled);
    curve.counts.resize(filled);
    Eigen::Index k = 0;
    for (Eigen::Index b = 0; b < params.n_bins; ++b) {
        if (counts(b) == 0) continue;
        curve.radius(k) = (static_cast<double>(b) + 0.5) * bin_width;
        curve.power(k) = sums(b) / counts(b);
        curve.counts(k) = counts(b);
        ++k;
    }
    if (curve.size() < 2) throw std::invalid_argument("raps: image too small for the requested bins");
    return curve;
}

RapsCurve raps(const Image& img, Eigen::Index n_bins) { return raps(img, RapsParams{n_bins, 0.5}); }

Eigen::Matrix<double, Eigen::Dynamic, 2> embed_curve(const RapsCurve& curve, CurveEmbedding embedding) {
    Eigen::Matrix<double, Eigen::Dynamic, 2> pts(curve.size(), 2);
    pts.col(0) = curve.radius / curve.max_radius;
    if (embedding == CurveEmbedding::LogPower)
        pts.col(1) = (curve.power.array() + 1e-12).log10().matrix();
    else
        pts.col(1) = curve.power;
    return pts;
}

double frechet_curve_distance(const RapsCurve& a, const RapsCurve& b, CurveEmbedding embedding) {
    if (a.size() < 1 || b.size() < 1) throw std::invalid_argument("frechet_curve_distance: empty curve");
    return discrete_frechet(embed_curve(a, embedding), embed_curve(b, embedding));
}

double raps_fd(const Image& x, const Image& y_hat, const RapsParams& params, CurveEmbedding embedding) {
    if (!x.same_shape(y_hat)) throw std::invalid_argument("raps_fd: images differ in size");
    return frechet_curve_distance(raps(x, params), raps(y_hat, params), embedding);
}

}  // namespace iqa

#pragma once

#include "iqa/image.hpp"

#include <string>
#include <vector>

namespace iqa {

/// Stabilizers follow c = (k*L)^2 with dynamic range L.
struct SsimParams {
    Eigen::Index window_radius = 5;  // 11x11 window
    double window_sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 2.0;  // [-1, 1] data

    double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
    double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
};

/// One feature map of a CNN, stored channel-major ([channels, rows, cols]).
struct ActivationLayer {
    std::string name;
    Eigen::Index channels = 0;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    Eigen::VectorXf values;
};

/// Ordered per-layer activations of one image through one extractor network.
struct ActivationStack {
    std::vector<ActivationLayer> layers;
};

/// Mean of squared per-pixel differences. Throws on a shape mismatch.
template <typename Scalar>
double mse(const ImageGrid<Scalar>& a, const ImageGrid<Scalar>& b);

/// 10*log10(peak^2 / mse). Identical images give +infinity.
template <typename Scalar>
double psnr(const ImageGrid<Scalar>& a, const ImageGrid<Scalar>& b, double peak);

/// PSNR with the peak taken as the maximum of the test image `test`.
template <typename Scalar>
double psnr_image_peak(const ImageGrid<Scalar>& test, const ImageGrid<Scalar>& reference);

/// Mean SSIM over every Gaussian window that fits inside the images.
template <typename Scalar>
double ssim(const ImageGrid<Scalar>& a, const ImageGrid<Scalar>& b, const SsimParams& p = {});

/// Pixel-domain multi-scale visual information fidelity.
///
/// At scale s (1-based) a Gaussian window of side 2^(n_scales-s+1)+1 and
/// sigma side/5 estimates local statistics; scales after the first are
/// low-passed and decimated by two. Each window contributes
/// log10(1 + g^2 s_ref^2 / (s_v^2 + s_n^2)) to the test information and
/// log10(1 + s_ref^2 / s_n^2) to the reference information, s_n^2 = 2.
/// The score is their ratio. Normalized images are mapped to [0, 255] first.
/// Throws std::domain_error when the reference carries no information.
double vif(const Image& reference, const Image& test, int n_scales = 4);

/// Sum over layers of MSE(a_l, b_l) / (rows_l * cols_l). Unweighted.
double lpips(const ActivationStack& a, const ActivationStack& b);

}  // namespace iqa

#pragma once

// Natural-scene-statistics features shared by BRISQUE and NIQE.

#include "iqa/image.hpp"

#include <span>
#include <vector>

namespace iqa {

/// Zero-mean generalized Gaussian fit.
struct GgdFit {
    double alpha = 0.0;  // shape
    double sigma = 0.0;  // standard deviation
};

/// Asymmetric generalized Gaussian fit.
struct AggdFit {
    double alpha = 0.0;
    double sigma_l = 0.0;
    double sigma_r = 0.0;
    double eta = 0.0;  // mean offset
};

/// 18 values per scale times two scales:
/// [ggd alpha, ggd sigma^2, then for H, V, D1, D2: aggd alpha, eta, sigma_l^2, sigma_r^2].
using NssFeatureVector = Eigen::Matrix<double, 36, 1>;
using NssScaleFeatures = Eigen::Matrix<double, 18, 1>;

struct MscnParams {
    double sigma = 7.0 / 6.0;
    Eigen::Index radius = 3;  // 7x7 window
    double stabilizer = 1.0;
};

struct MscnMaps {
    Eigen::ArrayXXd coefficients;
    Eigen::ArrayXXd local_sigma;
};

/// (I - mu) / (sigma + stabilizer) with Gaussian-weighted local moments and
/// replicated borders. Operates on the values as given.
MscnMaps mscn_maps(const Eigen::ArrayXXd& intensity, const MscnParams& params = {});
Image mscn(const Image& img, double sigma, Eigen::Index radius, double stabilizer);

/// Moment matching over the shape grid alpha in [0.05, 10], step 0.001.
GgdFit fit_ggd(std::span<const double> samples);
AggdFit fit_aggd(std::span<const double> samples);

/// The 18 per-scale features of one MSCN map.
NssScaleFeatures nss_scale_features(const Eigen::ArrayXXd& mscn_coefficients);

/// Intensities used by the NSS models: normalized images are rescaled to
/// [0, 255]; HU rasters pass through.
Eigen::ArrayXXd nss_intensity(const Image& img);

/// 36-dimensional BRISQUE vector at the original and half scale.
NssFeatureVector brisque_features(const Image& img, const MscnParams& params = {});

struct NiqeParams {
    Eigen::Index patch = 96;
    double sharpness_fraction = 0.75;
    MscnParams mscn{};
};

/// Per-patch features of the non-overlapping patch tiling, keeping patches
/// whose mean local sigma is at least `sharpness_fraction` of the sharpest.
std::vector<NssFeatureVector> niqe_patch_features(const Image& img, const NiqeParams& params);
std::vector<NssFeatureVector> niqe_patch_features(const Image& img, Eigen::Index patch,
                                                  double sharpness_fraction);

/// Patch selection mask (row-major over patch origins) used by
/// niqe_patch_features; exposed for inspection.
std::vector<bool> niqe_patch_selection(const Image& img, const NiqeParams& params);

}  // namespace iqa

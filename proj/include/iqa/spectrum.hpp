#pragma once

// Radially averaged power spectrum and the RAPS-FD curve distance.

#include "iqa/image.hpp"

namespace iqa {

/// |F|^2 of the 2-D DFT, unshifted (DC at (0, 0)), unnormalized.
Eigen::ArrayXXd power_spectrum(const Image& img);

struct RapsParams {
    Eigen::Index n_bins = 32;
    /// Outer radius in cycles/pixel. 0.5 stops at Nyquist; sqrt(0.5) makes
    /// the annuli partition every non-DC frequency.
    double max_radius = 0.5;
};

/// Per-annulus mean power. Empty annuli are dropped, so radii stay strictly
/// increasing; `counts` holds the number of frequencies per point.
struct RapsCurve {
    Eigen::VectorXd radius;  // bin centers, cycles/pixel
    Eigen::VectorXd power;   // mean |F|^2 per bin
    Eigen::VectorXi counts;
    double max_radius = 0.5;

    Eigen::Index size() const { return radius.size(); }
};

RapsCurve raps(const Image& img, const RapsParams& params);
RapsCurve raps(const Image& img, Eigen::Index n_bins);

enum class CurveEmbedding { LogPower, LinearPower };

/// Curve points as (radius / max_radius, log10(power + 1e-12)) or with
/// linear power in the second coordinate.
Eigen::Matrix<double, Eigen::Dynamic, 2> embed_curve(const RapsCurve& curve,
                                                     CurveEmbedding embedding = CurveEmbedding::LogPower);

double frechet_curve_distance(const RapsCurve& a, const RapsCurve& b,
                              CurveEmbedding embedding = CurveEmbedding::LogPower);

/// Frechet distance between the RAPS curves of two equally sized images.
double raps_fd(const Image& x, const Image& y_hat, const RapsParams& params = {},
               CurveEmbedding embedding = CurveEmbedding::LogPower);

}  // namespace iqa

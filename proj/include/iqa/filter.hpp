#pragma once

#include <Eigen/Dense>

namespace iqa {

/// Normalized 1-D Gaussian taps of length 2*radius+1.
Eigen::VectorXd gaussian_kernel(Eigen::Index radius, double sigma);

/// Separable correlation with `kernel` along both axes, keeping only output
/// positions where the full window lies inside the input.
Eigen::ArrayXXd filter_valid(const Eigen::ArrayXXd& src, const Eigen::VectorXd& kernel);

/// Separable correlation with edge replication; output has the input shape.
Eigen::ArrayXXd filter_replicate(const Eigen::ArrayXXd& src, const Eigen::VectorXd& kernel);

/// 2x2 box average, truncating odd trailing rows/columns.
Eigen::ArrayXXd downsample_half(const Eigen::ArrayXXd& src);

}  // namespace iqa

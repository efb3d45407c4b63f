#include "iqa/filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iqa {

Eigen::VectorXd gaussian_kernel(Eigen::Index radius, double sigma) {
    if (radius < 0 || !(sigma > 0.0)) throw std::invalid_argument("gaussian_kernel: bad radius/sigma");
    Eigen::VectorXd k(2 * radius + 1);
    for (Eigen::Index i = -radius; i <= radius; ++i)
        k(i + radius) = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
    return k / k.sum();
}

Eigen::ArrayXXd filter_valid(const Eigen::ArrayXXd& src, const Eigen::VectorXd& kernel) {
    const Eigen::Index n = kernel.size();
    if (src.rows() < n || src.cols() < n)
        throw std::invalid_argument("filter_valid: window larger than image");

    const Eigen::Index out_r = src.rows() - n + 1;
    const Eigen::Index out_c = src.cols() - n + 1;
    Eigen::ArrayXXd tmp = Eigen::ArrayXXd::Zero(out_r, src.cols());
    for (Eigen::Index k = 0; k < n; ++k) tmp += kernel(k) * src.middleRows(k, out_r);
    Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(out_r, out_c);
    for (Eigen::Index k = 0; k < n; ++k) out += kernel(k) * tmp.middleCols(k, out_c);
    return out;
}

Eigen::ArrayXXd filter_replicate(const Eigen::ArrayXXd& src, const Eigen::VectorXd& kernel) {
    const Eigen::Index radius = kernel.size() / 2;
    const Eigen::Index rows = src.rows();
    const Eigen::Index cols = src.cols();

    Eigen::ArrayXXd padded(rows + 2 * radius, cols + 2 * radius);
    for (Eigen::Index r = 0; r < padded.rows(); ++r) {
        const Eigen::Index sr = std::clamp<Eigen::Index>(r - radius, 0, rows - 1);
        for (Eigen::Index c = 0; c < padded.cols(); ++c)
            padded(r, c) = src(sr, std::clamp<Eigen::Index>(c - radius, 0, cols - 1));
    }
    return filter_valid(padded, kernel);
}

Eigen::ArrayXXd downsample_half(const Eigen::ArrayXXd& src) {
    const Eigen::Index r = src.rows() / 2;
    const Eigen::Index c = src.cols() / 2;
    if (r < 1 || c < 1) throw std::invalid_argument("downsample_half: image too small");
    Eigen::ArrayXXd out(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i)
            out(i, j) = 0.25 * (src(2 * i, 2 * j) + src(2 * i + 1, 2 * j) + src(2 * i, 2 * j + 1) +
                                src(2 * i + 1, 2 * j + 1));
    return out;
}

}  // namespace iqa

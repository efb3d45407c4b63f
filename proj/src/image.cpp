#include "iqa/image.hpp"

#include <algorithm>
#include <cmath>

namespace iqa {

template <typename Scalar>
ImageGrid<Scalar> window_normalize(const ImageGrid<Scalar>& img, const WindowSpec& window) {
    if (!(window.width > 0.0))
        throw std::invalid_argument("window_normalize: window width must be positive");
    if (img.domain() != Domain::HU)
        throw std::invalid_argument("window_normalize: input must be in the HU domain");

    const double half = window.width / 2.0;
    typename ImageGrid<Scalar>::Array out = img.values().unaryExpr([&](Scalar hu) {
        const double v = (static_cast<double>(hu) - window.center) / half;
        return static_cast<Scalar>(std::clamp(v, -1.0, 1.0));
    });
    return ImageGrid<Scalar>(std::move(out), Domain::Normalized);
}

template <typename Scalar>
ImageGrid<Scalar> resize_bilinear(const ImageGrid<Scalar>& img, Eigen::Index out_width,
                                  Eigen::Index out_height) {
    if (out_width < 1 || out_height < 1)
        throw std::invalid_argument("resize_bilinear: empty target size");
    if (out_width == img.width() && out_height == img.height()) return img;

    const auto& src = img.values();
    const Eigen::Index in_w = img.width();
    const Eigen::Index in_h = img.height();

    // Corner-aligned: output index i samples source coordinate i*(in-1)/(out-1).
    auto source_coord = [](Eigen::Index i, Eigen::Index in, Eigen::Index out) {
        if (out == 1) return 0.0;
        return static_cast<double>(i * (in - 1)) / static_cast<double>(out - 1);
    };

    typename ImageGrid<Scalar>::Array out(out_height, out_width);
    for (Eigen::Index r = 0; r < out_height; ++r) {
        const double sy = source_coord(r, in_h, out_height);
        const auto y0 = static_cast<Eigen::Index>(std::floor(sy));
        const Eigen::Index y1 = std::min(y0 + 1, in_h - 1);
        const double fy = sy - static_cast<double>(y0);
        for (Eigen::Index c = 0; c < out_width; ++c) {
            const double sx = source_coord(c, in_w, out_width);
            const auto x0 = static_cast<Eigen::Index>(std::floor(sx));
            const Eigen::Index x1 = std::min(x0 + 1, in_w - 1);
            const double fx = sx - static_cast<double>(x0);
            const double top = (1.0 - fx) * src(y0, x0) + fx * src(y0, x1);
            const double bottom = (1.0 - fx) * src(y1, x0) + fx * src(y1, x1);
            out(r, c) = static_cast<Scalar>((1.0 - fy) * top + fy * bottom);
        }
    }
    if (img.domain() == Domain::Normalized) out = out.cwiseMax(Scalar(-1)).cwiseMin(Scalar(1));
    return ImageGrid<Scalar>(std::move(out), img.domain());
}

template <typename Scalar>
PatchSet<Scalar> extract_patches(const ImageGrid<Scalar>& img, Eigen::Index size,
                                 Eigen::Index stride) {
    if (stride < 1) throw std::invalid_argument("extract_patches: stride must be >= 1");
    if (size < 1 || size > std::min(img.width(), img.height()))
        throw std::invalid_argument("extract_patches: patch size larger than image");

    PatchSet<Scalar> set;
    set.patch_size = size;
    set.stride = stride;
    set.per_row = patch_count(img.width(), size, stride);
    set.per_col = patch_count(img.height(), size, stride);
    set.patches.reserve(static_cast<std::size_t>(set.per_row * set.per_col));
    for (Eigen::Index py = 0; py < set.per_col; ++py)
        for (Eigen::Index px = 0; px < set.per_row; ++px)
            set.patches.emplace_back(img.values().block(py * stride, px * stride, size, size),
                                     img.domain());
    return set;
}

template ImageGrid<float> window_normalize(const ImageGrid<float>&, const WindowSpec&);
template ImageGrid<double> window_normalize(const ImageGrid<double>&, const WindowSpec&);
template ImageGrid<float> resize_bilinear(const ImageGrid<float>&, Eigen::Index, Eigen::Index);
template ImageGrid<double> resize_bilinear(const ImageGrid<double>&, Eigen::Index, Eigen::Index);
template PatchSet<float> extract_patches(const ImageGrid<float>&, Eigen::Index, Eigen::Index);
template PatchSet<double> extract_patches(const ImageGrid<double>&, Eigen::Index, Eigen::Index);

}  // namespace iqa

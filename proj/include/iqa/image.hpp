#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace iqa {

/// Intensity domain of a raster. Derived rasters (MSCN maps, spectra) that
/// are not bounded to [-1, 1] carry the HU tag, meaning "unconstrained".
enum class Domain : std::uint8_t { HU = 0, Normalized = 1 };

/// Row-major 2-D scalar raster with an intensity-domain tag.
///
/// Invariants enforced at construction: width, height >= 1, and every value
/// lies in [-1, 1] when the domain is Normalized.
template <typename Scalar>
class ImageGrid {
public:
    using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    ImageGrid(Array values, Domain domain) : values_(std::move(values)), domain_(domain) {
        if (values_.rows() < 1 || values_.cols() < 1)
            throw std::invalid_argument("ImageGrid: width and height must be >= 1");
        if (domain_ == Domain::Normalized &&
            ((values_ < Scalar(-1)).any() || (values_ > Scalar(1)).any() || values_.isNaN().any()))
            throw std::invalid_argument("ImageGrid: normalized values must lie in [-1, 1]");
    }

    static ImageGrid constant(Eigen::Index height, Eigen::Index width, Scalar value,
                              Domain domain = Domain::Normalized) {
        if (height < 1 || width < 1)
            throw std::invalid_argument("ImageGrid: width and height must be >= 1");
        return ImageGrid(Array::Constant(height, width, value), domain);
    }

    Eigen::Index width() const noexcept { return values_.cols(); }
    Eigen::Index height() const noexcept { return values_.rows(); }
    Eigen::Index size() const noexcept { return values_.size(); }
    Domain domain() const noexcept { return domain_; }

    const Array& values() const noexcept { return values_; }
    Scalar operator()(Eigen::Index row, Eigen::Index col) const { return values_(row, col); }

    std::span<const Scalar> data() const noexcept {
        return {values_.data(), static_cast<std::size_t>(values_.size())};
    }

    template <typename Other>
    ImageGrid<Other> cast() const {
        return ImageGrid<Other>(values_.template cast<Other>(), domain_);
    }

    bool same_shape(const ImageGrid& other) const noexcept {
        return width() == other.width() && height() == other.height();
    }

private:
    Array values_;
    Domain domain_;
};

using Image = ImageGrid<double>;
using ImageF = ImageGrid<float>;

/// Boolean pixel mask with the same layout as ImageGrid values.
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// CT display window in Hounsfield units.
struct WindowSpec {
    double center = -500.0;
    double width = 1400.0;
};

template <typename Scalar>
struct PatchSet {
    Eigen::Index patch_size = 0;
    Eigen::Index stride = 1;
    Eigen::Index per_row = 0;  // patches along x
    Eigen::Index per_col = 0;  // patches along y
    std::vector<ImageGrid<Scalar>> patches;  // row-major over patch origins
};

/// Maps [center - width/2, center + width/2] linearly onto [-1, 1], clamping
/// values outside the window. Throws on a non-positive width or non-HU input.
template <typename Scalar>
ImageGrid<Scalar> window_normalize(const ImageGrid<Scalar>& img, const WindowSpec& window);

/// Bilinear resampling with corner-aligned sample positions. A same-size call
/// returns the input values unchanged.
template <typename Scalar>
ImageGrid<Scalar> resize_bilinear(const ImageGrid<Scalar>& img, Eigen::Index out_width,
                                  Eigen::Index out_height);

/// Square patches at offsets {0, stride, 2*stride, ...} along both axes while
/// the patch still fits.
template <typename Scalar>
PatchSet<Scalar> extract_patches(const ImageGrid<Scalar>& img, Eigen::Index size,
                                 Eigen::Index stride);

/// Number of patch origins along an axis of length `extent`.
inline Eigen::Index patch_count(Eigen::Index extent, Eigen::Index size, Eigen::Index stride) {
    return extent < size ? 0 : (extent - size) / stride + 1;
}

}  // namespace iqa

#pragma once

#include "iqa/image.hpp"

#include <filesystem>
#include <iosfwd>

namespace iqa {

// "IQAI" container: magic, u32 width, u32 height, u8 domain tag, then
// width*height little-endian f32 values in row-major order.

ImageF read_iqai(std::istream& in);
ImageF read_iqai(const std::filesystem::path& path);
void write_iqai(std::ostream& out, const ImageF& img);
void write_iqai(const std::filesystem::path& path, const ImageF& img);

/// Plain-text raster: one image row per line, comma or whitespace separated.
Image read_csv_raster(const std::filesystem::path& path, Domain domain = Domain::Normalized);

/// Dispatches on extension: ".csv" reads a text raster, anything else IQAI.
Image load_image(const std::filesystem::path& path);
void save_image(const std::filesystem::path& path, const Image& img);

}  // namespace iqa

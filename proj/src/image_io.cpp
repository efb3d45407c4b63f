#include "iqa/image_io.hpp"

#include "binary_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace iqa {

namespace {
constexpr char kImageMagic[4] = {'I', 'Q', 'A', 'I'};
constexpr std::uint32_t kMaxSide = 1u << 15;
}  // namespace

ImageF read_iqai(std::istream& in) {
    char magic[4];
    detail::read_exact(in, magic, 4, "IQAI magic");
    if (!std::equal(magic, magic + 4, kImageMagic)) throw std::runtime_error("not an IQAI file");
    const std::uint32_t w = detail::get_u32(in, "IQAI width");
    const std::uint32_t h = detail::get_u32(in, "IQAI height");
    if (w == 0 || h == 0 || w > kMaxSide || h > kMaxSide)
        throw std::runtime_error("IQAI: invalid dimensions");
    char tag = 0;
    detail::read_exact(in, &tag, 1, "IQAI domain tag");
    if (tag != 0 && tag != 1) throw std::runtime_error("IQAI: unknown domain tag");

    ImageF::Array values(h, w);
    for (Eigen::Index i = 0; i < values.size(); ++i)
        values.data()[i] = detail::get_f32(in, "IQAI payload");
    return ImageF(std::move(values), static_cast<Domain>(tag));
}

ImageF read_iqai(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open image " + path.string());
    return read_iqai(in);
}

void write_iqai(std::ostream& out, const ImageF& img) {
    out.write(kImageMagic, 4);
    detail::put_u32(out, static_cast<std::uint32_t>(img.width()));
    detail::put_u32(out, static_cast<std::uint32_t>(img.height()));
    const char tag = static_cast<char>(img.domain());
    out.write(&tag, 1);
    for (float v : img.data()) detail::put_f32(out, v);
}

void write_iqai(const std::filesystem::path& path, const ImageF& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write image " + path.string());
    write_iqai(out, img);
}

Image read_csv_raster(const std::filesystem::path& path, Domain domain) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open raster " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        std::vector<double> row;
        double v = 0.0;
        while (fields >> v) row.push_back(v);
        if (!fields.eof()) throw std::runtime_error("malformed raster row in " + path.string());
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("empty raster " + path.string());
    Image::Array values(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows.front().size())
            throw std::runtime_error("ragged raster rows in " + path.string());
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return Image(std::move(values), domain);
}

Image load_image(const std::filesystem::path& path) {
    if (path.extension() == ".csv") return read_csv_raster(path);
    return read_iqai(path).cast<double>();
}

void save_image(const std::filesystem::path& path, const Image& img) {
    write_iqai(path, img.cast<float>());
}

}  // namespace iqa

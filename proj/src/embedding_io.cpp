#include "iqa/embedding_io.hpp"

#include "binary_io.hpp"
#include "iqa/diagnostics.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace iqa {

using json = nlohmann::json;

namespace {

constexpr char kEmbeddingMagic[4] = {'I', 'Q', 'A', 'E'};
constexpr std::uint32_t kMaxRank = 8;
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

Eigen::VectorXd vector_from(const json& j, const char* key) {
    const auto& arr = j.at(key);
    if (!arr.is_array()) throw std::runtime_error(std::string("model: '") + key + "' must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    return v;
}

Eigen::MatrixXd matrix_from(const json& j, const char* key) {
    const auto& rows = j.at(key);
    if (!rows.is_array() || rows.empty())
        throw std::runtime_error(std::string("model: '") + key + "' must be a non-empty array of rows");
    const std::size_t cols = rows[0].size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!rows[r].is_array() || rows[r].size() != cols)
            throw std::runtime_error(std::string("model: ragged rows in '") + key + "'");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
    }
    return m;
}

json to_array(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json to_rows(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const Eigen::VectorXd row = m.row(r).transpose();
        rows.push_back(to_array(row));
    }
    return rows;
}

json parse_json(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string(what) + ": malformed JSON: " + e.what());
    }
}

}  // namespace

EmbeddingFile read_iqae(std::istream& in) {
    char magic[4];
    detail::read_exact(in, magic, 4, "IQAE magic");
    if (!std::equal(magic, magic + 4, kEmbeddingMagic)) throw std::runtime_error("not an IQAE file");
    EmbeddingFile file;
    file.version = detail::get_u32(in, "IQAE version");
    if (file.version != 1 && file.version != 2)
        throw std::runtime_error("IQAE: unsupported version " + std::to_string(file.version));
    const std::uint32_t count = detail::get_u32(in, "IQAE record count");
    if (file.version == 2) file.metadata = detail::get_string(in, "IQAE metadata");

    file.records.reserve(std::min<std::uint32_t>(count, 1u << 16));
    for (std::uint32_t i = 0; i < count; ++i) {
        EmbeddingRecord rec;
        rec.image_id = detail::get_string(in, "IQAE image id", 1u << 16);
        rec.tensor = detail::get_string(in, "IQAE tensor name", 1u << 16);
        const std::uint32_t rank = detail::get_u32(in, "IQAE rank");
        if (rank == 0 || rank > kMaxRank) throw std::runtime_error("IQAE: invalid tensor rank");
        std::uint64_t elements = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            rec.dims.push_back(detail::get_u32(in, "IQAE dims"));
            elements *= rec.dims.back();
            if (elements > kMaxElements) throw std::runtime_error("IQAE: tensor too large");
        }
        rec.values.resize(static_cast<std::size_t>(elements));
        for (auto& v : rec.values) v = detail::get_f32(in, "IQAE payload");
        file.records.push_back(std::move(rec));
    }
    return file;
}

EmbeddingFile read_iqae(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open embeddings " + path.string());
    return read_iqae(in);
}

void write_iqae(std::ostream& out, const EmbeddingFile& file) {
    out.write(kEmbeddingMagic, 4);
    const std::uint32_t version = file.metadata.empty() ? file.version : 2u;
    detail::put_u32(out, version);
    detail::put_u32(out, static_cast<std::uint32_t>(file.records.size()));
    if (version == 2) detail::put_string(out, file.metadata);
    for (const auto& rec : file.records) {
        std::uint64_t elements = 1;
        for (auto d : rec.dims) elements *= d;
        if (rec.dims.empty() || elements != rec.values.size())
            throw std::invalid_argument("IQAE: record '" + rec.image_id + "' dims do not match payload");
        detail::put_string(out, rec.image_id);
        detail::put_string(out, rec.tensor);
        detail::put_u32(out, static_cast<std::uint32_t>(rec.dims.size()));
        for (auto d : rec.dims) detail::put_u32(out, d);
        for (float v : rec.values) detail::put_f32(out, v);
    }
}

void write_iqae(const std::filesystem::path& path, const EmbeddingFile& file) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write embeddings " + path.string());
    write_iqae(out, file);
}

ActivationStack activation_stack(const EmbeddingFile& file, const std::string& image_id) {
    ActivationStack stack;
    for (const auto& rec : file.records) {
        if (rec.image_id != image_id) continue;
        ActivationLayer layer;
        layer.name = rec.tensor;
        if (rec.dims.size() == 3) {
            layer.channels = rec.dims[0];
            layer.rows = rec.dims[1];
            layer.cols = rec.dims[2];
        } else if (rec.dims.size() == 2) {
            layer.channels = 1;
            layer.rows = rec.dims[0];
            layer.cols = rec.dims[1];
        } else {
            throw std::runtime_error("IQAE: activation '" + rec.tensor + "' must be rank 2 or 3");
        }
        layer.values = Eigen::Map<const Eigen::VectorXf>(rec.values.data(),
                                                         static_cast<Eigen::Index>(rec.values.size()));
        stack.layers.push_back(std::move(layer));
    }
    if (stack.layers.empty()) throw std::runtime_error("IQAE: no activations for '" + image_id + "'");
    return stack;
}

namespace {

template <typename Pred>
Eigen::MatrixXd collect_rows(const EmbeddingFile& file, Pred&& match, const std::string& what) {
    std::vector<const EmbeddingRecord*> hits;
    for (const auto& rec : file.records)
        if (match(rec)) hits.push_back(&rec);
    if (hits.empty()) throw std::runtime_error("IQAE: no '" + what + "' records");

    Eigen::Index rows = 0;
    Eigen::Index cols = -1;
    for (const auto* rec : hits) {
        if (rec->dims.size() > 2) throw std::runtime_error("IQAE: '" + what + "' must be rank 1 or 2");
        const Eigen::Index c = rec->dims.back();
        const Eigen::Index r = rec->dims.size() == 2 ? rec->dims[0] : 1;
        if (cols >= 0 && c != cols) throw std::runtime_error("IQAE: ragged '" + what + "' dimensions");
        cols = c;
        rows += r;
    }
    Eigen::MatrixXd m(rows, cols);
    Eigen::Index at = 0;
    for (const auto* rec : hits) {
        const Eigen::Index r = static_cast<Eigen::Index>(rec->values.size()) / cols;
        m.middleRows(at, r) =
            Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                rec->values.data(), r, cols)
                .cast<double>();
        at += r;
    }
    return m;
}

}  // namespace

Eigen::MatrixXd embedding_matrix(const EmbeddingFile& file, const std::string& image_id,
                                 const std::string& tensor) {
    return collect_rows(
        file, [&](const EmbeddingRecord& r) { return r.image_id == image_id && r.tensor == tensor; },
        image_id + "/" + tensor);
}

Eigen::MatrixXd embedding_pool(const EmbeddingFile& file, const std::string& tensor) {
    return collect_rows(file, [&](const EmbeddingRecord& r) { return r.tensor == tensor; }, tensor);
}

std::map<std::string, double> read_external_scores(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open score file " + path.string());
    std::map<std::string, double> scores;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected 'image_id,score'");
        const std::string id = trim(line.substr(0, comma));
        const std::string value = trim(line.substr(comma + 1));
        if (line_no == 1 && id == "image_id") continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (id.empty() || used == 0 || used != value.size())
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": malformed score row");
        if (!scores.emplace(id, v).second)
            throw std::runtime_error(path.string() + ": duplicate image id '" + id + "'");
    }
    if (scores.empty()) warn("score file " + path.string() + " contains no scores");
    return scores;
}

void write_external_scores(const std::filesystem::path& path, const std::map<std::string, double>& scores) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write score file " + path.string());
    out << "image_id,score\n";
    out.precision(17);
    for (const auto& [id, v] : scores) out << id << ',' << v << '\n';
}

SvrModel parse_svr_model(const std::string& text) {
    const json j = parse_json(text, "svr model");
    SvrModel m;
    try {
        m.gamma = j.at("gamma").get<double>();
        m.bias = j.at("bias").get<double>();
        const auto& range = j.at("score_range");
        if (!range.is_array() || range.size() != 2) throw std::runtime_error("svr model: score_range needs 2 values");
        m.score_lo = range[0].get<double>();
        m.score_hi = range[1].get<double>();
        m.feature_min = vector_from(j, "feature_min");
        m.feature_max = vector_from(j, "feature_max");
        m.support_vectors = matrix_from(j, "support_vectors");
        m.dual_coeffs = vector_from(j, "dual_coeffs");
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("svr model: ") + e.what());
    }
    try {
        validate(m);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(e.what());
    }
    return m;
}

SvrModel read_svr_model(const std::filesystem::path& path) { return parse_svr_model(slurp(path)); }

std::string svr_model_to_json(const SvrModel& m) {
    json j;
    j["schema"] = "iqa.svr_model.v1";
    j["gamma"] = m.gamma;
    j["bias"] = m.bias;
    j["score_range"] = {m.score_lo, m.score_hi};
    j["feature_min"] = to_array(m.feature_min);
    j["feature_max"] = to_array(m.feature_max);
    j["support_vectors"] = to_rows(m.support_vectors);
    j["dual_coeffs"] = to_array(m.dual_coeffs);
    return j.dump(2);
}

MvgModel parse_mvg_model(const std::string& text) {
    const json j = parse_json(text, "mvg model");
    MvgModel m;
    try {
        m.mean = vector_from(j, "mean");
        m.cov = matrix_from(j, "cov");
        m.n = j.value("n", Eigen::Index{0});
        m.rank_deficient = j.value("rank_deficient", false);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("mvg model: ") + e.what());
    }
    if (m.cov.rows() != m.mean.size() || m.cov.cols() != m.mean.size())
        throw std::runtime_error("mvg model: covariance shape does not match mean");
    if ((m.cov - m.cov.transpose()).cwiseAbs().maxCoeff() > 1e-8)
        throw std::runtime_error("mvg model: covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.cov, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()))
        throw std::runtime_error("mvg model: covariance is not positive semidefinite");
    return m;
}

MvgModel read_mvg_model(const std::filesystem::path& path) { return parse_mvg_model(slurp(path)); }

std::string mvg_model_to_json(const MvgModel& m) {
    json j;
    j["schema"] = "iqa.mvg_model.v1";
    j["n"] = m.n;
    j["rank_deficient"] = m.rank_deficient;
    j["mean"] = to_array(m.mean);
    j["cov"] = to_rows(m.cov);
    return j.dump(2);
}

}  // namespace iqa

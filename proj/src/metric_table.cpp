#include "iqa/metric_table.hpp"

#include "text_format.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace iqa {

namespace {

const std::vector<std::pair<std::string, MetricClass>>& registry() {
    static const std::vector<std::pair<std::string, MetricClass>> r = {
        {"MSE", MetricClass::Pixel},          {"PSNR", MetricClass::Pixel},
        {"SSIM", MetricClass::Pixel},         {"VIF", MetricClass::Perceptual},
        {"LPIPS1", MetricClass::Perceptual},  {"LPIPS2", MetricClass::Perceptual},
        {"LPIPS3", MetricClass::Perceptual},  {"FID", MetricClass::Distribution},
        {"KID", MetricClass::Distribution},   {"IS", MetricClass::Distribution},
        {"SNR", MetricClass::NoReference},    {"BRISQUE", MetricClass::NoReference},
        {"RAPS-FD", MetricClass::NoReference}, {"PaQ-2-PiQ", MetricClass::NoReference},
        {"NIQE", MetricClass::NoReference},
    };
    return r;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

void check_field(const std::string& s) {
    if (s.find_first_of(",\n\r") != std::string::npos)
        throw std::invalid_argument("metric table: field contains a separator: '" + s + "'");
}

}  // namespace

std::string to_string(MetricClass c) {
    switch (c) {
        case MetricClass::Pixel: return "pixel";
        case MetricClass::Perceptual: return "perceptual";
        case MetricClass::Distribution: return "distribution";
        case MetricClass::NoReference: return "no-reference";
    }
    return "pixel";
}

MetricClass metric_class_from_string(const std::string& s) {
    if (s == "pixel") return MetricClass::Pixel;
    if (s == "perceptual") return MetricClass::Perceptual;
    if (s == "distribution") return MetricClass::Distribution;
    if (s == "no-reference") return MetricClass::NoReference;
    throw std::invalid_argument("unknown metric class '" + s + "'");
}

std::optional<MetricClass> standard_metric_class(const std::string& name) {
    for (const auto& [n, c] : registry())
        if (n == name) return c;
    return std::nullopt;
}

const std::vector<std::string>& standard_metric_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& entry : registry()) v.push_back(entry.first);
        return v;
    }();
    return names;
}

Eigen::Index MetricTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < metrics.size(); ++i)
        if (metrics[i].name == name) return static_cast<Eigen::Index>(i);
    throw std::out_of_range("metric table has no column '" + name + "'");
}

bool MetricTable::has_metric(const std::string& name) const {
    return std::any_of(metrics.begin(), metrics.end(), [&](const MetricInfo& m) { return m.name == name; });
}

std::vector<std::string> MetricTable::names_of_class(MetricClass c) const {
    std::vector<std::string> out;
    for (const auto& m : metrics)
        if (m.cls == c) out.push_back(m.name);
    return out;
}

void MetricTable::validate() const {
    if (values.rows() != static_cast<Eigen::Index>(image_ids.size()) ||
        values.cols() != static_cast<Eigen::Index>(metrics.size()))
        throw std::invalid_argument("metric table: value matrix does not match ids/metrics");
    if (!patient_ids.empty() && patient_ids.size() != image_ids.size())
        throw std::invalid_argument("metric table: patient id column length mismatch");
    std::vector<std::string> ids = image_ids;
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw std::invalid_argument("metric table: duplicate image ids");
}

MetricTable MetricTable::sorted_by_id() const {
    std::vector<std::size_t> order(image_ids.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return image_ids[a] < image_ids[b]; });
    MetricTable out;
    out.metrics = metrics;
    out.values.resize(values.rows(), values.cols());
    std::vector<Eigen::Index> new_row(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        out.image_ids.push_back(image_ids[order[k]]);
        if (!patient_ids.empty()) out.patient_ids.push_back(patient_ids[order[k]]);
        out.values.row(static_cast<Eigen::Index>(k)) = values.row(static_cast<Eigen::Index>(order[k]));
        new_row[order[k]] = static_cast<Eigen::Index>(k);
    }
    for (const auto& [cell, reason] : missing_reasons)
        out.missing_reasons[{new_row[static_cast<std::size_t>(cell.first)], cell.second}] = reason;
    return out;
}

void write_metric_table_csv(const std::filesystem::path& path, const MetricTable& table,
                            const std::string& config_json) {
    table.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write metric table " + path.string());
    out << "# schema: iqa.metric_table.v1\n";
    out << "# config: " << nlohmann::json::parse(config_json).dump() << '\n';
    out << "# classes: ";
    for (std::size_t j = 0; j < table.metrics.size(); ++j)
        out << (j ? "," : "") << to_string(table.metrics[j].cls);
    out << "\nimage_id,patient_id";
    for (const auto& m : table.metrics) {
        check_field(m.name);
        out << ',' << m.name;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        const auto& id = table.image_ids[static_cast<std::size_t>(i)];
        const std::string patient = table.patient_ids.empty() ? "" : table.patient_ids[static_cast<std::size_t>(i)];
        check_field(id);
        check_field(patient);
        out << id << ',' << patient;
        for (Eigen::Index j = 0; j < table.cols(); ++j) out << ',' << detail::format_number(table.values(i, j));
        out << '\n';
    }
}

MetricTable read_metric_table_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open metric table " + path.string());
    MetricTable t;
    std::vector<std::string> classes;
    std::vector<std::vector<double>> rows;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("# classes: ", 0) == 0) {
            classes = split(line.substr(11), ',');
            continue;
        }
        if (line.front() == '#') continue;
        const auto fields = split(line, ',');
        if (!have_header) {
            if (fields.size() < 2 || fields[0] != "image_id" || fields[1] != "patient_id")
                throw std::runtime_error("metric table: expected 'image_id,patient_id,...' header");
            for (std::size_t j = 2; j < fields.size(); ++j) {
                MetricInfo info{fields[j], MetricClass::Pixel};
                if (j - 2 < classes.size())
                    info.cls = metric_class_from_string(classes[j - 2]);
                else if (auto c = standard_metric_class(fields[j]))
                    info.cls = *c;
                else
                    throw std::runtime_error("metric table: no class for metric '" + fields[j] + "'");
                t.metrics.push_back(info);
            }
            have_header = true;
            continue;
        }
        if (fields.size() != t.metrics.size() + 2)
            throw std::runtime_error("metric table: row '" + fields.at(0) + "' has wrong field count");
        t.image_ids.push_back(fields[0]);
        t.patient_ids.push_back(fields[1]);
        std::vector<double> row;
        for (std::size_t j = 2; j < fields.size(); ++j) row.push_back(detail::parse_number(fields[j]));
        rows.push_back(std::move(row));
    }
    if (!have_header) throw std::runtime_error("metric table: missing header in " + path.string());
    if (std::all_of(t.patient_ids.begin(), t.patient_ids.end(), [](const std::string& s) { return s.empty(); }))
        t.patient_ids.clear();
    t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.metrics.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    t.validate();
    return t;
}

std::string metric_table_to_json(const MetricTable& table, const std::string& config_json) {
    using nlohmann::json;
    table.validate();
    json j;
    j["schema"] = "iqa.metric_table.v1";
    j["config"] = json::parse(config_json);
    json metrics = json::array();
    for (const auto& m : table.metrics) metrics.push_back({{"name", m.name}, {"class", to_string(m.cls)}});
    j["metrics"] = metrics;
    json rows = json::array();
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        json row;
        row["image_id"] = table.image_ids[static_cast<std::size_t>(i)];
        if (!table.patient_ids.empty()) row["patient_id"] = table.patient_ids[static_cast<std::size_t>(i)];
        json scores = json::object();
        for (Eigen::Index k = 0; k < table.cols(); ++k) {
            const double v = table.values(i, k);
            const auto& name = table.metrics[static_cast<std::size_t>(k)].name;
            if (std::isnan(v))
                scores[name] = nullptr;
            else if (std::isinf(v))
                scores[name] = v > 0 ? "inf" : "-inf";
            else
                scores[name] = v;
        }
        row["scores"] = scores;
        rows.push_back(row);
    }
    j["rows"] = rows;
    json missing = json::array();
    for (const auto& [cell, reason] : table.missing_reasons)
        missing.push_back({{"image_id", table.image_ids[static_cast<std::size_t>(cell.first)]},
                           {"metric", table.metrics[static_cast<std::size_t>(cell.second)].name},
                           {"reason", reason}});
    j["missing"] = missing;
    return j.dump(2);
}

}  // namespace iqa

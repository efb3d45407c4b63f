#include "iqa/stats.hpp"

#include "text_format.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace iqa {

using nlohmann::json;

namespace {

void require_pair(std::span<const double> u, std::span<const double> v, const char* op) {
    if (u.size() != v.size()) throw std::invalid_argument(std::string(op) + ": length mismatch");
    if (u.size() < 3) throw std::invalid_argument(std::string(op) + ": need at least 3 observations");
    auto constant = [](std::span<const double> x) {
        return std::all_of(x.begin(), x.end(), [&](double e) { return e == x.front(); });
    };
    if (constant(u) || constant(v)) throw std::invalid_argument(std::string(op) + ": constant input");
}

double pearson_unchecked(std::span<const double> u, std::span<const double> v) {
    const double n = static_cast<double>(u.size());
    const double mu = std::accumulate(u.begin(), u.end(), 0.0) / n;
    const double mv = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double suv = 0.0, suu = 0.0, svv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double du = u[i] - mu;
        const double dv = v[i] - mv;
        suv += du * dv;
        suu += du * du;
        svv += dv * dv;
    }
    if (suu == 0.0 || svv == 0.0) throw std::invalid_argument("correlation: zero variance");
    return std::clamp(suv / std::sqrt(suu * svv), -1.0, 1.0);
}

std::string config_line(const std::string& config_json) { return json::parse(config_json).dump(); }

std::string edges_line(const StrengthEdges& e) {
    std::ostringstream ss;
    ss << "strength bins: poor [0, " << e.fair << "), fair [" << e.fair << ", " << e.moderate
       << "), moderate [" << e.moderate << ", " << e.strong << "), strong [" << e.strong << ", 1]";
    return ss.str();
}

char strength_letter(Strength s) {
    switch (s) {
        case Strength::Poor: return 'P';
        case Strength::Fair: return 'F';
        case Strength::Moderate: return 'M';
        case Strength::Strong: return 'S';
    }
    return '?';
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

double plcc(std::span<const double> u, std::span<const double> v) {
    require_pair(u, v, "plcc");
    return pearson_unchecked(u, v);
}

Eigen::VectorXd average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    Eigen::VectorXd ranks(static_cast<Eigen::Index>(n));
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks(static_cast<Eigen::Index>(order[k])) = rank;
        i = j + 1;
    }
    return ranks;
}

double srocc(std::span<const double> u, std::span<const double> v) {
    require_pair(u, v, "srocc");
    const Eigen::VectorXd ru = average_ranks(u);
    const Eigen::VectorXd rv = average_ranks(v);
    return pearson_unchecked({ru.data(), static_cast<std::size_t>(ru.size())},
                             {rv.data(), static_cast<std::size_t>(rv.size())});
}

CorrelationMatrix correlation_matrix(const MetricTable& table, const std::vector<std::string>& names) {
    CorrelationMatrix m;
    std::vector<Eigen::Index> cols;
    for (const auto& n : names) {
        cols.push_back(table.column(n));
        m.metrics.push_back(table.metrics[static_cast<std::size_t>(cols.back())]);
    }
    const auto k = static_cast<Eigen::Index>(names.size());
    m.entries = Eigen::MatrixXd::Constant(k, k, std::nan(""));
    m.pair_counts = Eigen::MatrixXi::Zero(k, k);

    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = a + 1; b < k; ++b) {
            std::vector<double> u, v;
            for (Eigen::Index i = 0; i < table.rows(); ++i) {
                const double x = table.values(i, cols[static_cast<std::size_t>(a)]);
                const double y = table.values(i, cols[static_cast<std::size_t>(b)]);
                if (std::isfinite(x) && std::isfinite(y)) {
                    u.push_back(x);
                    v.push_back(y);
                }
            }
            if (u.size() < 3)
                throw std::invalid_argument("correlation_matrix: fewer than 3 complete rows for " + names[a] +
                                            " / " + names[b]);
            m.entries(b, a) = std::abs(plcc(u, v));
            m.entries(a, b) = std::abs(srocc(u, v));
            m.pair_counts(a, b) = m.pair_counts(b, a) = static_cast<int>(u.size());
        }
    }
    return m;
}

std::string to_string(Strength s) {
    switch (s) {
        case Strength::Poor: return "poor";
        case Strength::Fair: return "fair";
        case Strength::Moderate: return "moderate";
        case Strength::Strong: return "strong";
    }
    return "poor";
}

Strength classify_strength(double r, const StrengthEdges& e) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("classify_strength: value outside [0, 1]");
    if (r < e.fair) return Strength::Poor;
    if (r < e.moderate) return Strength::Fair;
    if (r < e.strong) return Strength::Moderate;
    return Strength::Strong;
}

GroupAverageTable group_average(const MetricTable& table, const std::vector<std::string>& unpaired,
                                const PairedGroups& paired_groups) {
    GroupAverageTable out;
    out.unpaired = unpaired;
    for (const auto& [group, members] : paired_groups) {
        if (members.empty()) throw std::invalid_argument("group_average: empty group '" + group + "'");
        out.groups.push_back(group);
    }
    for (const auto& u : unpaired) {
        std::vector<GroupStat> row;
        for (const auto& [group, members] : paired_groups) {
            std::vector<std::string> names{u};
            names.insert(names.end(), members.begin(), members.end());
            const CorrelationMatrix cm = correlation_matrix(table, names);
            const auto n = static_cast<Eigen::Index>(members.size());
            // Row 0 / column 0 hold the unpaired metric: PLCC in column 0, SROCC in row 0.
            const Eigen::ArrayXd p = cm.entries.col(0).tail(n).array();
            const Eigen::ArrayXd s = cm.entries.row(0).tail(n).transpose().array();
            GroupStat g;
            g.plcc_mean = p.mean();
            g.plcc_std = std::sqrt((p - g.plcc_mean).square().mean());
            g.srocc_mean = s.mean();
            g.srocc_std = std::sqrt((s - g.srocc_mean).square().mean());
            row.push_back(g);
        }
        out.cells.push_back(std::move(row));
    }
    return out;
}

PairedGroups default_paired_groups(const MetricTable& table) {
    PairedGroups groups;
    const auto pixel = table.names_of_class(MetricClass::Pixel);
    const auto perceptual = table.names_of_class(MetricClass::Perceptual);
    if (!pixel.empty()) groups.emplace_back("pixel-based", pixel);
    if (!perceptual.empty()) groups.emplace_back("perceptual-based", perceptual);
    std::vector<std::string> all = pixel;
    all.insert(all.end(), perceptual.begin(), perceptual.end());
    if (!all.empty()) groups.emplace_back("all-paired", all);
    return groups;
}

std::string correlation_to_csv(const CorrelationMatrix& m, const std::string& config_json) {
    std::ostringstream out;
    out << "# schema: iqa.correlation_matrix.v1\n";
    out << "# config: " << config_line(config_json) << '\n';
    out << "# lower triangle: |PLCC|; upper triangle: |SROCC|; diagonal: absent\n";
    out << "metric,class";
    for (const auto& info : m.metrics) out << ',' << info.name;
    out << '\n';
    for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
        const auto& info = m.metrics[static_cast<std::size_t>(i)];
        out << info.name << ',' << to_string(info.cls);
        for (Eigen::Index j = 0; j < m.entries.cols(); ++j) {
            out << ',';
            if (i == j)
                out << '-';
            else
                out << (i > j ? "L:" : "U:") << detail::format_number(m.entries(i, j));
        }
        out << '\n';
    }
    return out.str();
}

std::string correlation_to_json(const CorrelationMatrix& m, const std::string& config_json) {
    json j;
    j["schema"] = "iqa.correlation_matrix.v1";
    j["config"] = json::parse(config_json);
    json metrics = json::array();
    for (const auto& info : m.metrics) metrics.push_back({{"name", info.name}, {"class", to_string(info.cls)}});
    j["metrics"] = metrics;
    json plcc_rows = json::array();
    json srocc_rows = json::array();
    for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
        json prow = json::array(), srow = json::array();
        for (Eigen::Index k = 0; k < m.entries.cols(); ++k) {
            prow.push_back(i > k ? number_or_null(m.entries(i, k)) : (i < k ? number_or_null(m.entries(k, i)) : json(nullptr)));
            srow.push_back(i < k ? number_or_null(m.entries(i, k)) : (i > k ? number_or_null(m.entries(k, i)) : json(nullptr)));
        }
        plcc_rows.push_back(prow);
        srocc_rows.push_back(srow);
    }
    j["abs_plcc"] = plcc_rows;
    j["abs_srocc"] = srocc_rows;
    return j.dump(2);
}

std::string correlation_to_text(const CorrelationMatrix& m, const StrengthEdges& edges) {
    std::size_t w = 10;
    for (const auto& info : m.metrics) w = std::max(w, info.name.size() + 2);
    std::ostringstream out;
    out << "|PLCC| lower triangle, |SROCC| upper triangle; " << edges_line(edges) << '\n';
    out << pad("", w + 14);
    for (const auto& info : m.metrics) out << pad(info.name, w);
    out << '\n';
    for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
        const auto& info = m.metrics[static_cast<std::size_t>(i)];
        out << pad(to_string(info.cls), 14) << pad(info.name, w);
        for (Eigen::Index j = 0; j < m.entries.cols(); ++j) {
            const double v = m.entries(i, j);
            std::string cell = "-";
            if (i != j && std::isfinite(v))
                cell = detail::format_fixed(v, 2) + " " + strength_letter(classify_strength(v, edges));
            out << pad(cell, w);
        }
        out << '\n';
    }
    out << "P = poor, F = fair, M = moderate, S = strong\n";
    return out.str();
}

std::string group_average_to_csv(const GroupAverageTable& t, const std::string& config_json) {
    std::ostringstream out;
    out << "# schema: iqa.group_average.v1\n";
    out << "# config: " << config_line(config_json) << '\n';
    out << "# std is the population std across paired-group members\n";
    out << "unpaired";
    for (const auto& g : t.groups)
        out << ',' << g << ":plcc_mean," << g << ":plcc_std," << g << ":srocc_mean," << g << ":srocc_std";
    out << '\n';
    for (std::size_t u = 0; u < t.unpaired.size(); ++u) {
        out << t.unpaired[u];
        for (const auto& c : t.cells[u])
            out << ',' << detail::format_number(c.plcc_mean) << ',' << detail::format_number(c.plcc_std) << ','
                << detail::format_number(c.srocc_mean) << ',' << detail::format_number(c.srocc_std);
        out << '\n';
    }
    return out.str();
}

std::string group_average_to_json(const GroupAverageTable& t, const std::string& config_json) {
    json j;
    j["schema"] = "iqa.group_average.v1";
    j["config"] = json::parse(config_json);
    j["groups"] = t.groups;
    json rows = json::array();
    for (std::size_t u = 0; u < t.unpaired.size(); ++u) {
        json cells = json::object();
        for (std::size_t g = 0; g < t.groups.size(); ++g) {
            const auto& c = t.cells[u][g];
            cells[t.groups[g]] = {{"plcc_mean", c.plcc_mean},
                                  {"plcc_std", c.plcc_std},
                                  {"srocc_mean", c.srocc_mean},
                                  {"srocc_std", c.srocc_std}};
        }
        rows.push_back({{"unpaired", t.unpaired[u]}, {"cells", cells}});
    }
    j["rows"] = rows;
    return j.dump(2);
}

std::string group_average_to_text(const GroupAverageTable& t, const StrengthEdges& edges) {
    std::ostringstream out;
    out << "mean +/- std of |PLCC| (|SROCC| in parentheses); " << edges_line(edges) << '\n';
    out << pad("", 12);
    for (const auto& g : t.groups) out << pad(g, 34);
    out << '\n';
    for (std::size_t u = 0; u < t.unpaired.size(); ++u) {
        out << pad(t.unpaired[u], 12);
        for (const auto& c : t.cells[u]) {
            const std::string cell = detail::format_fixed(c.plcc_mean, 2) + "+/-" + detail::format_fixed(c.plcc_std, 2) +
                                     " (" + detail::format_fixed(c.srocc_mean, 2) + "+/-" +
                                     detail::format_fixed(c.srocc_std, 2) + ")";
            out << pad(cell, 34);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace iqa

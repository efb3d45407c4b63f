#include "iqa/tree.hpp"

#include "iqa/diagnostics.hpp"
#include "text_format.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace iqa {

namespace {

// Relative slack under which two candidate gains count as equal, and under
// which a gain counts as zero against the node's sum of squares.
constexpr double kTieTolerance = 1e-12;

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

class Builder {
public:
    Builder(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXd>& y,
            RegressionTree& tree)
        : X_(X), y_(y), tree_(tree) {}

    int grow(std::vector<Eigen::Index> idx, int depth) {
        const auto n = static_cast<Eigen::Index>(idx.size());
        double sum = 0.0;
        for (auto i : idx) sum += y_(i);
        const double mean = sum / static_cast<double>(n);
        double sse = 0.0;
        bool pure = true;
        for (auto i : idx) {
            sse += (y_(i) - mean) * (y_(i) - mean);
            pure = pure && y_(i) == y_(idx.front());
        }

        const int id = static_cast<int>(tree_.nodes.size());
        TreeNode node;
        node.value = mean;
        node.n_samples = n;
        tree_.nodes.push_back(node);

        const auto& p = tree_.params;
        const bool depth_ok = p.max_depth == TreeParams::unlimited || depth < p.max_depth;
        if (pure || !depth_ok || n < 2 * p.min_samples_leaf) return id;

        const Split best = best_split(idx);
        if (best.feature < 0 || !(best.gain > kTieTolerance * sse) ||
            best.gain / static_cast<double>(y_.size()) < p.min_impurity_decrease)
            return id;

        std::vector<Eigen::Index> left, right;
        for (auto i : idx) (X_(i, best.feature) <= best.threshold ? left : right).push_back(i);
        idx.clear();
        idx.shrink_to_fit();

        tree_.nodes[id].feature = best.feature;
        tree_.nodes[id].threshold = best.threshold;
        tree_.nodes[id].gain = best.gain;
        const int l = grow(std::move(left), depth + 1);
        tree_.nodes[id].left = l;
        const int r = grow(std::move(right), depth + 1);
        tree_.nodes[id].right = r;
        return id;
    }

private:
    Split best_split(const std::vector<Eigen::Index>& idx) const {
        const auto n = static_cast<Eigen::Index>(idx.size());
        const Eigen::Index leaf = std::max<Eigen::Index>(tree_.params.min_samples_leaf, 1);
        double total = 0.0;
        for (auto i : idx) total += y_(i);

        Split best;
        std::vector<Eigen::Index> order(idx);
        for (int f = 0; f < static_cast<int>(X_.cols()); ++f) {
            std::stable_sort(order.begin(), order.end(),
                             [&](Eigen::Index a, Eigen::Index b) { return X_(a, f) < X_(b, f); });
            double left_sum = 0.0;
            for (Eigen::Index pos = 1; pos < n; ++pos) {
                left_sum += y_(order[pos - 1]);
                if (pos < leaf || n - pos < leaf) continue;
                const double lo = X_(order[pos - 1], f);
                const double hi = X_(order[pos], f);
                if (lo == hi) continue;
                const double nl = static_cast<double>(pos);
                const double nr = static_cast<double>(n - pos);
                const double diff = left_sum / nl - (total - left_sum) / nr;
                const double gain = nl * nr / static_cast<double>(n) * diff * diff;
                if (gain > best.gain + kTieTolerance * std::max(best.gain, gain)) {
                    double t = lo + (hi - lo) / 2.0;
                    if (t >= hi) t = lo;
                    best = {f, t, gain};
                }
            }
        }
        return best;
    }

    const Eigen::Ref<const Eigen::MatrixXd>& X_;
    const Eigen::Ref<const Eigen::VectorXd>& y_;
    RegressionTree& tree_;
};

void require_fitted(const RegressionTree& tree) {
    if (!tree.fitted()) throw std::invalid_argument("regression tree is not fitted");
}

std::string config_line(const std::string& config_json) { return nlohmann::json::parse(config_json).dump(); }

double rmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
    return std::sqrt((pred - truth).squaredNorm() / static_cast<double>(truth.size()));
}

double mean_of_finite(const std::vector<double>& v) {
    double s = 0.0;
    int n = 0;
    for (double x : v)
        if (std::isfinite(x)) {
            s += x;
            ++n;
        }
    return n ? s / n : std::nan("");
}

}  // namespace

int RegressionTree::depth() const {
    if (nodes.empty()) return 0;
    std::vector<int> d(nodes.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        deepest = std::max(deepest, d[i]);
        if (!nodes[i].is_leaf()) {
            d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
        }
    }
    return deepest;
}

RegressionTree fit_tree(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXd>& y,
                        const TreeParams& params) {
    if (X.rows() == 0 || X.cols() == 0) throw std::invalid_argument("fit_tree: empty input");
    if (X.rows() != y.size()) throw std::invalid_argument("fit_tree: sample count mismatch");
    if (X.rows() < 2) throw std::invalid_argument("fit_tree: need at least 2 samples");
    if (!X.allFinite() || !y.allFinite()) throw std::invalid_argument("fit_tree: non-finite features or targets");
    if (params.min_samples_leaf < 1) throw std::invalid_argument("fit_tree: min_samples_leaf must be >= 1");
    if (params.max_depth < 0 && params.max_depth != TreeParams::unlimited)
        throw std::invalid_argument("fit_tree: negative max_depth");

    RegressionTree tree;
    tree.n_features = X.cols();
    tree.params = params;
    std::vector<Eigen::Index> all(static_cast<std::size_t>(X.rows()));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    Builder(X, y, tree).grow(std::move(all), 0);
    return tree;
}

double predict(const RegressionTree& tree, const Eigen::Ref<const Eigen::VectorXd>& x) {
    require_fitted(tree);
    if (x.size() != tree.n_features) throw std::invalid_argument("predict: feature count mismatch");
    std::size_t i = 0;
    while (!tree.nodes[i].is_leaf()) {
        const auto& n = tree.nodes[i];
        i = static_cast<std::size_t>(x(n.feature) <= n.threshold ? n.left : n.right);
    }
    return tree.nodes[i].value;
}

Eigen::VectorXd predict_rows(const RegressionTree& tree, const Eigen::Ref<const Eigen::MatrixXd>& X) {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index r = 0; r < X.rows(); ++r) out(r) = predict(tree, Eigen::VectorXd(X.row(r).transpose()));
    return out;
}

Eigen::VectorXd feature_importance(const RegressionTree& tree) {
    require_fitted(tree);
    Eigen::VectorXd imp = Eigen::VectorXd::Zero(tree.n_features);
    for (const auto& n : tree.nodes)
        if (!n.is_leaf()) imp(n.feature) += n.gain;
    const double total = imp.sum();
    if (total > 0.0) imp /= total;
    return imp;
}

std::vector<int> assign_folds(Eigen::Index n, int k, std::uint64_t seed, const std::vector<std::string>& groups) {
    if (k < 2) throw std::invalid_argument("cross-validation needs k >= 2");
    std::vector<std::size_t> unit_of(static_cast<std::size_t>(n));
    std::size_t units = static_cast<std::size_t>(n);
    if (!groups.empty()) {
        if (static_cast<Eigen::Index>(groups.size()) != n)
            throw std::invalid_argument("assign_folds: group list length mismatch");
        std::vector<std::string> ids(groups);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        for (std::size_t i = 0; i < groups.size(); ++i)
            unit_of[i] = static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), groups[i]) - ids.begin());
        units = ids.size();
    } else {
        std::iota(unit_of.begin(), unit_of.end(), std::size_t{0});
    }
    if (static_cast<std::size_t>(k) > units)
        throw std::invalid_argument("cross-validation: k = " + std::to_string(k) + " exceeds the " +
                                    std::to_string(units) + " available " + (groups.empty() ? "samples" : "groups"));

    // Fisher-Yates on the raw engine output: same folds on every platform.
    std::vector<std::size_t> perm(units);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = units; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
    std::vector<int> fold_of_unit(units);
    for (std::size_t p = 0; p < units; ++p) fold_of_unit[perm[p]] = static_cast<int>(p % static_cast<std::size_t>(k));

    std::vector<int> folds(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < folds.size(); ++i) folds[i] = fold_of_unit[unit_of[i]];
    return folds;
}

ImportanceReport cross_validated_importance(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                            const Eigen::Ref<const Eigen::VectorXd>& y,
                                            const std::vector<std::string>& feature_names, const std::string& label,
                                            const CvParams& params, const std::vector<std::string>& groups) {
    if (static_cast<Eigen::Index>(feature_names.size()) != X.cols())
        throw std::invalid_argument("cross_validated_importance: feature name count mismatch");
    if (X.rows() != y.size()) throw std::invalid_argument("cross_validated_importance: sample count mismatch");
    const std::vector<int> folds = assign_folds(X.rows(), params.k, params.seed, groups);

    ImportanceReport rep;
    rep.label = label;
    rep.features = feature_names;
    rep.n_samples = X.rows();
    rep.k = params.k;
    Eigen::VectorXd imp_sum = Eigen::VectorXd::Zero(X.cols());

    for (int f = 0; f < params.k; ++f) {
        std::vector<Eigen::Index> train, test;
        for (Eigen::Index i = 0; i < X.rows(); ++i) (folds[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
        const Eigen::MatrixXd Xtr = X(train, Eigen::all);
        const Eigen::VectorXd ytr = y(train);
        const Eigen::MatrixXd Xte = X(test, Eigen::all);
        const Eigen::VectorXd yte = y(test);

        const double range = ytr.size() ? ytr.maxCoeff() - ytr.minCoeff() : 0.0;
        if (!(range > 0.0) || ytr.size() < 2) {
            warn("importance '" + label + "': fold " + std::to_string(f) +
                 " has a constant training label; excluded from the means");
            rep.excluded_folds.push_back(f);
            rep.fold_nrmse.push_back(std::nan(""));
            rep.fold_baseline_nrmse.push_back(std::nan(""));
            continue;
        }
        const RegressionTree tree = fit_tree(Xtr, ytr, params.tree);
        rep.fold_nrmse.push_back(rmse(predict_rows(tree, Xte), yte) / range);
        rep.fold_baseline_nrmse.push_back(rmse(Eigen::VectorXd::Constant(yte.size(), ytr.mean()), yte) / range);
        imp_sum += feature_importance(tree);
    }

    rep.mean_nrmse = mean_of_finite(rep.fold_nrmse);
    rep.baseline_nrmse = mean_of_finite(rep.fold_baseline_nrmse);
    if (std::isnan(rep.mean_nrmse)) warn("importance '" + label + "': every fold was excluded");

    if (params.refit_final) {
        const bool constant = y.size() == 0 || y.maxCoeff() == y.minCoeff();
        rep.importance = constant ? Eigen::VectorXd::Zero(X.cols()) : feature_importance(fit_tree(X, y, params.tree));
    } else {
        const double total = imp_sum.sum();
        rep.importance = total > 0.0 ? Eigen::VectorXd(imp_sum / total) : Eigen::VectorXd::Zero(X.cols());
    }

    rep.ranking.resize(feature_names.size());
    std::iota(rep.ranking.begin(), rep.ranking.end(), Eigen::Index{0});
    std::stable_sort(rep.ranking.begin(), rep.ranking.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return rep.importance(a) > rep.importance(b); });
    return rep;
}

ImportanceReport cross_validated_importance(const MetricTable& table, const std::string& label,
                                            const std::vector<std::string>& features, const CvParams& params) {
    const Eigen::Index lc = table.column(label);
    std::vector<Eigen::Index> fc;
    for (const auto& f : features) fc.push_back(table.column(f));

    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        bool ok = std::isfinite(table.values(i, lc));
        for (auto c : fc) ok = ok && std::isfinite(table.values(i, c));
        if (ok) rows.push_back(i);
    }
    if (static_cast<Eigen::Index>(rows.size()) < table.rows())
        warn("importance '" + label + "': " + std::to_string(table.rows() - static_cast<Eigen::Index>(rows.size())) +
             " incomplete rows dropped");

    const Eigen::MatrixXd X = table.values(rows, fc);
    const Eigen::VectorXd y = table.values(rows, lc);
    std::vector<std::string> groups;
    if (params.by_patient) {
        if (table.patient_ids.empty()) throw std::invalid_argument("by-patient folds need patient ids");
        for (auto r : rows) {
            const auto& p = table.patient_ids[static_cast<std::size_t>(r)];
            if (p.empty())
                throw std::invalid_argument("by-patient folds: image '" + table.image_ids[static_cast<std::size_t>(r)] +
                                            "' has no patient id");
            groups.push_back(p);
        }
    }
    return cross_validated_importance(X, y, features, label, params, groups);
}

std::string importance_to_json(const std::vector<ImportanceReport>& reports, const std::string& config_json) {
    using nlohmann::json;
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json j;
    j["schema"] = "iqa.importance.v1";
    j["config"] = json::parse(config_json);
    json arr = json::array();
    for (const auto& r : reports) {
        json imp = json::object();
        for (std::size_t f = 0; f < r.features.size(); ++f) imp[r.features[f]] = r.importance(static_cast<Eigen::Index>(f));
        json ranking = json::array();
        for (auto f : r.ranking) ranking.push_back(r.features[static_cast<std::size_t>(f)]);
        json fold = json::array(), base = json::array();
        for (double v : r.fold_nrmse) fold.push_back(num(v));
        for (double v : r.fold_baseline_nrmse) base.push_back(num(v));
        arr.push_back({{"label", r.label},
                       {"features", r.features},
                       {"importance", imp},
                       {"ranking", ranking},
                       {"k", r.k},
                       {"n_samples", r.n_samples},
                       {"fold_nrmse", fold},
                       {"fold_baseline_nrmse", base},
                       {"excluded_folds", r.excluded_folds},
                       {"mean_nrmse", num(r.mean_nrmse)},
                       {"baseline_nrmse", num(r.baseline_nrmse)}});
    }
    j["reports"] = arr;
    return j.dump(2);
}

std::string importance_to_csv(const std::vector<ImportanceReport>& reports, const std::string& config_json) {
    std::ostringstream out;
    out << "# schema: iqa.importance.v1\n";
    out << "# config: " << config_line(config_json) << '\n';
    out << "label,mean_nrmse,baseline_nrmse,rank,feature,importance\n";
    for (const auto& r : reports)
        for (std::size_t p = 0; p < r.ranking.size(); ++p) {
            const auto f = r.ranking[p];
            out << r.label << ',' << detail::format_number(r.mean_nrmse) << ','
                << detail::format_number(r.baseline_nrmse) << ',' << p + 1 << ','
                << r.features[static_cast<std::size_t>(f)] << ',' << detail::format_number(r.importance(f)) << '\n';
        }
    return out.str();
}

namespace {

std::string fx(double v) { return detail::format_fixed(v, 3); }

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Annular sector between radii r0 < r1 over [a0, a1] radians, clockwise from 12 o'clock.
std::string sector_path(double cx, double cy, double r0, double r1, double a0, double a1) {
    auto px = [&](double r, double a) { return fx(cx + r * std::sin(a)); };
    auto py = [&](double r, double a) { return fx(cy - r * std::cos(a)); };
    const int large = a1 - a0 > std::numbers::pi ? 1 : 0;
    std::ostringstream d;
    d << "M " << px(r1, a0) << ' ' << py(r1, a0) << " A " << fx(r1) << ' ' << fx(r1) << " 0 " << large << " 1 "
      << px(r1, a1) << ' ' << py(r1, a1) << " L " << px(r0, a1) << ' ' << py(r0, a1) << " A " << fx(r0) << ' '
      << fx(r0) << " 0 " << large << " 0 " << px(r0, a0) << ' ' << py(r0, a0) << " Z";
    return d.str();
}

}  // namespace

std::string importance_to_svg(const std::vector<ImportanceReport>& reports, const std::string& config_json) {
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    std::vector<std::string> legend;
    std::size_t rings = 0;
    for (const auto& r : reports) {
        rings = std::max(rings, r.features.size());
        for (const auto& f : r.features)
            if (std::find(legend.begin(), legend.end(), f) == legend.end()) legend.push_back(f);
    }
    auto color = [&](const std::string& f) {
        const auto i = static_cast<std::size_t>(std::find(legend.begin(), legend.end(), f) - legend.begin());
        return std::string(palette[i % std::size(palette)]);
    };

    const double cx = 300, cy = 300, inner = 60, outer = 230;
    const double ring = rings ? (outer - inner) / static_cast<double>(rings) : 0.0;
    const double width = 600 + 180;
    const double height = std::max(600.0, 60.0 + 22.0 * static_cast<double>(legend.size()));

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<!-- schema: iqa.importance_svg.v1 -->\n";
    svg << "<!-- config: " << xml_escape(config_line(config_json)) << " -->\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fx(width) << "\" height=\"" << fx(height)
        << "\" viewBox=\"0 0 " << fx(width) << ' ' << fx(height) << "\" font-family=\"sans-serif\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const double tau = 2.0 * std::numbers::pi;
    const double clove = reports.empty() ? tau : tau / static_cast<double>(reports.size());
    for (std::size_t c = 0; c < reports.size(); ++c) {
        const auto& r = reports[c];
        const double a0 = clove * static_cast<double>(c);
        const double a1 = a0 + clove;
        svg << "<g class=\"clove\" data-label=\"" << xml_escape(r.label) << "\">\n";
        for (std::size_t p = 0; p < r.ranking.size(); ++p) {
            const auto f = r.ranking[p];
            const auto& name = r.features[static_cast<std::size_t>(f)];
            const double hi = outer - ring * static_cast<double>(p);
            const double lo = hi - ring;
            // A full turn cannot be one arc; split it in halves.
            std::vector<std::pair<double, double>> spans;
            if (a1 - a0 >= tau - 1e-9)
                spans = {{a0, a0 + tau / 2}, {a0 + tau / 2, a1}};
            else
                spans = {{a0, a1}};
            for (const auto& [s0, s1] : spans)
                svg << "<path d=\"" << sector_path(cx, cy, lo, hi, s0, s1) << "\" fill=\"" << color(name)
                    << "\" stroke=\"white\" stroke-width=\"1\"><title>" << xml_escape(name) << " rank " << p + 1
                    << ": " << fx(r.importance(f)) << "</title></path>\n";
        }
        const double mid = (a0 + a1) / 2.0;
        const double tr = outer + 28;
        const char* anchor = std::sin(mid) > 0.2 ? "start" : (std::sin(mid) < -0.2 ? "end" : "middle");
        svg << "<text x=\"" << fx(cx + tr * std::sin(mid)) << "\" y=\"" << fx(cy - tr * std::cos(mid) + 5)
            << "\" font-size=\"14\" text-anchor=\"" << anchor << "\">" << xml_escape(r.label) << " ("
            << detail::format_fixed(r.mean_nrmse, 3) << ")</text>\n";
        svg << "</g>\n";
    }

    svg << "<g class=\"legend\">\n";
    svg << "<text x=\"610\" y=\"30\" font-size=\"14\" font-weight=\"bold\">Unpaired metric</text>\n";
    for (std::size_t i = 0; i < legend.size(); ++i) {
        const double y = 48 + 22.0 * static_cast<double>(i);
        svg << "<rect x=\"610\" y=\"" << fx(y) << "\" width=\"14\" height=\"14\" fill=\"" << color(legend[i])
            << "\"/>\n";
        svg << "<text x=\"630\" y=\"" << fx(y + 12) << "\" font-size=\"13\">" << xml_escape(legend[i]) << "</text>\n";
    }
    svg << "<text x=\"610\" y=\"" << fx(60 + 22.0 * static_cast<double>(legend.size()))
        << "\" font-size=\"11\">outer ring = most important</text>\n";
    svg << "</g>\n</svg>\n";
    return svg.str();
}

}  // namespace iqa

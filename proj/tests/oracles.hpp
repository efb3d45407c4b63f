#pragma once

// Slow, direct reference implementations. Written from the definitions and
// deliberately share no code with the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Grid = std::vector<std::vector<double>>;

inline Grid random_grid(std::mt19937_64& rng, int h, int w, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Grid g(h, std::vector<double>(w));
    for (auto& row : g)
        for (auto& v : row) v = u(rng);
    return g;
}

inline Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> to_array(const Grid& g) {
    Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> a(g.size(), g[0].size());
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g[0].size(); ++j) a(i, j) = g[i][j];
    return a;
}

inline double mse(const Grid& a, const Grid& b) {
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j, ++n) s += (a[i][j] - b[i][j]) * (a[i][j] - b[i][j]);
    return s / static_cast<double>(n);
}

inline double psnr(const Grid& a, const Grid& b, double peak) { return 10.0 * std::log10(peak * peak / mse(a, b)); }

// Mean of the SSIM map over all fully contained windows, the window being a
// 2-D Gaussian evaluated pointwise and normalized.
inline double ssim(const Grid& a, const Grid& b, int radius = 5, double sigma = 1.5, double L = 2.0) {
    const int side = 2 * radius + 1;
    std::vector<double> w(side * side);
    double wsum = 0.0;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
            const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            w[(dy + radius) * side + (dx + radius)] = v;
            wsum += v;
        }
    for (auto& v : w) v /= wsum;
    const double c1 = (0.01 * L) * (0.01 * L), c2 = (0.03 * L) * (0.03 * L);
    const int h = static_cast<int>(a.size()), wd = static_cast<int>(a[0].size());
    double total = 0.0;
    int count = 0;
    for (int r = 0; r + side <= h; ++r)
        for (int c = 0; c + side <= wd; ++c) {
            double mx = 0, my = 0;
            for (int i = 0; i < side; ++i)
                for (int j = 0; j < side; ++j) {
                    mx += w[i * side + j] * a[r + i][c + j];
                    my += w[i * side + j] * b[r + i][c + j];
                }
            double vx = 0, vy = 0, cxy = 0;
            for (int i = 0; i < side; ++i)
                for (int j = 0; j < side; ++j) {
                    const double dx = a[r + i][c + j] - mx, dy = b[r + i][c + j] - my;
                    vx += w[i * side + j] * dx * dx;
                    vy += w[i * side + j] * dy * dy;
                    cxy += w[i * side + j] * dx * dy;
                }
            total += (2 * mx * my + c1) * (2 * cxy + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    return total / count;
}

// Unbiased MMD^2 with the cubic polynomial kernel, straight from the sums.
inline double mmd2(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    const double d = static_cast<double>(x.cols());
    auto k = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return std::pow(a.dot(b) / d + 1.0, 3); };
    const auto m = x.rows(), n = y.rows();
    double sxx = 0, syy = 0, sxy = 0;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            if (i != j) sxx += k(x.row(i), x.row(j));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) syy += k(y.row(i), y.row(j));
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) sxy += k(x.row(i), y.row(j));
    return sxx / double(m * (m - 1)) + syy / double(n * (n - 1)) - 2.0 * sxy / double(m * n);
}

// Minimum over every monotone coupling path of the largest leash length.
inline double frechet_exhaustive(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const auto n = a.rows(), m = b.rows();
    std::function<double(Eigen::Index, Eigen::Index, double)> walk = [&](Eigen::Index i, Eigen::Index j,
                                                                          double leash) -> double {
        leash = std::max(leash, (a.row(i) - b.row(j)).norm());
        if (i == n - 1 && j == m - 1) return leash;
        double best = std::numeric_limits<double>::infinity();
        if (i + 1 < n) best = std::min(best, walk(i + 1, j, leash));
        if (j + 1 < m) best = std::min(best, walk(i, j + 1, leash));
        if (i + 1 < n && j + 1 < m) best = std::min(best, walk(i + 1, j + 1, leash));
        return best;
    };
    return walk(0, 0, 0.0);
}

inline std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double less = 0, equal = 0;
        for (double x : v) {
            if (x < v[i]) ++less;
            if (x == v[i]) ++equal;
        }
        r[i] = less + (equal + 1.0) / 2.0;
    }
    return r;
}

inline double pearson(const std::vector<double>& u, const std::vector<double>& v) {
    const double n = static_cast<double>(u.size());
    double su = 0, sv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        su += u[i];
        sv += v[i];
    }
    double num = 0, du2 = 0, dv2 = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        num += (u[i] - su / n) * (v[i] - sv / n);
        du2 += (u[i] - su / n) * (u[i] - su / n);
        dv2 += (v[i] - sv / n) * (v[i] - sv / n);
    }
    return num / std::sqrt(du2 * dv2);
}

// Exhaustive CART: every (feature, threshold) candidate is scored with
// two-pass variances of the explicit partition.
struct Node {
    int feature = -1;
    double threshold = 0;
    double value = 0;
    long n = 0;
    int left = -1, right = -1;
};

inline double sse(const std::vector<double>& y) {
    if (y.empty()) return 0.0;
    double m = 0;
    for (double v : y) m += v;
    m /= static_cast<double>(y.size());
    double s = 0;
    for (double v : y) s += (v - m) * (v - m);
    return s;
}

inline int grow_tree(std::vector<Node>& out, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const std::vector<long>& rows, int depth, int max_depth, long min_leaf) {
    std::vector<double> ys;
    for (long r : rows) ys.push_back(y(r));
    Node node;
    node.n = static_cast<long>(rows.size());
    double m = 0;
    for (double v : ys) m += v;
    node.value = m / static_cast<double>(ys.size());
    const int id = static_cast<int>(out.size());
    out.push_back(node);

    const double parent = sse(ys);
    bool pure = std::all_of(ys.begin(), ys.end(), [&](double v) { return v == ys[0]; });
    if (pure || (max_depth >= 0 && depth >= max_depth) || node.n < 2 * min_leaf) return id;

    int best_f = -1;
    double best_t = 0, best_gain = 0;
    for (int f = 0; f < X.cols(); ++f) {
        std::vector<double> vals;
        for (long r : rows) vals.push_back(X(r, f));
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
            double t = vals[k] + (vals[k + 1] - vals[k]) / 2.0;
            if (t >= vals[k + 1]) t = vals[k];
            std::vector<double> l, r;
            for (long row : rows) (X(row, f) <= t ? l : r).push_back(y(row));
            if (static_cast<long>(l.size()) < min_leaf || static_cast<long>(r.size()) < min_leaf) continue;
            const double gain = parent - sse(l) - sse(r);
            if (gain > best_gain + 1e-12 * std::max(best_gain, gain)) {
                best_f = f;
                best_t = t;
                best_gain = gain;
            }
        }
    }
    if (best_f < 0 || !(best_gain > 1e-12 * parent)) return id;

    std::vector<long> l, r;
    for (long row : rows) (X(row, best_f) <= best_t ? l : r).push_back(row);
    out[id].feature = best_f;
    out[id].threshold = best_t;
    const int li = grow_tree(out, X, y, l, depth + 1, max_depth, min_leaf);
    out[id].left = li;
    const int ri = grow_tree(out, X, y, r, depth + 1, max_depth, min_leaf);
    out[id].right = ri;
    return id;
}

inline std::vector<Node> fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int max_depth, long min_leaf) {
    std::vector<Node> out;
    std::vector<long> rows(X.rows());
    for (long i = 0; i < X.rows(); ++i) rows[i] = i;
    grow_tree(out, X, y, rows, 0, max_depth, min_leaf);
    return out;
}

}  // namespace oracle

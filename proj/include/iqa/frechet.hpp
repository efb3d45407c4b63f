#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace iqa {

/// Discrete Frechet distance between two polylines given as point rows.
///
/// coupling(i, j) = max(|a_i - b_j|, min(coupling(i-1, j), coupling(i-1, j-1),
/// coupling(i, j-1))), filled row by row in O(n m) time and O(m) memory.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar discrete_frechet(const Eigen::MatrixBase<DerivedA>& a,
                                           const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    if (a.rows() < 1 || b.rows() < 1) throw std::invalid_argument("discrete_frechet: empty curve");
    if (a.cols() != b.cols()) throw std::invalid_argument("discrete_frechet: point dimensions differ");

    const Eigen::Index n = a.rows();
    const Eigen::Index m = b.rows();
    std::vector<Scalar> prev(static_cast<std::size_t>(m));
    std::vector<Scalar> cur(static_cast<std::size_t>(m));
    auto dist = [&](Eigen::Index i, Eigen::Index j) { return (a.row(i) - b.row(j)).norm(); };

    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const Scalar d = dist(i, j);
            const auto jj = static_cast<std::size_t>(j);
            if (i == 0 && j == 0)
                cur[jj] = d;
            else if (i == 0)
                cur[jj] = std::max(d, cur[jj - 1]);
            else if (j == 0)
                cur[jj] = std::max(d, prev[jj]);
            else
                cur[jj] = std::max(d, std::min({prev[jj], prev[jj - 1], cur[jj - 1]}));
        }
        std::swap(prev, cur);
    }
    return prev[static_cast<std::size_t>(m - 1)];
}

}  // namespace iqa

#pragma once

#include <vector>

#include <Eigen/Core>

#include "btdw/graph.hpp"

namespace btdw {

/// Inverse participation ratio sum v_i^4 of v / ||v||_2. Larger means more localized.
double ipr(const Eigen::VectorXd& x);

/// Kendall tau-b (tie corrected), O(n log n) by merge-sort inversion counting.
/// Throws ValidationError when either argument is constant.
double kendall_tau(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Spearman rho: Pearson correlation of average ranks.
double spearman_rho(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

struct Ranking {
    std::vector<Index> order;  ///< node indices by descending score, ties by ascending index
    Eigen::VectorXd ranks;     ///< 1-based rank of each node (1 = highest), ties averaged
};

Ranking rank_of(const Eigen::VectorXd& x);

/// Collapses values that agree to within rel_tol * max|x| onto a common value, so numerically
/// equal scores compare as ties.
Eigen::VectorXd snap_ties(const Eigen::VectorXd& x, double rel_tol);

}  // namespace btdw

#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "btdw/graph.hpp"

namespace btdw {

/// Backtrack downweighting factor theta in [0,1] with the cached complement mu = 1 - theta.
class BtdwParams {
public:
    explicit BtdwParams(double theta);

    static BtdwParams classical() { return BtdwParams(1.0); }
    static BtdwParams nonbacktracking() { return BtdwParams(0.0); }

    double theta() const noexcept { return theta_; }
    double mu() const noexcept { return mu_; }

private:
    double theta_;
    double mu_;
};

/// q_k(A) for a single walk length.
struct WalkCountMatrix {
    int k = 0;
    double theta = 1.0;
    Eigen::MatrixXd values;
};

/// q_0 .. q_K for fixed parameters.
struct WalkCountSequence {
    BtdwParams params{1.0};
    std::vector<Eigen::MatrixXd> matrices;

    const Eigen::MatrixXd& operator[](std::size_t k) const { return matrices.at(k); }
    std::size_t size() const noexcept { return matrices.size(); }
};

/// Which side the four-term recurrence multiplies on.
/// right: q_{k+1} = q_k A + mu q_{k-1}(mu I - D) - mu^2 q_{k-2}(A - S)
/// left:  q_{k+1} = A q_k + mu (mu I - D) q_{k-1} - mu^2 (A - S) q_{k-2}
enum class Side { left, right };

/// Dense walk-count matrices are refused above this node count.
inline constexpr std::size_t kDenseNodeLimit = 2000;

/// Streams q_0, q_1, ... as dense matrices.
class WalkCountRecurrence {
public:
    WalkCountRecurrence(const Graph& g, BtdwParams p, Side side = Side::right);

    /// Length of the matrix that the next call to advance() will produce.
    int next_length() const noexcept { return next_; }
    const Eigen::MatrixXd& advance();

private:
    SparseMatrix a_;
    SparseMatrix a_minus_s_;
    Eigen::VectorXd d_;
    Eigen::VectorXd mu_minus_d_;  // diagonal of mu I - D
    double mu_;
    Side side_;
    int next_ = 0;
    std::array<Eigen::MatrixXd, 3> window_;  // q_{k}, q_{k-1}, q_{k-2} after advance() returned q_k
};

/// Streams q_k v for a fixed vector v using only sparse matrix-vector products.
/// Built on the left-multiplication form, so each step costs O(edges).
class WalkActionRecurrence {
public:
    WalkActionRecurrence(const Graph& g, BtdwParams p, Eigen::VectorXd v);

    int next_length() const noexcept { return next_; }
    const Eigen::VectorXd& advance();

private:
    SparseMatrix a_;
    SparseMatrix a_minus_s_;
    Eigen::VectorXd d_;
    Eigen::VectorXd mu_minus_d_;
    double mu_;
    int next_ = 0;
    std::array<Eigen::VectorXd, 3> window_;
};

WalkCountSequence btdw_sequence(const Graph& g, BtdwParams p, int max_length, Side side = Side::right);

/// Fully nonbacktracking counts p_k(A), evaluated by their own recurrence.
WalkCountSequence nbt_sequence(const Graph& g, int max_length);

/// Enumerates every walk of the given length and weights it by theta^(backtracking steps).
/// Refuses graphs with more than 12 nodes or lengths above 10.
WalkCountMatrix brute_force_btdw(const Graph& g, BtdwParams p, int length);

/// Row-major CSV with a "# k=..., theta=..." header line.
void write_walk_count_csv(const WalkCountMatrix& q, std::ostream& out);

}  // namespace btdw

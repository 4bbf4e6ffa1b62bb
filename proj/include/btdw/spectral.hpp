#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "btdw/graph.hpp"
#include "btdw/katz.hpp"
#include "btdw/walks.hpp"

namespace btdw {

class LinearOperator {
public:
    virtual ~LinearOperator() = default;
    virtual Eigen::Index dim() const = 0;
    virtual void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const = 0;
};

/// v -> A v
class AdjacencyOperator final : public LinearOperator {
public:
    explicit AdjacencyOperator(const Graph& g) : a_(g.adjacency()) {}
    Eigen::Index dim() const override { return a_.rows(); }
    void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const override { out = a_ * in; }

private:
    SparseMatrix a_;
};

/// The 3n x 3n block companion operator
///
///     Z = [ 0            I            0 ]
///         [ 0            0            I ]
///         [ -mu^2(A-S)   mu(mu I-D)   A ]
///
/// whose powers carry [q_k; q_{k+1}; q_{k+2}] one step forward. Applied matrix-free.
class BlockOperatorZ final : public LinearOperator {
public:
    BlockOperatorZ(const Graph& g, BtdwParams p);

    Eigen::Index dim() const override { return 3 * n_; }
    Eigen::Index nodes() const noexcept { return n_; }
    double mu() const noexcept { return mu_; }
    void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const override;

    /// Explicit sparse assembly, refused above kDenseNodeLimit nodes.
    SparseMatrix assemble() const;

    /// Max column sum of |Z|.
    double norm1() const;

private:
    Eigen::Index n_;
    double mu_;
    SparseMatrix a_;
    SparseMatrix a_minus_s_;
    Eigen::VectorXd mu_minus_d_;
};

struct PowerIterationOptions {
    /// Converged when both |lambda_k - lambda_{k-1}| and ||Mv - lambda v|| are below tol * |lambda|.
    double tol = 1e-10;
    int max_iterations = 0;  ///< 0 selects max(1000, 50 * dim)
    std::uint64_t seed = 0;
    bool want_vector = false;
};

struct SpectralEstimate {
    double rho = 0.0;
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;  ///< ||Mv - lambda v|| / |lambda| for the iterated operator M
    std::string strategy;   ///< "plain", "squared", or "failed"
    std::optional<Eigen::VectorXd> vector;
};

/// Power iteration with a seeded positive start. The plain iteration runs first; if its
/// Rayleigh sequence does not settle (a +/- rho pair, as on bipartite graphs), the squared
/// operator is iterated instead, and that is retried once from a second seed. Never returns
/// converged = true on an oscillating sequence.
SpectralEstimate spectral_radius(const LinearOperator& op, const PowerIterationOptions& opts = {});

SpectralEstimate spectral_radius_z(const Graph& g, BtdwParams p, const PowerIterationOptions& opts = {});
SpectralEstimate adjacency_spectral_radius(const Graph& g, const PowerIterationOptions& opts = {});

/// Dense eigen-solve of the assembled Z, for cross-checks on small graphs.
double dense_spectral_radius_z(const Graph& g, BtdwParams p);

/// 1 / rho(Z): the centrality series converges below this value. It is a lower bound on the
/// true radius of convergence and can be strict (stars with theta < 1/(m+1)).
/// Returns +inf when rho(Z) = 0. Throws DegenerateSpectrumError if the estimate did not converge.
double alpha_star(const Graph& g, BtdwParams p, const PowerIterationOptions& opts = {});

/// Last n components of the dominant eigenvector of Z, signed nonnegative and l1-normalized.
CentralityResult eigen_centrality_btdw(const Graph& g, BtdwParams p, const PowerIterationOptions& opts = {});

struct ConsistencyReport {
    double alpha_star = 0.0;
    std::vector<double> alphas;
    std::vector<double> taus;  ///< Kendall tau-b of katz_btdw(alpha) against the eigenvector ranking
};

/// Tracks how the Katz ranking approaches the eigenvector ranking as alpha grows toward alpha*.
/// Scores within `tie_tol` (relative to the largest) are treated as tied on both sides.
ConsistencyReport katz_to_spectral_consistency(const Graph& g, BtdwParams p, std::span<const double> alphas,
                                               double tie_tol = 1e-9, const PowerIterationOptions& opts = {});

}  // namespace btdw

#pragma once

#include <string>

#include <Eigen/Core>

#include "btdw/graph.hpp"
#include "btdw/walks.hpp"

namespace btdw {

enum class Normalization { none, l1, l2 };

std::string to_string(Normalization norm);
Normalization parse_normalization(const std::string& text);

struct SolverInfo {
    std::string method;     ///< "sparse-lu", "bicgstab", "series", "power-iteration", ...
    double residual = 0.0;  ///< relative residual, or truncation bound for series
    int iterations = 0;
    bool converged = true;
};

/// Node scores plus the parameters and solver diagnostics that produced them.
struct CentralityResult {
    Eigen::VectorXd scores;
    Normalization normalization = Normalization::none;
    std::string measure;
    double alpha = 0.0;
    double theta = 1.0;
    SolverInfo solver;
};

/// [I - aA - mu a^2 (mu I - D) + mu^2 a^3 (A - S)] x = (1 - mu^2 a^2) 1, assembled sparse.
/// Its pattern is contained in pattern(I) + pattern(A).
struct KatzSystem {
    SparseMatrix matrix;
    double rhs_scale = 1.0;
};

KatzSystem assemble_katz_system(const Graph& g, double alpha, BtdwParams p);

enum class SolveMethod { automatic, direct, iterative };

struct KatzOptions {
    SolveMethod method = SolveMethod::automatic;
    double residual_target = 1e-10;
    /// Graphs above this size go to the Krylov path under SolveMethod::automatic.
    std::size_t direct_limit = 10000;
};

/// Classical Katz, (I - aA) x = 1.
CentralityResult katz_standard(const Graph& g, double alpha, const KatzOptions& opts = {});

/// Backtrack-downweighted Katz. Solves first and then checks: a failed factorization, a residual
/// above target, or a non-positive score raises DomainError carrying the 1/rho(Z) estimate.
CentralityResult katz_btdw(const Graph& g, double alpha, BtdwParams p, const KatzOptions& opts = {});

struct SeriesOptions {
    double tol = 1e-12;
    int max_terms = 20000;
    /// Terms that start growing while below noise_floor * ||x||_inf are treated as round-off.
    double noise_floor = 1e-8;
};

/// Reference route: x = sum_k a^k q_k(A) 1 summed term by term from the walk recurrence.
/// Stops after two consecutive terms at most tol * ||x||_inf. solver.residual holds a geometric
/// estimate of the neglected tail. Terms growing (against the term two steps back) for 10
/// consecutive steps raise DivergenceError, unless they are already under the noise floor, in
/// which case summation stops with solver.converged = false. Running out of max_terms also
/// leaves converged = false.
CentralityResult katz_series_oracle(const Graph& g, double alpha, BtdwParams p, const SeriesOptions& opts = {});

CentralityResult normalize(CentralityResult x, Normalization norm);

}  // namespace btdw

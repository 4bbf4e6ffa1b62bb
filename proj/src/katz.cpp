#include "btdw/katz.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "btdw/error.hpp"
#include "btdw/spectral.hpp"

namespace btdw {

std::string to_string(Normalization norm) {
    switch (norm) {
        case Normalization::none: return "none";
        case Normalization::l1: return "l1";
        case Normalization::l2: return "l2";
    }
    return "none";
}

Normalization parse_normalization(const std::string& text) {
    if (text == "none") return Normalization::none;
    if (text == "l1") return Normalization::l1;
    if (text == "l2") return Normalization::l2;
    throw ValidationError("unknown normalization '" + text + "' (expected l1, l2 or none)");
}

KatzSystem assemble_katz_system(const Graph& g, double alpha, BtdwParams p) {
    if (!(alpha >= 0.0)) throw ValidationError("alpha must be nonnegative");
    const auto n = static_cast<Index>(g.num_nodes());
    const double mu = p.mu();
    const auto dm = derived_matrices(g);

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(g.num_edges() + static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        // diagonal: 1 - mu a^2 (mu - d_i)
        trips.emplace_back(i, i, 1.0 - mu * alpha * alpha * (mu - dm.d[i]));
        for (Index j : g.out_neighbors(i)) {
            // -a from A, + mu^2 a^3 from (A - S) when the edge is not reciprocated
            double v = -alpha;
            if (!g.has_edge(j, i)) v += mu * mu * alpha * alpha * alpha;
            trips.emplace_back(i, j, v);
        }
    }
    KatzSystem sys;
    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(trips.begin(), trips.end());
    sys.matrix.makeCompressed();
    sys.rhs_scale = 1.0 - mu * mu * alpha * alpha;
    return sys;
}

namespace {

std::optional<double> try_alpha_star(const Graph& g, BtdwParams p) {
    try {
        return alpha_star(g, p);
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::string describe(double alpha, BtdwParams p) {
    std::ostringstream os;
    os.precision(6);
    os << "alpha=" << alpha << ", theta=" << p.theta();
    return os.str();
}

/// Solves the assembled system and enforces the residual and positivity checks.
CentralityResult solve_checked(const Graph& g, double alpha, BtdwParams p, const KatzOptions& opts,
                               const std::string& measure) {
    const auto sys = assemble_katz_system(g, alpha, p);
    const auto n = sys.matrix.rows();
    const Eigen::VectorXd b = Eigen::VectorXd::Constant(n, sys.rhs_scale);

    const bool direct = opts.method == SolveMethod::direct ||
                        (opts.method == SolveMethod::automatic && g.num_nodes() <= opts.direct_limit);

    auto fail = [&](const std::string& why) -> DomainError {
        const auto star = try_alpha_star(g, p);
        std::ostringstream os;
        os << "alpha outside convergence region (" << describe(alpha, p) << "): " << why;
        if (star) {
            os << "; 1/rho(Z) = " << *star;
            if (p.mu() == 0.0) os << " (rho(A) = " << 1.0 / *star << ")";
        }
        return DomainError(os.str(), star);
    };

    CentralityResult out;
    out.measure = measure;
    out.alpha = alpha;
    out.theta = p.theta();
    if (direct) {
        Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(sys.matrix);
        lu.factorize(sys.matrix);
        if (lu.info() != Eigen::Success) throw fail("sparse LU factorization failed (matrix singular)");
        out.scores = lu.solve(b);
        out.solver.method = "sparse-lu";
        out.solver.iterations = 1;
    } else {
        Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> krylov;
        krylov.setTolerance(opts.residual_target);
        krylov.setMaxIterations(static_cast<Eigen::Index>(10 * n));
        krylov.compute(sys.matrix);
        out.scores = krylov.solve(b);
        out.solver.method = "bicgstab";
        out.solver.iterations = static_cast<int>(krylov.iterations());
        if (krylov.info() != Eigen::Success) throw fail("BiCGSTAB did not reach the residual target");
    }
    const double bnorm = b.norm();
    out.solver.residual = bnorm > 0 ? (sys.matrix * out.scores - b).norm() / bnorm : (sys.matrix * out.scores).norm();
    out.solver.converged = out.solver.residual <= opts.residual_target && out.scores.allFinite();
    if (!out.scores.allFinite()) throw fail("solution is not finite");
    if (!out.solver.converged) {
        std::ostringstream os;
        os << "relative residual " << out.solver.residual << " above target " << opts.residual_target;
        throw fail(os.str());
    }
    if ((out.scores.array() <= 0.0).any()) throw fail("solution has non-positive entries");
    return out;
}

}  // namespace

CentralityResult katz_standard(const Graph& g, double alpha, const KatzOptions& opts) {
    return solve_checked(g, alpha, BtdwParams::classical(), opts, "katz-standard");
}

CentralityResult katz_btdw(const Graph& g, double alpha, BtdwParams p, const KatzOptions& opts) {
    return solve_checked(g, alpha, p, opts, "katz-btdw");
}

CentralityResult katz_series_oracle(const Graph& g, double alpha, BtdwParams p, const SeriesOptions& opts) {
    if (!(alpha >= 0.0)) throw ValidationError("alpha must be nonnegative");
    const auto n = static_cast<Eigen::Index>(g.num_nodes());
    WalkActionRecurrence walks(g, p, Eigen::VectorXd::Ones(n));

    Eigen::VectorXd x = walks.advance();  // k = 0 term
    double alpha_k = 1.0;
    std::vector<double> term_norms{1.0};
    int growth_streak = 0;
    int small_streak = 0;
    bool converged = false;
    int k = 1;
    for (; k <= opts.max_terms; ++k) {
        alpha_k *= alpha;
        const Eigen::VectorXd& y = walks.advance();
        const double t = alpha_k * y.cwiseAbs().maxCoeff();
        x += alpha_k * y;
        term_norms.push_back(t);
        if (t == 0.0) {
            // no walks of this length means none longer: the series is a finite sum
            converged = true;
            break;
        }
        small_streak = t <= opts.tol * x.cwiseAbs().maxCoeff() ? small_streak + 1 : 0;
        if (small_streak >= 2) {
            converged = true;
            break;
        }
        // Compare against two steps back so bipartite parity does not mask growth.
        growth_streak = (k >= 2 && t > term_norms[k - 2]) ? growth_streak + 1 : 0;
        if (growth_streak >= 10) {
            // growth far below the sum is amplified round-off, not divergence of the series
            if (t <= opts.noise_floor * x.cwiseAbs().maxCoeff()) break;
            throw DivergenceError("Katz series diverges (" + describe(alpha, p) + "): terms grew for 10 steps");
        }
    }

    CentralityResult out;
    out.scores = std::move(x);
    out.measure = "katz-series";
    out.alpha = alpha;
    out.theta = p.theta();
    out.solver.method = "series";
    out.solver.iterations = std::min(k, opts.max_terms);
    out.solver.converged = converged;

    const std::size_t last = term_norms.size() - 1;
    double tail = 0.0;
    if (term_norms[last] > 0.0 && last >= 2 && term_norms[last - 2] > 0.0) {
        const double r = std::sqrt(term_norms[last] / term_norms[last - 2]);
        tail = r < 1.0 ? term_norms[last] * r / (1.0 - r) : std::numeric_limits<double>::infinity();
    }
    out.solver.residual = tail;
    return out;
}

CentralityResult normalize(CentralityResult x, Normalization norm) {
    double scale = 1.0;
    switch (norm) {
        case Normalization::none: break;
        case Normalization::l1: scale = x.scores.lpNorm<1>(); break;
        case Normalization::l2: scale = x.scores.norm(); break;
    }
    if (norm != Normalization::none) {
        if (!(scale > 0.0)) throw ValidationError("cannot normalize a zero score vector");
        x.scores /= scale;
    }
    x.normalization = norm;
    return x;
}

}  // namespace btdw

#include "btdw/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <random>

#include "btdw/error.hpp"
#include "btdw/metrics.hpp"

namespace btdw {

BlockOperatorZ::BlockOperatorZ(const Graph& g, BtdwParams p)
    : n_(static_cast<Eigen::Index>(g.num_nodes())), mu_(p.mu()), a_(g.adjacency()) {
    const auto dm = derived_matrices(g);
    a_minus_s_ = a_ - dm.s;
    a_minus_s_.prune(0.0);
    mu_minus_d_ = Eigen::VectorXd::Constant(n_, mu_) - dm.d;
}

void BlockOperatorZ::apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
    out.resize(3 * n_);
    const auto v1 = in.segment(0, n_);
    const auto v2 = in.segment(n_, n_);
    const auto v3 = in.segment(2 * n_, n_);
    out.segment(0, n_) = v2;
    out.segment(n_, n_) = v3;
    auto bottom = out.segment(2 * n_, n_);
    bottom.noalias() = a_ * v3;
    if (mu_ != 0.0) {
        bottom += mu_ * mu_minus_d_.cwiseProduct(v2);
        bottom.noalias() -= (mu_ * mu_) * (a_minus_s_ * v1);
    }
}

SparseMatrix BlockOperatorZ::assemble() const {
    if (static_cast<std::size_t>(n_) > kDenseNodeLimit)
        throw RefusedError("explicit Z assembly refused above " + std::to_string(kDenseNodeLimit) + " nodes");
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index i = 0; i < n_; ++i) {
        trips.emplace_back(i, n_ + i, 1.0);
        trips.emplace_back(n_ + i, 2 * n_ + i, 1.0);
        trips.emplace_back(2 * n_ + i, n_ + i, mu_ * mu_minus_d_[i]);
    }
    for (int col = 0; col < a_.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(a_, col); it; ++it)
            trips.emplace_back(2 * n_ + it.row(), 2 * n_ + it.col(), it.value());
        for (SparseMatrix::InnerIterator it(a_minus_s_, col); it; ++it)
            trips.emplace_back(2 * n_ + it.row(), it.col(), -mu_ * mu_ * it.value());
    }
    SparseMatrix z(3 * n_, 3 * n_);
    z.setFromTriplets(trips.begin(), trips.end());
    z.prune(0.0);
    return z;
}

double BlockOperatorZ::norm1() const {
    double best = 0.0;
    Eigen::VectorXd col_a = Eigen::VectorXd::Zero(n_);
    Eigen::VectorXd col_ams = Eigen::VectorXd::Zero(n_);
    for (int col = 0; col < a_.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(a_, col); it; ++it) col_a[col] += std::abs(it.value());
        for (SparseMatrix::InnerIterator it(a_minus_s_, col); it; ++it) col_ams[col] += std::abs(it.value());
    }
    for (Eigen::Index j = 0; j < n_; ++j) {
        best = std::max(best, mu_ * mu_ * col_ams[j]);
        best = std::max(best, 1.0 + std::abs(mu_ * mu_minus_d_[j]));
        best = std::max(best, 1.0 + col_a[j]);
    }
    return best;
}

namespace {

struct Attempt {
    double lambda = 0.0;
    bool converged = false;
    int iterations = 0;
    double residual = std::numeric_limits<double>::infinity();
    Eigen::VectorXd v;
};

Eigen::VectorXd seeded_start(Eigen::Index dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    Eigen::VectorXd v(dim);
    for (auto& x : v) x = dist(rng);
    return v.normalized();
}

// Plain power iteration on op (or op^2), Rayleigh quotient plus residual as the stopping test.
Attempt iterate(const LinearOperator& op, bool squared, std::uint64_t seed, int max_iterations, double tol) {
    Attempt at;
    at.v = seeded_start(op.dim(), seed);
    Eigen::VectorXd y(op.dim());
    Eigen::VectorXd tmp(op.dim());
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int it = 1; it <= max_iterations; ++it) {
        op.apply(at.v, y);
        if (squared) {
            op.apply(y, tmp);
            y.swap(tmp);
        }
        at.iterations = it;
        const double nrm = y.norm();
        if (nrm == 0.0) {
            // v was annihilated: the operator is nilpotent on the Krylov space of the start
            at.lambda = 0.0;
            at.residual = 0.0;
            at.converged = true;
            return at;
        }
        at.lambda = at.v.dot(y);
        at.residual = (y - at.lambda * at.v).norm();
        const double scale = std::abs(at.lambda);
        if (!std::isnan(prev) && std::abs(at.lambda - prev) <= tol * scale && at.residual <= tol * scale) {
            at.residual /= scale;
            at.converged = true;
            return at;
        }
        prev = at.lambda;
        at.v = y / nrm;
    }
    at.residual /= std::max(std::abs(at.lambda), std::numeric_limits<double>::min());
    return at;
}

int default_iterations(const LinearOperator& op, int requested) {
    if (requested > 0) return requested;
    return static_cast<int>(std::max<Eigen::Index>(1000, 50 * op.dim()));
}

}  // namespace

SpectralEstimate spectral_radius(const LinearOperator& op, const PowerIterationOptions& opts) {
    if (!(opts.tol > 0.0)) throw ValidationError("power iteration tolerance must be positive");
    const int maxit = default_iterations(op, opts.max_iterations);

    SpectralEstimate est;
    auto accept = [&](const Attempt& at, bool squared, const char* strategy, int spent) {
        est.rho = squared ? std::sqrt(std::abs(at.lambda)) : std::abs(at.lambda);
        est.converged = true;
        est.iterations = spent;
        est.residual = at.residual;
        est.strategy = strategy;
        if (opts.want_vector) est.vector = at.v;
        return est;
    };

    const auto plain = iterate(op, false, opts.seed, maxit, opts.tol);
    if (plain.converged) return accept(plain, false, "plain", plain.iterations);

    // A +/- rho pair (bipartite structure) never settles; its square has a single dominant value.
    int spent = plain.iterations;
    Attempt last;
    for (std::uint64_t retry = 0; retry < 2; ++retry) {
        last = iterate(op, true, opts.seed + 0x9E3779B97F4A7C15ULL * retry, maxit, opts.tol);
        spent += 2 * last.iterations;
        // a negative dominant value of op^2 means a complex dominant pair of op
        if (last.converged && last.lambda >= 0.0) return accept(last, true, "squared", spent);
    }

    est.rho = std::sqrt(std::abs(last.lambda));
    est.converged = false;
    est.iterations = spent;
    est.residual = last.residual;
    est.strategy = "failed";
    return est;
}

SpectralEstimate spectral_radius_z(const Graph& g, BtdwParams p, const PowerIterationOptions& opts) {
    return spectral_radius(BlockOperatorZ(g, p), opts);
}

SpectralEstimate adjacency_spectral_radius(const Graph& g, const PowerIterationOptions& opts) {
    return spectral_radius(AdjacencyOperator(g), opts);
}

double dense_spectral_radius_z(const Graph& g, BtdwParams p) {
    const Eigen::MatrixXd z(BlockOperatorZ(g, p).assemble());
    Eigen::EigenSolver<Eigen::MatrixXd> es(z, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double alpha_star(const Graph& g, BtdwParams p, const PowerIterationOptions& opts) {
    const auto est = spectral_radius_z(g, p, opts);
    if (!est.converged)
        throw DegenerateSpectrumError("power iteration for rho(Z) did not converge (theta=" +
                                      std::to_string(p.theta()) + ")");
    if (est.rho == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / est.rho;
}

CentralityResult eigen_centrality_btdw(const Graph& g, BtdwParams p, const PowerIterationOptions& opts) {
    const BlockOperatorZ z(g, p);
    const auto est = spectral_radius(z, opts);
    if (!est.converged) throw DegenerateSpectrumError("rho(Z) estimate did not converge");
    if (est.rho == 0.0) throw DegenerateSpectrumError("rho(Z) = 0: no dominant eigenvector");
    const double rho = est.rho;

    // Iterating Z + rho I makes +rho strictly dominant over every other eigenvalue on the
    // circle |lambda| = rho, in particular over -rho.
    const int maxit = 4 * default_iterations(z, opts.max_iterations);
    Eigen::VectorXd v = seeded_start(z.dim(), opts.seed);
    Eigen::VectorXd zv(z.dim());
    double lambda = 0.0;
    double prev = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
    int it = 0;
    for (it = 1; it <= maxit; ++it) {
        z.apply(v, zv);
        lambda = v.dot(zv);
        residual = (zv - lambda * v).norm() / std::abs(lambda);
        if (!std::isnan(prev) && std::abs(lambda - prev) <= opts.tol * std::abs(lambda) && residual <= opts.tol) {
            converged = true;
            break;
        }
        prev = lambda;
        v = zv + rho * v;
        v.normalize();
    }
    if (!converged) throw DegenerateSpectrumError("dominant eigenvector of Z did not converge");
    if (std::abs(lambda - rho) > 1e-6 * rho)
        throw DegenerateSpectrumError("rho(Z) is not a simple real eigenvalue (converged to " +
                                      std::to_string(lambda) + ", rho = " + std::to_string(rho) + ")");

    const auto n = z.nodes();
    Eigen::VectorXd w = v.tail(n);
    Eigen::Index imax = 0;
    w.cwiseAbs().maxCoeff(&imax);
    if (w[imax] < 0) w = -w;
    const double big = w[imax];
    if ((w.array() < -1e-8 * big).any())
        throw DegenerateSpectrumError("dominant eigenvector has mixed signs in its last n components");
    w = w.cwiseMax(0.0);

    CentralityResult out;
    out.scores = w / w.sum();
    out.normalization = Normalization::l1;
    out.measure = "eigen-btdw";
    out.alpha = 1.0 / rho;
    out.theta = p.theta();
    out.solver.method = "power-iteration";
    out.solver.iterations = est.iterations + it;
    out.solver.residual = residual;
    out.solver.converged = true;
    return out;
}

ConsistencyReport katz_to_spectral_consistency(const Graph& g, BtdwParams p, std::span<const double> alphas,
                                               double tie_tol, const PowerIterationOptions& opts) {
    const auto eig = eigen_centrality_btdw(g, p, opts);
    ConsistencyReport report;
    report.alpha_star = eig.alpha;
    const auto eig_scores = snap_ties(eig.scores, tie_tol);
    for (double a : alphas) {
        if (!(a > 0.0 && a < report.alpha_star))
            throw ValidationError("consistency alphas must lie strictly inside (0, alpha*)");
        const auto katz = katz_btdw(g, a, p);
        report.alphas.push_back(a);
        report.taus.push_back(kendall_tau(snap_ties(katz.scores, tie_tol), eig_scores));
    }
    return report;
}

}  // namespace btdw

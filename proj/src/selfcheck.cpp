#include "btdw/selfcheck.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "btdw/error.hpp"
#include "btdw/genfun.hpp"
#include "btdw/oracles.hpp"
#include "btdw/spectral.hpp"
#include "btdw/walks.hpp"

namespace btdw {

namespace {

// q4 of the five-node illustrative digraph as a polynomial in theta, entered by hand.
Eigen::MatrixXd five_node_q4_table(double t) {
    Eigen::MatrixXd q(5, 5);
    const double t2 = t * t, t3 = t2 * t;
    q << 0, 0, t + t2, 0, 1 + t + t2,
         0, 1 + 2 * t2 + 2 * t3, 0, t + t2, 0,
         0, 0, 1 + t + t3, 0, 2 * t + 2 * t2,
         0, t + t2, 0, 1, 0,
         0, 0, 2 * t2, 0, 1 + t + t3;
    return q;
}

double max_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// The check returns its worst error, which must stay at or below `limit`.
SelfCheck run_one(const std::string& name, double limit, const std::function<double()>& body) {
    SelfCheck c{name, false, {}};
    try {
        const double err = body();
        char buf[96];
        std::snprintf(buf, sizeof buf, "max error %.3e (limit %.1e)", err, limit);
        c.detail = buf;
        c.passed = err <= limit;
    } catch (const std::exception& e) {
        c.detail = e.what();
    }
    return c;
}

}  // namespace

std::vector<SelfCheck> run_self_checks() {
    std::vector<SelfCheck> out;

    out.push_back(run_one("five-node q4 table", 1e-12, [] {
        const auto g = five_node_graph();
        double worst = 0.0;
        for (double t : {0.0, 0.3, 1.0}) {
            const auto seq = btdw_sequence(g, BtdwParams(t), 4);
            const auto expected = five_node_q4_table(t);
            worst = std::max(worst, max_diff(seq.matrices[4], expected));
            worst = std::max(worst, max_diff(brute_force_btdw(g, BtdwParams(t), 4).values, expected));
        }
        return worst;
    }));

    out.push_back(run_one("squid spectrum", 1e-8, [] {
        const auto sq = squid_spectrum();  // checks A v = lambda v itself
        const auto est = adjacency_spectral_radius(squid_graph());
        if (!est.converged) throw DegenerateSpectrumError("power iteration on the squid did not converge");
        return std::abs(est.rho - sq.lambda);
    }));

    out.push_back(run_one("squid eigenvector at theta=1", 1e-8, [] {
        const auto sq = squid_spectrum();
        PowerIterationOptions opts;
        opts.tol = 1e-13;
        const auto r = eigen_centrality_btdw(squid_graph(), BtdwParams(1.0), opts);
        return (r.scores / r.scores[0] - sq.v).cwiseAbs().maxCoeff();
    }));

    out.push_back(run_one("star closed forms", 1e-9, [] {
        double worst = 0.0;
        for (int m = 2; m <= 8; ++m) {
            const auto g = star_graph(static_cast<std::size_t>(m));
            for (double t : {0.1, 0.5, 1.0}) {
                const StarParams sp(m, t);
                const auto seq = btdw_sequence(g, BtdwParams(t), 12);
                for (int k = 0; k <= 12; ++k)
                    worst = std::max(worst, max_diff(star_qk(sp, k).values, seq.matrices[static_cast<std::size_t>(k)]) /
                                                std::max(1.0, seq.matrices[static_cast<std::size_t>(k)].cwiseAbs().maxCoeff()));
                const double alpha = 0.5 / std::sqrt(sp.eta);
                const auto closed = star_katz(sp, alpha).scores;
                const auto solved = katz_btdw(g, alpha, BtdwParams(t)).scores;
                worst = std::max(worst, (closed - solved).cwiseAbs().maxCoeff() / closed.cwiseAbs().maxCoeff());
            }
        }
        return worst;
    }));

    out.push_back(run_one("circulant alpha*", 1e-6, [] {
        double worst = 0.0;
        const auto g = regular_circulant(20, 4);
        for (double t : {0.0, 0.5, 1.0})
            worst = std::max(worst, std::abs(alpha_star(g, BtdwParams(t)) - regular_singular_alpha(4, t)));
        return worst;
    }));

    out.push_back(run_one("exponential routes", 1e-8, [] {
        double worst = 0.0;
        for (const auto& g : {five_node_graph(), squid_graph()})
            for (double t : {0.0, 0.5, 1.0}) {
                const BtdwParams p(t);
                const auto series = CoefficientSeries::exponential(1.0);
                const auto direct = genfun_direct(g, p, series).action;
                const auto block = genfun_blockz(g, p, series).action;
                const auto expm = expm_btdw_action(g, p, 1.0).action;
                const double scale = direct.cwiseAbs().maxCoeff();
                worst = std::max(worst, (direct - block).cwiseAbs().maxCoeff() / scale);
                worst = std::max(worst, (direct - expm).cwiseAbs().maxCoeff() / scale);
            }
        return worst;
    }));

    return out;
}

}  // namespace btdw

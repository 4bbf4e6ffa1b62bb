#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "btdw/error.hpp"
#include "btdw/katz.hpp"
#include "btdw/oracles.hpp"
#include "btdw/spectral.hpp"
#include "support/test_support.hpp"

using namespace btdw;

TEST_CASE("star parameters") {
    const StarParams sp(4, 0.5);
    CHECK(sp.eta == 1.75);
    CHECK(sp.b[0] == -3.5);
    CHECK((sp.b.tail(4).array() == -0.5).all());
    // B = (1 - theta) I - D
    const Eigen::MatrixXd a = star_graph(4).dense_adjacency();
    CHECK((sp.b - (0.5 * Eigen::VectorXd::Ones(5) - (a * a).diagonal())).cwiseAbs().maxCoeff() == 0.0);
    for (int m = 1; m < 10; ++m)
        for (double t : {0.0, 0.3, 1.0}) CHECK(StarParams(m, t).eta >= 0.0);
    CHECK_THROWS_AS(StarParams(0, 0.5), ValidationError);
    CHECK_THROWS_AS(StarParams(3, 1.2), ValidationError);
}

TEST_CASE("star odd-length counts") {
    const StarParams sp(4, 0.5);
    const Eigen::MatrixXd a = star_graph(4).dense_adjacency();
    CHECK(star_qk(sp, 5).values == 1.75 * 1.75 * a);
    CHECK(star_qk(sp, 1).values == a);
    CHECK(star_qk(sp, 0).values == Eigen::MatrixXd::Identity(5, 5));
}

TEST_CASE("star closed forms match the recurrence") {
    const StarParams sp(3, 0.4);
    const auto seq = btdw_sequence(star_graph(3), BtdwParams(0.4), 6);
    CHECK(testing::max_abs_diff(star_qk(sp, 6).values, seq[6]) < 1e-10);

    for (int m = 2; m <= 8; ++m) {
        for (int ti = 1; ti <= 10; ++ti) {
            const double theta = ti / 10.0;
            const StarParams p(m, theta);
            const auto rec = btdw_sequence(star_graph(m), BtdwParams(theta), 12);
            for (int k = 0; k <= 12; ++k) {
                const auto q = star_qk(p, k);
                CHECK(q.k == k);
                CHECK(testing::max_abs_diff(q.values, rec[k]) <= 1e-9);
            }
        }
    }
}

TEST_CASE("theta = 0 even lengths are refused, odd lengths are not") {
    const StarParams sp(5, 0.0);
    CHECK_THROWS_AS(star_qk(sp, 4), RefusedError);
    CHECK_THROWS_AS(star_qk(sp, 10), RefusedError);
    const auto rec = nbt_sequence(star_graph(5), 7);
    for (int k : {0, 1, 2, 3, 5, 7}) CHECK(testing::max_abs_diff(star_qk(sp, k).values, rec[k]) == 0.0);
}

TEST_CASE("star Katz closed form") {
    const StarParams sp(10, 0.5);
    const auto closed = star_katz(sp, 0.2);
    const auto solved = katz_btdw(star_graph(10), 0.2, BtdwParams(0.5));
    CHECK((closed.scores - solved.scores).cwiseAbs().maxCoeff() <= 1e-10);

    const auto nbt = star_katz(StarParams(5, 0.0), 0.3);
    CHECK(nbt.scores[0] == doctest::Approx(2.5).epsilon(1e-15));
    CHECK((nbt.scores.tail(5).array() - 1.66).abs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS(star_katz(StarParams(4, 1.0), 0.5), DomainError);  // alpha^2 eta = 1 exactly
    CHECK_THROWS_AS(star_katz(sp, 2.0), DomainError);
}

TEST_CASE("star Katz closed form equals the solve on random admissible triples") {
    std::mt19937_64 rng(40);
    std::uniform_int_distribution<int> mdist(2, 12);
    std::uniform_real_distribution<double> tdist(0.0, 1.0);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    for (int t = 0; t < 20; ++t) {
        const int m = mdist(rng);
        const double theta = tdist(rng);
        const StarParams sp(m, theta);
        const auto g = star_graph(m);
        // admissible: below both the closed-form radius and the Katz solve's bound
        const double limit = std::min(1.0 / std::sqrt(sp.eta), 1.0 / dense_spectral_radius_z(g, BtdwParams(theta)));
        const double alpha = frac(rng) * limit;
        const auto closed = star_katz(sp, alpha);
        const auto solved = katz_btdw(g, alpha, BtdwParams(theta));
        CHECK((closed.scores - solved.scores).cwiseAbs().maxCoeff() <= 1e-9 * solved.scores.maxCoeff());
    }
}

TEST_CASE("theta = 0 star Katz equals the finite nonbacktracking sum") {
    for (int m = 2; m <= 8; ++m) {
        for (double alpha : {0.1, 0.5, 0.9, 2.0}) {
            const auto closed = star_katz(StarParams(m, 0.0), alpha);
            const auto solved = katz_btdw(star_graph(m), alpha, BtdwParams(0.0));
            CHECK((closed.scores - solved.scores).cwiseAbs().maxCoeff() <= 1e-12 * closed.scores.maxCoeff());
            // the same numbers written as the exact two-term walk sum
            CHECK(closed.scores[0] == 1.0 + alpha * m);
            CHECK(closed.scores[1] == 1.0 + alpha + alpha * alpha * (m - 1));
        }
    }
}

TEST_CASE("hub to leaf ratio approaches 1/alpha + theta for many leaves") {
    // theta = 0 at fixed alpha: the gap is O(1/m)
    for (int m : {10, 100, 1000, 10000}) {
        const auto x = star_katz(StarParams(m, 0.0), 0.3);
        const double err = std::abs(x.scores[0] / x.scores[1] * 0.3 - 1.0);
        CHECK(err * m <= 11.0);
    }
    // theta > 0 needs alpha close to the radius 1/sqrt(eta)
    for (double theta : {0.3, 0.5, 1.0}) {
        double prev = 1.0;
        for (int m : {10, 100, 1000, 10000, 100000}) {
            const StarParams sp(m, theta);
            const double alpha = 0.999 / std::sqrt(sp.eta);
            const auto x = star_katz(sp, alpha);
            const double target = 1.0 / alpha + theta;
            const double err = std::abs(x.scores[0] / x.scores[1] - target) / target;
            CHECK(err < prev);
            prev = err;
        }
        CHECK(prev < 0.01);
    }
}

TEST_CASE("star series converges below 1/sqrt(eta) and diverges above it") {
    // sharp regime, theta >= 1/(m+1): 1/sqrt(eta) = 1/rho(Z)
    for (auto [m, theta] : {std::pair{6, 0.5}, std::pair{4, 0.6}, std::pair{3, 1.0}}) {
        const StarParams sp(m, theta);
        const auto g = star_graph(m);
        const BtdwParams p(theta);
        const double radius = 1.0 / std::sqrt(sp.eta);
        CHECK(std::abs(alpha_star(g, p) - radius) < 1e-6);
        const auto below = katz_series_oracle(g, 0.95 * radius, p);
        CHECK(below.solver.converged);
        CHECK((below.scores - star_katz(sp, 0.95 * radius).scores).cwiseAbs().maxCoeff() <=
              1e-8 * below.scores.maxCoeff());
        CHECK_THROWS_AS(katz_series_oracle(g, 1.05 * radius, p), DivergenceError);
    }
    // non-sharp regime: the series still converges past 1/rho(Z). Going far past it is not
    // testable in double precision, because round-off along the +/- mu modes of Z grows
    // like (alpha mu)^k while the true terms shrink like (alpha sqrt(eta))^k.
    for (auto [m, theta] : {std::pair{6, 0.1}, std::pair{4, 0.15}, std::pair{8, 0.05}}) {
        const StarParams sp(m, theta);
        const auto g = star_graph(m);
        const BtdwParams p(theta);
        const double bound = 1.0 / dense_spectral_radius_z(g, p);
        CHECK(bound < 1.0 / std::sqrt(sp.eta));
        const double alpha = 1.02 * bound;
        const auto past = katz_series_oracle(g, alpha, p);
        CHECK(past.solver.converged);
        CHECK((past.scores - star_katz(sp, alpha).scores).cwiseAbs().maxCoeff() <= 1e-8 * past.scores.maxCoeff());
        CHECK_THROWS_AS(katz_series_oracle(g, 1.05 / std::sqrt(sp.eta), p), DivergenceError);

        // asking for more digits than the round-off floor allows ends unconverged, not divergent
        SeriesOptions strict;
        strict.tol = 1e-17;
        const auto floor = katz_series_oracle(g, alpha, p, strict);
        CHECK_FALSE(floor.solver.converged);
        CHECK((floor.scores - past.scores).cwiseAbs().maxCoeff() <= 1e-8 * past.scores.maxCoeff());
    }
}

TEST_CASE("regular singular alpha") {
    CHECK(regular_singular_alpha(4, 1.0) == 0.25);
    CHECK(regular_singular_alpha(4, 0.0) == doctest::Approx(1.0 / 3.0));
    CHECK(regular_singular_alpha(6, 0.5) == doctest::Approx(1.0 / 5.5));
    CHECK_THROWS_AS(regular_singular_alpha(1, 0.5), ValidationError);

    // singular-value scan of M(alpha, theta) on the circulant locates the same point
    const auto g = regular_circulant(18, 6);
    const Eigen::MatrixXd a = g.dense_adjacency();
    const double edge = regular_singular_alpha(6, 0.5);
    double best_alpha = 0.0, best_sv = 1e300;
    for (int i = 1; i <= 400; ++i) {
        const double alpha = edge * (0.5 + i / 400.0);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(testing::dense_katz_matrix(a, alpha, 0.5));
        const double sv = svd.singularValues().minCoeff();
        if (sv < best_sv) {
            best_sv = sv;
            best_alpha = alpha;
        }
    }
    CHECK(std::abs(best_alpha - edge) <= edge / 400.0 + 1e-15);
    Eigen::JacobiSVD<Eigen::MatrixXd> at(testing::dense_katz_matrix(a, edge, 0.5));
    CHECK(at.singularValues().minCoeff() < 1e-12);
}

TEST_CASE("squid spectrum") {
    const auto s = squid_spectrum();
    CHECK(s.lambda == doctest::Approx(2.561552813).epsilon(1e-9));
    CHECK(s.v[6] == doctest::Approx(0.780776).epsilon(1e-6));
    CHECK((squid_graph().adjacency() * s.v - s.lambda * s.v).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(testing::dense_spectral_radius(squid_graph().dense_adjacency()) - s.lambda) < 1e-10);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>
#include <random>

#include "btdw/error.hpp"
#include "btdw/katz.hpp"
#include "btdw/spectral.hpp"
#include "support/test_support.hpp"

using namespace btdw;

namespace {

double rel_inf(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("graph without edges scores all ones") {
    const Graph g(6, std::span<const Edge>{});
    for (double theta : {0.0, 0.4, 1.0}) {
        const auto x = katz_btdw(g, 0.7, BtdwParams(theta));
        CHECK((x.scores.array() - 1.0).abs().maxCoeff() < 1e-15);
    }
    CHECK((katz_standard(g, 3.0).scores.array() == 1.0).all());
}

TEST_CASE("regular circulant classical Katz is the geometric constant") {
    const auto g = regular_circulant(20, 4);
    for (double alpha : {0.05, 0.1, 0.2, 0.24}) {
        const auto x = katz_standard(g, alpha);
        // truncated Neumann series on constant row sums
        double c = 0.0, term = 1.0;
        for (int k = 0; k < 4000; ++k, term *= alpha * 4) c += term;
        CHECK((x.scores.array() - c).abs().maxCoeff() < 1e-10 * c);
    }
}

TEST_CASE("star m=3 classical Katz equals theta=1 btdw solve") {
    const auto g = star_graph(3);
    const auto a = katz_standard(g, 0.2);
    const auto b = katz_btdw(g, 0.2, BtdwParams(1.0));
    CHECK((a.scores - b.scores).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.measure == "katz-standard");
    CHECK(b.measure == "katz-btdw");
}

TEST_CASE("assembled matrix matches independent dense assembly and stays inside pattern(I)+pattern(A)") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const auto g = testing::random_graph(3 + trial % 12, 0.35, rng, trial % 3 == 0);
        const Eigen::MatrixXd a = g.dense_adjacency();
        for (double theta : {0.0, 0.25, 0.8, 1.0}) {
            const double alpha = 0.13;
            const auto sys = assemble_katz_system(g, alpha, BtdwParams(theta));
            const Eigen::MatrixXd m(sys.matrix);
            CHECK(testing::max_abs_diff(m, testing::dense_katz_matrix(a, alpha, theta)) < 1e-15);
            const double mu = 1 - theta;
            CHECK(sys.rhs_scale == doctest::Approx(1 - mu * mu * alpha * alpha).epsilon(1e-15));
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                for (Eigen::Index j = 0; j < m.cols(); ++j)
                    if (i != j && a(i, j) == 0) CHECK(m(i, j) == 0.0);
        }
    }
}

TEST_CASE("reduction identities at theta = 1 and theta = 0") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 5 + static_cast<std::size_t>(trial);
        const auto g = testing::random_graph(n, 3.0 / static_cast<double>(n), rng, trial % 2 == 0);
        const Eigen::MatrixXd a = g.dense_adjacency();
        const double rho_a = testing::dense_spectral_radius(a);
        const double alpha = rho_a > 0 ? 0.5 / rho_a : 0.5;

        const auto x1 = katz_btdw(g, alpha, BtdwParams(1.0));
        const auto xs = katz_standard(g, alpha);
        CHECK((x1.scores - xs.scores).cwiseAbs().maxCoeff() <= 1e-12);

        // Nonbacktracking system (I - aA + a^2 (D - I) + a^3 (A - S)) x = (1 - a^2) 1, obtained by
        // summing the four-term p_k recurrence. The cubic sign only matters for directed graphs.
        const Eigen::MatrixXd s = a.cwiseProduct(a.transpose());
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a.rows(), a.cols());
        d.diagonal() = (a * a).diagonal();
        const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(a.rows(), a.cols());
        const double rho0 = testing::dense_spectral_radius(testing::dense_block_z(a, 0.0));
        const double b = rho0 > 0 ? 0.3 / rho0 : 0.3;
        const Eigen::MatrixXd m0 = eye - b * a + b * b * (d - eye) + b * b * b * (a - s);
        const auto x0 = katz_btdw(g, b, BtdwParams(0.0));
        const Eigen::VectorXd r = m0 * x0.scores - Eigen::VectorXd::Constant(a.rows(), 1 - b * b);
        CHECK(r.cwiseAbs().maxCoeff() <= 1e-12);

        // same vector as the truncated sum of nonbacktracking walk counts
        const auto p = nbt_sequence(g, 200);
        Eigen::VectorXd series = Eigen::VectorXd::Zero(a.rows());
        double bk = 1.0;
        for (std::size_t k = 0; k < p.size(); ++k, bk *= b) series += bk * p[k].rowwise().sum();
        CHECK((series - x0.scores).cwiseAbs().maxCoeff() <= 1e-10 * series.maxCoeff());

        if (g.is_symmetric()) {
            const Eigen::MatrixXd printed = eye - b * a + b * b * (d - eye) - b * b * b * (a - s);
            CHECK(testing::max_abs_diff(printed, m0) == 0.0);
        }
    }
}

TEST_CASE("solve agrees with the series below 0.9 alpha*") {
    std::mt19937_64 rng(21);
    std::vector<Graph> graphs{five_node_graph(), squid_graph(), star_graph(5), regular_circulant(12, 4), path_graph(7)};
    for (int t = 0; t < 12; ++t) graphs.push_back(testing::random_graph(8 + 3 * t, 0.15, rng, t % 2 == 1));
    for (const auto& g : graphs) {
        for (double theta : {0.0, 0.3, 0.7, 1.0}) {
            const BtdwParams p(theta);
            const double rho = testing::dense_spectral_radius(testing::dense_block_z(g.dense_adjacency(), theta));
            const double alpha = rho < 1e-12 ? 0.5 : 0.9 / rho;
            const auto solved = katz_btdw(g, alpha, p);
            const auto series = katz_series_oracle(g, alpha, p);
            CHECK(series.solver.converged);
            CHECK(rel_inf(solved.scores, series.scores) <= 1e-7);
            CHECK((solved.scores.array() > 0).all());
            CHECK(solved.solver.residual <= 1e-10);
        }
    }
}

TEST_CASE("series oracle fixtures") {
    const auto g = five_node_graph();
    const auto solved = katz_btdw(g, 0.1, BtdwParams(0.5));
    const auto series = katz_series_oracle(g, 0.1, BtdwParams(0.5));
    CHECK(rel_inf(series.scores, solved.scores) <= 1e-8);
    CHECK(series.solver.residual < 1e-12);

    const auto s1 = katz_series_oracle(g, 0.1, BtdwParams(1.0));
    CHECK(rel_inf(s1.scores, katz_standard(g, 0.1).scores) <= 1e-8);

    const auto zero = katz_series_oracle(squid_graph(), 0.0, BtdwParams(0.3));
    CHECK((zero.scores.array() == 1.0).all());

    // a DAG has finitely many walks, so the sum terminates exactly
    const std::vector<Edge> dag{{0, 1}, {1, 2}, {0, 2}};
    const auto finite = katz_series_oracle(Graph(3, dag), 5.0, BtdwParams(0.5));
    CHECK(finite.solver.converged);
    CHECK(finite.scores[0] == doctest::Approx(1 + 2 * 5.0 + 25.0));
}

TEST_CASE("series divergence is detected") {
    const auto g = regular_circulant(10, 4);
    CHECK_THROWS_AS(katz_series_oracle(g, 0.5, BtdwParams(1.0)), DivergenceError);
    SeriesOptions few;
    few.max_terms = 5;
    const auto partial = katz_series_oracle(g, 0.1, BtdwParams(1.0), few);
    CHECK_FALSE(partial.solver.converged);
    CHECK(partial.solver.iterations == 5);
}

TEST_CASE("regular circulant: constant solution and singularity at 1/(d-1+theta)") {
    const int d = 4;
    const auto g = regular_circulant(20, d);
    const Eigen::MatrixXd a = g.dense_adjacency();
    for (double theta : {0.0, 0.5, 1.0}) {
        const double edge = 1.0 / (d - 1 + theta);
        const auto x = katz_btdw(g, 0.5 * edge, BtdwParams(theta));
        CHECK((x.scores.array() - x.scores[0]).abs().maxCoeff() <= 1e-8);

        const Eigen::MatrixXd m = testing::dense_katz_matrix(a, (1 - 1e-6) * edge, theta);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        const auto sv = svd.singularValues();
        CHECK(sv[sv.size() - 1] < 1e-4);
        CHECK(sv[0] / sv[sv.size() - 1] > 1e5);
    }
}

TEST_CASE("alpha beyond the radius raises a domain error carrying alpha*") {
    const std::vector<Edge> k4{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    const auto g = Graph::undirected(4, k4);
    try {
        katz_standard(g, 0.5);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        REQUIRE(e.alpha_star().has_value());
        CHECK(*e.alpha_star() == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
        CHECK(std::string(e.what()).find("alpha outside convergence region") != std::string::npos);
    }
    CHECK_THROWS_AS(katz_btdw(g, 1.0, BtdwParams(0.3)), DomainError);
    CHECK_THROWS_AS(katz_btdw(g, -0.1, BtdwParams(0.3)), ValidationError);
}

TEST_CASE("Krylov path agrees with the direct factorization") {
    std::mt19937_64 rng(3);
    const auto g = testing::random_graph(300, 0.01, rng);
    const BtdwParams p(0.4);
    const double alpha = 0.8 * alpha_star(g, p);
    KatzOptions iter;
    iter.method = SolveMethod::iterative;
    const auto xi = katz_btdw(g, alpha, p, iter);
    const auto xd = katz_btdw(g, alpha, p);
    CHECK(xi.solver.method == "bicgstab");
    CHECK(xd.solver.method == "sparse-lu");
    CHECK(rel_inf(xi.scores, xd.scores) < 1e-8);
}

TEST_CASE("normalize") {
    CentralityResult r;
    r.scores = Eigen::VectorXd::Ones(4);
    const auto l1 = normalize(r, Normalization::l1);
    CHECK((l1.scores.array() == 0.25).all());
    CHECK(l1.normalization == Normalization::l1);
    const auto l2 = normalize(r, Normalization::l2);
    CHECK(l2.scores.norm() == doctest::Approx(1.0));

    const auto x = katz_btdw(squid_graph(), 0.2, BtdwParams(0.5));
    const auto xn = normalize(x, Normalization::l1);
    CHECK(xn.scores.lpNorm<1>() == doctest::Approx(1.0).epsilon(1e-15));
    for (Eigen::Index i = 0; i < x.scores.size(); ++i)
        for (Eigen::Index j = 0; j < x.scores.size(); ++j)
            if (std::abs(x.scores[i] - x.scores[j]) > 1e-12 * x.scores.maxCoeff())
                CHECK((x.scores[i] < x.scores[j]) == (xn.scores[i] < xn.scores[j]));

    r.scores.setZero();
    CHECK_THROWS_AS(normalize(r, Normalization::l2), ValidationError);
    CHECK(parse_normalization("l2") == Normalization::l2);
    CHECK(to_string(Normalization::none) == "none");
    CHECK_THROWS_AS(parse_normalization("max"), ValidationError);
}

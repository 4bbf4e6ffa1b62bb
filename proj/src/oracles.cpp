#include "btdw/oracles.hpp"

#include <cmath>
#include <sstream>

#include "btdw/error.hpp"

namespace btdw {

StarParams::StarParams(int m_, double theta_) : m(m_), theta(theta_), eta(theta_ * (theta_ + m_ - 1)) {
    if (m < 1) throw ValidationError("star needs at least one leaf");
    static_cast<void>(BtdwParams{theta});  // range check
    b = Eigen::VectorXd::Constant(m + 1, -theta);
    b[0] = -(theta + m - 1);
}

namespace {

Eigen::MatrixXd star_adjacency(int m) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 1, m + 1);
    a.row(0).tail(m).setOnes();
    a.col(0).tail(m).setOnes();
    return a;
}

}  // namespace

WalkCountMatrix star_qk(const StarParams& sp, int k) {
    if (k < 0) throw ValidationError("walk length must be nonnegative");
    const int n = sp.m + 1;
    const double mu = 1.0 - sp.theta;
    const Eigen::MatrixXd a = star_adjacency(sp.m);
    Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
    d[0] = sp.m;

    WalkCountMatrix out{k, sp.theta, {}};
    if (k == 0) {
        out.values = Eigen::MatrixXd::Identity(n, n);
    } else if (k % 2 == 1) {
        out.values = std::pow(sp.eta, (k - 1) / 2) * a;
    } else if (k == 2) {
        out.values = a * a;
        out.values.diagonal() -= mu * d;
    } else {
        if (sp.theta == 0.0)
            throw RefusedError("even-length star closed form needs theta > 0; use the recurrence at theta = 0");
        const int j = k / 2;
        // (I - (mu/eta B)^j)(I - mu/eta B)^{-1} and mu^j D B^{j-1} are both diagonal
        const Eigen::ArrayXd r = (mu / sp.eta) * sp.b.array();
        const Eigen::ArrayXd geom = (1.0 - r.pow(j)) / (1.0 - r);
        const Eigen::ArrayXd tail = std::pow(mu, j) * d.array() * sp.b.array().pow(j - 1);
        out.values = std::pow(sp.eta, j - 1) * (a * a) * geom.matrix().asDiagonal();
        out.values.diagonal() -= tail.matrix();
    }
    return out;
}

CentralityResult star_katz(const StarParams& sp, double alpha) {
    if (!(alpha >= 0.0)) throw ValidationError("alpha must be nonnegative");
    const double m = sp.m;
    CentralityResult out;
    out.scores.resize(sp.m + 1);
    if (sp.theta == 0.0) {
        out.scores[0] = 1.0 + alpha * m;
        out.scores.tail(sp.m).setConstant(1.0 + alpha + alpha * alpha * (m - 1));
    } else {
        const double denom = 1.0 - alpha * alpha * sp.eta;
        if (!(denom > 0.0)) {
            std::ostringstream os;
            os << "star Katz closed form needs alpha^2 eta < 1 (alpha=" << alpha << ", eta=" << sp.eta
               << ", 1/sqrt(eta)=" << 1.0 / std::sqrt(sp.eta) << ")";
            throw DomainError(os.str(), std::nullopt);
        }
        out.scores[0] = 1.0 + alpha * m * (1.0 + alpha * sp.theta) / denom;
        out.scores.tail(sp.m).setConstant(1.0 + alpha * (1.0 + alpha * (sp.theta + m - 1)) / denom);
    }
    out.measure = "katz-star-closed-form";
    out.alpha = alpha;
    out.theta = sp.theta;
    out.solver.method = "closed-form";
    return out;
}

double regular_singular_alpha(int d, double theta) {
    if (d < 2) throw ValidationError("regular degree must be at least 2");
    static_cast<void>(BtdwParams{theta});  // range check
    return 1.0 / (d - 1 + theta);
}

SquidSpectrum squid_spectrum() {
    SquidSpectrum s;
    s.lambda = (1.0 + std::sqrt(17.0)) / 2.0;
    s.v.resize(11);
    for (int i : {0, 5, 7, 9}) s.v[i] = 1.0;
    for (int i : {6, 8, 10}) s.v[i] = (s.lambda - 1.0) / 2.0;
    for (int i : {1, 2, 3, 4}) s.v[i] = (s.lambda - 1.0) / 4.0;
    const double err = (squid_graph().adjacency() * s.v - s.lambda * s.v).cwiseAbs().maxCoeff();
    if (!(err < 1e-12)) {
        std::ostringstream os;
        os << "squid eigenpair check failed: ||Av - lambda v||_inf = " << err;
        throw FixtureError(os.str());
    }
    return s;
}

}  // namespace btdw

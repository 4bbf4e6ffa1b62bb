#include "btdw/genfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "btdw/error.hpp"
#include "btdw/spectral.hpp"

namespace btdw {

CoefficientSeries CoefficientSeries::resolvent(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("series parameter alpha must be >= 0");
    return CoefficientSeries(Kind::resolvent, alpha, {});
}

CoefficientSeries CoefficientSeries::exponential(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("series parameter alpha must be >= 0");
    return CoefficientSeries(Kind::exponential, alpha, {});
}

CoefficientSeries CoefficientSeries::custom(std::vector<double> coeffs) {
    if (coeffs.empty()) throw ValidationError("custom series needs at least one coefficient");
    for (double c : coeffs)
        if (!(c >= 0.0) || !std::isfinite(c))
            throw ValidationError("custom series coefficients must be finite and nonnegative");
    return CoefficientSeries(Kind::custom, 0.0, std::move(coeffs));
}

CoefficientSeries CoefficientSeries::shifted(int s) const {
    if (s < 0) throw ValidationError("series shift must be nonnegative");
    CoefficientSeries out = *this;
    out.shift_ += s;
    return out;
}

int CoefficientSeries::length() const {
    if (kind_ != Kind::custom) throw ValidationError("infinite series has no length");
    return std::max(0, static_cast<int>(coeffs_.size()) - shift_);
}

double CoefficientSeries::coefficient(int k) const {
    if (k < 0) return 0.0;
    const int j = shift_ + k;
    switch (kind_) {
        case Kind::resolvent: return std::pow(alpha_, j);
        case Kind::exponential: {
            double c = 1.0;
            for (int i = 1; i <= j; ++i) c *= alpha_ / i;
            return c;
        }
        case Kind::custom: return j < static_cast<int>(coeffs_.size()) ? coeffs_[static_cast<std::size_t>(j)] : 0.0;
    }
    return 0.0;
}

double CoefficientSeries::Stream::next() {
    const double out = value_;
    const int j = series_->shift_ + next_k_ + 1;  // index of the following coefficient
    switch (series_->kind_) {
        case Kind::resolvent: value_ *= series_->alpha_; break;
        case Kind::exponential: value_ *= series_->alpha_ / j; break;
        case Kind::custom:
            value_ = j < static_cast<int>(series_->coeffs_.size()) ? series_->coeffs_[static_cast<std::size_t>(j)] : 0.0;
            break;
    }
    ++next_k_;
    return out;
}

double CoefficientSeries::evaluate(double y) const {
    switch (kind_) {
        case Kind::resolvent:
            if (!(std::abs(alpha_ * y) < 1.0))
                throw DivergenceError("resolvent series diverges at |alpha y| >= 1");
            return std::pow(alpha_, shift_) / (1.0 - alpha_ * y);
        case Kind::exponential: {
            auto s = stream();
            double sum = 0.0, yk = 1.0;
            const double peak = std::abs(alpha_ * y);
            for (int k = 0; k < 100000; ++k, yk *= y) {
                const double t = s.next() * yk;
                sum += t;
                if (k > peak + 2 && std::abs(t) <= 1e-17 * std::abs(sum)) break;
            }
            return sum;
        }
        case Kind::custom: {
            double sum = 0.0;
            for (int k = length() - 1; k >= 0; --k) sum = sum * y + coefficient(k);
            return sum;
        }
    }
    return 0.0;
}

namespace {

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
double inf_norm(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double geometric_tail(const std::vector<double>& t) {
    if (t.size() < 3) return 0.0;
    const std::size_t last = t.size() - 1;
    if (t[last] == 0.0 || t[last - 2] == 0.0) return 0.0;
    const double r = std::sqrt(t[last] / t[last - 2]);
    return r < 1.0 ? t[last] * r / (1.0 - r) : std::numeric_limits<double>::infinity();
}

/// Running stop test shared by the summation routes.
struct StopRule {
    double tol;
    int small = 0;
    bool done(double term, double sum_norm) {
        small = term <= tol * sum_norm ? small + 1 : 0;
        return small >= 2;
    }
};

std::string series_name(const CoefficientSeries& s) {
    switch (s.kind()) {
        case CoefficientSeries::Kind::resolvent: return "resolvent(alpha=" + std::to_string(s.alpha()) + ")";
        case CoefficientSeries::Kind::exponential: return "exponential(alpha=" + std::to_string(s.alpha()) + ")";
        case CoefficientSeries::Kind::custom: return "custom series";
    }
    return "series";
}

template <class Recurrence, class Acc>
GenfunResult sum_direct(Recurrence& rec, const CoefficientSeries& series, const GenfunOptions& opts, Acc acc) {
    GenfunResult out;
    auto coeffs = series.stream();
    const int limit = series.is_finite() ? series.length() : opts.max_terms;
    StopRule stop{opts.tol};
    std::vector<double> terms;
    bool converged = series.is_finite();
    for (int k = 0; k < limit; ++k) {
        const double c = coeffs.next();
        const auto& q = rec.advance();
        const double t = c * inf_norm(q);
        terms.push_back(t);
        const double norm = acc(c, q);
        out.terms = k + 1;
        if (!std::isfinite(norm)) break;
        if (!series.is_finite() && stop.done(t, norm)) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw DivergenceError(series_name(series) + " of walk counts did not settle within " +
                              std::to_string(opts.max_terms) + " terms");
    out.error_bound = series.is_finite() ? 0.0 : geometric_tail(terms);
    return out;
}

}  // namespace

GenfunResult genfun_direct(const Graph& g, BtdwParams p, const CoefficientSeries& series, const GenfunOptions& opts) {
    const auto n = static_cast<Eigen::Index>(g.num_nodes());
    if (opts.want_matrix) {
        WalkCountRecurrence rec(g, p, Side::left);
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
        auto out = sum_direct(rec, series, opts, [&](double c, const Eigen::MatrixXd& q) {
            if (c != 0.0) sum.noalias() += c * q;
            return inf_norm(sum);
        });
        out.action = sum.rowwise().sum();
        out.matrix = std::move(sum);
        return out;
    }
    WalkActionRecurrence rec(g, p, Eigen::VectorXd::Ones(n));
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
    auto out = sum_direct(rec, series, opts, [&](double c, const Eigen::VectorXd& q) {
        if (c != 0.0) sum.noalias() += c * q;
        return inf_norm(sum);
    });
    out.action = std::move(sum);
    return out;
}

namespace {

struct BlockzAction {
    Eigen::VectorXd bottom;
    int terms = 0;
    double error_bound = 0.0;
};

// Bottom block of (f_0(Z) - mu^2 f_2(Z)) (0, 0, v).
BlockzAction blockz_apply(const BlockOperatorZ& z, const CoefficientSeries& series, const Eigen::VectorXd& v,
                          const GenfunOptions& opts) {
    const auto n = z.nodes();
    const double mu = z.mu();
    const auto f2 = series.shifted(2);

    Eigen::VectorXd u = Eigen::VectorXd::Zero(3 * n);
    u.tail(n) = v;
    Eigen::VectorXd next(3 * n);
    Eigen::VectorXd s0 = Eigen::VectorXd::Zero(3 * n);
    Eigen::VectorXd s2 = Eigen::VectorXd::Zero(3 * n);

    auto c0 = series.stream();
    auto c2 = f2.stream();
    const bool finite = series.is_finite();
    const int len0 = finite ? series.length() : opts.max_terms;
    const int len2 = finite ? f2.length() : opts.max_terms;
    StopRule stop0{opts.tol}, stop2{opts.tol};
    bool done0 = finite, done2 = finite || mu == 0.0;
    std::vector<double> t0, t2;

    int k = 0;
    for (; k < std::max(len0, len2); ++k) {
        const double un = inf_norm(u);
        if (k < len0 && (finite || !done0)) {
            const double c = c0.next();
            if (c != 0.0) s0.noalias() += c * u;
            t0.push_back(c * un);
            if (!finite && stop0.done(c * un, inf_norm(s0))) done0 = true;
        }
        if (k < len2 && (finite || !done2)) {
            const double c = c2.next();
            if (c != 0.0) s2.noalias() += c * u;
            t2.push_back(c * un);
            if (!finite && stop2.done(c * un, inf_norm(s2))) done2 = true;
        }
        if (!s0.allFinite() || !s2.allFinite()) break;
        if (!finite && done0 && done2) {
            ++k;
            break;
        }
        z.apply(u, next);
        u.swap(next);
    }
    if (!done0)
        throw DivergenceError("f_0(Z) series for " + series_name(series) + " did not converge within " +
                              std::to_string(opts.max_terms) + " terms");
    if (!done2)
        throw DivergenceError("f_2(Z) series for " + series_name(series) + " did not converge within " +
                              std::to_string(opts.max_terms) + " terms");

    BlockzAction out;
    out.bottom = s0.tail(n);
    if (mu != 0.0) out.bottom -= mu * mu * s2.tail(n);
    out.terms = k;
    if (!finite) out.error_bound = geometric_tail(t0) + mu * mu * geometric_tail(t2);
    return out;
}

}  // namespace

GenfunResult genfun_blockz(const Graph& g, BtdwParams p, const CoefficientSeries& series, const GenfunOptions& opts) {
    const BlockOperatorZ z(g, p);
    const auto n = z.nodes();
    GenfunResult out;
    if (opts.want_matrix) {
        if (static_cast<std::size_t>(n) > kDenseNodeLimit)
            throw RefusedError("matrix-valued generating function refused above " + std::to_string(kDenseNodeLimit) +
                               " nodes");
        Eigen::MatrixXd m(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto col = blockz_apply(z, series, Eigen::VectorXd::Unit(n, j), opts);
            m.col(j) = col.bottom;
            out.terms = std::max(out.terms, col.terms);
            out.error_bound = std::max(out.error_bound, col.error_bound);
        }
        out.action = m.rowwise().sum();
        out.matrix = std::move(m);
        return out;
    }
    auto act = blockz_apply(z, series, Eigen::VectorXd::Ones(n), opts);
    out.action = std::move(act.bottom);
    out.terms = act.terms;
    out.error_bound = act.error_bound;
    return out;
}

GenfunResult expm_btdw_action(const Graph& g, BtdwParams p, double alpha, double tol) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be nonnegative");
    if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
    const BlockOperatorZ z(g, p);
    const auto n = z.nodes();
    const double mu = z.mu();

    // start block (1, A1, (A^2 - mu D) 1); note D1 = diag(A^2)
    const auto& a = g.adjacency();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd v(3 * n);
    v.head(n) = ones;
    v.segment(n, n) = a * ones;
    v.tail(n) = a * v.segment(n, n) - mu * derived_matrices(g).d;

    // smallest K with x^{K+1}/(K+1)! e^x < tol; the remainder of exp(X) after K terms
    // is bounded by ||X||^{K+1}/(K+1)! e^{||X||}
    const double x = alpha * z.norm1();
    int terms = 0;
    double bound = std::exp(x);  // K = -1: nothing summed
    while (bound >= tol) {
        ++terms;
        bound *= x / terms;
        if (terms > 100000) throw DivergenceError("exponential series needs too many terms (alpha ||Z||_1 too large)");
    }

    Eigen::VectorXd sum = v;
    Eigen::VectorXd term = v;
    Eigen::VectorXd next(3 * n);
    for (int k = 1; k < terms; ++k) {
        z.apply(term, next);
        term = (alpha / k) * next;
        sum += term;
    }
    GenfunResult out;
    out.action = sum.head(n);
    out.terms = terms;
    out.error_bound = bound * v.lpNorm<1>();
    return out;
}

}  // namespace btdw

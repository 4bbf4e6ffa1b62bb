#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "btdw/graph.hpp"
#include "btdw/walks.hpp"

namespace btdw {

/// Power-series coefficients c_0, c_1, ... for f(y) = sum c_k y^k, optionally shifted so that
/// coefficient(k) = c_{s+k} (the series f_s).
class CoefficientSeries {
public:
    enum class Kind { resolvent, exponential, custom };

    /// c_k = alpha^k
    static CoefficientSeries resolvent(double alpha);
    /// c_k = alpha^k / k!
    static CoefficientSeries exponential(double alpha);
    /// Exactly the listed coefficients, zero beyond. Entries must be finite and nonnegative.
    static CoefficientSeries custom(std::vector<double> coeffs);

    Kind kind() const noexcept { return kind_; }
    double alpha() const noexcept { return alpha_; }
    int shift() const noexcept { return shift_; }
    CoefficientSeries shifted(int s) const;

    bool is_finite() const noexcept { return kind_ == Kind::custom; }
    /// Number of (possibly) nonzero coefficients of a finite series.
    int length() const;

    double coefficient(int k) const;

    /// Scalar value f_s(y), summed to round-off. Throws DivergenceError for a resolvent with
    /// |alpha y| >= 1.
    double evaluate(double y) const;

    /// Sequential access c_0, c_1, ... computed by a one-step ratio rather than from scratch.
    class Stream {
    public:
        explicit Stream(const CoefficientSeries& s) : series_(&s), next_k_(0), value_(s.coefficient(0)) {}
        double next();

    private:
        const CoefficientSeries* series_;
        int next_k_;
        double value_;
    };
    Stream stream() const { return Stream(*this); }

private:
    CoefficientSeries(Kind kind, double alpha, std::vector<double> coeffs)
        : kind_(kind), alpha_(alpha), coeffs_(std::move(coeffs)) {}

    Kind kind_;
    double alpha_ = 0.0;
    std::vector<double> coeffs_;
    int shift_ = 0;
};

struct GenfunOptions {
    /// Stop once two consecutive terms are at most tol times the running sum (infinity norms).
    double tol = 1e-14;
    int max_terms = 20000;
    /// Also form the n x n matrix sum_k c_k q_k(A) (refused above kDenseNodeLimit nodes).
    bool want_matrix = false;
};

struct GenfunResult {
    std::optional<Eigen::MatrixXd> matrix;
    Eigen::VectorXd action;  ///< (sum_k c_k q_k(A)) 1
    int terms = 0;
    double error_bound = 0.0;  ///< estimated (or, for the exponential, rigorous) truncation error
};

/// Reference route: sums c_k q_k(A) straight from the walk-count recurrence.
GenfunResult genfun_direct(const Graph& g, BtdwParams p, const CoefficientSeries& series,
                           const GenfunOptions& opts = {});

/// Block-operator route: the bottom block of (f_0(Z) - mu^2 f_2(Z)) applied to (0, 0, v), with both
/// series summed by repeated matrix-free applications of Z. The matrix (if requested) is built one
/// column at a time.
GenfunResult genfun_blockz(const Graph& g, BtdwParams p, const CoefficientSeries& series,
                           const GenfunOptions& opts = {});

/// (sum_k alpha^k q_k(A) / k!) 1, as the top block of exp(alpha Z) applied to (1, A1, (A^2 - mu D)1).
/// Plain Taylor expansion; the number of terms K is the smallest with
/// x^{K+1} / (K+1)! * e^x < tol, x = alpha ||Z||_1.
GenfunResult expm_btdw_action(const Graph& g, BtdwParams p, double alpha, double tol = 1e-14);

}  // namespace btdw

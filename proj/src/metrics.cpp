#include "btdw/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "btdw/error.hpp"

namespace btdw {

double ipr(const Eigen::VectorXd& x) {
    const double top = x.cwiseAbs().maxCoeff();
    if (!(top > 0.0)) throw ValidationError("inverse participation ratio of a zero vector");
    // sum v^4 / (sum v^2)^2 after scaling by the largest entry: a constant vector becomes all
    // ones and the result is exactly n / n^2
    const Eigen::ArrayXd v = x.array() / top;
    const Eigen::ArrayXd sq = v * v;
    const double s2 = sq.sum();
    return (sq * sq).sum() / (s2 * s2);
}

namespace {

void check_pair(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size()) throw ValidationError("score vectors differ in length");
    if (x.size() < 2) throw ValidationError("need at least two scores to correlate");
}

// Sum over runs of equal keys of t(t-1)/2, for a range sorted so that equal keys are adjacent.
template <class Eq>
std::int64_t tied_pairs(const std::vector<std::size_t>& idx, Eq same) {
    std::int64_t total = 0;
    std::int64_t run = 1;
    for (std::size_t i = 1; i < idx.size(); ++i) {
        if (same(idx[i - 1], idx[i])) {
            ++run;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    return total + run * (run - 1) / 2;
}

// Merge sort of idx by y, counting strict inversions.
std::int64_t count_swaps(std::vector<std::size_t>& idx, std::vector<std::size_t>& buf, const Eigen::VectorXd& y,
                         std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t swaps = count_swaps(idx, buf, y, lo, mid) + count_swaps(idx, buf, y, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (y[idx[j]] < y[idx[i]]) {
            swaps += static_cast<std::int64_t>(mid - i);
            buf[k++] = idx[j++];
        } else {
            buf[k++] = idx[i++];
        }
    }
    while (i < mid) buf[k++] = idx[i++];
    while (j < hi) buf[k++] = idx[j++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
              idx.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

Eigen::VectorXd average_ranks_ascending(const Eigen::VectorXd& x) {
    const auto n = static_cast<std::size_t>(x.size());
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    Eigen::VectorXd ranks(x.size());
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double kendall_tau(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    check_pair(x, y);
    const auto n = static_cast<std::size_t>(x.size());
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });

    const auto total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
    const std::int64_t tie_x = tied_pairs(idx, [&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
    const std::int64_t tie_xy =
        tied_pairs(idx, [&](std::size_t a, std::size_t b) { return x[a] == x[b] && y[a] == y[b]; });

    std::vector<std::size_t> buf(n);
    const std::int64_t swaps = count_swaps(idx, buf, y, 0, n);
    const std::int64_t tie_y = tied_pairs(idx, [&](std::size_t a, std::size_t b) { return y[a] == y[b]; });

    if (tie_x == total || tie_y == total) throw ValidationError("Kendall tau undefined for a constant vector");
    // concordant - discordant, with pairs tied in either coordinate excluded
    const std::int64_t s = total - tie_x - tie_y + tie_xy - 2 * swaps;
    return static_cast<double>(s) / std::sqrt(static_cast<double>(total - tie_x) * static_cast<double>(total - tie_y));
}

double spearman_rho(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    check_pair(x, y);
    const Eigen::VectorXd rx = average_ranks_ascending(x);
    const Eigen::VectorXd ry = average_ranks_ascending(y);
    const Eigen::ArrayXd cx = rx.array() - rx.mean();
    const Eigen::ArrayXd cy = ry.array() - ry.mean();
    const double sxx = (cx * cx).sum();
    const double syy = (cy * cy).sum();
    if (sxx == 0.0 || syy == 0.0) throw ValidationError("Spearman rho undefined for a constant vector");
    return (cx * cy).sum() / std::sqrt(sxx * syy);
}

Ranking rank_of(const Eigen::VectorXd& x) {
    const auto n = static_cast<std::size_t>(x.size());
    Ranking r;
    r.order.resize(n);
    std::iota(r.order.begin(), r.order.end(), 0);
    std::stable_sort(r.order.begin(), r.order.end(), [&](Index a, Index b) { return x[a] > x[b]; });
    // descending rank = n + 1 - ascending rank
    r.ranks = (static_cast<double>(n) + 1.0) - average_ranks_ascending(x).array();
    return r;
}

Eigen::VectorXd snap_ties(const Eigen::VectorXd& x, double rel_tol) {
    const auto n = static_cast<std::size_t>(x.size());
    if (n == 0) return x;
    const double eps = rel_tol * x.cwiseAbs().maxCoeff();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    Eigen::VectorXd out = x;
    double anchor = x[idx[0]];
    for (std::size_t k = 1; k < n; ++k) {
        const double v = x[idx[k]];
        if (v - anchor <= eps) {
            out[idx[k]] = anchor;
        } else {
            anchor = v;
        }
    }
    return out;
}

}  // namespace btdw

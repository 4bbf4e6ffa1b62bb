#include "btdw/walks.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

#include "btdw/error.hpp"

namespace btdw {

BtdwParams::BtdwParams(double theta) : theta_(theta), mu_(1.0 - theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw ValidationError("theta must lie in [0,1], got " + std::to_string(theta));
}

namespace {

void check_dense(const Graph& g) {
    if (g.num_nodes() > kDenseNodeLimit)
        throw RefusedError("dense walk counts refused for " + std::to_string(g.num_nodes()) + " nodes (limit " +
                           std::to_string(kDenseNodeLimit) + ")");
}

SparseMatrix a_minus_s(const Graph& g, const DerivedMatrices& dm) {
    SparseMatrix out = g.adjacency() - dm.s;
    out.prune(0.0);
    return out;
}

template <class T>
void rotate_in(std::array<T, 3>& window, T next) {
    window[2] = std::move(window[1]);
    window[1] = std::move(window[0]);
    window[0] = std::move(next);
}

}  // namespace

WalkCountRecurrence::WalkCountRecurrence(const Graph& g, BtdwParams p, Side side)
    : a_(g.adjacency()), mu_(p.mu()), side_(side) {
    check_dense(g);
    const auto dm = derived_matrices(g);
    a_minus_s_ = a_minus_s(g, dm);
    d_ = dm.d;
    mu_minus_d_ = Eigen::VectorXd::Constant(a_.rows(), mu_) - d_;
}

const Eigen::MatrixXd& WalkCountRecurrence::advance() {
    const auto n = a_.rows();
    const int k = next_++;
    const auto& [q1, q2, q3] = window_;  // q_{k-1}, q_{k-2}, q_{k-3}
    Eigen::MatrixXd next;
    if (k == 0) {
        next = Eigen::MatrixXd::Identity(n, n);
    } else if (k == 1) {
        next = Eigen::MatrixXd(a_);
    } else if (k == 2) {
        next = q1 * a_;
        next.diagonal() -= mu_ * d_;
    } else if (side_ == Side::right) {
        next = q1 * a_;
        if (mu_ != 0.0) {
            next += mu_ * (q2 * mu_minus_d_.asDiagonal());
            next -= (mu_ * mu_) * Eigen::MatrixXd(q3 * a_minus_s_);
        }
    } else {
        next = a_ * q1;
        if (mu_ != 0.0) {
            next += mu_ * (mu_minus_d_.asDiagonal() * q2);
            next -= (mu_ * mu_) * Eigen::MatrixXd(a_minus_s_ * q3);
        }
    }
    rotate_in(window_, std::move(next));
    return window_[0];
}

WalkActionRecurrence::WalkActionRecurrence(const Graph& g, BtdwParams p, Eigen::VectorXd v)
    : a_(g.adjacency()), mu_(p.mu()) {
    if (v.size() != a_.rows()) throw ValidationError("start vector length does not match node count");
    const auto dm = derived_matrices(g);
    a_minus_s_ = a_minus_s(g, dm);
    d_ = dm.d;
    mu_minus_d_ = Eigen::VectorXd::Constant(a_.rows(), mu_) - d_;
    window_[0] = std::move(v);
}

const Eigen::VectorXd& WalkActionRecurrence::advance() {
    const int k = next_++;
    if (k == 0) return window_[0];  // q_0 v = v, stored by the constructor

    const auto& [y1, y2, y3] = window_;
    Eigen::VectorXd next;
    if (k == 1) {
        next = a_ * y1;
    } else if (k == 2) {
        // (A^2 - mu D) v = A (A v) - mu D v
        next = a_ * y1 - mu_ * d_.cwiseProduct(y2);
    } else {
        next = a_ * y1;
        if (mu_ != 0.0) {
            next += mu_ * mu_minus_d_.cwiseProduct(y2);
            next -= (mu_ * mu_) * (a_minus_s_ * y3);
        }
    }
    rotate_in(window_, std::move(next));
    return window_[0];
}

WalkCountSequence btdw_sequence(const Graph& g, BtdwParams p, int max_length, Side side) {
    if (max_length < 0) throw ValidationError("maximum walk length must be nonnegative");
    WalkCountRecurrence rec(g, p, side);
    WalkCountSequence seq{p, {}};
    seq.matrices.reserve(static_cast<std::size_t>(max_length) + 1);
    for (int k = 0; k <= max_length; ++k) seq.matrices.push_back(rec.advance());
    return seq;
}

WalkCountSequence nbt_sequence(const Graph& g, int max_length) {
    if (max_length < 0) throw ValidationError("maximum walk length must be nonnegative");
    check_dense(g);
    const auto n = static_cast<Eigen::Index>(g.num_nodes());
    const auto dm = derived_matrices(g);
    const SparseMatrix& a = g.adjacency();
    const SparseMatrix ams = a_minus_s(g, dm);
    const Eigen::VectorXd one_minus_d = Eigen::VectorXd::Ones(n) - dm.d;

    WalkCountSequence seq{BtdwParams::nonbacktracking(), {}};
    auto& p = seq.matrices;
    p.reserve(static_cast<std::size_t>(max_length) + 1);
    for (int k = 0; k <= max_length; ++k) {
        if (k == 0) {
            p.push_back(Eigen::MatrixXd::Identity(n, n));
        } else if (k == 1) {
            p.push_back(Eigen::MatrixXd(a));
        } else if (k == 2) {
            Eigen::MatrixXd p2 = p[1] * a;
            p2.diagonal() -= dm.d;
            p.push_back(std::move(p2));
        } else {
            Eigen::MatrixXd next = p[k - 1] * a;
            next += p[k - 2] * one_minus_d.asDiagonal();
            next -= Eigen::MatrixXd(p[k - 3] * ams);
            p.push_back(std::move(next));
        }
    }
    return seq;
}

WalkCountMatrix brute_force_btdw(const Graph& g, BtdwParams p, int length) {
    if (g.num_nodes() > 12 || length > 10)
        throw RefusedError("brute-force enumeration limited to 12 nodes and length 10");
    if (length < 0) throw ValidationError("walk length must be nonnegative");

    const auto n = static_cast<Index>(g.num_nodes());
    WalkCountMatrix out{length, p.theta(), Eigen::MatrixXd::Zero(n, n)};
    std::vector<Index> walk;
    walk.reserve(static_cast<std::size_t>(length) + 1);

    // Each completed walk contributes theta^(#s with i_s == i_{s+2}).
    std::function<void()> extend = [&]() {
        if (static_cast<int>(walk.size()) == length + 1) {
            int backtracks = 0;
            for (std::size_t s = 0; s + 2 < walk.size(); ++s)
                if (walk[s] == walk[s + 2]) ++backtracks;
            out.values(walk.front(), walk.back()) += std::pow(p.theta(), backtracks);
            return;
        }
        for (Index j : g.out_neighbors(walk.back())) {
            walk.push_back(j);
            extend();
            walk.pop_back();
        }
    };
    for (Index i = 0; i < n; ++i) {
        walk.assign(1, i);
        extend();
    }
    return out;
}

void write_walk_count_csv(const WalkCountMatrix& q, std::ostream& out) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", q.theta);
    out << "# k=" << q.k << ", theta=" << buf << '\n';
    for (Eigen::Index i = 0; i < q.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < q.values.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.12e", q.values(i, j));
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
}

}  // namespace btdw

#pragma once

#include <Eigen/Core>

#include "btdw/katz.hpp"
#include "btdw/walks.hpp"

namespace btdw {

/// Star S_{1,m}: node 0 is the hub, nodes 1..m the leaves.
struct StarParams {
    StarParams(int m, double theta);

    int m;
    double theta;
    double eta;        ///< theta (theta + m - 1)
    Eigen::VectorXd b;  ///< diagonal of (1 - theta) I - D: hub -(theta + m - 1), leaves -theta
};

/// Closed-form q_k(A) on the star. Odd k: eta^((k-1)/2) A. Even k >= 4 uses the geometric
/// formula in the diagonal B and needs theta > 0; theta = 0 there throws RefusedError so the
/// caller falls back to the recurrence explicitly. When theta < 1/(m+1) the two parts of the
/// even formula cancel to many digits as k grows; keep k modest there.
WalkCountMatrix star_qk(const StarParams& sp, int k);

/// Closed-form star Katz scores. For theta > 0 requires alpha^2 eta < 1 (DomainError otherwise);
/// theta = 0 is the finite nonbacktracking sum x_hub = 1 + alpha m, x_leaf = 1 + alpha + alpha^2 (m - 1).
CentralityResult star_katz(const StarParams& sp, double alpha);

/// The alpha at which the Katz matrix of a d-regular graph becomes singular: 1/(d - 1 + theta).
double regular_singular_alpha(int d, double theta);

/// Dominant eigenpair of the squid adjacency: lambda = (1 + sqrt 17)/2 and
/// v = 1 on nodes {1,6,8,10}, (lambda-1)/2 on {7,9,11}, (lambda-1)/4 on {2..5} (1-based labels).
struct SquidSpectrum {
    double lambda;
    Eigen::VectorXd v;
};

/// Builds the closed form and checks ||A v - lambda v||_inf < 1e-12 against squid_graph();
/// throws FixtureError if the check fails.
SquidSpectrum squid_spectrum();

}  // namespace btdw

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "btdw/graph.hpp"
#include "btdw/katz.hpp"
#include "btdw/spectral.hpp"

namespace btdw {

/// "%.12e", the one float format used in every CSV this library writes.
std::string format_real(double x);

/// node,score rows in node order; node ids are written in `base`.
void write_centrality_csv(const CentralityResult& r, std::ostream& out, int base = 1);

/// Two-column table with a custom value header, e.g. "node,action".
void write_node_values(const Eigen::VectorXd& v, const std::string& value_name, std::ostream& out, int base = 1);

/// JSON sidecar: measure, alpha, theta, normalization, node count and solver diagnostics.
void write_centrality_metadata(const CentralityResult& r, std::ostream& out);

/// Reads "node-id,score" rows. An optional header line is allowed before the first row; '#'
/// lines and blank lines are skipped. Every node in [base, base + num_nodes) must appear exactly
/// once with a finite score >= 0. ParseError carries the line number, ValidationError the rest.
Eigen::VectorXd load_score_file(std::istream& in, std::size_t num_nodes, int base = 1);
Eigen::VectorXd load_score_file(const std::string& path, std::size_t num_nodes, int base = 1);

/// "a,b,c" (explicit list) or "start:stop:step" (inclusive linspace, last point snapped to stop).
std::vector<double> parse_grid(const std::string& spec);

enum class Measure { katz_btdw, eigen_btdw, expm };
std::string to_string(Measure m);
Measure parse_measure(const std::string& text);

struct SweepConfig {
    std::vector<double> thetas;
    /// Absolute alphas, or fractions of alpha*(theta) when alpha_relative is set.
    /// Ignored by the eigenvector measure, whose single cell per theta records alpha*(theta).
    std::vector<double> alphas;
    bool alpha_relative = false;
    Measure measure = Measure::katz_btdw;
    Normalization normalization = Normalization::l1;
    std::optional<Eigen::VectorXd> reference_scores;  ///< enables the tau and rho columns
    PowerIterationOptions power;
    unsigned jobs = 1;
};

/// Checks grids and fractions; throws ValidationError.
void validate(const SweepConfig& cfg);

struct SweepCell {
    double theta = 0.0;
    double alpha = 0.0;
    std::string status = "ok";  ///< ok, domain-error, divergence, degenerate-spectrum, error
    std::string message;
    Eigen::VectorXd scores;      ///< normalized as configured; empty unless status == ok
    double ipr = 0.0;
    double tau = 0.0;
    double rho = 0.0;
};

struct SweepResult {
    Measure measure = Measure::katz_btdw;
    Normalization normalization = Normalization::l1;
    bool has_reference = false;
    std::vector<double> thetas;
    std::vector<SweepCell> cells;  ///< theta-major, alphas in grid order within each theta
};

/// Evaluates every grid cell on up to cfg.jobs threads. Cells are independent, so the result
/// does not depend on the thread count. Failing cells are recorded, not rethrown.
SweepResult run_sweep(const Graph& g, const SweepConfig& cfg);

/// theta,alpha,node,score for every successful cell.
void write_sweep_long(const SweepResult& r, std::ostream& out, int base = 1);
/// theta,alpha,status,ipr[,tau,rho],normalization: one row per cell.
void write_sweep_summary(const SweepResult& r, std::ostream& out);
/// One metric ("ipr", "tau" or "rho") as a theta-by-alpha matrix; failed cells are written as nan.
void write_sweep_wide(const SweepResult& r, const std::string& metric, std::ostream& out);

struct AlphaStarRow {
    double theta = 0.0;
    double alpha_star = 0.0;  ///< 1/rho(Z); nan when the estimate did not converge
    double rho = 0.0;
    bool converged = false;
    int iterations = 0;
};

std::vector<AlphaStarRow> alpha_star_table(const Graph& g, const std::vector<double>& thetas,
                                           const PowerIterationOptions& opts = {}, unsigned jobs = 1);
/// theta,alpha_star,rho,converged,iterations
void write_alpha_star_csv(const std::vector<AlphaStarRow>& rows, std::ostream& out);

}  // namespace btdw

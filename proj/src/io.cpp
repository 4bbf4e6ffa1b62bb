#include "btdw/io.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "btdw/error.hpp"
#include "btdw/genfun.hpp"
#include "btdw/metrics.hpp"

namespace btdw {

std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", x);
    return buf;
}

void write_node_values(const Eigen::VectorXd& v, const std::string& value_name, std::ostream& out, int base) {
    out << "node," << value_name << '\n';
    for (Eigen::Index i = 0; i < v.size(); ++i) out << (i + base) << ',' << format_real(v[i]) << '\n';
}

void write_centrality_csv(const CentralityResult& r, std::ostream& out, int base) {
    write_node_values(r.scores, "score", out, base);
}

void write_centrality_metadata(const CentralityResult& r, std::ostream& out) {
    nlohmann::ordered_json j;
    j["measure"] = r.measure;
    j["alpha"] = r.alpha;
    j["theta"] = r.theta;
    j["normalization"] = to_string(r.normalization);
    j["num_nodes"] = r.scores.size();
    j["solver"] = {{"method", r.solver.method},
                   {"residual", r.solver.residual},
                   {"iterations", r.solver.iterations},
                   {"converged", r.solver.converged}};
    out << j.dump(2) << '\n';
}

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
    s = trim(s);
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return value;
}

}  // namespace

Eigen::VectorXd load_score_file(std::istream& in, std::size_t num_nodes, int base) {
    Eigen::VectorXd scores = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(num_nodes),
                                                       std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> seen(num_nodes, false);
    std::string line;
    std::size_t lineno = 0, rows = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto comma = t.find(',');
        if (comma == std::string_view::npos) throw ParseError(lineno, "expected 'node-id,score'");
        const auto id = parse_number<long long>(t.substr(0, comma));
        if (!id) {
            if (header_allowed) {
                header_allowed = false;
                continue;
            }
            throw ParseError(lineno, "node id is not an integer");
        }
        header_allowed = false;
        const auto score = parse_number<double>(t.substr(comma + 1));
        if (!score) throw ParseError(lineno, "score is not a number");
        if (*id < base || *id >= base + static_cast<long long>(num_nodes))
            throw ValidationError("line " + std::to_string(lineno) + ": node " + std::to_string(*id) +
                                  " is not a node of the graph");
        if (!std::isfinite(*score) || *score < 0.0)
            throw ValidationError("line " + std::to_string(lineno) + ": score must be finite and >= 0");
        const auto idx = static_cast<std::size_t>(*id - base);
        if (seen[idx])
            throw ValidationError("line " + std::to_string(lineno) + ": node " + std::to_string(*id) +
                                  " listed twice");
        seen[idx] = true;
        scores[static_cast<Eigen::Index>(idx)] = *score;
        ++rows;
    }
    if (rows != num_nodes) {
        std::size_t missing = 0;
        while (seen[missing]) ++missing;
        throw ValidationError("score file covers " + std::to_string(rows) + " of " + std::to_string(num_nodes) +
                              " nodes (first missing: " + std::to_string(missing + static_cast<std::size_t>(base)) +
                              ")");
    }
    return scores;
}

Eigen::VectorXd load_score_file(const std::string& path, std::size_t num_nodes, int base) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open score file '" + path + "'");
    return load_score_file(in, num_nodes, base);
}

std::vector<double> parse_grid(const std::string& spec) {
    const auto s = trim(spec);
    if (s.empty()) throw ValidationError("empty grid");
    std::vector<double> out;
    if (s.find(':') != std::string_view::npos) {
        std::vector<double> parts;
        std::size_t start = 0;
        for (;;) {
            const auto colon = s.find(':', start);
            const auto v = parse_number<double>(s.substr(start, colon - start));
            if (!v) throw ValidationError("grid '" + spec + "' is not start:stop:step");
            parts.push_back(*v);
            if (colon == std::string_view::npos) break;
            start = colon + 1;
        }
        if (parts.size() != 3) throw ValidationError("grid '" + spec + "' is not start:stop:step");
        const double a = parts[0], b = parts[1], step = parts[2];
        if (!(step > 0.0) || !(b >= a)) throw ValidationError("grid '" + spec + "' needs step > 0 and stop >= start");
        const auto count = static_cast<long long>(std::floor((b - a) / step + 1e-9)) + 1;
        if (count > 1000000) throw ValidationError("grid '" + spec + "' has too many points");
        for (long long i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
        if (std::abs(out.back() - b) <= 1e-9 * step) out.back() = b;
        return out;
    }
    std::size_t start = 0;
    for (;;) {
        const auto comma = s.find(',', start);
        const auto v = parse_number<double>(s.substr(start, comma - start));
        if (!v) throw ValidationError("grid '" + spec + "' has a non-numeric entry");
        out.push_back(*v);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string to_string(Measure m) {
    switch (m) {
        case Measure::katz_btdw: return "katz-btdw";
        case Measure::eigen_btdw: return "eigen-btdw";
        case Measure::expm: return "expm";
    }
    return "katz-btdw";
}

Measure parse_measure(const std::string& text) {
    if (text == "katz-btdw" || text == "katz") return Measure::katz_btdw;
    if (text == "eigen-btdw" || text == "eigen") return Measure::eigen_btdw;
    if (text == "expm") return Measure::expm;
    throw ValidationError("unknown measure '" + text + "' (expected katz-btdw, eigen-btdw or expm)");
}

void validate(const SweepConfig& cfg) {
    if (cfg.thetas.empty()) throw ValidationError("theta grid is empty");
    for (double t : cfg.thetas)
        if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("theta grid values must lie in [0, 1]");
    if (cfg.measure != Measure::eigen_btdw) {
        if (cfg.alphas.empty()) throw ValidationError("alpha grid is empty");
        for (double a : cfg.alphas) {
            if (cfg.alpha_relative && !(a > 0.0 && a < 1.0))
                throw ValidationError("relative alpha fractions must lie in (0, 1)");
            if (!cfg.alpha_relative && !(a > 0.0)) throw ValidationError("alphas must be positive");
        }
    }
    if (cfg.jobs == 0) throw ValidationError("jobs must be at least 1");
}

namespace {

/// Runs body(i) for i in [0, count) on up to `jobs` threads.
template <class Body>
void parallel_for(std::size_t count, unsigned jobs, Body body) {
    const auto workers = std::min<std::size_t>(std::max(1U, jobs), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        });
    for (auto& t : pool) t.join();
}

void record_failure(SweepCell& cell, const char* status, const std::exception& e) {
    cell.status = status;
    cell.message = e.what();
    cell.scores.resize(0);
}

}  // namespace

SweepResult run_sweep(const Graph& g, const SweepConfig& cfg) {
    validate(cfg);
    if (cfg.reference_scores && static_cast<std::size_t>(cfg.reference_scores->size()) != g.num_nodes())
        throw ValidationError("reference scores do not match the graph size");

    SweepResult res;
    res.measure = cfg.measure;
    res.normalization = cfg.normalization;
    res.has_reference = cfg.reference_scores.has_value();
    res.thetas = cfg.thetas;

    // alpha*(theta) is needed up front for relative grids
    std::vector<std::optional<double>> stars(cfg.thetas.size());
    std::vector<std::string> star_errors(cfg.thetas.size());
    if (cfg.alpha_relative && cfg.measure != Measure::eigen_btdw) {
        parallel_for(cfg.thetas.size(), cfg.jobs, [&](std::size_t i) {
            try {
                stars[i] = alpha_star(g, BtdwParams(cfg.thetas[i]), cfg.power);
            } catch (const Error& e) {
                star_errors[i] = e.what();
            }
        });
    }

    const std::size_t per_theta = cfg.measure == Measure::eigen_btdw ? 1 : cfg.alphas.size();
    res.cells.resize(cfg.thetas.size() * per_theta);
    parallel_for(res.cells.size(), cfg.jobs, [&](std::size_t idx) {
        const std::size_t ti = idx / per_theta, ai = idx % per_theta;
        SweepCell& cell = res.cells[idx];
        cell.theta = cfg.thetas[ti];
        const BtdwParams p(cell.theta);
        try {
            CentralityResult r;
            if (cfg.measure == Measure::eigen_btdw) {
                r = eigen_centrality_btdw(g, p, cfg.power);
                cell.alpha = r.alpha;
            } else {
                if (cfg.alpha_relative) {
                    if (!stars[ti]) {
                        cell.alpha = std::numeric_limits<double>::quiet_NaN();
                        cell.status = "degenerate-spectrum";
                        cell.message = star_errors[ti];
                        return;
                    }
                    cell.alpha = cfg.alphas[ai] * *stars[ti];
                } else {
                    cell.alpha = cfg.alphas[ai];
                }
                if (cfg.measure == Measure::katz_btdw) {
                    r = katz_btdw(g, cell.alpha, p);
                } else {
                    r.scores = expm_btdw_action(g, p, cell.alpha).action;
                }
            }
            r = normalize(std::move(r), cfg.normalization);
            cell.scores = std::move(r.scores);
            cell.ipr = ipr(cell.scores);
            if (cfg.reference_scores) {
                cell.tau = kendall_tau(cell.scores, *cfg.reference_scores);
                cell.rho = spearman_rho(cell.scores, *cfg.reference_scores);
            }
        } catch (const DomainError& e) {
            record_failure(cell, "domain-error", e);
        } catch (const DivergenceError& e) {
            record_failure(cell, "divergence", e);
        } catch (const DegenerateSpectrumError& e) {
            record_failure(cell, "degenerate-spectrum", e);
        } catch (const Error& e) {
            record_failure(cell, "error", e);
        }
    });
    return res;
}

void write_sweep_long(const SweepResult& r, std::ostream& out, int base) {
    out << "theta,alpha,node,score\n";
    for (const auto& c : r.cells) {
        if (c.status != "ok") continue;
        const auto t = format_real(c.theta), a = format_real(c.alpha);
        for (Eigen::Index i = 0; i < c.scores.size(); ++i)
            out << t << ',' << a << ',' << (i + base) << ',' << format_real(c.scores[i]) << '\n';
    }
}

void write_sweep_summary(const SweepResult& r, std::ostream& out) {
    out << "theta,alpha,status,ipr";
    if (r.has_reference) out << ",tau,rho";
    out << ",normalization\n";
    const std::string nan = "nan";
    for (const auto& c : r.cells) {
        const bool ok = c.status == "ok";
        out << format_real(c.theta) << ',' << format_real(c.alpha) << ',' << c.status << ','
            << (ok ? format_real(c.ipr) : nan);
        if (r.has_reference) out << ',' << (ok ? format_real(c.tau) : nan) << ',' << (ok ? format_real(c.rho) : nan);
        out << ',' << to_string(r.normalization) << '\n';
    }
}

void write_sweep_wide(const SweepResult& r, const std::string& metric, std::ostream& out) {
    double SweepCell::*field = nullptr;
    if (metric == "ipr") field = &SweepCell::ipr;
    if (metric == "tau" && r.has_reference) field = &SweepCell::tau;
    if (metric == "rho" && r.has_reference) field = &SweepCell::rho;
    if (!field) throw ValidationError("wide output needs metric ipr, or tau/rho with reference scores");
    if (r.thetas.empty()) return;
    const std::size_t per_theta = r.cells.size() / r.thetas.size();

    // columns are labelled by the first theta's alphas; relative grids give one column per fraction
    out << "theta";
    for (std::size_t a = 0; a < per_theta; ++a) out << ',' << format_real(r.cells[a].alpha);
    out << '\n';
    for (std::size_t t = 0; t < r.thetas.size(); ++t) {
        out << format_real(r.thetas[t]);
        for (std::size_t a = 0; a < per_theta; ++a) {
            const auto& c = r.cells[t * per_theta + a];
            out << ',' << (c.status == "ok" ? format_real(c.*field) : std::string("nan"));
        }
        out << '\n';
    }
}

std::vector<AlphaStarRow> alpha_star_table(const Graph& g, const std::vector<double>& thetas,
                                           const PowerIterationOptions& opts, unsigned jobs) {
    std::vector<AlphaStarRow> rows(thetas.size());
    parallel_for(thetas.size(), jobs, [&](std::size_t i) {
        const auto est = spectral_radius_z(g, BtdwParams(thetas[i]), opts);
        auto& row = rows[i];
        row.theta = thetas[i];
        row.rho = est.rho;
        row.converged = est.converged;
        row.iterations = est.iterations;
        row.alpha_star = !est.converged  ? std::numeric_limits<double>::quiet_NaN()
                         : est.rho == 0 ? std::numeric_limits<double>::infinity()
                                        : 1.0 / est.rho;
    });
    return rows;
}

void write_alpha_star_csv(const std::vector<AlphaStarRow>& rows, std::ostream& out) {
    out << "theta,alpha_star,rho,converged,iterations\n";
    for (const auto& r : rows)
        out << format_real(r.theta) << ',' << format_real(r.alpha_star) << ',' << format_real(r.rho) << ','
            << (r.converged ? "true" : "false") << ',' << r.iterations << '\n';
}

}  // namespace btdw

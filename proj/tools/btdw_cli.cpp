#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "btdw/error.hpp"
#include "btdw/genfun.hpp"
#include "btdw/graph.hpp"
#include "btdw/io.hpp"
#include "btdw/katz.hpp"
#include "btdw/selfcheck.hpp"
#include "btdw/spectral.hpp"
#include "btdw/walks.hpp"

namespace {

using namespace btdw;

struct GraphArgs {
    std::string graph;
    std::string named;
    bool undirected = false;
    int base = 1;
};

struct CommonArgs {
    std::string out;
    std::uint64_t seed = 0;
    double tol = 1e-10;
    unsigned jobs = 1;
};

void add_graph_options(CLI::App* cmd, GraphArgs& g) {
    auto* file = cmd->add_option("--graph", g.graph, "edge list or MatrixMarket file (relative paths also tried under $BTDW_DATA_DIR)");
    auto* named = cmd->add_option("--named", g.named, "built-in graph: star:M, regular:N:D, cycle:N, path:N, five-node, squid");
    file->excludes(named);
    auto* dir = cmd->add_flag("--directed", "read edges as directed (default)");
    auto* undir = cmd->add_flag("--undirected", g.undirected, "read each edge in both directions");
    dir->excludes(undir);
    cmd->add_option("--base", g.base, "smallest node id in input and output files")->check(CLI::IsMember({0, 1}))->capture_default_str();
}

std::string resolve_data_path(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path) || fs::path(path).is_absolute()) return path;
    if (const char* dir = std::getenv("BTDW_DATA_DIR")) {
        const auto candidate = fs::path(dir) / path;
        if (fs::exists(candidate)) return candidate.string();
    }
    return path;
}

Graph load_graph(const GraphArgs& a) {
    if (!a.named.empty()) return build_named(parse_named(a.named));
    if (a.graph.empty()) throw ValidationError("one of --graph or --named is required");
    EdgeListOptions opts;
    opts.directed = !a.undirected;
    opts.base = a.base;
    return load_graph_file(resolve_data_path(a.graph), opts);
}

/// Writes via `emit` to --out, or to stdout when --out is absent.
template <class Emit>
void with_output(const std::string& path, Emit emit) {
    if (path.empty() || path == "-") {
        emit(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot write '" + path + "'");
    emit(f);
    if (!f) throw ValidationError("failed writing '" + path + "'");
}

PowerIterationOptions power_options(const CommonArgs& c) {
    PowerIterationOptions p;
    p.seed = c.seed;
    p.tol = c.tol;
    return p;
}

std::vector<double> read_coefficients(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open coefficient file '" + path + "'");
    std::vector<double> coeffs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        for (auto& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size()) throw ParseError(lineno, "'" + tok + "' is not a number");
            coeffs.push_back(v);
        }
    }
    if (coeffs.empty()) throw ValidationError("coefficient file '" + path + "' lists no coefficients");
    return coeffs;
}

void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_real(m(i, j));
        out << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Backtrack-downweighted walk centrality"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "btdw 1.0");

    GraphArgs ga;
    CommonArgs ca;
    double theta = 1.0;
    std::optional<double> alpha, alpha_rel;
    std::string measure = "katz-btdw", norm = "l1", meta;

    // centrality
    auto* cen = app.add_subcommand("centrality", "scores for one (theta, alpha)");
    add_graph_options(cen, ga);
    cen->add_option("--theta", theta, "backtrack weight in [0, 1]")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    auto* a_abs = cen->add_option("--alpha", alpha, "attenuation");
    auto* a_rel = cen->add_option("--alpha-rel", alpha_rel, "attenuation as a fraction of alpha*(theta)");
    a_abs->excludes(a_rel);
    cen->add_option("--measure", measure, "katz-btdw, eigen-btdw or expm")->capture_default_str();
    cen->add_option("--norm", norm, "l1, l2 or none")->check(CLI::IsMember({"l1", "l2", "none"}))->capture_default_str();
    cen->add_option("--out", ca.out, "score CSV (default stdout)");
    cen->add_option("--meta", meta, "JSON metadata path (default <out>.json when --out is given)");
    cen->add_option("--seed", ca.seed, "power-iteration seed")->capture_default_str();
    cen->add_option("--tol", ca.tol, "power-iteration tolerance")->capture_default_str();

    // sweep
    std::string thetas_spec = "0:1:0.05", alphas_spec, alpha_rel_spec, scores_path, summary_path, wide;
    auto* sw = app.add_subcommand("sweep", "scores and localization metrics over a (theta, alpha) grid");
    add_graph_options(sw, ga);
    sw->add_option("--thetas", thetas_spec, "theta grid: list a,b,c or start:stop:step")->capture_default_str();
    auto* g_abs = sw->add_option("--alphas", alphas_spec, "absolute alpha grid");
    auto* g_rel = sw->add_option("--alpha-rel", alpha_rel_spec, "alpha grid as fractions of alpha*(theta)");
    g_abs->excludes(g_rel);
    sw->add_option("--measure", measure, "katz-btdw, eigen-btdw or expm")->capture_default_str();
    sw->add_option("--norm", norm, "l1, l2 or none")->check(CLI::IsMember({"l1", "l2", "none"}))->capture_default_str();
    sw->add_option("--scores", scores_path, "reference node-id,score file; adds tau and rho columns");
    sw->add_option("--out", ca.out, "long CSV theta,alpha,node,score (default stdout)");
    sw->add_option("--summary", summary_path, "per-cell summary CSV");
    sw->add_option("--wide", wide, "write this metric (ipr, tau, rho) as a theta-by-alpha matrix instead of the long CSV")
        ->check(CLI::IsMember({"ipr", "tau", "rho"}));
    sw->add_option("--jobs", ca.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sw->add_option("--seed", ca.seed, "power-iteration seed")->capture_default_str();
    sw->add_option("--tol", ca.tol, "power-iteration tolerance")->capture_default_str();

    // alpha-star
    auto* as = app.add_subcommand("alpha-star", "table of alpha* = 1/rho(Z) over a theta grid");
    add_graph_options(as, ga);
    as->add_option("--thetas", thetas_spec, "theta grid: list a,b,c or start:stop:step")->capture_default_str();
    as->add_option("--out", ca.out, "CSV path (default stdout)");
    as->add_option("--jobs", ca.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    as->add_option("--seed", ca.seed, "power-iteration seed")->capture_default_str();
    as->add_option("--tol", ca.tol, "power-iteration tolerance")->capture_default_str();

    // genfun
    std::string series = "resolvent", coeffs_path, route = "blockz";
    bool action_only = false;
    double gf_tol = 1e-14;
    auto* gf = app.add_subcommand("genfun", "sum_k c_k q_k(A) or its action on the ones vector");
    add_graph_options(gf, ga);
    gf->add_option("--series", series, "resolvent, exponential or custom")
        ->check(CLI::IsMember({"resolvent", "exponential", "custom"}))
        ->capture_default_str();
    gf->add_option("--coeffs", coeffs_path, "coefficient file for --series custom");
    gf->add_option("--alpha", alpha, "series parameter for resolvent and exponential");
    gf->add_option("--theta", theta, "backtrack weight in [0, 1]")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    gf->add_option("--route", route, "blockz, direct or expm (exponential only)")
        ->check(CLI::IsMember({"blockz", "direct", "expm"}))
        ->capture_default_str();
    gf->add_flag("--action-only", action_only, "write only the node,action vector");
    gf->add_option("--tol", gf_tol, "series truncation tolerance")->capture_default_str();
    gf->add_option("--out", ca.out, "CSV path (default stdout)");

    // walk-counts
    int k = 4;
    bool brute = false;
    auto* wc = app.add_subcommand("walk-counts", "the BTDW walk-count matrix q_k(A)");
    add_graph_options(wc, ga);
    wc->add_option("--k", k, "walk length")->check(CLI::NonNegativeNumber)->capture_default_str();
    wc->add_option("--theta", theta, "backtrack weight in [0, 1]")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    wc->add_flag("--brute-force", brute, "enumerate walks instead of using the recurrence");
    wc->add_option("--out", ca.out, "CSV path (default stdout)");

    auto* val = app.add_subcommand("validate", "run the built-in fixture self-checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*val) {
            bool ok = true;
            for (const auto& c : run_self_checks()) {
                std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
                ok = ok && c.passed;
            }
            return ok ? 0 : 1;
        }

        const Graph g = load_graph(ga);

        if (*cen) {
            const auto m = parse_measure(measure);
            const BtdwParams p(theta);
            const auto power = power_options(ca);
            CentralityResult r;
            if (m == Measure::eigen_btdw) {
                if (alpha || alpha_rel) throw ValidationError("--alpha and --alpha-rel do not apply to eigen-btdw");
                r = eigen_centrality_btdw(g, p, power);
            } else {
                if (!alpha && !alpha_rel) throw ValidationError(to_string(m) + " needs --alpha or --alpha-rel");
                double a = alpha ? *alpha : 0.0;
                if (alpha_rel) {
                    if (!(*alpha_rel > 0.0 && *alpha_rel < 1.0)) throw ValidationError("--alpha-rel must lie in (0, 1)");
                    a = *alpha_rel * alpha_star(g, p, power);
                }
                if (m == Measure::katz_btdw) {
                    r = katz_btdw(g, a, p);
                } else {
                    const auto e = expm_btdw_action(g, p, a);
                    r.scores = e.action;
                    r.measure = "expm-btdw";
                    r.alpha = a;
                    r.theta = theta;
                    r.solver = {"taylor", e.error_bound, e.terms, true};
                }
            }
            r = normalize(std::move(r), parse_normalization(norm));
            with_output(ca.out, [&](std::ostream& o) { write_centrality_csv(r, o, ga.base); });
            const std::string meta_path = !meta.empty() ? meta : (ca.out.empty() || ca.out == "-" ? "" : ca.out + ".json");
            if (!meta_path.empty()) with_output(meta_path, [&](std::ostream& o) { write_centrality_metadata(r, o); });
            return 0;
        }

        if (*sw) {
            SweepConfig cfg;
            cfg.thetas = parse_grid(thetas_spec);
            cfg.measure = parse_measure(measure);
            cfg.normalization = parse_normalization(norm);
            cfg.power = power_options(ca);
            cfg.jobs = ca.jobs;
            if (!alpha_rel_spec.empty()) {
                cfg.alphas = parse_grid(alpha_rel_spec);
                cfg.alpha_relative = true;
            } else if (!alphas_spec.empty()) {
                cfg.alphas = parse_grid(alphas_spec);
            } else if (cfg.measure != Measure::eigen_btdw) {
                throw ValidationError("sweep needs --alphas or --alpha-rel");
            }
            if (!scores_path.empty()) cfg.reference_scores = load_score_file(resolve_data_path(scores_path), g.num_nodes(), ga.base);
            if (!wide.empty() && wide != "ipr" && !cfg.reference_scores)
                throw ValidationError("--wide " + wide + " needs --scores");
            validate(cfg);
            const auto res = run_sweep(g, cfg);
            with_output(ca.out, [&](std::ostream& o) {
                if (wide.empty())
                    write_sweep_long(res, o, ga.base);
                else
                    write_sweep_wide(res, wide, o);
            });
            if (!summary_path.empty()) with_output(summary_path, [&](std::ostream& o) { write_sweep_summary(res, o); });
            std::size_t failed = 0;
            for (const auto& c : res.cells)
                if (c.status != "ok") {
                    ++failed;
                    std::cerr << "btdw: cell theta=" << format_real(c.theta) << " alpha=" << format_real(c.alpha) << ": "
                              << c.status << ": " << c.message << '\n';
                }
            if (failed) std::cerr << "btdw: " << failed << " of " << res.cells.size() << " cells failed\n";
            return 0;
        }

        if (*as) {
            const auto rows = alpha_star_table(g, parse_grid(thetas_spec), power_options(ca), ca.jobs);
            with_output(ca.out, [&](std::ostream& o) { write_alpha_star_csv(rows, o); });
            for (const auto& r : rows)
                if (!r.converged) std::cerr << "btdw: no converged radius at theta=" << format_real(r.theta) << '\n';
            return 0;
        }

        if (*gf) {
            const BtdwParams p(theta);
            std::optional<CoefficientSeries> cs;
            if (series == "custom") {
                if (coeffs_path.empty()) throw ValidationError("--series custom needs --coeffs");
                cs = CoefficientSeries::custom(read_coefficients(coeffs_path));
            } else {
                if (!alpha) throw ValidationError("--series " + series + " needs --alpha");
                cs = series == "resolvent" ? CoefficientSeries::resolvent(*alpha) : CoefficientSeries::exponential(*alpha);
            }
            GenfunOptions opts;
            opts.tol = gf_tol;
            opts.want_matrix = !action_only;
            GenfunResult r;
            if (route == "expm") {
                if (series != "exponential") throw ValidationError("--route expm needs --series exponential");
                if (!action_only) throw ValidationError("--route expm computes the action only; add --action-only");
                r = expm_btdw_action(g, p, *alpha, gf_tol);
            } else {
                r = route == "direct" ? genfun_direct(g, p, *cs, opts) : genfun_blockz(g, p, *cs, opts);
            }
            with_output(ca.out, [&](std::ostream& o) {
                if (action_only)
                    write_node_values(r.action, "action", o, ga.base);
                else
                    write_matrix_csv(*r.matrix, o);
            });
            return 0;
        }

        if (*wc) {
            const BtdwParams p(theta);
            if (static_cast<std::size_t>(g.num_nodes()) > kDenseNodeLimit)
                throw RefusedError("walk-counts writes a dense matrix; graph exceeds " + std::to_string(kDenseNodeLimit) + " nodes");
            WalkCountMatrix q;
            if (brute) {
                q = brute_force_btdw(g, p, k);
            } else {
                auto seq = btdw_sequence(g, p, k);
                q = {k, theta, std::move(seq.matrices.back())};
            }
            with_output(ca.out, [&](std::ostream& o) { write_walk_count_csv(q, o); });
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "btdw: error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "btdw: internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

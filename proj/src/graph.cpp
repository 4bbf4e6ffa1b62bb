#include "btdw/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "btdw/error.hpp"

namespace btdw {

Graph::Graph(std::size_t num_nodes, std::span<const Edge> edges) {
    if (num_nodes == 0) throw ValidationError("graph must have at least one node");
    if (num_nodes > static_cast<std::size_t>(std::numeric_limits<Index>::max()))
        throw ValidationError("node count exceeds index range");

    const auto n = static_cast<Index>(num_nodes);
    std::vector<Edge> sorted(edges.begin(), edges.end());
    for (const auto& [u, v] : sorted) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw ValidationError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                  ") has an endpoint outside [0," + std::to_string(n) + ")");
        if (u == v) throw ValidationError("self-loop at node " + std::to_string(u));
    }
    std::sort(sorted.begin(), sorted.end());
    const auto last = std::unique(sorted.begin(), sorted.end());
    duplicates_ = static_cast<std::size_t>(sorted.end() - last);
    sorted.erase(last, sorted.end());

    offsets_.assign(num_nodes + 1, 0);
    targets_.reserve(sorted.size());
    for (const auto& [u, v] : sorted) {
        ++offsets_[u + 1];
        targets_.push_back(v);
    }
    for (std::size_t i = 0; i < num_nodes; ++i) offsets_[i + 1] += offsets_[i];

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(sorted.size());
    for (const auto& [u, v] : sorted) trips.emplace_back(u, v, 1.0);
    adjacency_.resize(n, n);
    adjacency_.setFromTriplets(trips.begin(), trips.end());
    adjacency_.makeCompressed();
}

Graph Graph::undirected(std::size_t num_nodes, std::span<const Edge> edges) {
    std::vector<Edge> both;
    both.reserve(2 * edges.size());
    for (const auto& [u, v] : edges) {
        both.emplace_back(u, v);
        both.emplace_back(v, u);
    }
    Graph g(num_nodes, both);
    // Each undirected edge legitimately appears twice; only count genuine repeats.
    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (const auto& [u, v] : edges) canon.emplace_back(std::min(u, v), std::max(u, v));
    std::sort(canon.begin(), canon.end());
    g.duplicates_ = static_cast<std::size_t>(canon.end() - std::unique(canon.begin(), canon.end()));
    return g;
}

bool Graph::has_edge(Index i, Index j) const {
    const auto nb = out_neighbors(i);
    return std::binary_search(nb.begin(), nb.end(), j);
}

bool Graph::is_symmetric() const {
    const auto n = static_cast<Index>(num_nodes());
    for (Index i = 0; i < n; ++i)
        for (Index j : out_neighbors(i))
            if (!has_edge(j, i)) return false;
    return true;
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    const auto n = static_cast<Index>(num_nodes());
    for (Index i = 0; i < n; ++i)
        for (Index j : out_neighbors(i)) out.emplace_back(i, j);
    return out;
}

Graph Graph::transpose() const {
    auto e = edges();
    for (auto& [u, v] : e) std::swap(u, v);
    return Graph(num_nodes(), e);
}

DerivedMatrices derived_matrices(const Graph& g) {
    const auto n = static_cast<Index>(g.num_nodes());
    DerivedMatrices out;
    out.d = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> trips;
    for (Index i = 0; i < n; ++i) {
        for (Index j : g.out_neighbors(i)) {
            if (g.has_edge(j, i)) {
                out.d[i] += 1.0;
                trips.emplace_back(i, j, 1.0);
            }
        }
    }
    out.s.resize(n, n);
    out.s.setFromTriplets(trips.begin(), trips.end());
    out.s.makeCompressed();
    return out;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_long(const std::string& tok, long long& value) {
    const auto* first = tok.data();
    const auto* last = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc() && ptr == last;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> toks;
    for (std::string t; ss >> t;) toks.push_back(t);
    return toks;
}

// "# nodes: N" -> N
bool parse_nodes_comment(const std::string& line, std::size_t& n) {
    auto body = trim(line.substr(1));
    const std::string key = "nodes:";
    if (body.rfind(key, 0) != 0) return false;
    long long v = 0;
    if (!parse_long(trim(body.substr(key.size())), v) || v <= 0) return false;
    n = static_cast<std::size_t>(v);
    return true;
}

}  // namespace

Graph load_edge_list(std::istream& in, const EdgeListOptions& opts) {
    if (opts.base != 0 && opts.base != 1) throw ValidationError("indexing base must be 0 or 1");

    std::size_t declared = opts.num_nodes;
    std::vector<Edge> edges;
    long long max_id = -1;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            std::size_t n = 0;
            if (opts.num_nodes == 0 && parse_nodes_comment(t, n)) declared = n;
            continue;
        }
        const auto toks = split_ws(t);
        long long u = 0;
        long long v = 0;
        if (toks.size() != 2 || !parse_long(toks[0], u) || !parse_long(toks[1], v))
            throw ParseError(lineno, "expected two integer node ids, got '" + t + "'");
        u -= opts.base;
        v -= opts.base;
        if (u < 0 || v < 0)
            throw ValidationError("line " + std::to_string(lineno) + ": node id below base " +
                                  std::to_string(opts.base));
        if (u == v)
            throw ValidationError("line " + std::to_string(lineno) + ": self-loop at node " +
                                  std::to_string(u + opts.base));
        if (declared != 0 && (static_cast<std::size_t>(u) >= declared ||
                              static_cast<std::size_t>(v) >= declared))
            throw ValidationError("line " + std::to_string(lineno) + ": node id outside declared range of " +
                                  std::to_string(declared) + " nodes");
        if (std::max(u, v) > std::numeric_limits<Index>::max())
            throw ValidationError("line " + std::to_string(lineno) + ": node id too large");
        max_id = std::max({max_id, u, v});
        edges.emplace_back(static_cast<Index>(u), static_cast<Index>(v));
    }
    const std::size_t n = declared != 0 ? declared : static_cast<std::size_t>(max_id + 1);
    if (n == 0) throw ValidationError("edge list contains no edges and no node count");
    return opts.directed ? Graph(n, edges) : Graph::undirected(n, edges);
}

Graph load_matrix_market(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "empty MatrixMarket input");
    ++lineno;
    const auto header = split_ws(line);
    auto lower = [](std::string s) {
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        return s;
    };
    if (header.size() != 5 || header[0] != "%%MatrixMarket" || lower(header[1]) != "matrix" ||
        lower(header[2]) != "coordinate" || lower(header[3]) != "pattern")
        throw ParseError(lineno, "expected '%%MatrixMarket matrix coordinate pattern general|symmetric'");
    const auto symmetry = lower(header[4]);
    if (symmetry != "general" && symmetry != "symmetric")
        throw ParseError(lineno, "unsupported symmetry '" + header[4] + "'");

    long long rows = -1;
    long long cols = -1;
    long long nnz = -1;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t[0] == '%') continue;
        const auto toks = split_ws(t);
        if (rows < 0) {
            if (toks.size() != 3 || !parse_long(toks[0], rows) || !parse_long(toks[1], cols) ||
                !parse_long(toks[2], nnz))
                throw ParseError(lineno, "expected 'rows cols entries' size line");
            if (rows != cols || rows <= 0) throw ValidationError("adjacency matrix must be square and nonempty");
            continue;
        }
        long long u = 0;
        long long v = 0;
        if (toks.size() < 2 || !parse_long(toks[0], u) || !parse_long(toks[1], v))
            throw ParseError(lineno, "expected 'row col' entry");
        if (u < 1 || v < 1 || u > rows || v > rows)
            throw ValidationError("line " + std::to_string(lineno) + ": entry outside the declared size");
        if (u == v) throw ValidationError("line " + std::to_string(lineno) + ": self-loop at node " + std::to_string(u));
        edges.emplace_back(static_cast<Index>(u - 1), static_cast<Index>(v - 1));
    }
    if (rows < 0) throw ParseError(lineno, "missing size line");
    if (static_cast<long long>(edges.size()) != nnz)
        throw ParseError(lineno, "entry count " + std::to_string(edges.size()) + " does not match declared " +
                                     std::to_string(nnz));
    const auto n = static_cast<std::size_t>(rows);
    return symmetry == "symmetric" ? Graph::undirected(n, edges) : Graph(n, edges);
}

Graph load_graph_file(const std::string& path, const EdgeListOptions& opts) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open graph file '" + path + "'");
    if (in.peek() == '%') return load_matrix_market(in);
    return load_edge_list(in, opts);
}

void write_edge_list(const Graph& g, std::ostream& out, int base) {
    out << "# nodes: " << g.num_nodes() << '\n';
    for (const auto& [u, v] : g.edges()) out << (u + base) << ' ' << (v + base) << '\n';
}

namespace {

std::size_t parse_size_field(const std::string& tok, const std::string& text) {
    long long v = 0;
    if (!parse_long(tok, v) || v < 0) throw ValidationError("bad parameter in named graph '" + text + "'");
    return static_cast<std::size_t>(v);
}

}  // namespace

NamedGraphSpec parse_named(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.empty()) throw ValidationError("empty named graph");

    NamedGraphSpec spec;
    const auto& kind = parts[0];
    auto need = [&](std::size_t count) {
        if (parts.size() != count + 1)
            throw ValidationError("named graph '" + kind + "' takes " + std::to_string(count) + " parameter(s)");
    };
    if (kind == "star") {
        need(1);
        spec.kind = NamedKind::star;
        spec.m = parse_size_field(parts[1], text);
    } else if (kind == "regular" || kind == "regular-circulant") {
        need(2);
        spec.kind = NamedKind::regular_circulant;
        spec.n = parse_size_field(parts[1], text);
        spec.d = parse_size_field(parts[2], text);
    } else if (kind == "cycle") {
        need(1);
        spec.kind = NamedKind::cycle;
        spec.n = parse_size_field(parts[1], text);
    } else if (kind == "path") {
        need(1);
        spec.kind = NamedKind::path;
        spec.n = parse_size_field(parts[1], text);
    } else if (kind == "five-node") {
        need(0);
        spec.kind = NamedKind::five_node;
    } else if (kind == "squid") {
        need(0);
        spec.kind = NamedKind::squid;
    } else {
        throw ValidationError("unknown named graph '" + kind + "'");
    }
    return spec;
}

Graph build_named(const NamedGraphSpec& spec) {
    switch (spec.kind) {
        case NamedKind::star: return star_graph(spec.m);
        case NamedKind::regular_circulant: return regular_circulant(spec.n, spec.d);
        case NamedKind::cycle: return cycle_graph(spec.n);
        case NamedKind::path: return path_graph(spec.n);
        case NamedKind::five_node: return five_node_graph();
        case NamedKind::squid: return squid_graph();
    }
    throw ValidationError("unknown named graph kind");
}

Graph star_graph(std::size_t leaves) {
    if (leaves < 1) throw ValidationError("star needs m >= 1 leaves");
    std::vector<Edge> e;
    for (std::size_t i = 1; i <= leaves; ++i) e.emplace_back(0, static_cast<Index>(i));
    return Graph::undirected(leaves + 1, e);
}

Graph regular_circulant(std::size_t n, std::size_t d) {
    if (n < 2) throw ValidationError("circulant needs n >= 2");
    if (d < 2 || d % 2 != 0 || d >= n) throw ValidationError("circulant degree d must be even with 2 <= d < n");
    std::vector<Edge> e;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t s = 1; s <= d / 2; ++s) e.emplace_back(static_cast<Index>(i), static_cast<Index>((i + s) % n));
    auto g = Graph::undirected(n, e);
    for (std::size_t i = 0; i < n; ++i)
        if (g.out_degree(static_cast<Index>(i)) != d) throw ValidationError("circulant parameters do not give a d-regular graph");
    return g;
}

Graph cycle_graph(std::size_t n) {
    if (n < 2) throw ValidationError("cycle needs n >= 2");
    std::vector<Edge> e;
    for (std::size_t i = 0; i < n; ++i) e.emplace_back(static_cast<Index>(i), static_cast<Index>((i + 1) % n));
    return Graph(n, e);
}

Graph path_graph(std::size_t n) {
    if (n < 2) throw ValidationError("path needs n >= 2");
    std::vector<Edge> e;
    for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(static_cast<Index>(i), static_cast<Index>(i + 1));
    return Graph::undirected(n, e);
}

Graph five_node_graph() {
    // Directed, 1-based: 1->2, 2->3, 3->4, 4->5, 2->5, 5->2, 3->2.
    const std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {1, 4}, {4, 1}, {2, 1}};
    return Graph(5, e);
}

Graph squid_graph() {
    // Undirected, 1-based: hub 1 with leaves 2..5, tail 1-6, and the 6-7-8 / 6-9-10 arms
    // closed by the triangle 8-10-11.
    const std::vector<Edge> e{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {5, 6},
                              {5, 8}, {6, 7}, {8, 9}, {7, 9}, {7, 10}, {9, 10}};
    return Graph::undirected(11, e);
}

}  // namespace btdw

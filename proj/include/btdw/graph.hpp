#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace btdw {

using Index = std::int32_t;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Edge = std::pair<Index, Index>;

/// Unweighted directed graph without self-loops.
///
/// Stored as sorted out-neighbour lists plus a cached sparse adjacency matrix
/// A with a_ij = 1 iff i -> j. Immutable once constructed; an undirected graph
/// is simply one where every edge is present in both directions.
class Graph {
public:
    Graph() = default;

    /// Builds from a directed edge list. Duplicates are collapsed and counted;
    /// self-loops and out-of-range endpoints throw ValidationError.
    Graph(std::size_t num_nodes, std::span<const Edge> edges);

    /// Same, but every edge is inserted in both orientations.
    static Graph undirected(std::size_t num_nodes, std::span<const Edge> edges);

    std::size_t num_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t num_edges() const noexcept { return targets_.size(); }

    std::span<const Index> out_neighbors(Index i) const {
        return {targets_.data() + offsets_[i], targets_.data() + offsets_[i + 1]};
    }
    std::size_t out_degree(Index i) const { return offsets_[i + 1] - offsets_[i]; }
    bool has_edge(Index i, Index j) const;

    /// Duplicate edges dropped while building (a warning counter for loaders).
    std::size_t duplicates_collapsed() const noexcept { return duplicates_; }

    /// True when A = A^T.
    bool is_symmetric() const;

    const SparseMatrix& adjacency() const noexcept { return adjacency_; }
    Eigen::MatrixXd dense_adjacency() const { return Eigen::MatrixXd(adjacency_); }

    std::vector<Edge> edges() const;
    Graph transpose() const;

private:
    std::vector<std::size_t> offsets_;
    std::vector<Index> targets_;
    SparseMatrix adjacency_;
    std::size_t duplicates_ = 0;
};

/// D = diag(A^2) and S = A o A^T, the reciprocity data entering every recurrence.
struct DerivedMatrices {
    Eigen::VectorXd d;  ///< d_i = number of reciprocated out-edges of i
    SparseMatrix s;     ///< s_ij = a_ij a_ji
};

DerivedMatrices derived_matrices(const Graph& g);

struct EdgeListOptions {
    bool directed = true;
    int base = 1;              ///< 0 or 1, the smallest node id in the file
    std::size_t num_nodes = 0; ///< 0 = infer from the largest id (or a "# nodes: N" line)
};

/// Parses "u v" lines. '#' starts a comment; a "# nodes: N" comment declares the node count.
Graph load_edge_list(std::istream& in, const EdgeListOptions& opts = {});

/// MatrixMarket coordinate pattern input; "symmetric" implies undirected.
Graph load_matrix_market(std::istream& in);

/// Picks MatrixMarket or edge-list parsing from the file header.
Graph load_graph_file(const std::string& path, const EdgeListOptions& opts = {});

/// Writes every directed edge once, preceded by a "# nodes: N" comment.
void write_edge_list(const Graph& g, std::ostream& out, int base = 1);

enum class NamedKind { star, regular_circulant, cycle, path, five_node, squid };

struct NamedGraphSpec {
    NamedKind kind = NamedKind::star;
    std::size_t m = 0;  ///< star leaves
    std::size_t n = 0;  ///< node count for circulant / cycle / path
    std::size_t d = 0;  ///< circulant degree
};

/// Parses "star:10", "regular:20:4", "cycle:5", "path:3", "five-node", "squid".
NamedGraphSpec parse_named(const std::string& text);

Graph build_named(const NamedGraphSpec& spec);

Graph star_graph(std::size_t leaves);
Graph regular_circulant(std::size_t n, std::size_t d);
Graph cycle_graph(std::size_t n);
Graph path_graph(std::size_t n);
Graph five_node_graph();
Graph squid_graph();

}  // namespace btdw

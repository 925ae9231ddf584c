#pragma once

#include <Eigen/Core>

#include <vector>

#include "nigrid/errors.hpp"

namespace nigrid {

/// One oriented edge; `initial` and `terminal` are 0-based node indices.
/// The orientation is pure bookkeeping fixed by the edge-list order.
struct Edge {
    int initial = 0;
    int terminal = 0;
};

/// Connected undirected graph with a fixed edge representation: no
/// self-loops, each unordered node pair at most once, connectivity checked
/// at construction.
class NetworkTopology {
public:
    NetworkTopology(int node_count, std::vector<Edge> edges);

    int node_count() const { return node_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int l) const;

private:
    int node_count_ = 0;
    std::vector<Edge> edges_;
};

/// Node-by-edge incidence matrix over {-1, 0, +1}: column l carries +1 at the
/// initial node of edge l and -1 at its terminal node. Entries are derived
/// from the edge list; block operations loop over edges instead of touching
/// a materialized matrix.
class IncidenceMatrix {
public:
    IncidenceMatrix(int node_count, std::vector<Edge> edges);

    int node_count() const { return node_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }

    double entry(int node, int edge) const;

    /// Dense N x L realization, mainly for oracle-style cross checks.
    Eigen::MatrixXd dense() const;

private:
    int node_count_ = 0;
    std::vector<Edge> edges_;
};

IncidenceMatrix build_incidence(const NetworkTopology& topology);

}  // namespace nigrid

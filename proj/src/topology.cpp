#include "nigrid/topology.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace nigrid {

NetworkTopology::NetworkTopology(int node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
    if (node_count_ < 1) throw ConstructionError("topology needs at least one node");

    std::set<std::pair<int, int>> seen;
    std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(node_count_));
    for (std::size_t l = 0; l < edges_.size(); ++l) {
        const Edge& e = edges_[l];
        if (e.initial < 0 || e.initial >= node_count_ || e.terminal < 0 ||
            e.terminal >= node_count_) {
            throw ConstructionError("edge " + std::to_string(l) + " references a missing node");
        }
        if (e.initial == e.terminal) {
            throw ConstructionError("edge " + std::to_string(l) + " is a self-loop");
        }
        const auto key = std::minmax(e.initial, e.terminal);
        if (!seen.insert(key).second) {
            throw ConstructionError("edge " + std::to_string(l) +
                                    " duplicates an existing node pair");
        }
        adjacency[static_cast<std::size_t>(e.initial)].push_back(e.terminal);
        adjacency[static_cast<std::size_t>(e.terminal)].push_back(e.initial);
    }

    // breadth-first reachability from node 0
    std::vector<char> visited(static_cast<std::size_t>(node_count_), 0);
    std::vector<int> frontier{0};
    visited[0] = 1;
    while (!frontier.empty()) {
        const int v = frontier.back();
        frontier.pop_back();
        for (int w : adjacency[static_cast<std::size_t>(v)]) {
            if (!visited[static_cast<std::size_t>(w)]) {
                visited[static_cast<std::size_t>(w)] = 1;
                frontier.push_back(w);
            }
        }
    }
    if (std::find(visited.begin(), visited.end(), 0) != visited.end()) {
        throw ConstructionError("topology is disconnected");
    }
}

const Edge& NetworkTopology::edge(int l) const {
    if (l < 0 || l >= edge_count()) throw InvalidInputError("edge index out of range");
    return edges_[static_cast<std::size_t>(l)];
}

IncidenceMatrix::IncidenceMatrix(int node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {}

double IncidenceMatrix::entry(int node, int edge) const {
    if (node < 0 || node >= node_count_ || edge < 0 || edge >= edge_count()) {
        throw InvalidInputError("incidence entry out of range");
    }
    const Edge& e = edges_[static_cast<std::size_t>(edge)];
    if (node == e.initial) return 1.0;
    if (node == e.terminal) return -1.0;
    return 0.0;
}

Eigen::MatrixXd IncidenceMatrix::dense() const {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(node_count_, edge_count());
    for (int l = 0; l < edge_count(); ++l) {
        q(edges_[static_cast<std::size_t>(l)].initial, l) = 1.0;
        q(edges_[static_cast<std::size_t>(l)].terminal, l) = -1.0;
    }
    return q;
}

IncidenceMatrix build_incidence(const NetworkTopology& topology) {
    return IncidenceMatrix(topology.node_count(), topology.edges());
}

}  // namespace nigrid

#pragma once

#include <vector>

#include "wayplan/graph.hpp"

namespace wayplan {

// Exact shortest-path costs between every ordered node pair, plus
// predecessor links for path reconstruction.
class ShortestPathTable {
public:
    ShortestPathTable() = default;
    ShortestPathTable(int n) : n_(n), dist_(static_cast<std::size_t>(n) * n, kInfCost), parent_(static_cast<std::size_t>(n) * n, -1) {}

    int node_count() const { return n_; }
    double dist(NodeId s, NodeId v) const { return dist_[idx(s, v)]; }
    NodeId parent(NodeId s, NodeId v) const { return parent_[idx(s, v)]; }

    // Nodes of the shortest s->v path, endpoints included.
    std::vector<NodeId> path(NodeId s, NodeId v) const;

    double& dist_ref(NodeId s, NodeId v) { return dist_[idx(s, v)]; }
    NodeId& parent_ref(NodeId s, NodeId v) { return parent_[idx(s, v)]; }

private:
    std::size_t idx(NodeId s, NodeId v) const {
        return static_cast<std::size_t>(s) * n_ + static_cast<std::size_t>(v);
    }
    int n_ = 0;
    std::vector<double> dist_;
    std::vector<NodeId> parent_;
};

// Single-source Dijkstra; fills per-node distance and predecessor (-1 at
// the source). Ties in the priority queue resolve by node id.
void dijkstra_from(const WeightedGraph& g, NodeId s, std::vector<double>& dist,
                   std::vector<NodeId>& parent);

ShortestPathTable dijkstra_all_pairs(const WeightedGraph& g);

struct OracleResult {
    double cost = kInfCost;
    std::vector<NodeId> walk; // starts at s, ends at d, covers mandatory
};

// Ground-truth optimum: minimizes over all visit orders of the mandatory
// set the chained shortest-path cost, with running-best pruning. Ties
// between orders resolve to the lexicographically smallest permutation.
// Accepts start == dest (closed walks) so that suffix instances produced
// by path splitting can be checked too. Throws Error when |M| > 10.
OracleResult brute_force_solve(const WeightedGraph& g, const Instance& inst, const ShortestPathTable& spt);

// Cost of a walk as the sum of its arc weights; +inf if some hop is not an
// arc of the graph.
double walk_cost(const WeightedGraph& g, const std::vector<NodeId>& walk);

// Walk feasibility for an instance: starts at s, ends at d, uses only
// existing arcs, visits every mandatory node.
bool walk_is_feasible(const WeightedGraph& g, const Instance& inst, const std::vector<NodeId>& walk);

} // namespace wayplan

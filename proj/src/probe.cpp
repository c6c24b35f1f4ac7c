#include "wayplan/probe.hpp"

#include <algorithm>

namespace wayplan {

namespace {

// Cheapest arc u->v (ties by arc id); -1 when absent.
int best_arc(const WeightedGraph& g, NodeId u, NodeId v) {
    int best = -1;
    for (int a : g.out_arcs(u)) {
        if (g.arc(a).to != v) continue;
        if (best == -1 || g.arc(a).weight < g.arc(best).weight) best = a;
    }
    return best;
}

void append_path_arcs(const WeightedGraph& g, const std::vector<NodeId>& path, std::vector<int>& arcs) {
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        int a = best_arc(g, path[i], path[i + 1]);
        if (a >= 0) arcs.push_back(a);
    }
}

} // namespace

ProbeOrdering dijkstra_probe(const WeightedGraph& g, const Instance& inst, const ShortestPathTable& spt) {
    int n = g.node_count();
    ProbeOrdering p;
    p.name = "dijkstra";
    std::vector<NodeId> path = spt.path(inst.start, inst.dest);
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    for (NodeId v : path) {
        p.node_pref.push_back(v);
        used[static_cast<std::size_t>(v)] = 1;
    }
    std::vector<NodeId> rest;
    for (NodeId v = 0; v < n; ++v)
        if (!used[static_cast<std::size_t>(v)]) rest.push_back(v);
    std::sort(rest.begin(), rest.end(), [&](NodeId a, NodeId b) {
        double da = spt.dist(inst.start, a), db = spt.dist(inst.start, b);
        if (da != db) return da < db;
        return a < b;
    });
    p.node_pref.insert(p.node_pref.end(), rest.begin(), rest.end());
    append_path_arcs(g, path, p.preferred_arcs);
    return p;
}

ProbeOrdering neural_probe(const GcnModel& model, const WeightedGraph& g, const Instance& inst) {
    if (model.fingerprint != g.fingerprint())
        throw Error("neural_probe: model fingerprint does not match this graph");
    int n = g.node_count();

    NormalizedAdjacency s = normalize_adjacency(adjacency_matrix(g));
    std::vector<double> y = forward(model, s, encode_instance(g, inst));

    ProbeOrdering p;
    p.name = "neural";
    p.node_pref.resize(static_cast<std::size_t>(n));
    for (NodeId v = 0; v < n; ++v) p.node_pref[static_cast<std::size_t>(v)] = v;
    std::sort(p.node_pref.begin(), p.node_pref.end(), [&](NodeId a, NodeId b) {
        double ya = y[static_cast<std::size_t>(a)], yb = y[static_cast<std::size_t>(b)];
        if (ya != yb) return ya > yb;
        return a < b;
    });

    // Commit the first hop to the network's best-ranked out-neighbor, then
    // continue along the shortest path; no further network calls.
    NodeId first = -1;
    for (NodeId v : g.out_neighbors(inst.start)) {
        if (first == -1 || y[static_cast<std::size_t>(v)] > y[static_cast<std::size_t>(first)]) first = v;
    }
    if (first >= 0) {
        int a0 = best_arc(g, inst.start, first);
        if (a0 >= 0) p.preferred_arcs.push_back(a0);
        if (first != inst.dest) {
            std::vector<double> dist;
            std::vector<NodeId> parent;
            dijkstra_from(g, first, dist, parent);
            std::vector<NodeId> tail;
            for (NodeId cur = inst.dest; cur != -1; cur = parent[static_cast<std::size_t>(cur)])
                tail.push_back(cur);
            std::reverse(tail.begin(), tail.end());
            append_path_arcs(g, tail, p.preferred_arcs);
        }
    }
    return p;
}

} // namespace wayplan

#include "wayplan/shortest_path.hpp"

#include <algorithm>
#include <queue>

namespace wayplan {

std::vector<NodeId> ShortestPathTable::path(NodeId s, NodeId v) const {
    std::vector<NodeId> p;
    for (NodeId cur = v; cur != -1; cur = parent(s, cur)) p.push_back(cur);
    std::reverse(p.begin(), p.end());
    return p;
}

void dijkstra_from(const WeightedGraph& g, NodeId s, std::vector<double>& dist,
                   std::vector<NodeId>& parent) {
    int n = g.node_count();
    dist.assign(static_cast<std::size_t>(n), kInfCost);
    parent.assign(static_cast<std::size_t>(n), -1);
    using Item = std::pair<double, NodeId>; // (dist, node); node id breaks ties
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[static_cast<std::size_t>(s)] = 0.0;
    pq.emplace(0.0, s);
    std::vector<char> done(static_cast<std::size_t>(n), 0);
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (done[static_cast<std::size_t>(v)]) continue;
        done[static_cast<std::size_t>(v)] = 1;
        for (int aid : g.out_arcs(v)) {
            const Arc& a = g.arc(aid);
            double nd = d + a.weight;
            if (nd < dist[static_cast<std::size_t>(a.to)]) {
                dist[static_cast<std::size_t>(a.to)] = nd;
                parent[static_cast<std::size_t>(a.to)] = v;
                pq.emplace(nd, a.to);
            }
        }
    }
}

ShortestPathTable dijkstra_all_pairs(const WeightedGraph& g) {
    int n = g.node_count();
    ShortestPathTable t(n);
    std::vector<double> dist;
    std::vector<NodeId> parent;
    for (NodeId s = 0; s < n; ++s) {
        dijkstra_from(g, s, dist, parent);
        for (NodeId v = 0; v < n; ++v) {
            t.dist_ref(s, v) = dist[static_cast<std::size_t>(v)];
            t.parent_ref(s, v) = parent[static_cast<std::size_t>(v)];
        }
    }
    return t;
}

namespace {

struct BruteState {
    const ShortestPathTable* spt;
    NodeId dest;
    std::vector<NodeId> order;     // fixed ascending pool, permuted in place
    std::vector<NodeId> best_order;
    double best = kInfCost;
};

// Enumerates permutations in lexicographic order by always picking the
// remaining candidates in ascending order; strict improvement keeps the
// lexicographically smallest optimum.
void permute(BruteState& st, std::size_t depth, NodeId at, double cost) {
    if (cost >= st.best - kCostEps && st.best < kInfCost) return;
    if (depth == st.order.size()) {
        double total = cost + st.spt->dist(at, st.dest);
        if (total < st.best - kCostEps || st.best == kInfCost) {
            st.best = total;
            st.best_order.assign(st.order.begin(), st.order.end());
        }
        return;
    }
    for (std::size_t i = depth; i < st.order.size(); ++i) {
        // Rotate candidate i into position `depth`, preserving ascending
        // order of the tail so the enumeration stays lexicographic.
        NodeId pick = st.order[i];
        st.order.erase(st.order.begin() + static_cast<std::ptrdiff_t>(i));
        st.order.insert(st.order.begin() + static_cast<std::ptrdiff_t>(depth), pick);
        permute(st, depth + 1, pick, cost + st.spt->dist(at, pick));
        st.order.erase(st.order.begin() + static_cast<std::ptrdiff_t>(depth));
        st.order.insert(st.order.begin() + static_cast<std::ptrdiff_t>(i), pick);
    }
}

} // namespace

OracleResult brute_force_solve(const WeightedGraph& g, const Instance& inst, const ShortestPathTable& spt) {
    if (inst.mandatory.size() > 10)
        throw Error("brute_force_solve: too many mandatory nodes (limit 10)");

    BruteState st;
    st.spt = &spt;
    st.dest = inst.dest;
    st.order = inst.mandatory; // already sorted ascending
    permute(st, 0, inst.start, 0.0);

    OracleResult res;
    res.cost = st.best;
    std::vector<NodeId> anchors;
    anchors.push_back(inst.start);
    anchors.insert(anchors.end(), st.best_order.begin(), st.best_order.end());
    anchors.push_back(inst.dest);
    res.walk.push_back(inst.start);
    for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
        std::vector<NodeId> seg = spt.path(anchors[i], anchors[i + 1]);
        res.walk.insert(res.walk.end(), seg.begin() + 1, seg.end());
    }
    return res;
}

double walk_cost(const WeightedGraph& g, const std::vector<NodeId>& walk) {
    Mat c = cost_matrix(g);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
        double w = c(walk[i], walk[i + 1]);
        if (w == kInfCost) return kInfCost;
        total += w;
    }
    return total;
}

bool walk_is_feasible(const WeightedGraph& g, const Instance& inst, const std::vector<NodeId>& walk) {
    if (walk.empty() || walk.front() != inst.start || walk.back() != inst.dest) return false;
    if (walk_cost(g, walk) == kInfCost) return false;
    for (NodeId m : inst.mandatory)
        if (std::find(walk.begin(), walk.end(), m) == walk.end()) return false;
    return true;
}

} // namespace wayplan

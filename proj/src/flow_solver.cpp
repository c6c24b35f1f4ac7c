#include "wayplan/flow_solver.hpp"

#include <algorithm>
#include <chrono>

namespace wayplan {

ProbeOrdering identity_probe(const WeightedGraph& g) {
    ProbeOrdering p;
    p.name = "identity";
    p.node_pref.resize(static_cast<std::size_t>(g.node_count()));
    for (int i = 0; i < g.node_count(); ++i) p.node_pref[static_cast<std::size_t>(i)] = i;
    return p;
}

int default_max_passes(const Instance& inst) {
    int m = static_cast<int>(inst.mandatory.size());
    return std::max(2, (m + 1) / 2 + 1);
}

FlowModel::FlowModel(const WeightedGraph& g, const Instance& inst, int max_passes)
    : g_(&g), inst_(inst), n_passes_(max_passes) {
    int n = g.node_count();
    int arcs = g.arc_count();
    lo_.assign(static_cast<std::size_t>(arcs), 0);
    hi_.assign(static_cast<std::size_t>(arcs), 1);
    weight_.resize(static_cast<std::size_t>(arcs));
    for (int a = 0; a < arcs; ++a) weight_[static_cast<std::size_t>(a)] = g.arc(a).weight;
    var_cons_.assign(static_cast<std::size_t>(arcs), {});

    auto is_mandatory = [&](NodeId v) {
        return std::binary_search(inst_.mandatory.begin(), inst_.mandatory.end(), v);
    };

    for (NodeId x = 0; x < n; ++x) {
        // Outgoing-flow sum: at least 1 when the walk must leave x (start or
        // mandatory node), at most N passes.
        LinCon out_con;
        for (int a : g.out_arcs(x)) {
            out_con.vars.push_back(a);
            out_con.coefs.push_back(1);
        }
        out_con.lo = (x == inst_.start || is_mandatory(x)) ? 1 : 0;
        out_con.hi = n_passes_;
        if (!out_con.vars.empty() || out_con.lo > 0) cons_.push_back(out_con);

        LinCon in_con;
        for (int a : g.in_arcs(x)) {
            in_con.vars.push_back(a);
            in_con.coefs.push_back(1);
        }
        in_con.lo = (x == inst_.dest) ? 1 : 0;
        in_con.hi = n_passes_;
        if (!in_con.vars.empty() || in_con.lo > 0) cons_.push_back(in_con);

        // Flow conservation, in difference form so the walk may revisit the
        // start or pass through the destination: out - in is 1 at the start,
        // -1 at the destination and 0 elsewhere.
        LinCon cons;
        for (int a : g.out_arcs(x)) {
            cons.vars.push_back(a);
            cons.coefs.push_back(1);
        }
        for (int a : g.in_arcs(x)) {
            cons.vars.push_back(a);
            cons.coefs.push_back(-1);
        }
        int rhs = (x == inst_.start) ? 1 : (x == inst_.dest) ? -1 : 0;
        cons.lo = rhs;
        cons.hi = rhs;
        cons_.push_back(cons);
    }

    for (int ci = 0; ci < static_cast<int>(cons_.size()); ++ci)
        for (int v : cons_[static_cast<std::size_t>(ci)].vars)
            var_cons_[static_cast<std::size_t>(v)].push_back(ci);
    // A var can appear twice in a conservation constraint only via a
    // self-loop, which the graph rejects; still dedupe the watch lists.
    for (auto& list : var_cons_) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }

    queued_.assign(cons_.size(), 0);
}

bool FlowModel::set_lo(int var, int v) {
    auto uv = static_cast<std::size_t>(var);
    if (v <= lo_[uv]) return true;
    trail_.push_back(TrailEntry{var, lo_[uv], hi_[uv]});
    if (lo_[uv] == 0 && v >= 1) obj_min_ += weight_[uv];
    lo_[uv] = static_cast<signed char>(v);
    enqueue_var(var);
    obj_queued_ = true;
    return lo_[uv] <= hi_[uv];
}

bool FlowModel::set_hi(int var, int v) {
    auto uv = static_cast<std::size_t>(var);
    if (v >= hi_[uv]) return true;
    trail_.push_back(TrailEntry{var, lo_[uv], hi_[uv]});
    hi_[uv] = static_cast<signed char>(v);
    enqueue_var(var);
    return lo_[uv] <= hi_[uv];
}

void FlowModel::enqueue_var(int var) {
    for (int ci : var_cons_[static_cast<std::size_t>(var)]) {
        if (!queued_[static_cast<std::size_t>(ci)]) {
            queued_[static_cast<std::size_t>(ci)] = 1;
            queue_.push_back(ci);
        }
    }
}

void FlowModel::undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
        const TrailEntry& e = trail_.back();
        auto uv = static_cast<std::size_t>(e.var);
        if (lo_[uv] >= 1 && e.old_lo == 0) obj_min_ -= weight_[uv];
        lo_[uv] = e.old_lo;
        hi_[uv] = e.old_hi;
        trail_.pop_back();
    }
}

bool FlowModel::revise(int ci) {
    const LinCon& c = cons_[static_cast<std::size_t>(ci)];
    int sum_min = 0, sum_max = 0;
    for (std::size_t k = 0; k < c.vars.size(); ++k) {
        auto uv = static_cast<std::size_t>(c.vars[k]);
        if (c.coefs[k] > 0) {
            sum_min += lo_[uv];
            sum_max += hi_[uv];
        } else {
            sum_min -= hi_[uv];
            sum_max -= lo_[uv];
        }
    }
    if (sum_min > c.hi || sum_max < c.lo) return false;
    for (std::size_t k = 0; k < c.vars.size(); ++k) {
        int var = c.vars[k];
        auto uv = static_cast<std::size_t>(var);
        if (lo_[uv] == hi_[uv]) continue;
        if (c.coefs[k] > 0) {
            int others_min = sum_min - lo_[uv];
            int others_max = sum_max - hi_[uv];
            if (!set_hi(var, c.hi - others_min)) return false;
            if (!set_lo(var, c.lo - others_max)) return false;
        } else {
            int others_min = sum_min + hi_[uv];
            int others_max = sum_max + lo_[uv];
            if (!set_hi(var, others_max - c.lo)) return false;
            if (!set_lo(var, others_min - c.hi)) return false;
        }
    }
    return true;
}

bool FlowModel::revise_objective() {
    if (obj_ub_ == kInfCost) return true;
    if (obj_min_ > obj_ub_) return false;
    for (int var = 0; var < var_count(); ++var) {
        auto uv = static_cast<std::size_t>(var);
        if (lo_[uv] == hi_[uv]) continue;
        if (obj_min_ + weight_[uv] > obj_ub_) {
            if (!set_hi(var, 0)) return false;
        }
    }
    return true;
}

bool FlowModel::propagate_queue() {
    bool ok = true;
    std::size_t head = 0;
    while (ok) {
        if (head < queue_.size()) {
            int ci = queue_[head++];
            queued_[static_cast<std::size_t>(ci)] = 0;
            ok = revise(ci);
        } else if (obj_queued_) {
            obj_queued_ = false;
            ok = revise_objective();
        } else {
            break;
        }
    }
    for (std::size_t k = (ok ? queue_.size() : 0); k < queue_.size(); ++k)
        queued_[static_cast<std::size_t>(queue_[k])] = 0;
    if (!ok) {
        for (int ci : queue_) queued_[static_cast<std::size_t>(ci)] = 0;
        obj_queued_ = false;
    }
    queue_.clear();
    return ok;
}

bool FlowModel::propagate() {
    for (int ci = 0; ci < static_cast<int>(cons_.size()); ++ci) {
        if (!queued_[static_cast<std::size_t>(ci)]) {
            queued_[static_cast<std::size_t>(ci)] = 1;
            queue_.push_back(ci);
        }
    }
    obj_queued_ = true;
    return propagate_queue();
}

bool FlowModel::assign(int var, int value) {
    if (!set_lo(var, value) || !set_hi(var, value)) {
        queue_.clear();
        std::fill(queued_.begin(), queued_.end(), 0);
        obj_queued_ = false;
        return false;
    }
    return propagate_queue();
}

std::vector<int> FlowModel::fixed_plan() const {
    std::vector<int> plan;
    for (int a = 0; a < var_count(); ++a)
        if (lo_[static_cast<std::size_t>(a)] == 1) plan.push_back(a);
    return plan;
}

FlowModel build_model(const WeightedGraph& g, const Instance& inst, const SolverConfig& cfg) {
    int n = cfg.max_passes > 0 ? cfg.max_passes : default_max_passes(inst);
    return FlowModel(g, inst, n);
}

std::optional<std::vector<NodeId>> extract_walk(const WeightedGraph& g, const Instance& inst,
                                                const std::vector<int>& plan) {
    if (plan.empty()) return std::nullopt;
    int n = g.node_count();
    std::vector<int> outd(static_cast<std::size_t>(n), 0), ind(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<int>> padj(static_cast<std::size_t>(n));
    std::vector<int> sorted = plan;
    std::sort(sorted.begin(), sorted.end());
    for (int a : sorted) {
        const Arc& arc = g.arc(a);
        padj[static_cast<std::size_t>(arc.from)].push_back(a);
        ++outd[static_cast<std::size_t>(arc.from)];
        ++ind[static_cast<std::size_t>(arc.to)];
    }
    for (NodeId v = 0; v < n; ++v) {
        int want = (v == inst.start) ? 1 : (v == inst.dest) ? -1 : 0;
        if (outd[static_cast<std::size_t>(v)] - ind[static_cast<std::size_t>(v)] != want)
            return std::nullopt;
    }

    // Hierholzer, smallest arc id first; the reversed finish order is the
    // trail when (and only when) the whole selection is one connected walk.
    std::vector<std::size_t> ptr(static_cast<std::size_t>(n), 0);
    std::vector<NodeId> stack{inst.start}, walk;
    while (!stack.empty()) {
        NodeId v = stack.back();
        auto uv = static_cast<std::size_t>(v);
        if (ptr[uv] < padj[uv].size()) {
            int a = padj[uv][ptr[uv]++];
            stack.push_back(g.arc(a).to);
        } else {
            walk.push_back(v);
            stack.pop_back();
        }
    }
    if (walk.size() != sorted.size() + 1) return std::nullopt;
    std::reverse(walk.begin(), walk.end());
    if (walk.front() != inst.start || walk.back() != inst.dest) return std::nullopt;
    for (NodeId m : inst.mandatory)
        if (std::find(walk.begin(), walk.end(), m) == walk.end()) return std::nullopt;
    return walk;
}

namespace {

class Search {
public:
    Search(const WeightedGraph& g, const Instance& inst, const SolverConfig& cfg,
           const ProbeOrdering& probe)
        : g_(g), inst_(inst), model_(build_model(g, inst, cfg)) {
        int n = g.node_count();
        if (static_cast<int>(probe.node_pref.size()) != n)
            throw Error("probe node_pref must rank every node");
        std::vector<int> rank(static_cast<std::size_t>(n), -1);
        for (int i = 0; i < n; ++i) {
            NodeId v = probe.node_pref[static_cast<std::size_t>(i)];
            if (v < 0 || v >= n || rank[static_cast<std::size_t>(v)] != -1)
                throw Error("probe node_pref must be a permutation of the node set");
            rank[static_cast<std::size_t>(v)] = i;
        }
        arc_order_.resize(static_cast<std::size_t>(g.arc_count()));
        for (int a = 0; a < g.arc_count(); ++a) arc_order_[static_cast<std::size_t>(a)] = a;
        // Probe composition: head-node rank, then tail rank, then arc id.
        // Domains are binary, so the first-fail refinement never separates
        // unbound vars and selection reduces to this static order.
        std::sort(arc_order_.begin(), arc_order_.end(), [&](int a, int b) {
            const Arc& aa = g.arc(a);
            const Arc& ab = g.arc(b);
            int ka = rank[static_cast<std::size_t>(aa.to)], kb = rank[static_cast<std::size_t>(ab.to)];
            if (ka != kb) return ka < kb;
            int ta = rank[static_cast<std::size_t>(aa.from)], tb = rank[static_cast<std::size_t>(ab.from)];
            if (ta != tb) return ta < tb;
            return a < b;
        });
        pref_.assign(static_cast<std::size_t>(g.arc_count()), 0);
        for (int a : probe.preferred_arcs)
            if (a >= 0 && a < g.arc_count()) pref_[static_cast<std::size_t>(a)] = 1;

        use_deadline_ = cfg.timeout_ms > 0;
        if (use_deadline_)
            deadline_ = std::chrono::steady_clock::now() + std::chrono::milliseconds(cfg.timeout_ms);
        node_budget_ = cfg.node_budget;
        prune_reach_ = cfg.reachability_pruning;

        stats_.probe_name = probe.name;
        stats_.max_passes_used = model_.max_passes();

        fwd_.resize(static_cast<std::size_t>(n));
        bwd_.resize(static_cast<std::size_t>(n));
        bfs_queue_.reserve(static_cast<std::size_t>(n));
    }

    SearchStats run() {
        auto t0 = std::chrono::steady_clock::now();
        if (model_.propagate() && connectivity_ok()) {
            dfs();
        } else {
            ++stats_.backtracks;
        }
        stats_.proved_optimal = !aborted_;
        stats_.solve_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        return stats_;
    }

private:
    bool budget_exhausted() {
        if (node_budget_ > 0 && stats_.nodes_expanded >= node_budget_) return true;
        if (use_deadline_ && (stats_.nodes_expanded & 63) == 0 &&
            std::chrono::steady_clock::now() >= deadline_)
            return true;
        return false;
    }

    // Optional sound pruning on top of bounds consistency: every arc fixed
    // to 1 must stay on some start->dest trail through arcs not yet fixed
    // to 0, and mandatory nodes must stay connected to both endpoints.
    bool connectivity_ok() {
        if (!prune_reach_) return true;
        reach(inst_.start, fwd_, /*forward=*/true);
        reach(inst_.dest, bwd_, /*forward=*/false);
        if (!fwd_[static_cast<std::size_t>(inst_.dest)]) return false;
        for (NodeId m : inst_.mandatory) {
            auto um = static_cast<std::size_t>(m);
            if (!fwd_[um] || !bwd_[um]) return false;
        }
        for (int a = 0; a < model_.var_count(); ++a) {
            if (model_.lo(a) == 1) {
                const Arc& arc = g_.arc(a);
                if (!fwd_[static_cast<std::size_t>(arc.from)] || !bwd_[static_cast<std::size_t>(arc.to)])
                    return false;
            }
        }
        return true;
    }

    void reach(NodeId from, std::vector<char>& seen, bool forward) {
        std::fill(seen.begin(), seen.end(), 0);
        bfs_queue_.clear();
        bfs_queue_.push_back(from);
        seen[static_cast<std::size_t>(from)] = 1;
        for (std::size_t h = 0; h < bfs_queue_.size(); ++h) {
            NodeId v = bfs_queue_[h];
            const auto& arcs = forward ? g_.out_arcs(v) : g_.in_arcs(v);
            for (int a : arcs) {
                if (model_.hi(a) == 0) continue;
                NodeId w = forward ? g_.arc(a).to : g_.arc(a).from;
                if (!seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = 1;
                    bfs_queue_.push_back(w);
                }
            }
        }
    }

    void leaf() {
        std::vector<int> plan = model_.fixed_plan();
        auto walk = extract_walk(g_, inst_, plan);
        if (!walk) {
            ++stats_.backtracks;
            return;
        }
        double cost = model_.objective_lower_bound();
        stats_.found_solution = true;
        stats_.best_cost = cost;
        stats_.best_plan = std::move(plan);
        stats_.best_walk = std::move(*walk);
        model_.set_objective_bound(cost - kCostEps);
    }

    void dfs() {
        int var = -1;
        for (int a : arc_order_) {
            if (!model_.bound(a)) {
                var = a;
                break;
            }
        }
        if (var == -1) {
            leaf();
            return;
        }
        int first = pref_[static_cast<std::size_t>(var)] ? 1 : 0;
        for (int attempt = 0; attempt < 2; ++attempt) {
            if (budget_exhausted()) {
                aborted_ = true;
                return;
            }
            ++stats_.nodes_expanded;
            int value = attempt == 0 ? first : 1 - first;
            std::size_t mark = model_.trail_mark();
            bool ok = model_.assign(var, value) && connectivity_ok();
            if (ok) dfs();
            model_.undo_to(mark);
            if (!ok) ++stats_.backtracks;
            if (aborted_) return;
        }
    }

    const WeightedGraph& g_;
    Instance inst_;
    FlowModel model_;
    std::vector<int> arc_order_;
    std::vector<char> pref_;
    bool use_deadline_ = false;
    std::chrono::steady_clock::time_point deadline_;
    std::int64_t node_budget_ = 0;
    bool prune_reach_ = false;
    bool aborted_ = false;
    SearchStats stats_;
    std::vector<char> fwd_, bwd_;
    std::vector<NodeId> bfs_queue_;
};

} // namespace

SearchStats solve(const WeightedGraph& g, const Instance& inst, const SolverConfig& cfg,
                  const ProbeOrdering& probe) {
    Search search(g, inst, cfg, probe);
    return search.run();
}

} // namespace wayplan

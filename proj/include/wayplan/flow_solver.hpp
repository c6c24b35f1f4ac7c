#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wayplan/graph.hpp"

namespace wayplan {

// Variable/value-ordering hint precomputed before search. node_pref must be
// a permutation of the node set, most preferred first; preferred_arcs lists
// arc ids whose value order tries 1 before 0.
struct ProbeOrdering {
    std::string name;
    std::vector<NodeId> node_pref;
    std::vector<int> preferred_arcs;
};

ProbeOrdering identity_probe(const WeightedGraph& g);

// Search nodes worth one millisecond of solving on a desktop core; converts
// wall-clock budgets into deterministic node budgets.
constexpr std::int64_t kDefaultNodesPerMs = 1500;

struct SolverConfig {
    // Wall-clock limit; <= 0 disables. Checked at node expansion.
    std::int64_t timeout_ms = 3000;
    // Deterministic limit on expanded search nodes; 0 disables. Used when
    // reruns must be bit-reproducible (wall-clock cutoffs are not).
    std::int64_t node_budget = 0;
    // Max passes per waypoint (N). 0 selects max(2, ceil(|M|/2) + 1).
    int max_passes = 0;
    // Extra search-node check that discards states whose fixed arcs can no
    // longer lie on one start->dest trail. Off by default: the model's
    // propagation is bounds consistency on the linear constraints, and
    // disconnected circulations are rejected lazily at extraction.
    bool reachability_pruning = false;
};

int default_max_passes(const Instance& inst);

struct SearchStats {
    bool proved_optimal = false; // search tree exhausted within the budget
    bool found_solution = false;
    double best_cost = kInfCost;
    std::vector<int> best_plan;      // arc ids with flow 1
    std::vector<NodeId> best_walk;   // start..dest traversal of best_plan
    std::int64_t backtracks = 0;     // failed branches (propagation, connectivity, rejected leaves)
    std::int64_t nodes_expanded = 0; // decisions tried
    double solve_ms = 0.0;
    int max_passes_used = 0;
    std::string probe_name;
};

// 0/1 flow model over the arcs of g: per-node flow conservation with the
// per-waypoint pass bound N, start/end limit conditions, mandatory-node
// lower bounds, and the total-cost objective.
class FlowModel {
public:
    FlowModel(const WeightedGraph& g, const Instance& inst, int max_passes);

    const WeightedGraph& graph() const { return *g_; }
    const Instance& instance() const { return inst_; }
    int max_passes() const { return n_passes_; }

    int var_count() const { return static_cast<int>(lo_.size()); }
    int lo(int var) const { return lo_[static_cast<std::size_t>(var)]; }
    int hi(int var) const { return hi_[static_cast<std::size_t>(var)]; }
    bool bound(int var) const { return lo(var) == hi(var); }

    // Bounds-consistency fixpoint over every posted linear constraint.
    // Returns false iff some domain empties. Idempotent.
    bool propagate();

    // Current lower bound on the objective (sum of weights of arcs fixed 1).
    double objective_lower_bound() const { return obj_min_; }

    // Strict upper bound on the objective used by branch and bound.
    void set_objective_bound(double ub) { obj_ub_ = ub; }
    double objective_bound() const { return obj_ub_; }

    // Search-state management (trail-based).
    std::size_t trail_mark() const { return trail_.size(); }
    void undo_to(std::size_t mark);
    bool assign(int var, int value); // set + incremental propagation

    std::vector<int> fixed_plan() const; // arc ids with lo == 1

private:
    struct LinCon {
        std::vector<int> vars;
        std::vector<int> coefs; // +1 / -1
        int lo = 0;
        int hi = 0;
    };

    bool set_lo(int var, int v);
    bool set_hi(int var, int v);
    bool propagate_queue();
    bool revise(int ci);
    bool revise_objective();
    void enqueue_var(int var);

    const WeightedGraph* g_ = nullptr;
    Instance inst_;
    int n_passes_ = 0;

    std::vector<signed char> lo_, hi_;
    std::vector<double> weight_;
    std::vector<LinCon> cons_;
    std::vector<std::vector<int>> var_cons_;

    double obj_min_ = 0.0;
    double obj_ub_ = kInfCost;

    struct TrailEntry {
        int var;
        signed char old_lo, old_hi;
    };
    std::vector<TrailEntry> trail_;

    std::vector<int> queue_;
    std::vector<char> queued_;
    bool obj_queued_ = false;
};

// Builds the flow model; exposed separately so tests can inspect domains
// right after posting.
FlowModel build_model(const WeightedGraph& g, const Instance& inst, const SolverConfig& cfg);

// Turns an arc set satisfying the flow constraints into the start->dest
// walk that uses every selected arc exactly once, or nullopt when the
// selection is not a single connected trail (subtour rejection).
std::optional<std::vector<NodeId>> extract_walk(const WeightedGraph& g, const Instance& inst,
                                                const std::vector<int>& plan);

// Depth-first branch and bound over the flow variables, ordered by the
// probe, with proof of optimality on natural exhaustion.
SearchStats solve(const WeightedGraph& g, const Instance& inst, const SolverConfig& cfg,
                  const ProbeOrdering& probe);

} // namespace wayplan

#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "wayplan/error.hpp"
#include "wayplan/mat.hpp"

namespace wayplan {

using NodeId = int;

constexpr double kInfCost = std::numeric_limits<double>::infinity();

// Cost comparisons throughout the solver and oracle use this absolute
// tolerance; weights are 64-bit floats.
constexpr double kCostEps = 1e-9;

struct Arc {
    NodeId from = 0;
    NodeId to = 0;
    double weight = 0.0;
};

// Connected weighted graph. Undirected graphs are stored as two directed
// arcs per edge; `edges()` keeps the file-level edge list for round-trips.
class WeightedGraph {
public:
    // Validates and builds adjacency. Throws Error on self-loops,
    // non-positive or non-finite weights, out-of-range endpoints, or a
    // disconnected graph (strong connectivity required when directed).
    static WeightedGraph build(int n, bool directed, std::vector<Arc> edges);

    int node_count() const { return n_; }
    bool directed() const { return directed_; }

    // Edges as given at construction (one entry per undirected edge).
    const std::vector<Arc>& edges() const { return edges_; }
    // Directed arc list; arc ids are indices into this vector.
    const std::vector<Arc>& arcs() const { return arcs_; }
    const Arc& arc(int id) const { return arcs_[static_cast<std::size_t>(id)]; }
    int arc_count() const { return static_cast<int>(arcs_.size()); }

    // Arc ids leaving / entering a node.
    const std::vector<int>& out_arcs(NodeId v) const { return out_[static_cast<std::size_t>(v)]; }
    const std::vector<int>& in_arcs(NodeId v) const { return in_[static_cast<std::size_t>(v)]; }

    std::vector<NodeId> out_neighbors(NodeId v) const;

    // Hash of the canonical serialization; ties datasets and models to the
    // exact graph they were built from.
    std::uint64_t fingerprint() const { return fingerprint_; }

private:
    WeightedGraph() = default;

    int n_ = 0;
    bool directed_ = false;
    std::vector<Arc> edges_;
    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> out_;
    std::vector<std::vector<int>> in_;
    std::uint64_t fingerprint_ = 0;
};

// One planning query: minimum-cost walk from start to dest visiting all
// mandatory nodes at least once, in any order.
struct Instance {
    NodeId start = 0;
    NodeId dest = 0;
    std::vector<NodeId> mandatory; // sorted, unique, never contains start/dest

    bool operator==(const Instance&) const = default;
};

// Normalizes (sorts/dedups mandatory, drops start and dest from it) and
// validates against the graph. Throws Error on out-of-range nodes or
// start == dest.
Instance make_instance(const WeightedGraph& g, NodeId start, NodeId dest, std::vector<NodeId> mandatory);

std::uint64_t instance_hash(const Instance& inst);

// a[v][v'] = w if the arc exists, 0 otherwise.
Mat adjacency_matrix(const WeightedGraph& g);
// c[v][v'] = w if the arc exists, +inf otherwise (diagonal included).
Mat cost_matrix(const WeightedGraph& g);

// Line-oriented text formats, byte-stable for golden tests:
//   graph <n> <directed|undirected>
//   edge <u> <v> <w>
// and
//   instance <s> <d> <m1,m2,...|->
std::string serialize_graph(const WeightedGraph& g);
WeightedGraph parse_graph(std::istream& in);
WeightedGraph load_graph(const std::string& path);
void save_graph(const WeightedGraph& g, const std::string& path);

std::string serialize_instance(const Instance& inst);
std::vector<Instance> parse_instances(std::istream& in, const WeightedGraph& g);
std::vector<Instance> load_instances(const std::string& path, const WeightedGraph& g);
void save_instances(const std::vector<Instance>& list, const std::string& path);

// Shortest-path-weight formatting used by all text formats: round-trips
// doubles exactly.
std::string format_weight(double w);

} // namespace wayplan

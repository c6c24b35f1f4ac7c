#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wayplan/graph.hpp"

namespace wayplan {

// A solved (instance, optimal walk) pair before suffix splitting.
struct RootPair {
    Instance instance;
    std::vector<NodeId> path; // starts at instance.start, ends at instance.dest
};

// One supervised example: per-node (start, end, mandatory) indicator
// triplets, and the first node visited after the start.
struct Example {
    std::vector<double> x; // 3*|V| entries
    NodeId label = 0;

    bool operator==(const Example&) const = default;
};

struct Dataset {
    std::uint64_t fingerprint = 0; // graph the examples were built on
    int n = 0;
    std::uint64_t seed = 0;        // shuffle seed
    std::vector<Example> examples; // stored in shuffled order
    std::size_t train_count = 0;   // first train_count rows form the training split

    std::size_t test_count() const { return examples.size() - train_count; }
};

// Indicator encoding (s_1,e_1,m_1, ..., s_n,e_n,m_n). Suffix instances of a
// walk that passes through the destination may have start == dest; both
// indicators are then set on the same node.
std::vector<double> encode_query(int n, NodeId start, NodeId dest, const std::vector<NodeId>& mandatory);
std::vector<double> encode_instance(const WeightedGraph& g, const Instance& inst);

// Splits an optimal root pair into per-step child instances whose suffix
// walks stay optimal; emits one (instance, next-node) example per step.
// Throws Error when the path is not a feasible walk for the instance.
std::vector<std::pair<Instance, NodeId>> split_root_pair(const RootPair& rp);

// Concatenates the split examples of every root pair, shuffles with the
// seed, and splits 80/20 (train size = round(0.8 * total)).
Dataset build_dataset(const WeightedGraph& g, const std::vector<RootPair>& pairs, std::uint64_t seed);

std::string serialize_dataset(const Dataset& ds);
Dataset parse_dataset(std::istream& in);
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

} // namespace wayplan

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wayplan/graph.hpp"
#include "wayplan/shortest_path.hpp"

namespace wayplan {

struct GenConfig {
    std::uint64_t seed = 1;
    int n = 15;
    // Fraction of ordered (s, d) pairs kept, ranked by shortest-path
    // distance descending.
    double decimation_keep = 0.10;
    std::vector<int> mandatory_sizes = {0, 1, 2, 4, 6, 8, 10};
    // Instances per kept pair for each size >= 1; size 0 always yields one
    // instance per pair (the empty set admits no variation).
    int instances_per_pair = 2;
    // Target average degree of the geometric construction.
    double target_degree = 3.5;
};

// Number of (start, dest, mandatory-set) instances on n nodes:
// 2^(n-2) * n * (n-1). Throws Error when it exceeds 64 bits.
std::uint64_t count_instances(int n);
// Exact decimal string for any n (no overflow).
std::string count_instances_string(int n);

// Random geometric graph: n points in the unit square, edges within a
// radius tuned to the target degree, plus a Euclidean minimum-spanning-tree
// backbone for connectivity. Weights are the point distances. Undirected,
// deterministic under the seed.
WeightedGraph generate_graph(const GenConfig& cfg);

// Decimates the ordered pairs by distance, then draws mandatory sets
// uniformly without replacement from V \ {s, d}. Sizes exceeding n-2 are
// skipped. Deterministic under the seed (per-pair sub-seeds).
std::vector<Instance> generate_instances(const WeightedGraph& g, const ShortestPathTable& spt,
                                         const GenConfig& cfg);

// Number of ordered pairs kept by decimation.
std::size_t decimation_kept_pairs(int n, double keep);

// Plain-text manifest: config echo plus per-size instance counts.
std::string generation_manifest(const GenConfig& cfg, const WeightedGraph& g,
                                const std::vector<Instance>& instances);

} // namespace wayplan

#pragma once

#include "wayplan/flow_solver.hpp"
#include "wayplan/gcn.hpp"
#include "wayplan/shortest_path.hpp"

namespace wayplan {

// Reference probe: prefers the shortest start->dest path. node_pref lists
// the path nodes in order, then the remaining nodes by ascending distance
// from the start (ties by node id); the path arcs are value-preferred.
ProbeOrdering dijkstra_probe(const WeightedGraph& g, const Instance& inst, const ShortestPathTable& spt);

// Neural probe: one forward pass at the search root ranks all nodes by
// predicted first-visit probability (ties by node id). The network is not
// consulted again during search. The value-preferred path commits to the
// top-ranked out-neighbor of the start, then continues along the shortest
// path to the destination. Throws Error when the model was trained on a
// different graph.
ProbeOrdering neural_probe(const GcnModel& model, const WeightedGraph& g, const Instance& inst);

} // namespace wayplan

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wayplan/dataset.hpp"
#include "wayplan/flow_solver.hpp"
#include "wayplan/gcn.hpp"
#include "wayplan/generator.hpp"
#include "wayplan/graph.hpp"
#include "wayplan/probe.hpp"
#include "wayplan/shortest_path.hpp"

namespace wayplan {

// Runs fn(0..count-1) on a small worker pool; results must be written to
// per-index slots so assembly stays deterministic.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

struct SolveRecord {
    std::size_t instance_id = 0;
    Instance instance;
    SearchStats stats;
};

// One line per record: id, |M|, cost, walk, proved, backtracks, nodes,
// time_ms, probe.
std::string solve_records_csv(const std::vector<SolveRecord>& records);
// Timing-free variant for bit-stable golden comparisons.
std::string solve_records_deterministic(const std::vector<SolveRecord>& records);

struct BenchConfig {
    SolverConfig solver;
    int threads = 0; // 0 = hardware concurrency
};

// Solve with proof cross-checked against the brute-force optimum: when the
// search exhausts but the cost exceeds the oracle value (the pass bound N
// truncated the optimum), N is doubled and the solve retried once.
SearchStats solve_oracle_checked(const WeightedGraph& g, const Instance& inst,
                                 const ShortestPathTable& spt, const SolverConfig& cfg,
                                 const ProbeOrdering& probe, const OracleResult& oracle);

struct DataGenResult {
    std::vector<RootPair> roots; // proved-optimal, oracle-verified
    std::vector<SolveRecord> records;
    std::map<std::size_t, std::size_t> generated_by_size;
    std::map<std::size_t, std::size_t> solved_by_size;
};

// Solves every instance with the reference probe and keeps the
// proved-optimal root pairs for learning; timeouts are recorded, not fatal.
DataGenResult run_data_generation(const WeightedGraph& g, const ShortestPathTable& spt,
                                  const std::vector<Instance>& instances, const BenchConfig& cfg);

std::string datagen_report_text(const DataGenResult& r);
std::string datagen_report_csv(const DataGenResult& r);

struct ProbeAggregate {
    std::size_t resolved = 0;       // proved-optimal with a solution
    double avg_time_ms = 0.0;       // over resolved runs
    double avg_backtracks = 0.0;    // over resolved runs
    double avg_nodes = 0.0;
};

struct ComparisonReport {
    std::vector<int> sizes; // row order
    std::map<int, std::size_t> ref_solved_by_size, nn_solved_by_size;
    ProbeAggregate ref, nn;
    std::size_t co_solved = 0; // proved by both probes
    double co_avg_backtracks_ref = 0.0, co_avg_backtracks_nn = 0.0;
    std::vector<SolveRecord> ref_records, nn_records;
};

// Solves every instance twice (reference and neural probe) under the same
// budget. Throws Error if proved-optimal costs disagree on a co-solved
// instance, which would indicate a solver bug.
ComparisonReport run_comparison(const WeightedGraph& g, const ShortestPathTable& spt,
                                const std::vector<Instance>& instances, const GcnModel& model,
                                const BenchConfig& cfg);

std::string comparison_report_text(const ComparisonReport& r);
std::string comparison_report_csv(const ComparisonReport& r);

struct PipelineConfig {
    std::uint64_t seed = 1;
    int n = 15;
    double decimation_keep = 0.10;
    std::vector<int> train_sizes = {0, 1, 2, 4, 6, 8, 10};
    int train_instances_per_pair = 2;
    std::vector<int> eval_sizes = {3, 5, 7, 9};
    int eval_instances_per_pair = 2;
    std::vector<int> hidden_widths = default_hidden_widths();
    SolverConfig solver;
    TrainConfig train;
    int threads = 0;
    std::string out_dir;
    bool run_eval = true;
};

struct PipelineResult {
    std::string graph_path, train_instances_path, manifest_path, dataset_path, model_path,
        curves_path, datagen_report_path, eval_instances_path, comparison_report_path,
        backtracks_path;
    std::size_t roots = 0;
    std::size_t examples = 0;
    double test_accuracy = 0.0;
    std::size_t ref_resolved = 0, nn_resolved = 0;
};

// Full benchmark pipeline: generate graph + instances, produce root pairs
// with the reference-probe solver, build the dataset, train, then compare
// reference vs neural probing on fresh instances. Everything lands in
// out_dir; identical seeds give bit-identical artifacts.
PipelineResult run_pipeline(const PipelineConfig& cfg);

} // namespace wayplan

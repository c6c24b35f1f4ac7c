#include "wayplan/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "wayplan/rng.hpp"

namespace wayplan {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min<int>(workers, static_cast<int>(count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

namespace {

std::string walk_to_string(const std::vector<NodeId>& walk) {
    std::ostringstream out;
    for (std::size_t i = 0; i < walk.size(); ++i) {
        if (i) out << '-';
        out << walk[i];
    }
    return out.str();
}

std::string cost_to_string(const SearchStats& st) {
    if (!st.found_solution) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", st.best_cost);
    return buf;
}

} // namespace

std::string solve_records_csv(const std::vector<SolveRecord>& records) {
    std::ostringstream out;
    out << "instance_id,mandatory,cost,walk,proved_optimal,backtracks,nodes,time_ms,probe\n";
    for (const SolveRecord& r : records) {
        char t[32];
        std::snprintf(t, sizeof t, "%.3f", r.stats.solve_ms);
        out << r.instance_id << ',' << r.instance.mandatory.size() << ',' << cost_to_string(r.stats)
            << ',' << walk_to_string(r.stats.best_walk) << ',' << (r.stats.proved_optimal ? 1 : 0)
            << ',' << r.stats.backtracks << ',' << r.stats.nodes_expanded << ',' << t << ','
            << r.stats.probe_name << '\n';
    }
    return out.str();
}

std::string solve_records_deterministic(const std::vector<SolveRecord>& records) {
    std::ostringstream out;
    out << "instance_id,mandatory,cost,proved_optimal,backtracks,nodes,probe\n";
    for (const SolveRecord& r : records) {
        out << r.instance_id << ',' << r.instance.mandatory.size() << ',' << cost_to_string(r.stats)
            << ',' << (r.stats.proved_optimal ? 1 : 0) << ',' << r.stats.backtracks << ','
            << r.stats.nodes_expanded << ',' << r.stats.probe_name << '\n';
    }
    return out.str();
}

SearchStats solve_oracle_checked(const WeightedGraph& g, const Instance& inst,
                                 const ShortestPathTable& spt, const SolverConfig& cfg,
                                 const ProbeOrdering& probe, const OracleResult& oracle) {
    SearchStats stats = solve(g, inst, cfg, probe);
    if (stats.found_solution && stats.best_cost < oracle.cost - kCostEps)
        throw Error("solver reported a cost below the brute-force optimum");
    bool truncated = stats.proved_optimal &&
                     (!stats.found_solution || stats.best_cost > oracle.cost + kCostEps);
    if (truncated) {
        SolverConfig retry = cfg;
        retry.max_passes = stats.max_passes_used * 2;
        stats = solve(g, inst, retry, probe);
        if (stats.found_solution && stats.best_cost < oracle.cost - kCostEps)
            throw Error("solver reported a cost below the brute-force optimum");
    }
    return stats;
}

DataGenResult run_data_generation(const WeightedGraph& g, const ShortestPathTable& spt,
                                  const std::vector<Instance>& instances, const BenchConfig& cfg) {
    DataGenResult res;
    res.records.resize(instances.size());
    parallel_for(instances.size(), cfg.threads, [&](std::size_t i) {
        const Instance& inst = instances[i];
        ProbeOrdering probe = dijkstra_probe(g, inst, spt);
        OracleResult oracle = brute_force_solve(g, inst, spt);
        SearchStats stats = solve_oracle_checked(g, inst, spt, cfg.solver, probe, oracle);
        res.records[i] = SolveRecord{i, inst, std::move(stats)};
    });
    for (const SolveRecord& r : res.records) {
        std::size_t size = r.instance.mandatory.size();
        ++res.generated_by_size[size];
        if (r.stats.proved_optimal && r.stats.found_solution) {
            ++res.solved_by_size[size];
            res.roots.push_back(RootPair{r.instance, r.stats.best_walk});
        }
    }
    return res;
}

std::string datagen_report_text(const DataGenResult& r) {
    std::ostringstream out;
    std::size_t gen_total = 0, solved_total = 0;
    for (auto [s, c] : r.generated_by_size) gen_total += c;
    for (auto [s, c] : r.solved_by_size) solved_total += c;
    out << "Instances resolved by the solver out of the generation process\n";
    out << "mandatory:";
    for (auto [s, c] : r.generated_by_size) out << '\t' << s;
    out << '\n';
    out << "generated (" << gen_total << "):";
    for (auto [s, c] : r.generated_by_size) out << '\t' << c;
    out << '\n';
    out << "optimally solved (" << solved_total << "):";
    for (auto [s, c] : r.generated_by_size) {
        auto it = r.solved_by_size.find(s);
        out << '\t' << (it == r.solved_by_size.end() ? 0 : it->second);
    }
    out << '\n';
    return out.str();
}

std::string datagen_report_csv(const DataGenResult& r) {
    std::ostringstream out;
    out << "mandatory,generated,optimally_solved\n";
    for (auto [s, c] : r.generated_by_size) {
        auto it = r.solved_by_size.find(s);
        out << s << ',' << c << ',' << (it == r.solved_by_size.end() ? 0 : it->second) << '\n';
    }
    return out.str();
}

namespace {

ProbeAggregate aggregate(const std::vector<SolveRecord>& records) {
    ProbeAggregate agg;
    double time = 0, bt = 0, nodes = 0;
    for (const SolveRecord& r : records) {
        if (!(r.stats.proved_optimal && r.stats.found_solution)) continue;
        ++agg.resolved;
        time += r.stats.solve_ms;
        bt += static_cast<double>(r.stats.backtracks);
        nodes += static_cast<double>(r.stats.nodes_expanded);
    }
    if (agg.resolved) {
        agg.avg_time_ms = time / static_cast<double>(agg.resolved);
        agg.avg_backtracks = bt / static_cast<double>(agg.resolved);
        agg.avg_nodes = nodes / static_cast<double>(agg.resolved);
    }
    return agg;
}

} // namespace

ComparisonReport run_comparison(const WeightedGraph& g, const ShortestPathTable& spt,
                                const std::vector<Instance>& instances, const GcnModel& model,
                                const BenchConfig& cfg) {
    ComparisonReport rep;
    rep.ref_records.resize(instances.size());
    rep.nn_records.resize(instances.size());
    // Two independent solver runs per instance; tasks stay per-(instance,
    // probe) so a slow reference run does not serialize the neural one.
    parallel_for(instances.size() * 2, cfg.threads, [&](std::size_t task) {
        std::size_t i = task / 2;
        bool neural = (task % 2) == 1;
        const Instance& inst = instances[i];
        ProbeOrdering probe =
            neural ? neural_probe(model, g, inst) : dijkstra_probe(g, inst, spt);
        SearchStats stats = solve(g, inst, cfg.solver, probe);
        auto& slot = neural ? rep.nn_records[i] : rep.ref_records[i];
        slot = SolveRecord{i, inst, std::move(stats)};
    });

    std::set<int> sizes;
    for (const Instance& inst : instances) sizes.insert(static_cast<int>(inst.mandatory.size()));
    rep.sizes.assign(sizes.begin(), sizes.end());
    for (int s : rep.sizes) {
        rep.ref_solved_by_size[s] = 0;
        rep.nn_solved_by_size[s] = 0;
    }

    double co_ref = 0, co_nn = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const SearchStats& a = rep.ref_records[i].stats;
        const SearchStats& b = rep.nn_records[i].stats;
        int size = static_cast<int>(instances[i].mandatory.size());
        bool ra = a.proved_optimal && a.found_solution;
        bool rb = b.proved_optimal && b.found_solution;
        if (ra) ++rep.ref_solved_by_size[size];
        if (rb) ++rep.nn_solved_by_size[size];
        if (ra && rb) {
            if (std::abs(a.best_cost - b.best_cost) > kCostEps)
                throw Error("probe cost disagreement on a co-solved instance (solver bug)");
            ++rep.co_solved;
            co_ref += static_cast<double>(a.backtracks);
            co_nn += static_cast<double>(b.backtracks);
        }
    }
    if (rep.co_solved) {
        rep.co_avg_backtracks_ref = co_ref / static_cast<double>(rep.co_solved);
        rep.co_avg_backtracks_nn = co_nn / static_cast<double>(rep.co_solved);
    }
    rep.ref = aggregate(rep.ref_records);
    rep.nn = aggregate(rep.nn_records);
    return rep;
}

std::string comparison_report_text(const ComparisonReport& r) {
    std::ostringstream out;
    out << "Instances resolved with proof of optimality (reference vs neural probing)\n";
    out << "mandatory:";
    for (int s : r.sizes) out << '\t' << s;
    out << "\nreference:";
    for (int s : r.sizes) out << '\t' << r.ref_solved_by_size.at(s);
    out << "\nneural net probing:";
    for (int s : r.sizes) out << '\t' << r.nn_solved_by_size.at(s);
    out << "\n\nGlobal search features for proof of optimality\n";
    char buf[256];
    out << "instances resolved: reference " << r.ref.resolved << ", neural " << r.nn.resolved << '\n';
    std::snprintf(buf, sizeof buf,
                  "average solving time (ms, environment-dependent): reference %.1f, neural %.1f\n",
                  r.ref.avg_time_ms, r.nn.avg_time_ms);
    out << buf;
    std::snprintf(buf, sizeof buf, "average backtracks: reference %.1f, neural %.1f\n",
                  r.ref.avg_backtracks, r.nn.avg_backtracks);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "co-solved instances %zu, average backtracks there: reference %.1f, neural %.1f\n",
                  r.co_solved, r.co_avg_backtracks_ref, r.co_avg_backtracks_nn);
    out << buf;
    return out.str();
}

std::string comparison_report_csv(const ComparisonReport& r) {
    std::ostringstream out;
    out << "mandatory,reference_solved,neural_solved\n";
    for (int s : r.sizes)
        out << s << ',' << r.ref_solved_by_size.at(s) << ',' << r.nn_solved_by_size.at(s) << '\n';
    return out.str();
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    namespace fs = std::filesystem;
    if (cfg.out_dir.empty()) throw Error("run_pipeline: out_dir required");
    fs::create_directories(cfg.out_dir);
    auto path = [&](const std::string& name) { return (fs::path(cfg.out_dir) / name).string(); };
    auto write_file = [&](const std::string& p, const std::string& content) {
        std::ofstream out(p);
        if (!out) throw Error("cannot write " + p);
        out << content;
    };

    PipelineResult res;

    GenConfig gen;
    gen.seed = cfg.seed;
    gen.n = cfg.n;
    gen.decimation_keep = cfg.decimation_keep;
    gen.mandatory_sizes = cfg.train_sizes;
    gen.instances_per_pair = cfg.train_instances_per_pair;
    WeightedGraph g = generate_graph(gen);
    ShortestPathTable spt = dijkstra_all_pairs(g);
    std::vector<Instance> train_instances = generate_instances(g, spt, gen);

    res.graph_path = path("graph.txt");
    save_graph(g, res.graph_path);
    res.train_instances_path = path("train_instances.txt");
    save_instances(train_instances, res.train_instances_path);
    res.manifest_path = path("manifest.txt");
    write_file(res.manifest_path, generation_manifest(gen, g, train_instances));

    BenchConfig bench;
    bench.solver = cfg.solver;
    bench.threads = cfg.threads;
    DataGenResult dg = run_data_generation(g, spt, train_instances, bench);
    res.datagen_report_path = path("datagen_report.txt");
    write_file(res.datagen_report_path, datagen_report_text(dg));
    write_file(path("datagen_report.csv"), datagen_report_csv(dg));
    write_file(path("datagen_records.csv"), solve_records_csv(dg.records));
    res.roots = dg.roots.size();
    if (dg.roots.empty()) throw Error("run_pipeline: no instances solved to proof; nothing to learn from");

    Dataset ds = build_dataset(g, dg.roots, splitmix64(cfg.seed ^ 0x5add5eedull));
    res.dataset_path = path("dataset.txt");
    save_dataset(ds, res.dataset_path);
    res.examples = ds.examples.size();

    NormalizedAdjacency s = normalize_adjacency(adjacency_matrix(g));
    GcnModel init = init_model(g, cfg.hidden_widths, splitmix64(cfg.seed ^ 0x1417ull));
    TrainConfig tc = cfg.train;
    tc.seed = splitmix64(cfg.seed ^ 0x7241ull);
    TrainResult tr = train(init, s, ds, tc);
    res.model_path = path("model.txt");
    save_model(tr.best, res.model_path);
    res.curves_path = path("curves.csv");
    write_curves_csv(tr.curves, res.curves_path);
    res.test_accuracy = tr.best_test_acc;

    if (cfg.run_eval) {
        GenConfig eval_gen = gen;
        eval_gen.seed = splitmix64(cfg.seed ^ 0xe7a1ull);
        eval_gen.mandatory_sizes = cfg.eval_sizes;
        eval_gen.instances_per_pair = cfg.eval_instances_per_pair;
        std::vector<Instance> eval_instances = generate_instances(g, spt, eval_gen);
        // Fresh evaluation set: drop anything that collides with a training
        // instance (cannot happen while the size sets are disjoint).
        std::set<std::uint64_t> train_hashes;
        for (const Instance& inst : train_instances) train_hashes.insert(instance_hash(inst));
        std::erase_if(eval_instances, [&](const Instance& inst) {
            return train_hashes.count(instance_hash(inst)) > 0;
        });
        res.eval_instances_path = path("eval_instances.txt");
        save_instances(eval_instances, res.eval_instances_path);

        ComparisonReport rep = run_comparison(g, spt, eval_instances, tr.best, bench);
        res.comparison_report_path = path("comparison.txt");
        write_file(res.comparison_report_path, comparison_report_text(rep));
        write_file(path("comparison.csv"), comparison_report_csv(rep));
        write_file(path("eval_records_reference.csv"), solve_records_csv(rep.ref_records));
        write_file(path("eval_records_neural.csv"), solve_records_csv(rep.nn_records));
        res.backtracks_path = path("backtracks.txt");
        write_file(res.backtracks_path, solve_records_deterministic(rep.ref_records) +
                                            solve_records_deterministic(rep.nn_records));
        res.ref_resolved = rep.ref.resolved;
        res.nn_resolved = rep.nn.resolved;
    }
    return res;
}

} // namespace wayplan

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wayplan/rng.hpp"

#include "wayplan/bench.hpp"

namespace fs = std::filesystem;
using namespace wayplan;

namespace {

struct BudgetFlags {
    std::int64_t timeout_ms = 3000;
    std::int64_t nodes_per_ms = kDefaultNodesPerMs;
    bool wallclock = false;
    int max_passes = 0;

    void attach(CLI::App* app) {
        app->add_option("--timeout-ms", timeout_ms, "Per-instance budget in milliseconds");
        app->add_option("--nodes-per-ms", nodes_per_ms,
                        "Search-node equivalent of one millisecond (deterministic budget)");
        app->add_flag("--wallclock", wallclock,
                      "Enforce the budget on the wall clock instead of the node count");
        app->add_option("--max-passes", max_passes, "Waypoint pass bound N (0 = automatic)");
    }

    SolverConfig solver() const {
        SolverConfig cfg;
        cfg.max_passes = max_passes;
        if (wallclock) {
            cfg.timeout_ms = timeout_ms;
            cfg.node_budget = 0;
        } else {
            cfg.timeout_ms = 0;
            cfg.node_budget = timeout_ms * nodes_per_ms;
        }
        return cfg;
    }
};

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shortest-path planning with mandatory waypoints: constraint solver, "
                 "instance generator, GCN training and probe benchmarks"};
    app.require_subcommand(1);

    // --- generate ---
    auto* gen_cmd = app.add_subcommand("generate", "Generate a benchmark graph and instance set");
    GenConfig gen;
    std::string gen_out = "bench_out";
    std::string gen_graph;
    gen_cmd->add_option("--graph", gen_graph,
                        "Sample instances for this existing graph instead of generating one "
                        "(fresh evaluation sets)");
    gen_cmd->add_option("--seed", gen.seed, "Master seed");
    gen_cmd->add_option("--nodes", gen.n, "Node count");
    gen_cmd->add_option("--keep", gen.decimation_keep, "Fraction of longest pairs kept");
    gen_cmd->add_option("--sizes", gen.mandatory_sizes, "Mandatory-set sizes");
    gen_cmd->add_option("--per-pair", gen.instances_per_pair, "Instances per kept pair and size");
    gen_cmd->add_option("--degree", gen.target_degree, "Target average degree");
    gen_cmd->add_option("--out", gen_out, "Output directory");

    // --- count ---
    auto* count_cmd = app.add_subcommand("count", "Print the size of the instance space");
    int count_n = 15;
    count_cmd->add_option("--nodes", count_n, "Node count")->required();

    // --- solve ---
    auto* solve_cmd = app.add_subcommand("solve", "Solve an instance file");
    std::string solve_graph, solve_instances, solve_model, solve_out;
    std::string solve_probe = "dijkstra";
    int solve_threads = 0;
    BudgetFlags solve_budget;
    solve_cmd->add_option("--graph", solve_graph, "Graph file")->required();
    solve_cmd->add_option("--instances", solve_instances, "Instance file")->required();
    solve_cmd->add_option("--probe", solve_probe, "Probe: dijkstra or neural")
        ->check(CLI::IsMember({"dijkstra", "neural"}));
    solve_cmd->add_option("--model", solve_model, "Trained model (required for --probe neural)");
    solve_cmd->add_option("--out", solve_out, "Write per-instance records CSV here");
    solve_cmd->add_option("--threads", solve_threads, "Worker threads (0 = all cores)");
    solve_budget.attach(solve_cmd);

    // --- train ---
    auto* train_cmd = app.add_subcommand("train", "Produce root pairs with the solver, build the "
                                                  "dataset and train the network");
    std::string train_graph, train_instances, train_out = "train_out";
    TrainConfig train_cfg;
    std::vector<int> train_widths = default_hidden_widths();
    std::uint64_t train_seed = 1;
    int train_threads = 0;
    BudgetFlags train_budget;
    train_cmd->add_option("--graph", train_graph, "Graph file")->required();
    train_cmd->add_option("--instances", train_instances, "Instance file")->required();
    train_cmd->add_option("--out", train_out, "Output directory");
    train_cmd->add_option("--seed", train_seed, "Shuffle/init seed");
    train_cmd->add_option("--epochs", train_cfg.max_epochs, "Max training epochs");
    train_cmd->add_option("--patience", train_cfg.patience, "Early-stopping patience");
    train_cmd->add_option("--lr", train_cfg.lr, "Learning rate");
    train_cmd->add_option("--batch", train_cfg.batch_size, "Mini-batch size");
    train_cmd->add_option("--widths", train_widths, "Hidden layer widths");
    train_cmd->add_option("--threads", train_threads, "Worker threads for solving");
    train_budget.attach(train_cmd);

    // --- eval ---
    auto* eval_cmd = app.add_subcommand("eval", "Compare reference vs neural probing");
    std::string eval_graph, eval_instances, eval_model, eval_out = "eval_out";
    int eval_threads = 0;
    BudgetFlags eval_budget;
    eval_cmd->add_option("--graph", eval_graph, "Graph file")->required();
    eval_cmd->add_option("--instances", eval_instances, "Instance file")->required();
    eval_cmd->add_option("--model", eval_model, "Trained model")->required();
    eval_cmd->add_option("--out", eval_out, "Output directory");
    eval_cmd->add_option("--threads", eval_threads, "Worker threads");
    eval_budget.attach(eval_cmd);

    // --- bench ---
    auto* bench_cmd = app.add_subcommand("bench", "Full pipeline: generate, solve, train, compare");
    PipelineConfig pipe;
    BudgetFlags bench_budget;
    bench_cmd->add_option("--seed", pipe.seed, "Master seed");
    bench_cmd->add_option("--nodes", pipe.n, "Node count");
    bench_cmd->add_option("--keep", pipe.decimation_keep, "Decimation keep fraction");
    bench_cmd->add_option("--train-sizes", pipe.train_sizes, "Mandatory sizes for training data");
    bench_cmd->add_option("--train-per-pair", pipe.train_instances_per_pair,
                          "Training instances per pair and size");
    bench_cmd->add_option("--eval-sizes", pipe.eval_sizes, "Mandatory sizes for evaluation");
    bench_cmd->add_option("--eval-per-pair", pipe.eval_instances_per_pair,
                          "Evaluation instances per pair and size");
    bench_cmd->add_option("--widths", pipe.hidden_widths, "Hidden layer widths");
    bench_cmd->add_option("--epochs", pipe.train.max_epochs, "Max training epochs");
    bench_cmd->add_option("--patience", pipe.train.patience, "Early-stopping patience");
    bench_cmd->add_option("--threads", pipe.threads, "Worker threads");
    bench_cmd->add_option("--out", pipe.out_dir, "Output directory")->required();
    bench_budget.attach(bench_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen_cmd) {
            fs::create_directories(gen_out);
            WeightedGraph g = gen_graph.empty() ? generate_graph(gen) : load_graph(gen_graph);
            gen.n = g.node_count();
            ShortestPathTable spt = dijkstra_all_pairs(g);
            std::vector<Instance> instances = generate_instances(g, spt, gen);
            save_graph(g, (fs::path(gen_out) / "graph.txt").string());
            save_instances(instances, (fs::path(gen_out) / "instances.txt").string());
            write_text((fs::path(gen_out) / "manifest.txt").string(),
                       generation_manifest(gen, g, instances));
            std::printf("graph with %d nodes, %zu edges; %zu instances -> %s\n", g.node_count(),
                        g.edges().size(), instances.size(), gen_out.c_str());
        } else if (*count_cmd) {
            std::printf("%s\n", count_instances_string(count_n).c_str());
        } else if (*solve_cmd) {
            WeightedGraph g = load_graph(solve_graph);
            std::vector<Instance> instances = load_instances(solve_instances, g);
            ShortestPathTable spt = dijkstra_all_pairs(g);
            GcnModel model;
            if (solve_probe == "neural") {
                if (solve_model.empty()) throw Error("--probe neural requires --model");
                model = load_model(solve_model);
            }
            std::vector<SolveRecord> records(instances.size());
            SolverConfig scfg = solve_budget.solver();
            parallel_for(instances.size(), solve_threads, [&](std::size_t i) {
                ProbeOrdering probe = solve_probe == "neural"
                                          ? neural_probe(model, g, instances[i])
                                          : dijkstra_probe(g, instances[i], spt);
                records[i] = SolveRecord{i, instances[i], solve(g, instances[i], scfg, probe)};
            });
            std::size_t proved = 0;
            for (const auto& r : records)
                if (r.stats.proved_optimal && r.stats.found_solution) ++proved;
            std::string csv = solve_records_csv(records);
            if (!solve_out.empty()) {
                write_text(solve_out, csv);
            } else {
                std::fputs(csv.c_str(), stdout);
            }
            std::fprintf(stderr, "%zu/%zu proved optimal (probe %s)\n", proved, instances.size(),
                         solve_probe.c_str());
        } else if (*train_cmd) {
            fs::create_directories(train_out);
            WeightedGraph g = load_graph(train_graph);
            std::vector<Instance> instances = load_instances(train_instances, g);
            ShortestPathTable spt = dijkstra_all_pairs(g);
            BenchConfig bcfg;
            bcfg.solver = train_budget.solver();
            bcfg.threads = train_threads;
            DataGenResult dg = run_data_generation(g, spt, instances, bcfg);
            write_text((fs::path(train_out) / "datagen_report.txt").string(), datagen_report_text(dg));
            write_text((fs::path(train_out) / "datagen_report.csv").string(), datagen_report_csv(dg));
            write_text((fs::path(train_out) / "datagen_records.csv").string(),
                       solve_records_csv(dg.records));
            if (dg.roots.empty()) throw Error("no root pairs proved optimal; nothing to train on");
            Dataset ds = build_dataset(g, dg.roots, splitmix64(train_seed ^ 0x5add5eedull));
            save_dataset(ds, (fs::path(train_out) / "dataset.txt").string());
            NormalizedAdjacency s = normalize_adjacency(adjacency_matrix(g));
            GcnModel init = init_model(g, train_widths, splitmix64(train_seed ^ 0x1417ull));
            TrainConfig tc = train_cfg;
            tc.seed = splitmix64(train_seed ^ 0x7241ull);
            TrainResult tr = train(init, s, ds, tc);
            save_model(tr.best, (fs::path(train_out) / "model.txt").string());
            write_curves_csv(tr.curves, (fs::path(train_out) / "curves.csv").string());
            std::printf("roots %zu, examples %zu, best test loss %.4f (epoch %d), test accuracy %.4f\n",
                        dg.roots.size(), ds.examples.size(), tr.best_test_loss, tr.best_epoch,
                        tr.best_test_acc);
        } else if (*eval_cmd) {
            fs::create_directories(eval_out);
            WeightedGraph g = load_graph(eval_graph);
            std::vector<Instance> instances = load_instances(eval_instances, g);
            ShortestPathTable spt = dijkstra_all_pairs(g);
            GcnModel model = load_model(eval_model);
            BenchConfig bcfg;
            bcfg.solver = eval_budget.solver();
            bcfg.threads = eval_threads;
            ComparisonReport rep = run_comparison(g, spt, instances, model, bcfg);
            std::string text = comparison_report_text(rep);
            write_text((fs::path(eval_out) / "comparison.txt").string(), text);
            write_text((fs::path(eval_out) / "comparison.csv").string(), comparison_report_csv(rep));
            write_text((fs::path(eval_out) / "eval_records_reference.csv").string(),
                       solve_records_csv(rep.ref_records));
            write_text((fs::path(eval_out) / "eval_records_neural.csv").string(),
                       solve_records_csv(rep.nn_records));
            write_text((fs::path(eval_out) / "backtracks.txt").string(),
                       solve_records_deterministic(rep.ref_records) +
                           solve_records_deterministic(rep.nn_records));
            std::fputs(text.c_str(), stdout);
        } else if (*bench_cmd) {
            pipe.solver = bench_budget.solver();
            PipelineResult res = run_pipeline(pipe);
            std::printf("pipeline done: %zu roots, %zu examples, test accuracy %.4f\n", res.roots,
                        res.examples, res.test_accuracy);
            if (!res.comparison_report_path.empty())
                std::printf("comparison: reference %zu vs neural %zu proved-optimal (%s)\n",
                            res.ref_resolved, res.nn_resolved, res.comparison_report_path.c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

#include "wayplan/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "wayplan/rng.hpp"

namespace wayplan {

std::uint64_t count_instances(int n) {
    if (n < 2) throw Error("count_instances: need n >= 2");
    std::uint64_t pairs = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1);
    if (n - 2 >= 64) throw Error("count_instances: overflow (use count_instances_string)");
    std::uint64_t pow2 = 1ull << (n - 2);
    if (pairs != 0 && pow2 > ~0ull / pairs)
        throw Error("count_instances: overflow (use count_instances_string)");
    return pow2 * pairs;
}

std::string count_instances_string(int n) {
    if (n < 2) throw Error("count_instances: need n >= 2");
    // Schoolbook decimal doubling of n*(n-1), applied n-2 times.
    std::vector<int> digits; // least significant first
    std::uint64_t base = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1);
    while (base) {
        digits.push_back(static_cast<int>(base % 10));
        base /= 10;
    }
    for (int k = 0; k < n - 2; ++k) {
        int carry = 0;
        for (int& d : digits) {
            int v = d * 2 + carry;
            d = v % 10;
            carry = v / 10;
        }
        if (carry) digits.push_back(carry);
    }
    std::string out(digits.size(), '0');
    for (std::size_t i = 0; i < digits.size(); ++i)
        out[i] = static_cast<char>('0' + digits[digits.size() - 1 - i]);
    return out;
}

WeightedGraph generate_graph(const GenConfig& cfg) {
    int n = cfg.n;
    if (n < 2) throw Error("generate_graph: need n >= 2");
    Rng rng(splitmix64(cfg.seed));
    std::vector<double> px(static_cast<std::size_t>(n)), py(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        px[static_cast<std::size_t>(i)] = rng.next_unit();
        py[static_cast<std::size_t>(i)] = rng.next_unit();
    }
    auto dist = [&](int i, int j) {
        double dx = px[static_cast<std::size_t>(i)] - px[static_cast<std::size_t>(j)];
        double dy = py[static_cast<std::size_t>(i)] - py[static_cast<std::size_t>(j)];
        return std::sqrt(dx * dx + dy * dy);
    };

    double radius = std::sqrt(cfg.target_degree / (3.141592653589793 * (n - 1)));
    std::vector<std::vector<char>> present(static_cast<std::size_t>(n),
                                           std::vector<char>(static_cast<std::size_t>(n), 0));
    std::vector<Arc> edges;
    auto add_edge = [&](int i, int j) {
        if (present[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) return;
        present[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
        present[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = 1;
        // Coincident points would break the positive-weight invariant.
        double w = std::max(dist(i, j), 1e-9);
        edges.push_back(Arc{i, j, w});
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dist(i, j) <= radius) add_edge(i, j);

    // Euclidean MST backbone (Prim) guarantees connectivity.
    std::vector<char> in_tree(static_cast<std::size_t>(n), 0);
    std::vector<double> best(static_cast<std::size_t>(n), kInfCost);
    std::vector<int> link(static_cast<std::size_t>(n), -1);
    best[0] = 0.0;
    for (int step = 0; step < n; ++step) {
        int v = -1;
        for (int i = 0; i < n; ++i)
            if (!in_tree[static_cast<std::size_t>(i)] &&
                (v == -1 || best[static_cast<std::size_t>(i)] < best[static_cast<std::size_t>(v)]))
                v = i;
        in_tree[static_cast<std::size_t>(v)] = 1;
        if (link[static_cast<std::size_t>(v)] >= 0) add_edge(link[static_cast<std::size_t>(v)], v);
        for (int j = 0; j < n; ++j) {
            if (!in_tree[static_cast<std::size_t>(j)] && dist(v, j) < best[static_cast<std::size_t>(j)]) {
                best[static_cast<std::size_t>(j)] = dist(v, j);
                link[static_cast<std::size_t>(j)] = v;
            }
        }
    }
    return WeightedGraph::build(n, /*directed=*/false, std::move(edges));
}

std::size_t decimation_kept_pairs(int n, double keep) {
    auto total = static_cast<double>(n) * static_cast<double>(n - 1);
    auto kept = static_cast<std::size_t>(std::ceil(keep * total));
    return std::min(kept, static_cast<std::size_t>(total));
}

std::vector<Instance> generate_instances(const WeightedGraph& g, const ShortestPathTable& spt,
                                         const GenConfig& cfg) {
    if (!(cfg.decimation_keep > 0.0) || cfg.decimation_keep > 1.0)
        throw Error("generate_instances: decimation_keep must be in (0, 1]");
    int n = g.node_count();
    struct PairRank {
        double dist;
        NodeId s, d;
    };
    std::vector<PairRank> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1));
    for (NodeId s = 0; s < n; ++s)
        for (NodeId d = 0; d < n; ++d)
            if (s != d) pairs.push_back(PairRank{spt.dist(s, d), s, d});
    std::sort(pairs.begin(), pairs.end(), [](const PairRank& a, const PairRank& b) {
        if (a.dist != b.dist) return a.dist > b.dist;
        if (a.s != b.s) return a.s < b.s;
        return a.d < b.d;
    });
    pairs.resize(decimation_kept_pairs(n, cfg.decimation_keep));

    std::vector<Instance> out;
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        const PairRank& pr = pairs[pi];
        Rng rng(splitmix64(cfg.seed ^ splitmix64(0x9e53u + pi)));
        std::vector<NodeId> pool;
        for (NodeId v = 0; v < n; ++v)
            if (v != pr.s && v != pr.d) pool.push_back(v);
        for (int size : cfg.mandatory_sizes) {
            if (size > n - 2) continue; // skipped with a manifest note
            int copies = size == 0 ? 1 : cfg.instances_per_pair;
            for (int c = 0; c < copies; ++c) {
                // Partial Fisher-Yates over the candidate pool.
                std::vector<NodeId> draw = pool;
                for (int k = 0; k < size; ++k) {
                    std::size_t j = static_cast<std::size_t>(k) +
                                    static_cast<std::size_t>(rng.next_below(draw.size() - static_cast<std::size_t>(k)));
                    std::swap(draw[static_cast<std::size_t>(k)], draw[j]);
                }
                draw.resize(static_cast<std::size_t>(size));
                out.push_back(make_instance(g, pr.s, pr.d, std::move(draw)));
            }
        }
    }
    return out;
}

std::string generation_manifest(const GenConfig& cfg, const WeightedGraph& g,
                                const std::vector<Instance>& instances) {
    std::ostringstream out;
    out << "manifest v1\n";
    out << "seed " << cfg.seed << '\n';
    out << "nodes " << cfg.n << '\n';
    out << "edges " << g.edges().size() << '\n';
    out << "fingerprint " << std::hex << g.fingerprint() << std::dec << '\n';
    out << "decimation_keep " << format_weight(cfg.decimation_keep) << '\n';
    out << "kept_pairs " << decimation_kept_pairs(cfg.n, cfg.decimation_keep) << '\n';
    out << "instances_per_pair " << cfg.instances_per_pair << '\n';
    out << "target_degree " << format_weight(cfg.target_degree) << '\n';
    out << "instance_space " << count_instances_string(cfg.n) << '\n';
    out << "mandatory_sizes";
    for (int s : cfg.mandatory_sizes) out << ' ' << s;
    out << '\n';
    std::map<std::size_t, std::size_t> by_size;
    for (const Instance& inst : instances) ++by_size[inst.mandatory.size()];
    out << "generated_total " << instances.size() << '\n';
    for (auto [size, count] : by_size) out << "generated_m" << size << ' ' << count << '\n';
    for (int s : cfg.mandatory_sizes)
        if (s > cfg.n - 2) out << "skipped_size " << s << " (exceeds n-2)\n";
    return out.str();
}

} // namespace wayplan

#include "wayplan/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wayplan/rng.hpp"

namespace wayplan {

std::vector<double> encode_query(int n, NodeId start, NodeId dest, const std::vector<NodeId>& mandatory) {
    std::vector<double> x(static_cast<std::size_t>(3 * n), 0.0);
    x[static_cast<std::size_t>(3 * start)] = 1.0;
    x[static_cast<std::size_t>(3 * dest + 1)] = 1.0;
    for (NodeId m : mandatory) x[static_cast<std::size_t>(3 * m + 2)] = 1.0;
    return x;
}

std::vector<double> encode_instance(const WeightedGraph& g, const Instance& inst) {
    return encode_query(g.node_count(), inst.start, inst.dest, inst.mandatory);
}

std::vector<std::pair<Instance, NodeId>> split_root_pair(const RootPair& rp) {
    const auto& p = rp.path;
    const Instance& root = rp.instance;
    if (p.size() < 2 || p.front() != root.start || p.back() != root.dest)
        throw Error("split_root_pair: path does not run from start to dest");
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (p[i] == p[i + 1]) throw Error("split_root_pair: self-hop in path");
    for (NodeId m : root.mandatory)
        if (std::find(p.begin(), p.end(), m) == p.end())
            throw Error("split_root_pair: path misses a mandatory node");

    std::vector<std::pair<Instance, NodeId>> out;
    out.reserve(p.size() - 1);
    std::vector<NodeId> remaining = root.mandatory; // sorted
    NodeId at = root.start;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        out.emplace_back(Instance{at, root.dest, remaining}, p[i + 1]);
        at = p[i + 1];
        auto it = std::lower_bound(remaining.begin(), remaining.end(), at);
        if (it != remaining.end() && *it == at) remaining.erase(it);
    }
    return out;
}

Dataset build_dataset(const WeightedGraph& g, const std::vector<RootPair>& pairs, std::uint64_t seed) {
    if (pairs.empty()) throw Error("build_dataset: no root pairs");
    Dataset ds;
    ds.fingerprint = g.fingerprint();
    ds.n = g.node_count();
    ds.seed = seed;
    for (const RootPair& rp : pairs) {
        for (const auto& [inst, label] : split_root_pair(rp)) {
            Example ex;
            ex.x = encode_query(ds.n, inst.start, inst.dest, inst.mandatory);
            ex.label = label;
            ds.examples.push_back(std::move(ex));
        }
    }
    Rng rng(seed);
    rng.shuffle(ds.examples);
    ds.train_count = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(ds.examples.size())));
    if (ds.train_count > ds.examples.size()) ds.train_count = ds.examples.size();
    if (ds.test_count() == 0)
        std::fprintf(stderr, "warning: dataset of %zu examples leaves an empty test split\n",
                     ds.examples.size());
    return ds;
}

std::string serialize_dataset(const Dataset& ds) {
    std::ostringstream out;
    out << "dataset v1\n";
    out << "fingerprint " << std::hex << ds.fingerprint << std::dec << '\n';
    out << "nodes " << ds.n << '\n';
    out << "seed " << ds.seed << '\n';
    out << "examples " << ds.examples.size() << " train " << ds.train_count << '\n';
    for (const Example& ex : ds.examples) {
        for (double v : ex.x) out << (v != 0.0 ? 1 : 0) << ' ';
        out << ex.label << '\n';
    }
    return out.str();
}

Dataset parse_dataset(std::istream& in) {
    Dataset ds;
    std::string tag, version;
    if (!(in >> tag >> version) || tag != "dataset" || version != "v1")
        throw Error("dataset file: bad header");
    std::size_t count = 0;
    if (!(in >> tag >> std::hex >> ds.fingerprint >> std::dec) || tag != "fingerprint")
        throw Error("dataset file: missing fingerprint");
    if (!(in >> tag >> ds.n) || tag != "nodes" || ds.n < 2) throw Error("dataset file: bad node count");
    if (!(in >> tag >> ds.seed) || tag != "seed") throw Error("dataset file: missing seed");
    std::string tag2;
    if (!(in >> tag >> count >> tag2 >> ds.train_count) || tag != "examples" || tag2 != "train")
        throw Error("dataset file: bad example header");
    ds.examples.resize(count);
    for (Example& ex : ds.examples) {
        ex.x.resize(static_cast<std::size_t>(3 * ds.n));
        for (double& v : ex.x) {
            int b;
            if (!(in >> b) || (b != 0 && b != 1)) throw Error("dataset file: bad feature bit");
            v = b;
        }
        if (!(in >> ex.label) || ex.label < 0 || ex.label >= ds.n)
            throw Error("dataset file: bad label");
    }
    if (ds.train_count > ds.examples.size()) throw Error("dataset file: bad split");
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write dataset file: " + path);
    out << serialize_dataset(ds);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset file: " + path);
    return parse_dataset(in);
}

} // namespace wayplan

#include "wayplan/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>

#include "wayplan/rng.hpp"

namespace wayplan {

namespace {

bool reaches_all(int n, const std::vector<std::vector<int>>& adj_arcs, const std::vector<Arc>& arcs, bool reverse) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<NodeId> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        NodeId v = q.front();
        q.pop();
        for (int aid : adj_arcs[static_cast<std::size_t>(v)]) {
            NodeId w = reverse ? arcs[static_cast<std::size_t>(aid)].from : arcs[static_cast<std::size_t>(aid)].to;
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                ++count;
                q.push(w);
            }
        }
    }
    return count == n;
}

} // namespace

WeightedGraph WeightedGraph::build(int n, bool directed, std::vector<Arc> edges) {
    if (n < 2) throw Error("graph must have at least 2 nodes");
    for (const Arc& e : edges) {
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
            throw Error("edge endpoint out of range");
        if (e.from == e.to) throw Error("self-loops are rejected");
        if (!(e.weight > 0.0) || !std::isfinite(e.weight))
            throw Error("edge weight must be strictly positive and finite");
    }

    WeightedGraph g;
    g.n_ = n;
    g.directed_ = directed;
    g.edges_ = std::move(edges);
    g.arcs_.reserve(g.edges_.size() * (directed ? 1 : 2));
    for (const Arc& e : g.edges_) {
        g.arcs_.push_back(e);
        if (!directed) g.arcs_.push_back(Arc{e.to, e.from, e.weight});
    }
    g.out_.assign(static_cast<std::size_t>(n), {});
    g.in_.assign(static_cast<std::size_t>(n), {});
    for (int id = 0; id < static_cast<int>(g.arcs_.size()); ++id) {
        const Arc& a = g.arcs_[static_cast<std::size_t>(id)];
        g.out_[static_cast<std::size_t>(a.from)].push_back(id);
        g.in_[static_cast<std::size_t>(a.to)].push_back(id);
    }

    if (!reaches_all(n, g.out_, g.arcs_, false)) throw Error("graph is not connected");
    if (directed && !reaches_all(n, g.in_, g.arcs_, true))
        throw Error("graph is not strongly connected");

    std::string canon = serialize_graph(g);
    g.fingerprint_ = fnv1a(canon.data(), canon.size());
    return g;
}

std::vector<NodeId> WeightedGraph::out_neighbors(NodeId v) const {
    std::vector<NodeId> nb;
    nb.reserve(out_[static_cast<std::size_t>(v)].size());
    for (int aid : out_[static_cast<std::size_t>(v)]) nb.push_back(arcs_[static_cast<std::size_t>(aid)].to);
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    return nb;
}

Instance make_instance(const WeightedGraph& g, NodeId start, NodeId dest, std::vector<NodeId> mandatory) {
    int n = g.node_count();
    if (start < 0 || start >= n || dest < 0 || dest >= n) throw Error("instance node out of range");
    if (start == dest) throw Error("instance start and destination must differ");
    for (NodeId m : mandatory)
        if (m < 0 || m >= n) throw Error("mandatory node out of range");
    std::sort(mandatory.begin(), mandatory.end());
    mandatory.erase(std::unique(mandatory.begin(), mandatory.end()), mandatory.end());
    // A mandatory start or destination is vacuous; normalize it away.
    std::erase(mandatory, start);
    std::erase(mandatory, dest);
    return Instance{start, dest, std::move(mandatory)};
}

std::uint64_t instance_hash(const Instance& inst) {
    std::uint64_t h = fnv1a(&inst.start, sizeof inst.start);
    h = fnv1a(&inst.dest, sizeof inst.dest, h);
    for (NodeId m : inst.mandatory) h = fnv1a(&m, sizeof m, h);
    return h;
}

Mat adjacency_matrix(const WeightedGraph& g) {
    Mat a(g.node_count(), g.node_count(), 0.0);
    for (const Arc& arc : g.arcs()) a(arc.from, arc.to) = arc.weight;
    return a;
}

Mat cost_matrix(const WeightedGraph& g) {
    Mat c(g.node_count(), g.node_count(), kInfCost);
    for (const Arc& arc : g.arcs()) c(arc.from, arc.to) = arc.weight;
    return c;
}

std::string format_weight(double w) {
    char buf[64];
    // Shortest representation that parses back to the same double.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, w);
        if (std::strtod(buf, nullptr) == w) return buf;
    }
    return buf;
}

std::string serialize_graph(const WeightedGraph& g) {
    std::ostringstream out;
    out << "graph " << g.node_count() << ' ' << (g.directed() ? "directed" : "undirected") << '\n';
    for (const Arc& e : g.edges())
        out << "edge " << e.from << ' ' << e.to << ' ' << format_weight(e.weight) << '\n';
    return out.str();
}

WeightedGraph parse_graph(std::istream& in) {
    std::string line;
    int n = -1;
    bool directed = false;
    std::vector<Arc> edges;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "graph") {
            std::string mode;
            if (!(ls >> n >> mode) || (mode != "directed" && mode != "undirected"))
                throw Error("graph file: bad header at line " + std::to_string(lineno));
            directed = (mode == "directed");
            header_seen = true;
        } else if (tag == "edge") {
            Arc e;
            if (!(ls >> e.from >> e.to >> e.weight))
                throw Error("graph file: bad edge at line " + std::to_string(lineno));
            edges.push_back(e);
        } else {
            throw Error("graph file: unknown directive '" + tag + "' at line " + std::to_string(lineno));
        }
    }
    if (!header_seen) throw Error("graph file: missing header");
    return WeightedGraph::build(n, directed, std::move(edges));
}

WeightedGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open graph file: " + path);
    return parse_graph(in);
}

void save_graph(const WeightedGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write graph file: " + path);
    out << serialize_graph(g);
}

std::string serialize_instance(const Instance& inst) {
    std::ostringstream out;
    out << "instance " << inst.start << ' ' << inst.dest << ' ';
    if (inst.mandatory.empty()) {
        out << '-';
    } else {
        for (std::size_t i = 0; i < inst.mandatory.size(); ++i) {
            if (i) out << ',';
            out << inst.mandatory[i];
        }
    }
    return out.str();
}

std::vector<Instance> parse_instances(std::istream& in, const WeightedGraph& g) {
    std::vector<Instance> list;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag, mset;
        NodeId s, d;
        if (!(ls >> tag >> s >> d >> mset) || tag != "instance")
            throw Error("instance file: bad line " + std::to_string(lineno));
        std::vector<NodeId> mandatory;
        if (mset != "-") {
            std::istringstream ms(mset);
            std::string tok;
            while (std::getline(ms, tok, ',')) {
                if (tok.empty()) throw Error("instance file: bad mandatory list at line " + std::to_string(lineno));
                mandatory.push_back(std::stoi(tok));
            }
        }
        list.push_back(make_instance(g, s, d, std::move(mandatory)));
    }
    return list;
}

std::vector<Instance> load_instances(const std::string& path, const WeightedGraph& g) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open instance file: " + path);
    return parse_instances(in, g);
}

void save_instances(const std::vector<Instance>& list, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write instance file: " + path);
    for (const Instance& inst : list) out << serialize_instance(inst) << '\n';
}

} // namespace wayplan

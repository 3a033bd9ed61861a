#include "bsync/control_graph.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "bsync/error.hpp"

namespace bsync {

std::string Node::id() const { return is_action() ? name : name + "@" + std::to_string(binder); }

namespace {

std::set<Node> sources_of(const ControlGraph& g) {
    std::set<Node> src = g.vertices;
    for (const auto& [u, v] : g.edges) src.erase(v);
    return src;
}

void add_prefix(const Node& x, ControlGraph& g, std::set<Node>& sources) {
    if (x.is_action() && g.vertices.count(x)) throw DuplicateNode("duplicate action '" + x.name + "'");
    for (const auto& s : sources) g.edges.emplace(x, s);
    g.vertices.insert(x);
    // x is a source unless it already had a predecessor (a reused barrier).
    bool has_pred = std::any_of(g.edges.begin(), g.edges.end(),
                                [&](const auto& e) { return e.second == x; });
    if (x.is_action()) has_pred = false;
    sources.clear();
    if (!has_pred) sources.insert(x);
}

}  // namespace

ControlGraph prefix_node(const Node& x, ControlGraph g) {
    auto sources = sources_of(g);
    add_prefix(x, g, sources);
    return g;
}

ControlGraph graph_union(ControlGraph a, const ControlGraph& b) {
    a.vertices.insert(b.vertices.begin(), b.vertices.end());
    a.edges.insert(b.edges.begin(), b.edges.end());
    return a;
}

ControlGraph eliminate_barrier(ControlGraph g, const Node& b) {
    if (!g.vertices.count(b)) return g;
    std::vector<Node> preds, succs;
    bool self_loop = false;
    for (auto it = g.edges.begin(); it != g.edges.end();) {
        const auto& [u, v] = *it;
        if (u == b && v == b) {
            self_loop = true;
            ++it;
        } else if (v == b) {
            preds.push_back(u);
            it = g.edges.erase(it);
        } else if (u == b) {
            succs.push_back(v);
            it = g.edges.erase(it);
        } else {
            ++it;
        }
    }
    for (const auto& a : preds)
        for (const auto& c : succs) g.edges.emplace(a, c);
    if (!self_loop) g.vertices.erase(b);
    return g;
}

ControlGraph eliminate_barrier(ControlGraph g, const std::string& name) {
    std::vector<Node> targets;
    for (const auto& v : g.vertices)
        if (v.is_barrier() && v.name == name) targets.push_back(v);
    for (const auto& t : targets) g = eliminate_barrier(std::move(g), t);
    return g;
}

namespace {

struct Builder {
    int next_binder = 0;
    std::vector<std::pair<std::string, int>> env;

    int lookup(const std::string& name) const {
        for (auto it = env.rbegin(); it != env.rend(); ++it)
            if (it->first == name) return it->second;
        throw UnboundBarrier(name);
    }

    // Returns the graph of p together with its vertices lacking predecessors.
    std::pair<ControlGraph, std::set<Node>> build(const Process& p) {
        std::vector<Node> chain;
        const Process* cur = &p;
        while (cur->kind() == Process::Kind::Act || cur->kind() == Process::Kind::Sync) {
            chain.push_back(cur->kind() == Process::Kind::Act ? Node::action(cur->name())
                                                               : Node::barrier(cur->name(), lookup(cur->name())));
            cur = &cur->cont();
        }
        ControlGraph g;
        std::set<Node> sources;
        switch (cur->kind()) {
            case Process::Kind::Par: {
                auto [ga, sa] = build(cur->left());
                auto [gb, sb] = build(cur->right());
                for (const auto& v : sa)
                    if (!gb.vertices.count(v) || sb.count(v)) sources.insert(v);
                for (const auto& v : sb)
                    if (!ga.vertices.count(v) || sa.count(v)) sources.insert(v);
                g = graph_union(std::move(ga), gb);
                break;
            }
            case Process::Kind::New: {
                const int id = next_binder++;
                env.emplace_back(cur->name(), id);
                auto inner = build(cur->cont()).first;
                env.pop_back();
                g = eliminate_barrier(std::move(inner), Node::barrier(cur->name(), id));
                sources = sources_of(g);
                break;
            }
            default:
                break;
        }
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) add_prefix(*it, g, sources);
        return {std::move(g), std::move(sources)};
    }
};

// Index view of an action-only graph.
struct Indexed {
    std::vector<Node> nodes;
    std::vector<Edge> edges;
};

Indexed index_graph(const ControlGraph& g) {
    Indexed ix;
    ix.nodes.assign(g.vertices.begin(), g.vertices.end());
    std::map<Node, std::size_t> pos;
    for (std::size_t i = 0; i < ix.nodes.size(); ++i) pos.emplace(ix.nodes[i], i);
    for (const auto& [u, v] : g.edges) ix.edges.emplace_back(pos.at(u), pos.at(v));
    return ix;
}

bool has_cycle(const Indexed& ix) {
    const std::size_t n = ix.nodes.size();
    std::vector<std::size_t> indeg(n, 0);
    std::vector<std::vector<std::size_t>> succ(n);
    for (auto [u, v] : ix.edges) {
        succ[u].push_back(v);
        ++indeg[v];
    }
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push_back(v);
    std::size_t seen = 0;
    while (!ready.empty()) {
        auto u = ready.back();
        ready.pop_back();
        ++seen;
        for (auto v : succ[u])
            if (--indeg[v] == 0) ready.push_back(v);
    }
    return seen != n;
}

}  // namespace

bool has_deadlock(const ControlGraph& g) {
    for (const auto& v : g.vertices)
        if (v.is_barrier()) return true;
    return has_cycle(index_graph(g));
}

std::vector<std::string> residual_barriers(const ControlGraph& g) {
    std::vector<std::string> out;
    for (const auto& v : g.vertices)
        if (v.is_barrier()) out.push_back(v.name);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ControlGraph build_ctg(const Process& p) {
    Builder b;
    ControlGraph g = b.build(p).first;
    if (has_deadlock(g)) return g;
    // Nested barriers can leave a transitive edge behind; keep only the covering.
    auto ix = index_graph(g);
    auto reduced = transitive_reduction(ix.nodes.size(), ix.edges);
    g.edges.clear();
    for (auto [u, v] : reduced) g.edges.emplace(ix.nodes[u], ix.nodes[v]);
    return g;
}

Poset to_poset(const ControlGraph& g) {
    if (has_deadlock(g)) {
        auto residual = residual_barriers(g);
        std::string msg = "control graph has a cycle";
        if (!residual.empty()) {
            msg = "control graph keeps residual barrier";
            for (const auto& r : residual) msg += " " + r;
        }
        throw DeadlockedGraph(msg);
    }
    std::vector<std::string> elements;
    for (const auto& v : g.vertices) elements.push_back(v.name);
    std::vector<std::pair<std::string, std::string>> cover;
    for (const auto& [u, v] : g.edges) cover.emplace_back(u.name, v.name);
    return Poset::from_covering(std::move(elements), cover);
}

ControlGraph from_poset(const Poset& p) {
    ControlGraph g;
    for (const auto& e : p.elements()) g.vertices.insert(Node::action(e));
    for (const auto& [u, v] : p.covering_labels()) g.edges.emplace(Node::action(u), Node::action(v));
    return g;
}

Process encode_poset(const Poset& u) {
    if (u.empty()) return Process::stop();
    auto barrier = [&](std::size_t i) { return "B_" + u.elements()[i]; };
    Process all;
    for (std::size_t i = 0; i < u.size(); ++i) {
        Process after;
        const auto& succ = u.successors(i);
        for (std::size_t k = 0; k < succ.size(); ++k) {
            Process join = Process::sync(barrier(succ[k]), Process::stop());
            after = k == 0 ? join : Process::par(std::move(after), std::move(join));
        }
        Process thread = Process::sync(barrier(i), Process::act(u.elements()[i], std::move(after)));
        all = i == 0 ? thread : Process::par(std::move(all), std::move(thread));
    }
    for (std::size_t i = u.size(); i-- > 0;) all = Process::nu(barrier(i), std::move(all));
    return all;
}

std::string to_dot(const ControlGraph& g) {
    std::ostringstream os;
    os << "digraph ctg {\n";
    for (const auto& v : g.vertices) {
        if (v.is_action())
            os << "  \"" << v.id() << "\" [shape=ellipse];\n";
        else
            os << "  \"" << v.id() << "\" [label=\"" << v.name << "\", shape=box];\n";
    }
    for (const auto& [u, v] : g.edges) os << "  \"" << u.id() << "\" -> \"" << v.id() << "\";\n";
    os << "}\n";
    return os.str();
}

std::string to_edge_list(const ControlGraph& g) {
    std::set<Node> touched;
    for (const auto& [u, v] : g.edges) {
        touched.insert(u);
        touched.insert(v);
    }
    std::string out;
    for (const auto& v : g.vertices)
        if (!touched.count(v)) out += v.id() + "\n";
    for (const auto& [u, v] : g.edges) out += u.id() + " -> " + v.id() + "\n";
    return out;
}

}  // namespace bsync

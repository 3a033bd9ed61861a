#pragma once

#include <compare>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bsync/poset.hpp"
#include "bsync/process.hpp"

namespace bsync {

/// Vertex of a control graph: an action, or a barrier tagged with the
/// binder that introduced it so that shadowed names stay distinct.
struct Node {
    enum class Kind { Action, Barrier };

    Kind kind = Kind::Action;
    std::string name;
    int binder = 0;

    static Node action(std::string label) { return {Kind::Action, std::move(label), 0}; }
    static Node barrier(std::string name, int binder = 0) { return {Kind::Barrier, std::move(name), binder}; }

    bool is_action() const { return kind == Kind::Action; }
    bool is_barrier() const { return kind == Kind::Barrier; }
    /// "a" for actions, "B@3" for barriers.
    std::string id() const;

    auto operator<=>(const Node&) const = default;
};

struct ControlGraph {
    std::set<Node> vertices;
    std::set<std::pair<Node, Node>> edges;

    bool operator==(const ControlGraph&) const = default;
};

/// x ~> g: adds x with an edge to every vertex of g without predecessors.
/// Throws DuplicateNode if the action x is already present; a barrier
/// already present is reused.
ControlGraph prefix_node(const Node& x, ControlGraph g);

ControlGraph graph_union(ControlGraph a, const ControlGraph& b);

/// Removes barrier vertex b, bridging each predecessor to each successor.
/// A self-loop on b survives and keeps b in the graph.
ControlGraph eliminate_barrier(ControlGraph g, const Node& b);
/// Eliminates every barrier vertex called `name`.
ControlGraph eliminate_barrier(ControlGraph g, const std::string& name);

/// Syntactic construction. For deadlock-free terms the result is transitively
/// reduced; otherwise residual barriers or cycles are left in place.
ControlGraph build_ctg(const Process& p);

/// True iff the graph has a cycle (self-loops included) or a barrier vertex.
bool has_deadlock(const ControlGraph& g);

/// Residual barrier names, for diagnostics.
std::vector<std::string> residual_barriers(const ControlGraph& g);

/// Throws DeadlockedGraph or NotTransitivelyReduced.
Poset to_poset(const ControlGraph& g);
ControlGraph from_poset(const Poset& p);

/// A process whose control graph is the covering DAG of `u`.
Process encode_poset(const Poset& u);

std::string to_dot(const ControlGraph& g);
/// One `u -> v` line per edge, isolated vertices alone on a line.
std::string to_edge_list(const ControlGraph& g);

}  // namespace bsync

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "bsync/control_graph.hpp"
#include "bsync/error.hpp"
#include "bsync/polynomial.hpp"
#include "bsync/poset.hpp"

namespace bsync {

/// B, I, T remove a node of the matching degrees; S orders an incomparable
/// pair (x before y); Free removes an isolated node with a 0..1 integral.
enum class Rule { B, I, T, S, Free };

struct DecompStep {
    Rule rule;
    std::string x;
    std::string y;  ///< S only

    std::string to_string() const;
    bool operator==(const DecompStep&) const = default;
};

/// One integration of a leaf: `var` runs from lo to hi. integrand is the part
/// of the running integrand that mentions var; the remaining factors are
/// constant in var, so it fixes var's conditional density up to a scale.
struct Integration {
    std::string var;
    Bound lo, hi;
    std::shared_ptr<const Polynomial> integrand;
};

struct FormulaTree {
    Rational volume;  ///< leaf volume, or the sum over both branches

    // leaf
    std::vector<DecompStep> trace;   ///< every rule applied on the way here
    std::vector<Integration> steps;  ///< innermost first

    // split: left orders x before y, right orders y before x
    std::string x, y;
    std::shared_ptr<const FormulaTree> left, right;

    bool is_leaf() const { return !left; }
};

struct Strategy {
    enum class Kind { Default, Random };
    Kind kind = Kind::Default;
    std::uint64_t seed = 0;
    /// Random only: chance of splitting even while B/I/T still applies.
    double split_probability = 0.0;

    static Strategy standard() { return {}; }
    static Strategy random(std::uint64_t seed, double split_probability = 0.0) {
        return {Kind::Random, seed, split_probability};
    }
};

struct Decomposition {
    Poset poset;
    std::shared_ptr<const FormulaTree> root;

    const Rational& volume() const { return root->volume; }
    /// n! * volume. Throws NonIntegerVolume.
    BigInt count() const;
    std::vector<const FormulaTree*> leaves() const;
};

/// Candidate B/I/T steps in element order; with include_splits, every
/// incomparable pair of non-isolated elements as well.
std::vector<DecompStep> applicable_rules(const Poset& p, bool include_splits = false);
std::vector<DecompStep> applicable_rules(const ControlGraph& g, bool include_splits = false);

Decomposition decompose(const Poset& p, const Strategy& strategy = {}, const Deadline& deadline = {});
Decomposition decompose(const ControlGraph& g, const Strategy& strategy = {}, const Deadline& deadline = {});

BigInt count_executions(const Poset& p, const Deadline& deadline = {});
BigInt count_executions(const ControlGraph& g, const Deadline& deadline = {});

/// B/I/T alone reduce the graph to nothing or to isolated vertices.
bool is_bit_decomposable(const Poset& p);
bool is_bit_decomposable(const ControlGraph& g);

/// Audit format: elements, covering, tree with rule traces, bounds and leaf
/// volumes as "num/den".
std::string decomposition_to_json(const Decomposition& d, int indent = 2);
/// Rebuilds the integrands by replaying each leaf; checks stored volumes.
Decomposition decomposition_from_json(std::string_view text);

}  // namespace bsync

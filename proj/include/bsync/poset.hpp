#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bsync/process.hpp"

namespace bsync {

using Edge = std::pair<std::size_t, std::size_t>;

/// Finite partial order given by its covering relation.
///
/// Elements are kept sorted by label; indices below refer to that order.
class Poset {
public:
    Poset() = default;

    /// Builds the order generated by `relations` (any acyclic relation; it is
    /// transitively reduced here). Throws CyclicInput.
    static Poset from_relations(std::vector<std::string> elements,
                                const std::vector<std::pair<std::string, std::string>>& relations);

    /// Like from_relations but insists the input already is a covering
    /// relation. Throws CyclicInput or NotTransitivelyReduced.
    static Poset from_covering(std::vector<std::string> elements,
                               const std::vector<std::pair<std::string, std::string>>& covering);

    std::size_t size() const { return elements_.size(); }
    bool empty() const { return elements_.empty(); }
    const std::vector<std::string>& elements() const { return elements_; }
    const std::vector<Edge>& covering() const { return covering_; }
    std::vector<std::pair<std::string, std::string>> covering_labels() const;

    /// Throws std::out_of_range for unknown labels.
    std::size_t index_of(const std::string& label) const;
    const std::vector<std::size_t>& successors(std::size_t i) const { return succ_[i]; }
    const std::vector<std::size_t>& predecessors(std::size_t i) const { return pred_[i]; }

    /// Strict order test (transitive closure of the covering).
    bool less(std::size_t i, std::size_t j) const;

    friend bool operator==(const Poset& a, const Poset& b) {
        return a.elements_ == b.elements_ && a.covering_ == b.covering_;
    }

private:
    void index();

    std::vector<std::string> elements_;
    std::vector<Edge> covering_;
    std::vector<std::vector<std::size_t>> succ_, pred_;
    std::vector<std::vector<std::uint64_t>> reach_;
};

/// Reduces an edge set over vertices 0..n-1. Throws CyclicInput on cycles.
std::vector<Edge> transitive_reduction(std::size_t n, const std::vector<Edge>& edges);

/// Edge-list text: one `u -> v` per line, a lone identifier declares an
/// isolated element, `#` starts a comment. Relations need not be reduced.
Poset parse_poset(std::string_view text);
std::string to_edge_list(const Poset& p);

bool is_linear_extension(const Poset& p, const Execution& e);

}  // namespace bsync

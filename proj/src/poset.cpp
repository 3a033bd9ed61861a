#include "bsync/poset.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bsync/error.hpp"

namespace bsync {

namespace {

using Bits = std::vector<std::uint64_t>;

bool test(const Bits& b, std::size_t i) { return (b[i >> 6] >> (i & 63)) & 1u; }
void set_bit(Bits& b, std::size_t i) { b[i >> 6] |= std::uint64_t{1} << (i & 63); }

// Kahn order; throws CyclicInput if the graph is not a DAG.
std::vector<std::size_t> topo_order(std::size_t n, const std::vector<std::vector<std::size_t>>& succ) {
    std::vector<std::size_t> indeg(n, 0), order;
    for (const auto& s : succ)
        for (auto v : s) ++indeg[v];
    std::vector<std::size_t> ready;
    for (std::size_t v = n; v-- > 0;)
        if (indeg[v] == 0) ready.push_back(v);
    while (!ready.empty()) {
        auto u = ready.back();
        ready.pop_back();
        order.push_back(u);
        for (auto v : succ[u])
            if (--indeg[v] == 0) ready.push_back(v);
    }
    if (order.size() != n) throw CyclicInput("relation contains a cycle");
    return order;
}

// reach[u] holds every vertex strictly above u.
std::vector<Bits> closure(std::size_t n, const std::vector<std::vector<std::size_t>>& succ) {
    auto order = topo_order(n, succ);
    const std::size_t words = (n + 63) / 64;
    std::vector<Bits> reach(n, Bits(words, 0));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        for (auto v : succ[*it]) {
            set_bit(reach[*it], v);
            for (std::size_t w = 0; w < words; ++w) reach[*it][w] |= reach[v][w];
        }
    }
    return reach;
}

std::vector<std::vector<std::size_t>> adjacency(std::size_t n, const std::vector<Edge>& edges) {
    std::vector<std::vector<std::size_t>> succ(n);
    for (auto [u, v] : edges) {
        if (u == v) throw CyclicInput("relation contains a self-loop");
        succ[u].push_back(v);
    }
    for (auto& s : succ) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return succ;
}

}  // namespace

std::vector<Edge> transitive_reduction(std::size_t n, const std::vector<Edge>& edges) {
    auto succ = adjacency(n, edges);
    auto reach = closure(n, succ);
    std::vector<Edge> out;
    for (std::size_t u = 0; u < n; ++u) {
        for (auto v : succ[u]) {
            bool implied = false;
            for (auto w : succ[u]) {
                if (w != v && test(reach[w], v)) {
                    implied = true;
                    break;
                }
            }
            if (!implied) out.emplace_back(u, v);
        }
    }
    return out;
}

namespace {

std::vector<Edge> resolve(const std::vector<std::string>& elements,
                          const std::vector<std::pair<std::string, std::string>>& relations) {
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < elements.size(); ++i) idx.emplace(elements[i], i);
    std::vector<Edge> edges;
    for (const auto& [a, b] : relations) {
        auto ia = idx.find(a), ib = idx.find(b);
        if (ia == idx.end() || ib == idx.end())
            throw std::invalid_argument("relation mentions unknown element '" + (ia == idx.end() ? a : b) + "'");
        edges.emplace_back(ia->second, ib->second);
    }
    return edges;
}

std::vector<std::string> normalize(std::vector<std::string> elements) {
    std::sort(elements.begin(), elements.end());
    if (std::adjacent_find(elements.begin(), elements.end()) != elements.end())
        throw DuplicateNode("duplicate poset element '" +
                            *std::adjacent_find(elements.begin(), elements.end()) + "'");
    return elements;
}

}  // namespace

Poset Poset::from_relations(std::vector<std::string> elements,
                            const std::vector<std::pair<std::string, std::string>>& relations) {
    Poset p;
    p.elements_ = normalize(std::move(elements));
    p.covering_ = transitive_reduction(p.elements_.size(), resolve(p.elements_, relations));
    std::sort(p.covering_.begin(), p.covering_.end());
    p.index();
    return p;
}

Poset Poset::from_covering(std::vector<std::string> elements,
                           const std::vector<std::pair<std::string, std::string>>& covering) {
    Poset p;
    p.elements_ = normalize(std::move(elements));
    auto edges = resolve(p.elements_, covering);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    auto reduced = transitive_reduction(p.elements_.size(), edges);
    std::sort(reduced.begin(), reduced.end());
    if (reduced != edges) throw NotTransitivelyReduced("covering relation contains a transitive edge");
    p.covering_ = std::move(edges);
    p.index();
    return p;
}

void Poset::index() {
    const std::size_t n = elements_.size();
    succ_.assign(n, {});
    pred_.assign(n, {});
    for (auto [u, v] : covering_) {
        succ_[u].push_back(v);
        pred_[v].push_back(u);
    }
    reach_ = closure(n, succ_);
}

std::vector<std::pair<std::string, std::string>> Poset::covering_labels() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(covering_.size());
    for (auto [u, v] : covering_) out.emplace_back(elements_[u], elements_[v]);
    return out;
}

std::size_t Poset::index_of(const std::string& label) const {
    auto it = std::lower_bound(elements_.begin(), elements_.end(), label);
    if (it == elements_.end() || *it != label) throw std::out_of_range("unknown element '" + label + "'");
    return static_cast<std::size_t>(it - elements_.begin());
}

bool Poset::less(std::size_t i, std::size_t j) const { return test(reach_[i], j); }

Poset parse_poset(std::string_view text) {
    std::set<std::string> elements;
    std::vector<std::pair<std::string, std::string>> relations;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0, offset = 0;
    auto is_ident = [](const std::string& s) {
        if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
        return std::all_of(s.begin(), s.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#';
        });
    };
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t line_start = offset;
        offset += line.size() + 1;
        if (auto hash = line.find(" #"); hash != std::string::npos) line.erase(hash);
        if (!line.empty() && line[0] == '#') continue;
        std::istringstream words(line);
        std::vector<std::string> tok;
        for (std::string w; words >> w;) tok.push_back(w);
        if (tok.empty()) continue;
        if (tok.size() == 1 && is_ident(tok[0])) {
            elements.insert(tok[0]);
        } else if (tok.size() == 3 && tok[1] == "->" && is_ident(tok[0]) && is_ident(tok[2])) {
            elements.insert(tok[0]);
            elements.insert(tok[2]);
            relations.emplace_back(tok[0], tok[2]);
        } else {
            throw SyntaxError(line_start, "`u -> v` or a single element name on line " + std::to_string(lineno));
        }
    }
    return Poset::from_relations({elements.begin(), elements.end()}, relations);
}

std::string to_edge_list(const Poset& p) {
    std::string out;
    std::vector<bool> touched(p.size(), false);
    for (auto [u, v] : p.covering()) touched[u] = touched[v] = true;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!touched[i]) out += p.elements()[i] + "\n";
    for (auto [u, v] : p.covering()) out += p.elements()[u] + " -> " + p.elements()[v] + "\n";
    return out;
}

bool is_linear_extension(const Poset& p, const Execution& e) {
    if (e.size() != p.size()) return false;
    std::vector<std::size_t> pos(p.size(), p.size());
    for (std::size_t k = 0; k < e.size(); ++k) {
        auto it = std::lower_bound(p.elements().begin(), p.elements().end(), e[k]);
        if (it == p.elements().end() || *it != e[k]) return false;
        auto i = static_cast<std::size_t>(it - p.elements().begin());
        if (pos[i] != p.size()) return false;
        pos[i] = k;
    }
    for (auto [u, v] : p.covering())
        if (pos[u] >= pos[v]) return false;
    return true;
}

}  // namespace bsync

#include "bsync/oracles.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include <boost/math/special_functions/gamma.hpp>

namespace bsync {

std::vector<Execution> brute_force_extensions(const Poset& p, const BruteForceLimits& limits,
                                              const Deadline& deadline) {
    const std::size_t n = p.size();
    if (n > limits.max_vertices)
        throw TooLarge(std::to_string(n) + " elements exceed the brute-force cap of " +
                       std::to_string(limits.max_vertices));
    std::vector<std::size_t> missing(n);
    for (std::size_t i = 0; i < n; ++i) missing[i] = p.predecessors(i).size();
    std::vector<bool> used(n, false);
    std::vector<std::size_t> prefix;
    std::vector<Execution> out;
    std::size_t ticks = 0;
    // Elements are label-sorted, so trying candidates by index yields lexicographic order.
    auto rec = [&](auto&& self) -> void {
        if ((++ticks & 0xfff) == 0) deadline.check();
        if (prefix.size() == n) {
            if (out.size() >= limits.max_extensions)
                throw TooLarge("more than " + std::to_string(limits.max_extensions) + " extensions");
            Execution e;
            e.reserve(n);
            for (auto i : prefix) e.push_back(p.elements()[i]);
            out.push_back(std::move(e));
            return;
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (used[v] || missing[v] != 0) continue;
            used[v] = true;
            prefix.push_back(v);
            for (auto s : p.successors(v)) --missing[s];
            self(self);
            for (auto s : p.successors(v)) ++missing[s];
            prefix.pop_back();
            used[v] = false;
        }
    };
    rec(rec);
    return out;
}

std::vector<Execution> brute_force_extensions(const ControlGraph& g, const BruteForceLimits& limits) {
    return brute_force_extensions(to_poset(g), limits);
}

BigInt brute_force_count(const Poset& p, std::size_t max_states, const Deadline& deadline) {
    const std::size_t n = p.size();
    const std::size_t words = (n + 63) / 64;
    using Key = std::vector<std::uint64_t>;
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::size_t h = 0x9e3779b97f4a7c15ull;
            for (auto w : k) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            return h;
        }
    };
    std::unordered_map<Key, BigInt, KeyHash> memo;
    auto has = [](const Key& k, std::size_t i) { return (k[i >> 6] >> (i & 63)) & 1u; };
    // Number of ways to finish once the down-set `done` has been executed.
    auto rec = [&](auto&& self, Key& done, std::size_t placed) -> BigInt {
        if (placed == n) return 1;
        if (auto it = memo.find(done); it != memo.end()) return it->second;
        if (memo.size() >= max_states) throw TooLarge("more than " + std::to_string(max_states) + " down-sets");
        if ((memo.size() & 0xfff) == 0) deadline.check();
        BigInt total = 0;
        for (std::size_t v = 0; v < n; ++v) {
            if (has(done, v)) continue;
            const auto& pred = p.predecessors(v);
            if (!std::all_of(pred.begin(), pred.end(), [&](std::size_t u) { return has(done, u); })) continue;
            done[v >> 6] |= std::uint64_t{1} << (v & 63);
            total += self(self, done, placed + 1);
            done[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
        }
        memo.emplace(done, total);
        return total;
    };
    Key start(words, 0);
    return rec(rec, start, 0);
}

std::vector<Execution> brute_force_sampler(const Poset& p, std::size_t k, std::uint64_t seed,
                                           const BruteForceLimits& limits) {
    auto all = brute_force_extensions(p, limits);
    RandomSource rng(seed);
    std::vector<Execution> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(all[rng.below(all.size())]);
    return out;
}

std::vector<Execution> mcmc_sampler(const Poset& p, std::size_t k, std::size_t burn_in, std::size_t steps_between,
                                    std::uint64_t seed) {
    const std::size_t n = p.size();
    RandomSource rng(seed);
    // Start from the lexicographically first topological sort.
    std::vector<std::size_t> order, missing(n);
    for (std::size_t i = 0; i < n; ++i) missing[i] = p.predecessors(i).size();
    std::vector<bool> used(n, false);
    while (order.size() < n) {
        std::size_t v = 0;
        while (used[v] || missing[v]) ++v;
        used[v] = true;
        order.push_back(v);
        for (auto s : p.successors(v)) --missing[s];
    }
    auto step = [&] {
        if (n < 2) return;
        const std::size_t i = rng.below(n - 1);
        // Swapping neighbours is legal iff the left one does not cover the right one.
        const auto& succ = p.successors(order[i]);
        if (std::find(succ.begin(), succ.end(), order[i + 1]) == succ.end()) std::swap(order[i], order[i + 1]);
    };
    for (std::size_t s = 0; s < burn_in; ++s) step();
    std::vector<Execution> out;
    out.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        if (j > 0)
            for (std::size_t s = 0; s < steps_between; ++s) step();
        Execution e;
        e.reserve(n);
        for (auto v : order) e.push_back(p.elements()[v]);
        out.push_back(std::move(e));
    }
    return out;
}

ChiSquare chi_square_uniformity(const std::vector<Execution>& samples, const std::vector<Execution>& support) {
    std::map<Execution, std::size_t> counts;
    for (const auto& s : support) counts.emplace(s, 0);
    for (const auto& s : samples) {
        auto it = counts.find(s);
        if (it == counts.end()) {
            std::string text;
            for (const auto& a : s) text += (text.empty() ? "" : " ") + a;
            throw UnknownOutcome("sample outside the support: " + text);
        }
        ++it->second;
    }
    ChiSquare r;
    if (counts.empty() || samples.empty()) return r;
    const double expected = static_cast<double>(samples.size()) / static_cast<double>(counts.size());
    for (const auto& [e, c] : counts) {
        const double d = static_cast<double>(c) - expected;
        r.statistic += d * d / expected;
    }
    const double df = static_cast<double>(counts.size()) - 1;
    r.p_value = df > 0 ? boost::math::gamma_q(df / 2, r.statistic / 2) : 1.0;
    return r;
}

}  // namespace bsync

#include "corpus.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bsync/control_graph.hpp"

#ifndef BSYNC_DATA_DIR
#define BSYNC_DATA_DIR "data"
#endif

namespace bsync::testing {

std::string data_path(const std::string& name) { return std::string(BSYNC_DATA_DIR) + "/" + name; }

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

const char* const kBarriers[] = {"B", "C"};

// Shapes with exactly n syntax nodes and at most `acts` actions.
struct Shapes {
    std::size_t max_actions;
    std::vector<std::vector<std::vector<Process>>> memo;  // [nodes][actions]

    const std::vector<Process>& get(std::size_t nodes, std::size_t actions) {
        if (memo.size() <= nodes) memo.resize(nodes + 1);
        auto& row = memo[nodes];
        if (row.empty()) {
            row.resize(max_actions + 1);
            fill(nodes, row);
        }
        return row[actions];
    }

    void fill(std::size_t nodes, std::vector<std::vector<Process>>& row) {
        if (nodes == 1) {
            row[0].push_back(Process::stop());
            return;
        }
        for (std::size_t a = 0; a <= max_actions; ++a) {
            for (const auto& c : get(nodes - 1, a)) {
                for (const char* b : kBarriers) {
                    row[a].push_back(Process::sync(b, c));
                    row[a].push_back(Process::nu(b, c));
                }
                if (a + 1 <= max_actions) row[a + 1].push_back(Process::act("_", c));
            }
        }
        for (std::size_t l = 1; l + 2 <= nodes; ++l)
            for (std::size_t al = 0; al <= max_actions; ++al)
                for (std::size_t ar = 0; al + ar <= max_actions; ++ar)
                    for (const auto& x : get(l, al))
                        for (const auto& y : get(nodes - 1 - l, ar)) row[al + ar].push_back(Process::par(x, y));
    }
};

// Fresh labels a, b, ... in left-to-right order; free barriers are bound at the top.
Process finish(const Process& p) {
    std::size_t next = 0;
    std::set<std::string> free;
    std::function<Process(const Process&, std::set<std::string>&)> go = [&](const Process& q,
                                                                          std::set<std::string>& bound) -> Process {
        switch (q.kind()) {
            case Process::Kind::Stop: return q;
            case Process::Kind::Act: {
                std::string label(1, static_cast<char>('a' + next++));
                return Process::act(label, go(q.cont(), bound));
            }
            case Process::Kind::Sync:
                if (!bound.count(q.name())) free.insert(q.name());
                return Process::sync(q.name(), go(q.cont(), bound));
            case Process::Kind::New: {
                const bool had = bound.count(q.name()) > 0;
                bound.insert(q.name());
                Process body = go(q.cont(), bound);
                if (!had) bound.erase(q.name());
                return Process::nu(q.name(), body);
            }
            case Process::Kind::Par: {
                Process l = go(q.left(), bound);
                return Process::par(l, go(q.right(), bound));
            }
        }
        return q;
    };
    std::set<std::string> bound;
    Process body = go(p, bound);
    for (auto it = free.rbegin(); it != free.rend(); ++it) body = Process::nu(*it, body);
    return body;
}

}  // namespace

std::vector<Process> exhaustive_terms(std::size_t max_actions, std::size_t max_nodes) {
    Shapes shapes{max_actions, {}};
    std::vector<Process> out;
    for (std::size_t n = 1; n <= max_nodes; ++n)
        for (std::size_t a = 0; a <= max_actions; ++a)
            for (const auto& s : shapes.get(n, a)) out.push_back(finish(s));
    return out;
}

Process random_term(std::size_t actions, std::size_t barriers, RandomSource& rng) {
    std::size_t next = 0;
    std::size_t fresh = 0;
    std::vector<std::string> scope;
    for (std::size_t i = 0; i < barriers; ++i) scope.push_back("B" + std::to_string(fresh++));
    auto coin = [&](double p) { return rng.uniform_open() < p; };
    std::function<Process(std::size_t)> go = [&](std::size_t k) -> Process {
        Process body;
        if (k >= 2 && coin(0.35)) {
            std::size_t left = 1 + rng.below(static_cast<std::uint64_t>(k - 1));
            Process l = go(left);
            body = Process::par(l, go(k - left));
        } else if (k >= 1 && coin(0.08)) {
            std::string b = "B" + std::to_string(fresh++);
            scope.push_back(b);
            body = go(k);
            scope.pop_back();
            body = Process::nu(b, body);
        } else if (k >= 1) {
            std::string label = "a" + std::to_string(next++);
            body = Process::act(label, go(k - 1));
        } else if (coin(0.3)) {
            body = Process::par(Process::stop(), Process::stop());
        }
        if (!scope.empty() && coin(0.3)) body = Process::sync(scope[rng.below(scope.size())], body);
        return body;
    };
    Process body = go(actions);
    for (std::size_t i = barriers; i-- > 0;) body = Process::nu("B" + std::to_string(i), body);
    return body;
}

Process random_deadlock_free(std::size_t max_actions, RandomSource& rng) {
    for (;;) {
        std::size_t k = 1 + rng.below(max_actions);
        Process p = random_term(k, 1 + rng.below(3), rng);
        if (!has_deadlock(build_ctg(p))) return p;
    }
}

Poset random_poset(std::size_t n, double density, RandomSource& rng) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
    std::vector<std::pair<std::string, std::string>> rel;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform_open() < density) rel.emplace_back(names[i], names[j]);
    return Poset::from_relations(names, rel);
}

Poset eight() { return parse_poset(read_file(data_path("eight.poset"))); }
Poset crown() { return parse_poset(read_file(data_path("crown.poset"))); }
Poset three() { return parse_poset(read_file(data_path("three.poset"))); }

}  // namespace bsync::testing

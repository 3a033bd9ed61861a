#include "bsync/bits.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "json.hpp"

namespace bsync {

namespace {

const char* rule_name(Rule r) {
    switch (r) {
        case Rule::B: return "B";
        case Rule::I: return "I";
        case Rule::T: return "T";
        case Rule::S: return "S";
        case Rule::Free: return "F";
    }
    return "?";
}

Rule rule_from(const std::string& s) {
    if (s == "B") return Rule::B;
    if (s == "I") return Rule::I;
    if (s == "T") return Rule::T;
    if (s == "S") return Rule::S;
    if (s == "F") return Rule::Free;
    throw std::invalid_argument("unknown rule '" + s + "'");
}

// Mutable DAG over poset indices; removed vertices keep their slot.
struct Graph {
    std::vector<bool> alive;
    std::vector<std::set<std::size_t>> succ, pred;
    std::size_t remaining = 0;

    explicit Graph(const Poset& p) : alive(p.size(), true), succ(p.size()), pred(p.size()), remaining(p.size()) {
        for (auto [u, v] : p.covering()) {
            succ[u].insert(v);
            pred[v].insert(u);
        }
    }

    void remove(std::size_t v) {
        for (auto s : succ[v]) pred[s].erase(v);
        for (auto q : pred[v]) succ[q].erase(v);
        succ[v].clear();
        pred[v].clear();
        alive[v] = false;
        --remaining;
    }

    bool reaches(std::size_t from, std::size_t to) const {
        std::vector<bool> seen(alive.size(), false);
        std::vector<std::size_t> todo{from};
        while (!todo.empty()) {
            auto u = todo.back();
            todo.pop_back();
            for (auto s : succ[u]) {
                if (s == to) return true;
                if (!seen[s]) {
                    seen[s] = true;
                    todo.push_back(s);
                }
            }
        }
        return false;
    }

    std::vector<bool> reach_set(std::size_t from) const {
        std::vector<bool> seen(alive.size(), false);
        std::vector<std::size_t> todo{from};
        while (!todo.empty()) {
            auto u = todo.back();
            todo.pop_back();
            for (auto s : succ[u])
                if (!seen[s]) {
                    seen[s] = true;
                    todo.push_back(s);
                }
        }
        return seen;
    }

    bool isolated(std::size_t v) const { return succ[v].empty() && pred[v].empty(); }

    // Remove the I-node y, bridging x -> z unless another path already orders them.
    void bypass(std::size_t y) {
        const std::size_t x = *pred[y].begin(), z = *succ[y].begin();
        remove(y);
        if (!reaches(x, z)) {
            succ[x].insert(z);
            pred[z].insert(x);
        }
    }

    // Orders x before y and drops edges that became transitive.
    void order(std::size_t x, std::size_t y) {
        const std::size_t n = alive.size();
        std::vector<bool> down(n, false);  // x and everything below it
        for (std::size_t a = 0; a < n; ++a)
            if (alive[a] && (a == x || reaches(a, x))) down[a] = true;
        auto up = reach_set(y);
        up[y] = true;
        std::vector<Edge> drop;
        for (std::size_t a = 0; a < n; ++a) {
            if (!down[a]) continue;
            for (auto b : succ[a])
                if (up[b]) drop.emplace_back(a, b);
        }
        for (auto [a, b] : drop) {
            succ[a].erase(b);
            pred[b].erase(a);
        }
        succ[x].insert(y);
        pred[y].insert(x);
    }

    std::vector<Edge> incomparable_pairs() const {
        const std::size_t n = alive.size();
        std::vector<std::vector<bool>> reach(n);
        for (std::size_t v = 0; v < n; ++v)
            if (alive[v]) reach[v] = reach_set(v);
        std::vector<Edge> out;
        for (std::size_t a = 0; a < n; ++a) {
            if (!alive[a]) continue;
            for (std::size_t b = a + 1; b < n; ++b)
                if (alive[b] && !reach[a][b] && !reach[b][a]) out.emplace_back(a, b);
        }
        return out;
    }

    std::size_t shared_neighbours(std::size_t a, std::size_t b) const {
        std::set<std::size_t> na(succ[a].begin(), succ[a].end()), nb(succ[b].begin(), succ[b].end());
        na.insert(pred[a].begin(), pred[a].end());
        nb.insert(pred[b].begin(), pred[b].end());
        std::size_t k = 0;
        for (auto v : na) k += nb.count(v);
        return k;
    }
};

// The integrand as a product of polynomial factors and a scalar. Integrating
// out v only touches the factors that mention v, so independent branches
// never get multiplied out against each other.
class Factors {
public:
    Integration integrate_out(const std::string& v, Bound lo, Bound hi) {
        Polynomial part = Polynomial::constant(1);
        std::vector<Factor> rest;
        for (auto& f : factors_) {
            if (f.vars.count(v))
                part = part * *f.poly;
            else
                rest.push_back(std::move(f));
        }
        factors_ = std::move(rest);
        auto integrand = std::make_shared<const Polynomial>(std::move(part));
        Polynomial result = integrate(*integrand, v, lo, hi);
        if (result.is_constant()) {
            scalar_ *= result.constant_term();
        } else {
            auto vars = result.variables();
            factors_.push_back({std::make_shared<const Polynomial>(std::move(result)), std::move(vars)});
        }
        return {v, std::move(lo), std::move(hi), std::move(integrand)};
    }

    bool mentions(const std::string& v) const {
        return std::any_of(factors_.begin(), factors_.end(), [&](const Factor& f) { return f.vars.count(v) > 0; });
    }

    Rational value() const {
        if (!factors_.empty()) throw NumericalFailure("integrand still depends on a variable");
        return scalar_;
    }

private:
    struct Factor {
        std::shared_ptr<const Polynomial> poly;
        std::set<std::string> vars;
    };
    std::vector<Factor> factors_;
    Rational scalar_ = 1;
};

struct Candidate {
    Rule rule;
    std::size_t v;
};

// Free (only for the last vertex), then B/T, then I; each group in element order.
// Isolated vertices among others are left to the split rule.
std::vector<Candidate> candidates(const Graph& g) {
    std::vector<Candidate> free, bt, mid;
    for (std::size_t v = 0; v < g.alive.size(); ++v) {
        if (!g.alive[v]) continue;
        const auto in = g.pred[v].size(), out = g.succ[v].size();
        if (in == 0 && out == 0) {
            if (g.remaining == 1) free.push_back({Rule::Free, v});
        }
        else if (out == 0 && in == 1)
            bt.push_back({Rule::B, v});
        else if (in == 0 && out == 1)
            bt.push_back({Rule::T, v});
        else if (in == 1 && out == 1)
            mid.push_back({Rule::I, v});
    }
    free.insert(free.end(), bt.begin(), bt.end());
    free.insert(free.end(), mid.begin(), mid.end());
    return free;
}

class Engine {
public:
    Engine(const Poset& p, const Strategy& s, const Deadline& d) : poset_(p), strategy_(s), deadline_(d), rng_(s.seed) {}

    std::shared_ptr<const FormulaTree> run() {
        State st{Graph(poset_), {}, {}, {}};
        return solve(std::move(st));
    }

private:
    struct State {
        Graph g;
        Factors psi;
        std::vector<Integration> steps;
        std::vector<DecompStep> trace;
    };

    const std::string& name(std::size_t v) const { return poset_.elements()[v]; }

    void integrate_out(State& st, std::size_t v, Bound lo, Bound hi) {
        st.steps.push_back(st.psi.integrate_out(name(v), std::move(lo), std::move(hi)));
    }

    void apply(State& st, const Candidate& c) {
        const std::size_t v = c.v;
        switch (c.rule) {
            case Rule::Free:
                integrate_out(st, v, Bound::zero(), Bound::one());
                st.g.remove(v);
                break;
            case Rule::B:
                integrate_out(st, v, Bound::of(name(*st.g.pred[v].begin())), Bound::one());
                st.g.remove(v);
                break;
            case Rule::T:
                integrate_out(st, v, Bound::zero(), Bound::of(name(*st.g.succ[v].begin())));
                st.g.remove(v);
                break;
            case Rule::I:
                integrate_out(st, v, Bound::of(name(*st.g.pred[v].begin())), Bound::of(name(*st.g.succ[v].begin())));
                st.g.bypass(v);
                break;
            case Rule::S:
                break;
        }
        st.trace.push_back({c.rule, name(v), {}});
    }

    // Default choice: keep the integrand in as few variables as possible, by
    // first removing a variable it already holds and by preferring bounds it
    // already holds. Ties go to the earliest candidate.
    const Candidate& pick_rule(const State& st, const std::vector<Candidate>& cands) const {
        auto held = [&](std::size_t v) { return st.psi.mentions(name(v)); };
        const Candidate* best = &cands.front();
        int best_score = -1;
        for (const auto& c : cands) {
            int score = held(c.v) ? 4 : 0;
            bool bounds_held = true;
            if (c.rule == Rule::B || c.rule == Rule::I) bounds_held = bounds_held && held(*st.g.pred[c.v].begin());
            if (c.rule == Rule::T || c.rule == Rule::I) bounds_held = bounds_held && held(*st.g.succ[c.v].begin());
            score += bounds_held ? 2 : 0;
            if (score > best_score) {
                best = &c;
                best_score = score;
                if (score == 6) break;
            }
        }
        return *best;
    }

    Edge pick_split(const Graph& g, const std::vector<Edge>& pairs) {
        if (strategy_.kind == Strategy::Kind::Random) return pairs[rng_() % pairs.size()];
        Edge best = pairs.front();
        std::size_t best_score = g.shared_neighbours(best.first, best.second);
        for (const auto& e : pairs) {
            auto s = g.shared_neighbours(e.first, e.second);
            if (s > best_score) {
                best = e;
                best_score = s;
            }
        }
        return best;
    }

    std::shared_ptr<const FormulaTree> solve(State st) {
        for (;;) {
            deadline_.check();
            if (st.g.remaining == 0) {
                auto leaf = std::make_shared<FormulaTree>();
                leaf->volume = st.psi.value();
                leaf->trace = std::move(st.trace);
                leaf->steps = std::move(st.steps);
                return leaf;
            }
            auto cands = candidates(st.g);
            bool split = cands.empty();
            if (!split && strategy_.kind == Strategy::Kind::Random && strategy_.split_probability > 0 &&
                std::uniform_real_distribution<double>(0, 1)(rng_) < strategy_.split_probability) {
                split = !st.g.incomparable_pairs().empty();
            }
            if (!split) {
                const Candidate& c =
                    strategy_.kind == Strategy::Kind::Random ? cands[rng_() % cands.size()] : pick_rule(st, cands);
                apply(st, c);
                continue;
            }
            auto pairs = st.g.incomparable_pairs();
            if (pairs.empty()) throw DeadlockedGraph("no applicable rule on a non-empty graph");
            auto [x, y] = pick_split(st.g, pairs);
            State other = st;
            st.g.order(x, y);
            st.trace.push_back({Rule::S, name(x), name(y)});
            other.g.order(y, x);
            other.trace.push_back({Rule::S, name(y), name(x)});
            auto node = std::make_shared<FormulaTree>();
            node->x = name(x);
            node->y = name(y);
            node->left = solve(std::move(st));
            node->right = solve(std::move(other));
            node->volume = node->left->volume + node->right->volume;
            return node;
        }
    }

    const Poset& poset_;
    Strategy strategy_;
    Deadline deadline_;
    std::mt19937_64 rng_;
};

void collect(const FormulaTree* t, std::vector<const FormulaTree*>& out) {
    if (t->is_leaf()) {
        out.push_back(t);
        return;
    }
    collect(t->left.get(), out);
    collect(t->right.get(), out);
}

}  // namespace

std::string DecompStep::to_string() const {
    return rule == Rule::S ? "S(" + x + "," + y + ")" : std::string(rule_name(rule)) + "(" + x + ")";
}

BigInt Decomposition::count() const {
    Rational c = volume() * Rational(factorial(poset.size()));
    if (c.get_den() != 1) throw NonIntegerVolume("n! * volume = " + rational_string(c) + " is not an integer");
    return c.get_num();
}

std::vector<const FormulaTree*> Decomposition::leaves() const {
    std::vector<const FormulaTree*> out;
    collect(root.get(), out);
    return out;
}

std::vector<DecompStep> applicable_rules(const Poset& p, bool include_splits) {
    Graph g(p);
    std::vector<DecompStep> out;
    // Report in element order regardless of the engine's preference.
    auto cands = candidates(g);
    std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return a.v < b.v; });
    for (const auto& c : cands)
        if (c.rule != Rule::Free) out.push_back({c.rule, p.elements()[c.v], {}});
    if (include_splits)
        for (auto [a, b] : g.incomparable_pairs()) out.push_back({Rule::S, p.elements()[a], p.elements()[b]});
    return out;
}

std::vector<DecompStep> applicable_rules(const ControlGraph& g, bool include_splits) {
    return applicable_rules(to_poset(g), include_splits);
}

Decomposition decompose(const Poset& p, const Strategy& strategy, const Deadline& deadline) {
    Decomposition d{p, nullptr};
    d.root = Engine(d.poset, strategy, deadline).run();
    return d;
}

Decomposition decompose(const ControlGraph& g, const Strategy& strategy, const Deadline& deadline) {
    return decompose(to_poset(g), strategy, deadline);
}

BigInt count_executions(const Poset& p, const Deadline& deadline) { return decompose(p, {}, deadline).count(); }
BigInt count_executions(const ControlGraph& g, const Deadline& deadline) {
    return count_executions(to_poset(g), deadline);
}

bool is_bit_decomposable(const Poset& p) {
    Graph g(p);
    for (;;) {
        auto cands = candidates(g);
        // Only isolated vertices left: each comes off with a full integral.
        if (cands.empty()) {
            for (std::size_t v = 0; v < g.alive.size(); ++v)
                if (g.alive[v] && !g.isolated(v)) return false;
            return true;
        }
        const auto& c = cands.front();
        if (c.rule == Rule::I)
            g.bypass(c.v);
        else
            g.remove(c.v);
    }
}

bool is_bit_decomposable(const ControlGraph& g) { return is_bit_decomposable(to_poset(g)); }

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

json bound_json(const Bound& b) { return b.to_string(); }

Bound bound_from(const json& j) {
    const auto s = j.get<std::string>();
    if (s == "0") return Bound::zero();
    if (s == "1") return Bound::one();
    return Bound::of(s);
}

json tree_json(const FormulaTree& t) {
    json j;
    j["volume"] = rational_string(t.volume);
    if (t.is_leaf()) {
        j["type"] = "leaf";
        json trace = json::array();
        for (const auto& s : t.trace) {
            json step = {{"rule", rule_name(s.rule)}, {"x", s.x}};
            if (s.rule == Rule::S) step["y"] = s.y;
            trace.push_back(step);
        }
        j["trace"] = trace;
        json steps = json::array();
        for (const auto& s : t.steps) steps.push_back({{"var", s.var}, {"lo", bound_json(s.lo)}, {"hi", bound_json(s.hi)}});
        j["integrations"] = steps;
    } else {
        j["type"] = "split";
        j["x"] = t.x;
        j["y"] = t.y;
        j["left"] = tree_json(*t.left);
        j["right"] = tree_json(*t.right);
    }
    return j;
}

std::shared_ptr<const FormulaTree> tree_from(const json& j) {
    auto t = std::make_shared<FormulaTree>();
    const Rational stored = parse_rational(j.at("volume").get<std::string>());
    if (j.at("type") == "leaf") {
        for (const auto& s : j.at("trace"))
            t->trace.push_back({rule_from(s.at("rule").get<std::string>()), s.at("x").get<std::string>(),
                                s.value("y", std::string{})});
        Factors psi;
        for (const auto& s : j.at("integrations"))
            t->steps.push_back(psi.integrate_out(s.at("var").get<std::string>(), bound_from(s.at("lo")), bound_from(s.at("hi"))));
        if (psi.value() != stored) throw Error("leaf volume does not match its integrations");
        t->volume = stored;
    } else {
        t->x = j.at("x").get<std::string>();
        t->y = j.at("y").get<std::string>();
        t->left = tree_from(j.at("left"));
        t->right = tree_from(j.at("right"));
        t->volume = t->left->volume + t->right->volume;
        if (t->volume != stored) throw Error("split volume does not match its branches");
    }
    return t;
}

}  // namespace

std::string decomposition_to_json(const Decomposition& d, int indent) {
    json j;
    j["elements"] = d.poset.elements();
    json cover = json::array();
    for (const auto& [a, b] : d.poset.covering_labels()) cover.push_back({a, b});
    j["covering"] = cover;
    j["volume"] = rational_string(d.volume());
    j["count"] = d.count().get_str();
    j["tree"] = tree_json(*d.root);
    return j.dump(indent);
}

Decomposition decomposition_from_json(std::string_view text) {
    const json j = json::parse(text);
    std::vector<std::pair<std::string, std::string>> cover;
    for (const auto& e : j.at("covering")) cover.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    Decomposition d{Poset::from_covering(j.at("elements").get<std::vector<std::string>>(), cover), nullptr};
    d.root = tree_from(j.at("tree"));
    return d;
}

}  // namespace bsync

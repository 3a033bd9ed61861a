#include "bsync/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bsync {

namespace {

BigInt scaled(const Rational& vol, const BigInt& nfact) {
    Rational c = vol * Rational(nfact);
    if (c.get_den() != 1) throw NonIntegerVolume("branch volume is not a multiple of 1/n!");
    return c.get_num();
}

}  // namespace

const FormulaTree& choose_branch(const Decomposition& d, RandomSource& rng) {
    const BigInt nfact = factorial(d.poset.size());
    const FormulaTree* t = d.root.get();
    while (!t->is_leaf()) {
        const BigInt left = scaled(t->left->volume, nfact);
        const BigInt total = scaled(t->volume, nfact);
        t = rng.below(total) < left ? t->left.get() : t->right.get();
    }
    return *t;
}

struct Sampler::Compiled {
    struct Term {
        double c;
        unsigned ey;
        std::vector<std::pair<std::size_t, unsigned>> others;
    };
    struct Bnd {
        Bound::Kind kind;
        std::size_t var;
    };
    struct Step {
        std::size_t var;
        Bnd lo, hi;
        unsigned degree = 0;
        std::vector<Term> terms;
    };

    std::vector<std::string> names;
    std::vector<Step> steps;  // outermost first

    explicit Compiled(const FormulaTree& leaf) {
        std::map<std::string, std::size_t> idx;
        for (const auto& s : leaf.steps) {
            idx.emplace(s.var, names.size());
            names.push_back(s.var);
        }
        auto var_of = [&](const std::string& v) {
            auto it = idx.find(v);
            if (it == idx.end()) throw MissingVariable("leaf mentions unknown variable '" + v + "'");
            return it->second;
        };
        auto bnd = [&](const Bound& b) {
            return Bnd{b.kind, b.kind == Bound::Kind::Var ? var_of(b.var) : std::size_t{0}};
        };
        for (auto it = leaf.steps.rbegin(); it != leaf.steps.rend(); ++it) {
            Step st{var_of(it->var), bnd(it->lo), bnd(it->hi), 0, {}};
            for (const auto& [m, c] : it->integrand->terms()) {
                Term t{c.get_d(), 0, {}};
                for (const auto& [v, e] : m) {
                    if (v == it->var)
                        t.ey = e;
                    else
                        t.others.emplace_back(var_of(v), e);
                }
                st.degree = std::max(st.degree, t.ey);
                st.terms.push_back(std::move(t));
            }
            steps.push_back(std::move(st));
        }
    }

    std::vector<double> draw(RandomSource& rng) const {
        const double unset = std::numeric_limits<double>::quiet_NaN();
        std::vector<double> val(names.size(), unset);
        auto value = [&](const Bnd& b) {
            switch (b.kind) {
                case Bound::Kind::Zero: return 0.0;
                case Bound::Kind::One: return 1.0;
                case Bound::Kind::Var: break;
            }
            if (std::isnan(val[b.var])) throw MissingVariable("bound '" + names[b.var] + "' sampled too late");
            return val[b.var];
        };
        std::vector<double> coeffs;
        for (const auto& st : steps) {
            coeffs.assign(st.degree + 1, 0.0);
            for (const auto& t : st.terms) {
                double x = t.c;
                for (auto [v, e] : t.others) {
                    if (std::isnan(val[v])) throw MissingVariable("variable '" + names[v] + "' sampled too late");
                    for (unsigned i = 0; i < e; ++i) x *= val[v];
                }
                coeffs[t.ey] += x;
            }
            const double a = value(st.lo), b = value(st.hi);
            if (!(b > a)) throw TieDetected("empty integration interval");
            Univariate f{coeffs};
            Univariate F = f.antiderivative();
            const double fa = F(a);
            const double mass = F(b) - fa;
            if (!(mass > 0)) {
                if (b - a < 1e-9) throw TieDetected("interval too narrow to resolve");
                throw NumericalFailure("integration interval of " + names[st.var] + " carries no mass");
            }
            const double target = rng.uniform_open() * mass;
            double lo = a, hi = b;
            for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
                const double mid = 0.5 * (lo + hi);
                if (F(mid) - fa < target)
                    lo = mid;
                else
                    hi = mid;
            }
            val[st.var] = 0.5 * (lo + hi);
        }
        return val;
    }
};

SamplePoint sample_point(const FormulaTree& leaf, RandomSource& rng) {
    Sampler::Compiled c(leaf);
    auto val = c.draw(rng);
    SamplePoint p;
    for (std::size_t i = 0; i < val.size(); ++i) p.emplace(c.names[i], val[i]);
    return p;
}

Execution rank_to_execution(const SamplePoint& p) {
    std::vector<std::pair<double, const std::string*>> order;
    order.reserve(p.size());
    for (const auto& [k, v] : p) order.emplace_back(v, &k);
    std::sort(order.begin(), order.end());
    Execution e;
    e.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0 && order[i].first == order[i - 1].first)
            throw TieDetected("coordinates of " + *order[i - 1].second + " and " + *order[i].second + " coincide");
        e.push_back(*order[i].second);
    }
    return e;
}

Sampler::Sampler(Decomposition d) : d_(std::move(d)) {
    for (const auto* leaf : d_.leaves()) compiled_.emplace(leaf, std::make_shared<const Compiled>(*leaf));
}

Execution Sampler::sample(RandomSource& rng) const {
    const FormulaTree& leaf = choose_branch(d_, rng);
    const Compiled& c = *compiled_.at(&leaf);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        try {
            auto val = c.draw(rng);
            std::vector<std::pair<double, std::size_t>> order;
            for (std::size_t i = 0; i < val.size(); ++i) order.emplace_back(val[i], i);
            std::sort(order.begin(), order.end());
            bool tie = false;
            for (std::size_t i = 1; i < order.size(); ++i) tie |= order[i].first == order[i - 1].first;
            if (tie) continue;
            Execution e;
            e.reserve(order.size());
            for (const auto& [v, i] : order) e.push_back(c.names[i]);
            return e;
        } catch (const TieDetected&) {
        }
    }
    throw NumericalFailure("could not draw a tie-free point");
}

std::vector<Execution> Sampler::sample(std::size_t k, RandomSource& rng) const {
    std::vector<Execution> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(sample(rng));
    return out;
}

std::vector<Execution> sample_execution(const Poset& p, std::size_t k, std::uint64_t seed) {
    Sampler s(decompose(p));
    RandomSource rng(seed);
    return s.sample(k, rng);
}

std::vector<Execution> sample_execution(const ControlGraph& g, std::size_t k, std::uint64_t seed) {
    return sample_execution(to_poset(g), k, seed);
}

}  // namespace bsync

#include "bsync/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

#include "bsync/error.hpp"

namespace bsync {

std::string rational_string(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(const std::string& s) {
    Rational q;
    if (s.empty() || q.set_str(s, 10) != 0 || q.get_den() == 0) throw std::invalid_argument("bad rational '" + s + "'");
    q.canonicalize();
    return q;
}

BigInt factorial(unsigned long n) {
    BigInt f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return f;
}

std::string Bound::to_string() const {
    switch (kind) {
        case Kind::Zero: return "0";
        case Kind::One: return "1";
        case Kind::Var: return var;
    }
    return "?";
}

namespace {

Polynomial::Monomial times(const Polynomial::Monomial& a, const Polynomial::Monomial& b) {
    Polynomial::Monomial out;
    out.reserve(a.size() + b.size());
    auto i = a.begin(), j = b.begin();
    while (i != a.end() || j != b.end()) {
        if (j == b.end() || (i != a.end() && i->first < j->first)) {
            out.push_back(*i++);
        } else if (i == a.end() || j->first < i->first) {
            out.push_back(*j++);
        } else {
            out.emplace_back(i->first, i->second + j->second);
            ++i;
            ++j;
        }
    }
    return out;
}

}  // namespace

void Polynomial::add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Polynomial Polynomial::constant(const Rational& c) {
    Polynomial p;
    p.add_term({}, c);
    return p;
}

Polynomial Polynomial::variable(const std::string& name) {
    Polynomial p;
    p.add_term({{name, 1}}, 1);
    return p;
}

bool Polynomial::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

Rational Polynomial::constant_term() const {
    auto it = terms_.find({});
    return it == terms_.end() ? Rational(0) : it->second;
}

std::set<std::string> Polynomial::variables() const {
    std::set<std::string> out;
    for (const auto& [m, c] : terms_)
        for (const auto& [v, e] : m) out.insert(v);
    return out;
}

unsigned Polynomial::degree_in(const std::string& var) const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_)
        for (const auto& [v, e] : m)
            if (v == var) d = std::max(d, e);
    return d;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    Polynomial r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
}

Polynomial operator-(const Polynomial& a) {
    Polynomial r = a;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    Polynomial r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
    return r;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) r.add_term(times(ma, mb), ca * cb);
    return r;
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    // Highest total degree first, then by monomial order.
    std::vector<std::pair<const Monomial*, const Rational*>> order;
    for (const auto& [m, c] : terms_) order.emplace_back(&m, &c);
    auto total = [](const Monomial& m) {
        unsigned d = 0;
        for (const auto& [v, e] : m) d += e;
        return d;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](const auto& x, const auto& y) { return total(*x.first) > total(*y.first); });
    std::string out;
    bool first = true;
    for (const auto& [m, c] : order) {
        Rational mag = abs(*c);
        if (first) {
            if (*c < 0) out += "-";
        } else {
            out += *c < 0 ? " - " : " + ";
        }
        first = false;
        std::string mono;
        for (const auto& [v, e] : *m) {
            if (!mono.empty()) mono += "*";
            mono += v;
            if (e > 1) mono += "^" + std::to_string(e);
        }
        if (mono.empty()) {
            out += mag.get_str();
        } else if (mag == 1) {
            out += mono;
        } else {
            out += mag.get_str() + "*" + mono;
        }
    }
    return out;
}

Polynomial add(const Polynomial& p, const Polynomial& q) { return p + q; }
Polynomial mul(const Polynomial& p, const Polynomial& q) { return p * q; }
Polynomial scale(const Polynomial& p, const Rational& c) { return p * Polynomial::constant(c); }

Polynomial integrate(const Polynomial& p, const std::string& y, const Bound& lo, const Bound& hi) {
    if ((lo.kind == Bound::Kind::Var && lo.var == y) || (hi.kind == Bound::Kind::Var && hi.var == y))
        throw std::invalid_argument("integration bound equals the integration variable");
    // c * y^k * m  ->  c/(k+1) * (hi^(k+1) - lo^(k+1)) * m
    Polynomial r;
    for (const auto& [m, c] : p.terms()) {
        unsigned k = 0;
        Polynomial::Monomial rest;
        rest.reserve(m.size());
        for (const auto& ve : m) {
            if (ve.first == y)
                k = ve.second;
            else
                rest.push_back(ve);
        }
        const Rational coef = c / Rational(k + 1);
        for (const Bound* b : {&hi, &lo}) {
            const Rational sc = b == &hi ? coef : Rational(-coef);
            if (b->kind == Bound::Kind::One)
                r.add_term(rest, sc);
            else if (b->kind == Bound::Kind::Var)
                r.add_term(times(rest, {{b->var, k + 1}}), sc);
        }
    }
    return r;
}

namespace {

template <class T>
const T& lookup(const std::map<std::string, T>& at, const std::string& v) {
    auto it = at.find(v);
    if (it == at.end()) throw MissingVariable("no value for variable '" + v + "'");
    return it->second;
}

}  // namespace

Rational eval(const Polynomial& p, const std::map<std::string, Rational>& at) {
    Rational sum = 0;
    for (const auto& [m, c] : p.terms()) {
        Rational t = c;
        for (const auto& [v, e] : m) {
            const Rational& x = lookup(at, v);
            for (unsigned i = 0; i < e; ++i) t *= x;
        }
        sum += t;
    }
    return sum;
}

double eval(const Polynomial& p, const std::map<std::string, double>& at) {
    double sum = 0;
    for (const auto& [m, c] : p.terms()) {
        double t = c.get_d();
        for (const auto& [v, e] : m) {
            const double x = lookup(at, v);
            for (unsigned i = 0; i < e; ++i) t *= x;
        }
        sum += t;
    }
    return sum;
}

double Univariate::operator()(double y) const {
    double acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * y + *it;
    return acc;
}

Univariate Univariate::antiderivative() const {
    Univariate r;
    r.coeffs.assign(coeffs.size() + 1, 0.0);
    for (std::size_t k = 0; k < coeffs.size(); ++k) r.coeffs[k + 1] = coeffs[k] / static_cast<double>(k + 1);
    return r;
}

Univariate restrict_univariate(const Polynomial& p, const std::string& y, const std::map<std::string, double>& fixed) {
    Univariate u;
    u.coeffs.assign(p.degree_in(y) + 1, 0.0);
    for (const auto& [m, c] : p.terms()) {
        double t = c.get_d();
        unsigned k = 0;
        for (const auto& [v, e] : m) {
            if (v == y) {
                k = e;
                continue;
            }
            const double x = lookup(fixed, v);
            for (unsigned i = 0; i < e; ++i) t *= x;
        }
        u.coeffs[k] += t;
    }
    return u;
}

}  // namespace bsync

#pragma once

#include <gmpxx.h>

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace bsync {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Always "num/den", e.g. "14/40320" or "3/1".
std::string rational_string(const Rational& q);
/// Accepts "num/den" or "num". Throws std::invalid_argument.
Rational parse_rational(const std::string& s);

BigInt factorial(unsigned long n);

/// Integration limit: 0, 1, or a live variable.
struct Bound {
    enum class Kind { Zero, One, Var };
    Kind kind = Kind::Zero;
    std::string var;

    static Bound zero() { return {Kind::Zero, {}}; }
    static Bound one() { return {Kind::One, {}}; }
    static Bound of(std::string v) { return {Kind::Var, std::move(v)}; }

    std::string to_string() const;
    bool operator==(const Bound&) const = default;
};

/// Sparse multivariate polynomial with rational coefficients.
class Polynomial {
public:
    /// Sorted by variable, exponents > 0.
    using Monomial = std::vector<std::pair<std::string, unsigned>>;
    using Terms = std::map<Monomial, Rational>;

    Polynomial() = default;
    static Polynomial constant(const Rational& c);
    static Polynomial variable(const std::string& name);

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    /// Coefficient of the empty monomial.
    Rational constant_term() const;
    std::set<std::string> variables() const;
    unsigned degree_in(const std::string& var) const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }
    friend Polynomial integrate(const Polynomial& p, const std::string& y, const Bound& lo,
                                const Bound& hi);

    /// Canonical rendering, e.g. "x8 - x4" or "1/2*x^2".
    std::string to_string() const;

private:
    void add_term(const Monomial& m, const Rational& c);
    Terms terms_;
};

Polynomial add(const Polynomial& p, const Polynomial& q);
Polynomial mul(const Polynomial& p, const Polynomial& q);
Polynomial scale(const Polynomial& p, const Rational& c);

/// Definite integral of p in y from lo to hi; the result no longer mentions y.
Polynomial integrate(const Polynomial& p, const std::string& y, const Bound& lo, const Bound& hi);

/// Throw MissingVariable when the assignment does not cover p.
Rational eval(const Polynomial& p, const std::map<std::string, Rational>& at);
double eval(const Polynomial& p, const std::map<std::string, double>& at);

/// Dense univariate polynomial over doubles; coeffs[k] multiplies y^k.
struct Univariate {
    std::vector<double> coeffs;

    double operator()(double y) const;
    Univariate antiderivative() const;
};

/// Substitutes every variable but y. Throws MissingVariable.
Univariate restrict_univariate(const Polynomial& p, const std::string& y, const std::map<std::string, double>& fixed);

}  // namespace bsync

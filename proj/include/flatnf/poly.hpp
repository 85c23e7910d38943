#pragma once
#include <gmpxx.h>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flatnf/var.hpp"

namespace flatnf {

using Rat = mpq_class;
using Int = mpz_class;

// Product of variable powers, factors sorted ascending by the fixed Var order.
struct Monomial {
  std::vector<std::pair<Var, int>> factors;

  static Monomial one() { return Monomial{}; }
  static Monomial variable(Var v, int exp = 1);
  bool is_one() const { return factors.empty(); }
  int total_degree() const;
  int degree_in(Var v) const;
  Monomial times(const Monomial& o) const;
  std::optional<Monomial> divided_by(const Monomial& o) const;
  bool operator==(const Monomial& o) const { return factors == o.factors; }
};

// Graded lexicographic: total degree first, ties broken by the exponent of the earliest
// variable in the fixed Var order (higher exponent = larger monomial).
int mono_compare(const Monomial& a, const Monomial& b);

struct MonoGreater {
  bool operator()(const Monomial& a, const Monomial& b) const {
    return mono_compare(a, b) > 0;
  }
};

// Sparse multivariate polynomial over Q. Terms are kept in descending monomial order,
// so begin() is the leading term. Zero coefficients are never stored.
class Poly {
 public:
  using Terms = std::map<Monomial, Rat, MonoGreater>;

  Poly() = default;
  static Poly constant(const Rat& c);
  static Poly variable(Var v);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_one() const;
  const Terms& terms() const { return terms_; }
  size_t term_count() const { return terms_.size(); }
  const Monomial& leading_monomial() const;
  const Rat& leading_coeff() const;
  Rat constant_value() const;  // requires is_constant()

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator-() const;
  Poly operator*(const Poly& o) const;
  Poly mul_scalar(const Rat& c) const;
  Poly mul_term(const Monomial& m, const Rat& c) const;
  Poly pow_int(int k) const;  // k >= 0
  bool operator==(const Poly& o) const { return terms_ == o.terms_; }

  Poly derivative(Var v) const;
  int total_degree() const;  // -1 for zero
  int degree_in(Var v) const;
  std::set<Var> vars() const;
  bool depends_on(Var v) const;
  // Coefficient of v^k, a polynomial in the remaining variables.
  Poly coeff_of(Var v, int k) const;

  void add_term(const Monomial& m, const Rat& c);  // accumulating constructor aid

  // Rational c such that (*this)/c has coprime integer coefficients and a positive
  // leading coefficient; 0 for the zero polynomial.
  Rat rational_content() const;
  Poly primitive() const;

  static Poly gcd(const Poly& a, const Poly& b);       // integer-primitive, positive lead
  static Poly divexact(const Poly& a, const Poly& b);  // throws if division is not exact

  Rat eval_q(const std::map<Var, Rat>& point) const;
  double eval_d(const std::map<Var, double>& point) const;

 private:
  Terms terms_;
};

}  // namespace flatnf

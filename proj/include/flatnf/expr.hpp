#pragma once
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "flatnf/poly.hpp"

namespace flatnf {

// Immutable symbolic expression, always held in canonical form: a reduced rational
// function num/den with gcd(num, den) = 1 and den integer-primitive with positive
// leading coefficient (den = 1 for polynomials). Equality of canonical forms is a sound
// and complete zero test for differences within the rational class.
class Expr {
 public:
  Expr() : Expr(Poly(), Poly::constant(1), true) {}
  static Expr variable(Var v) { return Expr(Poly::variable(v), Poly::constant(1), true); }
  static Expr constant(const Rat& c) { return Expr(Poly::constant(c), Poly::constant(1), true); }
  static Expr integer(long v) { return constant(Rat(v)); }
  static Expr fraction(const Poly& num, const Poly& den) { return Expr(num, den, false); }

  const Poly& num() const { return p_->num; }
  const Poly& den() const { return p_->den; }

  bool is_zero() const { return num().is_zero(); }
  bool is_one() const { return num().is_one() && den().is_one(); }
  bool is_constant() const { return num().is_constant() && den().is_constant(); }
  bool is_polynomial() const { return den().is_one(); }
  // Requires is_constant().
  Rat constant_value() const { return num().constant_value() / den().constant_value(); }
  // The single variable if the expression is exactly that variable.
  std::optional<Var> as_variable() const;

  Expr operator+(const Expr& o) const;
  Expr operator-(const Expr& o) const;
  Expr operator-() const;
  Expr operator*(const Expr& o) const;
  Expr operator/(const Expr& o) const;  // throws DivisionByZero if o == 0
  Expr pow(int k) const;                // negative k inverts
  bool operator==(const Expr& o) const { return num() == o.num() && den() == o.den(); }
  bool operator!=(const Expr& o) const { return !(*this == o); }

  Expr diff(Var v) const;
  std::set<Var> vars() const;
  bool depends_on(Var v) const;
  // Simultaneous substitution; variables absent from the map stay themselves.
  Expr substitute(const std::map<Var, Expr>& map) const;
  Expr rename(const std::map<Var, Var>& map) const;

  // Exact evaluation; nullopt when the denominator vanishes at the point.
  std::optional<Rat> eval_q(const std::map<Var, Rat>& point) const;
  std::optional<double> eval_d(const std::map<Var, double>& point) const;

  std::string str() const;

 private:
  struct Data {
    Poly num, den;
  };
  Expr(Poly num, Poly den, bool already_canonical);
  std::shared_ptr<const Data> p_;
};

inline Expr operator+(long a, const Expr& b) { return Expr::integer(a) + b; }
inline Expr operator-(long a, const Expr& b) { return Expr::integer(a) - b; }
inline Expr operator*(long a, const Expr& b) { return Expr::integer(a) * b; }

std::string to_string(const Expr& e);

}  // namespace flatnf

#include "flatnf/expr.hpp"

#include <sstream>

#include "flatnf/errors.hpp"

namespace flatnf {

Expr::Expr(Poly num, Poly den, bool already_canonical) {
  if (!already_canonical) {
    if (den.is_zero()) throw DivisionByZero();
    if (num.is_zero()) {
      den = Poly::constant(1);
    } else if (den.is_one()) {
      // already reduced
    } else {
      Poly g = Poly::gcd(num, den);
      if (!g.is_one()) {
        num = Poly::divexact(num, g);
        den = Poly::divexact(den, g);
      }
      Rat c = den.rational_content();
      if (c != 1) {
        den = den.mul_scalar(Rat(1) / c);
        num = num.mul_scalar(Rat(1) / c);
      }
    }
  }
  p_ = std::make_shared<const Data>(Data{std::move(num), std::move(den)});
}

std::optional<Var> Expr::as_variable() const {
  if (!den().is_one() || num().term_count() != 1) return std::nullopt;
  auto& [m, c] = *num().terms().begin();
  if (c != 1 || m.factors.size() != 1 || m.factors[0].second != 1) return std::nullopt;
  return m.factors[0].first;
}

Expr Expr::operator+(const Expr& o) const {
  if (den() == o.den()) return Expr(num() + o.num(), den(), false);
  return Expr(num() * o.den() + o.num() * den(), den() * o.den(), false);
}

Expr Expr::operator-(const Expr& o) const {
  if (den() == o.den()) return Expr(num() - o.num(), den(), false);
  return Expr(num() * o.den() - o.num() * den(), den() * o.den(), false);
}

Expr Expr::operator-() const { return Expr(-num(), den(), true); }

Expr Expr::operator*(const Expr& o) const {
  return Expr(num() * o.num(), den() * o.den(), false);
}

Expr Expr::operator/(const Expr& o) const {
  if (o.is_zero()) throw DivisionByZero();
  return Expr(num() * o.den(), den() * o.num(), false);
}

Expr Expr::pow(int k) const {
  if (k == 0) return Expr::integer(1);
  if (k > 0) return Expr(num().pow_int(k), den().pow_int(k), false);
  if (is_zero()) throw DivisionByZero();
  return Expr(den().pow_int(-k), num().pow_int(-k), false);
}

Expr Expr::diff(Var v) const {
  if (is_polynomial()) return Expr(num().derivative(v), den(), false);
  Poly n = num().derivative(v) * den() - num() * den().derivative(v);
  return Expr(n, den() * den(), false);
}

std::set<Var> Expr::vars() const {
  std::set<Var> s = num().vars();
  auto d = den().vars();
  s.insert(d.begin(), d.end());
  return s;
}

bool Expr::depends_on(Var v) const { return num().depends_on(v) || den().depends_on(v); }

namespace {
Expr eval_poly(const Poly& p, const std::map<Var, Expr>& map) {
  Expr total;
  std::map<Var, std::vector<Expr>> powers;  // powers[v][k] = v-image^(k+1)
  auto power = [&](Var v, int e) -> Expr {
    auto it = map.find(v);
    Expr base = (it == map.end()) ? Expr::variable(v) : it->second;
    auto& cache = powers[v];
    while (static_cast<int>(cache.size()) < e)
      cache.push_back(cache.empty() ? base : cache.back() * base);
    return cache[e - 1];
  };
  for (auto& [m, c] : p.terms()) {
    Expr t = Expr::constant(c);
    for (auto& [v, e] : m.factors) t = t * power(v, e);
    total = total + t;
  }
  return total;
}
}  // namespace

Expr Expr::substitute(const std::map<Var, Expr>& map) const {
  bool touched = false;
  for (auto& [v, e] : map)
    if (depends_on(v)) {
      touched = true;
      break;
    }
  if (!touched) return *this;
  Expr n = eval_poly(num(), map);
  Expr d = eval_poly(den(), map);
  return n / d;  // throws DivisionByZero when the image denominator vanishes
}

Expr Expr::rename(const std::map<Var, Var>& map) const {
  std::map<Var, Expr> m;
  for (auto& [a, b] : map) m.emplace(a, Expr::variable(b));
  return substitute(m);
}

std::optional<Rat> Expr::eval_q(const std::map<Var, Rat>& point) const {
  Rat d = den().eval_q(point);
  if (d == 0) return std::nullopt;
  return num().eval_q(point) / d;
}

std::optional<double> Expr::eval_d(const std::map<Var, double>& point) const {
  double d = den().eval_d(point);
  if (d == 0.0) return std::nullopt;
  return num().eval_d(point) / d;
}

namespace {

void print_monomial(std::ostream& os, const Monomial& m, const Rat& c, bool leading) {
  Rat a = c;
  if (a < 0) {
    os << (leading ? "-" : " - ");
    a = -a;
  } else if (!leading) {
    os << " + ";
  }
  bool printed = false;
  if (a != 1 || m.is_one()) {
    os << a.get_str();
    printed = true;
  }
  for (auto& [v, e] : m.factors) {
    if (printed) os << "*";
    os << v.display();
    if (e != 1) os << "^" << e;
    printed = true;
  }
}

void print_poly(std::ostream& os, const Poly& p) {
  if (p.is_zero()) {
    os << "0";
    return;
  }
  bool leading = true;
  for (auto& [m, c] : p.terms()) {
    print_monomial(os, m, c, leading);
    leading = false;
  }
}

// A denominator can skip parentheses only when it prints as a single grammar factor.
bool atomic_factor(const Poly& p) {
  if (p.term_count() != 1) return false;
  auto& [m, c] = *p.terms().begin();
  return c == 1 && m.factors.size() == 1;
}

}  // namespace

std::string Expr::str() const {
  std::ostringstream os;
  if (is_polynomial()) {
    print_poly(os, num());
    return os.str();
  }
  bool num_simple = num().term_count() == 1 && num().leading_coeff() > 0;
  if (num_simple) {
    print_poly(os, num());
  } else {
    os << "(";
    print_poly(os, num());
    os << ")";
  }
  os << "/";
  if (atomic_factor(den())) {
    print_poly(os, den());
  } else {
    os << "(";
    print_poly(os, den());
    os << ")";
  }
  return os.str();
}

std::string to_string(const Expr& e) { return e.str(); }

}  // namespace flatnf

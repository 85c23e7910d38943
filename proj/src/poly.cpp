#include "flatnf/poly.hpp"

#include <algorithm>

#include "flatnf/errors.hpp"

namespace flatnf {

Monomial Monomial::variable(Var v, int exp) {
  Monomial m;
  if (exp != 0) m.factors.emplace_back(v, exp);
  return m;
}

int Monomial::total_degree() const {
  int d = 0;
  for (auto& [v, e] : factors) d += e;
  return d;
}

int Monomial::degree_in(Var v) const {
  for (auto& [w, e] : factors)
    if (w == v) return e;
  return 0;
}

Monomial Monomial::times(const Monomial& o) const {
  Monomial r;
  size_t i = 0, j = 0;
  while (i < factors.size() || j < o.factors.size()) {
    if (j == o.factors.size() ||
        (i < factors.size() && factors[i].first < o.factors[j].first)) {
      r.factors.push_back(factors[i++]);
    } else if (i == factors.size() || o.factors[j].first < factors[i].first) {
      r.factors.push_back(o.factors[j++]);
    } else {
      r.factors.emplace_back(factors[i].first, factors[i].second + o.factors[j].second);
      ++i;
      ++j;
    }
  }
  return r;
}

std::optional<Monomial> Monomial::divided_by(const Monomial& o) const {
  Monomial r;
  size_t i = 0;
  for (auto& [v, e] : o.factors) {
    while (i < factors.size() && factors[i].first < v) r.factors.push_back(factors[i++]);
    if (i == factors.size() || !(factors[i].first == v) || factors[i].second < e)
      return std::nullopt;
    if (factors[i].second > e) r.factors.emplace_back(v, factors[i].second - e);
    ++i;
  }
  while (i < factors.size()) r.factors.push_back(factors[i++]);
  return r;
}

int mono_compare(const Monomial& a, const Monomial& b) {
  int da = a.total_degree(), db = b.total_degree();
  if (da != db) return da < db ? -1 : 1;
  size_t i = 0, j = 0;
  while (i < a.factors.size() && j < b.factors.size()) {
    if (a.factors[i].first == b.factors[j].first) {
      if (a.factors[i].second != b.factors[j].second)
        return a.factors[i].second < b.factors[j].second ? -1 : 1;
      ++i;
      ++j;
    } else if (a.factors[i].first < b.factors[j].first) {
      return 1;  // a has positive exponent on an earlier var
    } else {
      return -1;
    }
  }
  if (i < a.factors.size()) return 1;
  if (j < b.factors.size()) return -1;
  return 0;
}

Poly Poly::constant(const Rat& c) {
  Poly p;
  if (c != 0) p.terms_.emplace(Monomial::one(), c);
  return p;
}

Poly Poly::variable(Var v) {
  Poly p;
  p.terms_.emplace(Monomial::variable(v), Rat(1));
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

bool Poly::is_one() const {
  return terms_.size() == 1 && terms_.begin()->first.is_one() &&
         terms_.begin()->second == 1;
}

const Monomial& Poly::leading_monomial() const {
  if (is_zero()) throw Error("leading_monomial of zero polynomial");
  return terms_.begin()->first;
}

const Rat& Poly::leading_coeff() const {
  if (is_zero()) throw Error("leading_coeff of zero polynomial");
  return terms_.begin()->second;
}

Rat Poly::constant_value() const {
  if (is_zero()) return Rat(0);
  return terms_.begin()->second;
}

void Poly::add_term(const Monomial& m, const Rat& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  for (auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

Poly Poly::operator-(const Poly& o) const {
  Poly r = *this;
  for (auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

Poly Poly::operator-() const {
  Poly r;
  for (auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

Poly Poly::operator*(const Poly& o) const {
  Poly r;
  for (auto& [m1, c1] : terms_)
    for (auto& [m2, c2] : o.terms_) r.add_term(m1.times(m2), c1 * c2);
  return r;
}

Poly Poly::mul_scalar(const Rat& c) const {
  Poly r;
  if (c == 0) return r;
  for (auto& [m, k] : terms_) r.terms_.emplace(m, k * c);
  return r;
}

Poly Poly::mul_term(const Monomial& m, const Rat& c) const {
  Poly r;
  if (c == 0) return r;
  for (auto& [m1, c1] : terms_) r.add_term(m1.times(m), c1 * c);
  return r;
}

Poly Poly::pow_int(int k) const {
  if (k < 0) throw Error("negative power on polynomial");
  Poly r = Poly::constant(1);
  Poly base = *this;
  while (k > 0) {
    if (k & 1) r = r * base;
    base = (k >>= 1) ? base * base : base;
  }
  return r;
}

Poly Poly::derivative(Var v) const {
  Poly r;
  for (auto& [m, c] : terms_) {
    int e = m.degree_in(v);
    if (e == 0) continue;
    Monomial dm;
    for (auto& [w, k] : m.factors) {
      if (w == v) {
        if (k > 1) dm.factors.emplace_back(w, k - 1);
      } else {
        dm.factors.emplace_back(w, k);
      }
    }
    r.add_term(dm, c * e);
  }
  return r;
}

int Poly::total_degree() const {
  if (is_zero()) return -1;
  return terms_.begin()->first.total_degree();  // grlex leading term has max degree
}

int Poly::degree_in(Var v) const {
  int d = 0;
  for (auto& [m, c] : terms_) d = std::max(d, m.degree_in(v));
  return d;
}

std::set<Var> Poly::vars() const {
  std::set<Var> s;
  for (auto& [m, c] : terms_)
    for (auto& [v, e] : m.factors) s.insert(v);
  return s;
}

bool Poly::depends_on(Var v) const {
  for (auto& [m, c] : terms_)
    if (m.degree_in(v) > 0) return true;
  return false;
}

Poly Poly::coeff_of(Var v, int k) const {
  Poly r;
  for (auto& [m, c] : terms_) {
    if (m.degree_in(v) != k) continue;
    Monomial rest;
    for (auto& [w, e] : m.factors)
      if (!(w == v)) rest.factors.emplace_back(w, e);
    r.add_term(rest, c);
  }
  return r;
}

Rat Poly::rational_content() const {
  if (is_zero()) return Rat(0);
  Int g(0), l(1);
  for (auto& [m, c] : terms_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num().get_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
  }
  Rat content(g, l);
  content.canonicalize();
  if (leading_coeff() < 0) content = -content;
  return content;
}

Poly Poly::primitive() const {
  if (is_zero()) return *this;
  Rat c = rational_content();
  Poly r;
  for (auto& [m, k] : terms_) r.terms_.emplace(m, Rat(k / c));
  return r;
}

Poly Poly::divexact(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw Error("divexact by zero polynomial");
  Poly q;
  Poly r = a;
  const Monomial& lb = b.leading_monomial();
  const Rat& cb = b.leading_coeff();
  while (!r.is_zero()) {
    auto m = r.leading_monomial().divided_by(lb);
    if (!m) throw Error("divexact: not divisible");
    Rat c = r.leading_coeff() / cb;
    q.add_term(*m, c);
    r = r - b.mul_term(*m, c);
  }
  return q;
}

namespace {

// Exact division over the integers; fails if any quotient coefficient is fractional.
bool try_divexact_z(const Poly& a, const Poly& b, Poly& q) {
  q = Poly();
  Poly r = a;
  const Monomial& lb = b.leading_monomial();
  const Rat& cb = b.leading_coeff();
  while (!r.is_zero()) {
    auto m = r.leading_monomial().divided_by(lb);
    if (!m) return false;
    Rat c = r.leading_coeff() / cb;
    if (c.get_den() != 1) return false;
    q.add_term(*m, c);
    r = r - b.mul_term(*m, c);
  }
  return true;
}

// Per-variable minimum exponents across all terms.
Monomial monomial_content(const Poly& p) {
  std::map<Var, int> mins;
  bool first = true;
  for (auto& [m, c] : p.terms()) {
    if (first) {
      for (auto& [v, e] : m.factors) mins[v] = e;
      first = false;
      continue;
    }
    for (auto it = mins.begin(); it != mins.end();) {
      int e = m.degree_in(it->first);
      if (e == 0) {
        it = mins.erase(it);
      } else {
        it->second = std::min(it->second, e);
        ++it;
      }
    }
    if (mins.empty()) break;
  }
  Monomial out;
  for (auto& [v, e] : mins) out.factors.emplace_back(v, e);
  return out;
}

Poly divide_monomial(const Poly& p, const Monomial& m) {
  if (m.is_one()) return p;
  Poly r;
  for (auto& [mono, c] : p.terms()) r.add_term(*mono.divided_by(m), c);
  return r;
}

Int coeff_height(const Poly& p) {
  Int h(0);
  for (auto& [m, c] : p.terms()) {
    Int a = abs(c.get_num());
    if (a > h) h = a;
  }
  return h;
}

Int int_content(const Poly& p) {
  Int g(0);
  for (auto& [m, c] : p.terms()) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num().get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

Poly divide_int(const Poly& p, const Int& d) {
  if (d == 1) return p;
  Poly r;
  for (auto& [m, c] : p.terms()) r.add_term(m, Rat(c.get_num() / d));
  return r;
}

// Evaluation of one variable at an integer point.
Poly eval_var(const Poly& p, Var x, const Int& xi) {
  std::vector<Int> pow(p.degree_in(x) + 1);
  pow[0] = 1;
  for (size_t k = 1; k < pow.size(); ++k) pow[k] = pow[k - 1] * xi;
  Poly out;
  for (auto& [m, c] : p.terms()) {
    Monomial rest;
    int e = 0;
    for (auto& [v, k] : m.factors) {
      if (v == x)
        e = k;
      else
        rest.factors.emplace_back(v, k);
    }
    out.add_term(rest, Rat(c.get_num() * pow[e]));
  }
  return out;
}

// Symmetric remainder of every coefficient modulo xi, in (-xi/2, xi/2].
Poly balanced_mod(const Poly& p, const Int& xi) {
  Int half = xi / 2;
  Poly out;
  for (auto& [m, c] : p.terms()) {
    Int r = c.get_num() % xi;
    if (r > half) r -= xi;
    if (r < -half) r += xi;
    out.add_term(m, Rat(r));
  }
  return out;
}

// Integer-point heuristic: evaluate one variable at xi, take the gcd of the images,
// and lift it back through its base-xi digits. Everything stays in Z[vars] with
// contents included, since the integer content of an image carries the evaluation of
// the true gcd. With xi past twice the divisor coefficient bound, a candidate that
// exactly divides both inputs over Z is the gcd, so the division check certifies the
// result and a miss falls back to the remainder sequence.
std::optional<Poly> heuristic_gcd(const Poly& a0, const Poly& b0, int depth) {
  if (depth > 12) return std::nullopt;
  if (a0.is_zero()) return b0;
  if (b0.is_zero()) return a0;
  if (a0.is_constant() || b0.is_constant()) {
    Int g(0);
    for (auto& [m, c] : a0.terms()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num().get_mpz_t());
    for (auto& [m, c] : b0.terms()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num().get_mpz_t());
    return Poly::constant(Rat(g));
  }

  // Split off integer and monomial content; both gcd componentwise, and the stripped
  // inputs keep the evaluation points and certificate divisions small.
  Monomial mca = monomial_content(a0), mcb = monomial_content(b0);
  Monomial mg;
  for (auto& [v, e] : mca.factors) {
    int eb = mcb.degree_in(v);
    if (eb > 0) mg.factors.emplace_back(v, std::min(e, eb));
  }
  Int ica = int_content(a0), icb = int_content(b0);
  Int icg;
  mpz_gcd(icg.get_mpz_t(), ica.get_mpz_t(), icb.get_mpz_t());
  Poly a = divide_int(divide_monomial(a0, mca), ica);
  Poly b = divide_int(divide_monomial(b0, mcb), icb);

  auto va = a.vars();
  for (Var v : b.vars()) va.insert(v);
  Var x = *va.begin();
  int best = 1 << 20;
  for (Var v : va) {
    int d = std::min(a.degree_in(v), b.degree_in(v));
    if (d < best) {
      best = d;
      x = v;
    }
  }
  int digit_cap = std::min(a.degree_in(x), b.degree_in(x)) + 1;

  Int ha = coeff_height(a), hb = coeff_height(b);
  Int xi = 2 * (ha < hb ? ha : hb) + 29;

  for (int attempt = 0; attempt < 6; ++attempt, xi = xi * 73794 / 27011) {
    std::optional<Poly> img = heuristic_gcd(eval_var(a, x, xi), eval_var(b, x, xi), depth + 1);
    if (!img) continue;
    Poly gamma = *img;
    Poly cand;
    int digits = 0;
    while (!gamma.is_zero()) {
      if (digits > digit_cap) break;
      Poly d = balanced_mod(gamma, xi);
      cand = cand + d.mul_term(Monomial::variable(x, digits), Rat(1));
      Poly num = gamma - d;
      Poly next;
      for (auto& [m, c] : num.terms()) next.add_term(m, Rat(c.get_num() / xi));
      gamma = next;
      ++digits;
    }
    if (!gamma.is_zero() || cand.is_zero()) continue;
    Poly q;
    if (try_divexact_z(a, cand, q) && try_divexact_z(b, cand, q))
      return cand.mul_term(mg, Rat(icg));
  }
  return std::nullopt;
}

// Pseudo-remainder of a by b with respect to x (coefficients are polynomials in the
// remaining variables). Result has deg_x < deg_x(b); scaling factors are irrelevant for
// the primitive PRS since every round re-normalizes content.
Poly pseudo_rem(const Poly& a, const Poly& b, Var x) {
  int db = b.degree_in(x);
  Poly lcb = b.coeff_of(x, db);
  Poly r = a;
  while (!r.is_zero()) {
    int dr = r.degree_in(x);
    if (dr < db) break;
    Poly lcr = r.coeff_of(x, dr);
    Poly shift = Poly::variable(x).pow_int(dr - db);
    r = (r * lcb - b * lcr * shift).primitive();
  }
  return r;
}

Poly gcd_inner(const Poly& a, const Poly& b);

// gcd of the coefficients of p viewed as univariate in x.
Poly content_wrt(const Poly& p, Var x) {
  Poly g;
  for (int k = 0; k <= p.degree_in(x); ++k) {
    Poly c = p.coeff_of(x, k);
    if (c.is_zero()) continue;
    g = g.is_zero() ? c.primitive() : gcd_inner(g, c.primitive());
    if (g.is_one()) break;
  }
  return g;
}

// Primitive part with respect to x: p with its x-content divided out.
Poly pp_wrt(const Poly& p, Var x) {
  if (p.is_zero()) return p;
  Poly c = content_wrt(p, x);
  return Poly::divexact(p, c).primitive();
}

Poly gcd_inner(const Poly& a0, const Poly& b0) {
  if (a0.is_zero()) return b0.primitive();
  if (b0.is_zero()) return a0.primitive();
  if (a0.is_constant() || b0.is_constant()) return Poly::constant(1);
  auto va = a0.vars();
  auto vb = b0.vars();
  std::vector<Var> common;
  std::set_intersection(va.begin(), va.end(), vb.begin(), vb.end(),
                        std::back_inserter(common));
  if (common.empty()) return Poly::constant(1);
  Var x = common.front();
  int best = 1 << 20;
  for (Var v : common) {
    int d = std::min(a0.degree_in(v), b0.degree_in(v));
    if (d < best) {
      best = d;
      x = v;
    }
  }

  Poly ca = content_wrt(a0, x);
  Poly cb = content_wrt(b0, x);
  Poly cont = gcd_inner(ca, cb);
  Poly A = pp_wrt(a0, x);
  Poly B = pp_wrt(b0, x);
  if (A.degree_in(x) < B.degree_in(x)) std::swap(A, B);
  while (!B.is_zero()) {
    Poly R = pseudo_rem(A, B, x);
    A = B;
    B = R.is_zero() ? R : pp_wrt(R, x);
  }
  return (cont * A).primitive();
}

}  // namespace

Poly Poly::gcd(const Poly& a, const Poly& b) {
  if (a.is_zero() && b.is_zero()) return Poly();
  if (a.is_constant() || b.is_constant()) {
    if (a.is_zero()) return b.primitive();
    if (b.is_zero()) return a.primitive();
    return Poly::constant(1);
  }
  Monomial ma = monomial_content(a);
  Monomial mb = monomial_content(b);
  Monomial mg;
  for (auto& [v, e] : ma.factors) {
    int eb = mb.degree_in(v);
    if (eb > 0) mg.factors.emplace_back(v, std::min(e, eb));
  }
  Poly A = divide_monomial(a, ma).primitive();
  Poly B = divide_monomial(b, mb).primitive();
  Poly g, q;
  if (try_divexact_z(A, B, q))
    g = B;
  else if (try_divexact_z(B, A, q))
    g = A;
  else if (auto h = heuristic_gcd(A, B, 0))
    g = h->primitive();
  else
    g = gcd_inner(A, B);
  return g.mul_term(mg, Rat(1));
}

Rat Poly::eval_q(const std::map<Var, Rat>& point) const {
  Rat total(0);
  for (auto& [m, c] : terms_) {
    Rat t = c;
    for (auto& [v, e] : m.factors) {
      auto it = point.find(v);
      if (it == point.end()) throw ChartMismatch("eval point missing " + v.display());
      Rat p = it->second;
      for (int i = 0; i < e; ++i) t *= p;
    }
    total += t;
  }
  return total;
}

double Poly::eval_d(const std::map<Var, double>& point) const {
  double total = 0;
  for (auto& [m, c] : terms_) {
    double t = c.get_d();
    for (auto& [v, e] : m.factors) {
      auto it = point.find(v);
      if (it == point.end()) throw ChartMismatch("eval point missing " + v.display());
      for (int i = 0; i < e; ++i) t *= it->second;
    }
    total += t;
  }
  return total;
}

}  // namespace flatnf

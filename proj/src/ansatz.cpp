#include "flatnf/ansatz.hpp"

#include <algorithm>
#include <map>

#include "flatnf/errors.hpp"
#include "flatnf/linalg.hpp"

namespace flatnf {

std::vector<Monomial> monomial_basis(const std::vector<Var>& vars, int max_degree) {
  std::vector<Monomial> out;
  std::vector<Monomial> current{Monomial::one()};
  for (int d = 1; d <= max_degree; ++d) {
    std::vector<Monomial> next;
    for (const Monomial& m : current)
      for (Var v : vars) {
        Monomial t = m.times(Monomial::variable(v));
        if (std::find(next.begin(), next.end(), t) == next.end()) next.push_back(t);
      }
    std::sort(next.begin(), next.end(),
              [](const Monomial& a, const Monomial& b) { return mono_compare(a, b) > 0; });
    out.insert(out.end(), next.begin(), next.end());
    current = std::move(next);
  }
  return out;
}

std::vector<std::vector<Rat>> expr_combination_kernel(
    const std::vector<std::vector<Expr>>& blocks) {
  size_t ncols = 0;
  for (auto& b : blocks)
    if (!b.empty()) ncols = b.size();
  if (ncols == 0) return {};
  std::vector<std::vector<Rat>> rows;
  for (const auto& block : blocks) {
    if (block.empty()) continue;
    // Common denominator across the block (lcm), then each column scales to a polynomial.
    Poly lcm = Poly::constant(1);
    for (const Expr& e : block) {
      Poly g = Poly::gcd(lcm, e.den());
      lcm = Poly::divexact(lcm * e.den(), g).primitive();
    }
    std::vector<Poly> polys;
    polys.reserve(block.size());
    for (const Expr& e : block)
      polys.push_back(e.num() * Poly::divexact(lcm, e.den()));
    std::map<Monomial, size_t, MonoGreater> mono_index;
    for (const Poly& p : polys)
      for (auto& [m, c] : p.terms()) mono_index.emplace(m, 0);
    size_t idx = 0;
    for (auto& [m, i] : mono_index) i = idx++;
    size_t base = rows.size();
    rows.resize(base + mono_index.size(), std::vector<Rat>(ncols, Rat(0)));
    for (size_t k = 0; k < polys.size(); ++k)
      for (auto& [m, c] : polys[k].terms()) rows[base + mono_index[m]][k] = c;
  }
  if (rows.empty()) {
    // Every block was empty of conditions: the whole space is the kernel.
    std::vector<std::vector<Rat>> id;
    for (size_t k = 0; k < ncols; ++k) {
      std::vector<Rat> v(ncols, Rat(0));
      v[k] = 1;
      id.push_back(std::move(v));
    }
    return id;
  }
  return rat_kernel(std::move(rows), static_cast<int>(ncols));
}

Expr DerivationCondition::apply(const Expr& phi) const {
  Expr r;
  for (auto& [v, c] : parts) r = r + c * phi.diff(v);
  return r;
}

std::vector<Expr> polynomial_integral_space(const std::vector<DerivationCondition>& conds,
                                            const std::vector<Var>& allowed, int degree) {
  std::vector<Monomial> basis = monomial_basis(allowed, degree);
  if (basis.empty()) return {};
  std::vector<std::vector<Expr>> blocks;
  for (const auto& cond : conds) {
    std::vector<Expr> col;
    col.reserve(basis.size());
    for (const Monomial& m : basis) {
      Poly p;
      p.add_term(m, Rat(1));
      col.push_back(cond.apply(Expr::fraction(p, Poly::constant(1))));
    }
    blocks.push_back(std::move(col));
  }
  auto kernel = expr_combination_kernel(blocks);
  std::vector<Expr> out;
  for (auto& coeffs : kernel) {
    Poly p;
    for (size_t k = 0; k < basis.size(); ++k)
      if (coeffs[k] != 0) p.add_term(basis[k], coeffs[k]);
    if (!p.is_zero()) out.push_back(Expr::fraction(p, Poly::constant(1)));
  }
  return out;
}

std::vector<Expr> rational_integral_space(const std::vector<DerivationCondition>& conds,
                                          const std::vector<Var>& allowed, int degree,
                                          const std::vector<Poly>& den_candidates) {
  std::vector<Monomial> basis = monomial_basis(allowed, degree);
  if (basis.empty()) return {};
  std::vector<Poly> dens;
  auto add_candidate = [&](const Poly& q) {
    if (q.is_zero() || q.is_constant()) return;
    Poly p = q.primitive();
    for (const Poly& d : dens)
      if (d == p) return;
    if (p.total_degree() <= degree) dens.push_back(p);
  };
  for (const Poly& q : den_candidates) add_candidate(q);
  size_t first_order = dens.size();
  for (size_t i = 0; i < first_order; ++i)
    for (size_t j = i; j < first_order; ++j) add_candidate(dens[i] * dens[j]);

  for (const Poly& q : dens) {
    Expr Q = Expr::fraction(q, Poly::constant(1));
    std::vector<std::vector<Expr>> blocks;
    for (const auto& cond : conds) {
      Expr vq = cond.apply(Q);
      std::vector<Expr> col;
      col.reserve(basis.size());
      for (const Monomial& m : basis) {
        Poly p;
        p.add_term(m, Rat(1));
        Expr P = Expr::fraction(p, Poly::constant(1));
        col.push_back(cond.apply(P) * Q - P * vq);
      }
      blocks.push_back(std::move(col));
    }
    auto kernel = expr_combination_kernel(blocks);
    std::vector<Expr> out;
    for (auto& coeffs : kernel) {
      Poly p;
      for (size_t k = 0; k < basis.size(); ++k)
        if (coeffs[k] != 0) p.add_term(basis[k], coeffs[k]);
      if (p.is_zero()) continue;
      Expr phi = Expr::fraction(p, Poly::constant(1)) / Q;
      if (!phi.is_constant()) out.push_back(phi);
    }
    if (!out.empty()) return out;
  }
  return {};
}

}  // namespace flatnf

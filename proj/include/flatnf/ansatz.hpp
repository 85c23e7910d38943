#pragma once
#include <optional>
#include <vector>

#include "flatnf/expr.hpp"

namespace flatnf {

// All monomials of total degree 1..max_degree over vars, ascending degree, then by the
// canonical monomial order within each degree.
std::vector<Monomial> monomial_basis(const std::vector<Var>& vars, int max_degree);

// Kernel of (c_1..c_n) -> sum_k c_k * cols[b][k] == 0 for every block b: exact rational
// coefficient vectors spanning all linear combinations that vanish identically.
std::vector<std::vector<Rat>> expr_combination_kernel(
    const std::vector<std::vector<Expr>>& blocks);

// A derivation condition sum_i coeff_i * d(phi)/d(var_i) == 0.
struct DerivationCondition {
  std::vector<std::pair<Var, Expr>> parts;
  Expr apply(const Expr& phi) const;
};

// Basis of polynomial solutions (modulo constants) of all conditions, total degree up to
// `degree`, in the allowed variables only.
std::vector<Expr> polynomial_integral_space(const std::vector<DerivationCondition>& conds,
                                            const std::vector<Var>& allowed, int degree);

// Rational solutions P/Q for candidate denominators Q (tried in order): per candidate the
// problem v(P)Q - P v(Q) = 0 is linear in P. Returns all found for the first Q that
// admits a non-constant solution.
std::vector<Expr> rational_integral_space(const std::vector<DerivationCondition>& conds,
                                          const std::vector<Var>& allowed, int degree,
                                          const std::vector<Poly>& den_candidates);

}  // namespace flatnf

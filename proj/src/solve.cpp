#include "flatnf/solve.hpp"

#include <algorithm>

#include "flatnf/errors.hpp"
#include "flatnf/linalg.hpp"

namespace flatnf {

namespace {

// t = -(num at t^0) / (coeff of t^1), valid when num is affine in t.
std::optional<Expr> solve_affine_single(const Expr& eq, Var t) {
  const Poly& num = eq.num();
  if (num.degree_in(t) != 1) return std::nullopt;
  Poly c = num.coeff_of(t, 1);
  Poly b = num.coeff_of(t, 0);
  if (c.depends_on(t)) return std::nullopt;
  return -Expr::fraction(b, Poly::constant(1)) / Expr::fraction(c, Poly::constant(1));
}

bool affine_in_all(const Poly& num, const std::vector<Var>& targets) {
  for (auto& [m, c] : num.terms()) {
    int d = 0;
    for (Var t : targets) d += m.degree_in(t);
    if (d > 1) return false;
  }
  return true;
}

}  // namespace

std::map<Var, Expr> solve_for(const std::vector<Expr>& equations,
                              const std::vector<Var>& targets) {
  if (targets.empty()) return {};
  if (equations.size() < targets.size())
    throw UnderdeterminedTargets("solve_for: " + std::to_string(equations.size()) +
                                 " equations for " + std::to_string(targets.size()) +
                                 " targets");
  SymMatrix jac(static_cast<int>(equations.size()), static_cast<int>(targets.size()));
  for (size_t i = 0; i < equations.size(); ++i)
    for (size_t j = 0; j < targets.size(); ++j)
      jac.at(static_cast<int>(i), static_cast<int>(j)) = equations[i].diff(targets[j]);
  if (rank_symbolic(jac) < static_cast<int>(targets.size()))
    throw UnderdeterminedTargets("solve_for: Jacobian rank below target count");

  std::vector<Expr> eqs = equations;
  std::vector<bool> used(eqs.size(), false);
  std::vector<Var> remaining = targets;
  std::map<Var, Expr> solution;

  auto substitute_everywhere = [&](Var t, const Expr& val) {
    std::map<Var, Expr> sub{{t, val}};
    for (size_t i = 0; i < eqs.size(); ++i)
      if (!used[i]) eqs[i] = eqs[i].substitute(sub);
    for (auto& [v, e] : solution) e = e.substitute(sub);
    solution.emplace(t, val);
    remaining.erase(std::find(remaining.begin(), remaining.end(), t));
  };

  while (!remaining.empty()) {
    bool progress = false;
    for (size_t i = 0; i < eqs.size() && !progress; ++i) {
      if (used[i] || eqs[i].is_zero()) continue;
      for (Var t : remaining) {
        auto val = solve_affine_single(eqs[i], t);
        if (!val) continue;
        bool self = false;  // a target may not appear in its own solution
        if (val->depends_on(t)) self = true;
        if (self) continue;
        used[i] = true;
        substitute_everywhere(t, *val);
        progress = true;
        break;
      }
    }
    if (progress) continue;

    // Jointly-affine fallback over the remaining targets.
    std::vector<size_t> rows;
    for (size_t i = 0; i < eqs.size(); ++i)
      if (!used[i] && !eqs[i].is_zero() && affine_in_all(eqs[i].num(), remaining))
        rows.push_back(i);
    if (!rows.empty()) {
      SymMatrix A(static_cast<int>(rows.size()), static_cast<int>(remaining.size()));
      std::vector<Expr> b(rows.size());
      bool coeffs_clean = true;
      for (size_t r = 0; r < rows.size(); ++r) {
        const Poly& num = eqs[rows[r]].num();
        Poly rest = num;
        for (size_t j = 0; j < remaining.size(); ++j) {
          Poly cj = num.coeff_of(remaining[j], 1);
          for (Var other : remaining)
            if (cj.depends_on(other)) coeffs_clean = false;
          A.at(static_cast<int>(r), static_cast<int>(j)) =
              Expr::fraction(cj, Poly::constant(1));
          rest = rest - cj * Poly::variable(remaining[j]);
        }
        b[r] = -Expr::fraction(rest, Poly::constant(1));
      }
      if (coeffs_clean) {
        LinearSolution sol = solve_linear(A, b);
        if (sol.consistent && sol.unique) {
          std::vector<Var> targets_now = remaining;
          for (size_t j = 0; j < targets_now.size(); ++j) {
            // values may not reference remaining targets; solve_linear guarantees that
            for (Var t : targets_now)
              if (sol.x[j].depends_on(t))
                throw UnsupportedAlgebraicForm(
                    "solve_for: joint solution references a target");
          }
          for (size_t j = 0; j < targets_now.size(); ++j) {
            std::map<Var, Expr> sub{{targets_now[j], sol.x[j]}};
            for (size_t i = 0; i < eqs.size(); ++i)
              if (!used[i]) eqs[i] = eqs[i].substitute(sub);
            for (auto& [v, e] : solution) e = e.substitute(sub);
            solution.emplace(targets_now[j], sol.x[j]);
          }
          remaining.clear();
          continue;
        }
      }
    }
    throw UnsupportedAlgebraicForm(
        "solve_for: stuck outside the affine/triangular class (first blocked target " +
        remaining.front().display() + ")");
  }

  // Residuals of every equation must vanish identically.
  for (const Expr& e : equations) {
    Expr r = e.substitute(solution);
    if (!r.is_zero())
      throw UnsupportedAlgebraicForm("solve_for: nonzero residual " + r.str());
  }
  return solution;
}

bool try_solve_for(const std::vector<Expr>& equations, const std::vector<Var>& targets,
                   std::map<Var, Expr>& out) {
  try {
    out = solve_for(equations, targets);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace flatnf

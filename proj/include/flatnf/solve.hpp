#pragma once
#include <map>
#include <vector>

#include "flatnf/expr.hpp"

namespace flatnf {

// Solve {equations == 0} for the target variables. Supported class: systems reducible by
// (1) repeated single-target steps on equations whose numerator is affine in that target,
// and (2) a final jointly-affine linear solve over the remaining targets. Throws
// UnderdeterminedTargets when the Jacobian rank is below the target count and
// UnsupportedAlgebraicForm when the reduction gets stuck or residuals do not vanish.
std::map<Var, Expr> solve_for(const std::vector<Expr>& equations,
                              const std::vector<Var>& targets);

// True if solve_for would accept (no throw); result stored into out.
bool try_solve_for(const std::vector<Expr>& equations, const std::vector<Var>& targets,
                   std::map<Var, Expr>& out);

}  // namespace flatnf

#include "flatnf/parameterize.hpp"

#include <algorithm>

#include "flatnf/errors.hpp"
#include "flatnf/solve.hpp"

namespace flatnf {

namespace {

Expr shift_once(const Expr& e) {
  std::map<Var, Var> up;
  for (const Var& v : e.vars()) {
    if (v.kind() != VarKind::Output)
      throw InvariantViolation("parameterization entry contains the non-output variable " +
                               v.display());
    up[v] = v.shifted(1);
  }
  return e.rename(up);
}

int max_shift_of(const Expr& e, const std::string& yname) {
  int best = -1;
  for (const Var& v : e.vars())
    if (v.kind() == VarKind::Output && v.name() == yname) best = std::max(best, v.shift());
  return best;
}

}  // namespace

Parameterization build_parameterization(const DiscreteSystem& original,
                                        const TriangularForm& tf, const Options& opt) {
  (void)opt;
  const DiscreteSystem& sys = tf.system;
  const int kbar = static_cast<int>(tf.blocks.size());
  const int m = sys.m();
  if (static_cast<int>(tf.flat_output.size()) != m)
    throw NotFlat("no flat output of input dimension is available");

  Parameterization p;
  p.flat_output_vars = tf.flat_output;
  std::map<Var, Expr> params;
  for (int j = 0; j < m; ++j)
    params[tf.flat_output[j]] =
        Expr::variable(Var::output("y" + std::to_string(j + 1), 0));

  for (int k = kbar; k >= 1; --k) {
    std::vector<Expr> eqs;
    for (const Var& b : tf.blocks[k - 1]) {
      auto it = params.find(b);
      if (it == params.end())
        throw InvariantViolation("level-" + std::to_string(k) + " variable " + b.display() +
                                 " has no parameterization yet");
      eqs.push_back(shift_once(it->second) - sys.rhs(b).substitute(params));
    }
    VarList unknowns;
    for (const Var& zv : tf.z[k - 1])
      if (!params.count(zv)) unknowns.push_back(zv);
    if (unknowns.empty()) {
      for (const Expr& e : eqs)
        if (!e.is_zero())
          throw InvariantViolation("level-" + std::to_string(k) +
                                   " equations are over-determined");
      continue;
    }
    std::map<Var, Expr> sol = solve_for(eqs, unknowns);
    for (const auto& [v, e] : sol) params[v] = e;
  }

  for (const Var& v : sys.xu_chart().vars)
    if (!params.count(v))
      throw InvariantViolation("variable " + v.display() + " was never parameterized");

  for (const Var& s : original.states())
    p.Fx[s] = push_expr(Expr::variable(s), tf.changes).substitute(params);
  for (const Var& u : original.inputs())
    p.Fu[u] = push_expr(Expr::variable(u), tf.changes).substitute(params);
  p.flat_output_original = flat_output_in_original(tf);

  for (int j = 0; j < m; ++j) {
    std::string yname = "y" + std::to_string(j + 1);
    int rx = -1, ru = -1;
    for (const auto& [v, e] : p.Fx) rx = std::max(rx, max_shift_of(e, yname));
    for (const auto& [v, e] : p.Fu) ru = std::max(ru, max_shift_of(e, yname));
    p.R.push_back(std::max(rx + 1, ru));
  }
  p.q = -1;
  for (const Expr& e : p.flat_output_original)
    for (const Var& v : e.vars())
      if (v.kind() == VarKind::Input) p.q = 0;
  return p;
}

std::vector<ParamCheck> verify_parameterization(const DiscreteSystem& original,
                                                const Parameterization& p) {
  std::map<Var, Expr> sub;
  for (const auto& [v, e] : p.Fx) sub[v] = e;
  for (const auto& [v, e] : p.Fu) sub[v] = e;

  std::vector<ParamCheck> checks;
  for (const Var& s : original.states()) {
    Expr residual = shift_once(p.Fx.at(s)) - original.rhs(s).substitute(sub);
    checks.push_back({"shift_compat_" + s.display(), residual.is_zero(),
                      residual.is_zero() ? "" : "residual " + residual.str()});
  }
  for (size_t j = 0; j < p.flat_output_original.size(); ++j) {
    Var yj = Var::output("y" + std::to_string(j + 1), 0);
    Expr residual = p.flat_output_original[j].substitute(sub) - Expr::variable(yj);
    checks.push_back({"output_recovers_" + yj.display(), residual.is_zero(),
                      residual.is_zero() ? "" : "residual " + residual.str()});
  }
  return checks;
}

}  // namespace flatnf

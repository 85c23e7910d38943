#include "flatnf/coordchange.hpp"

#include <optional>

#include "flatnf/errors.hpp"

namespace flatnf {

namespace {

VarList filter_kind(const VarList& vars, VarKind k) {
  VarList out;
  for (const Var& v : vars)
    if (v.kind() == k) out.push_back(v);
  return out;
}

}  // namespace

VarList CoordChange::old_states() const { return filter_kind(old_vars, VarKind::State); }
VarList CoordChange::new_states() const { return filter_kind(new_vars, VarKind::State); }
VarList CoordChange::old_inputs() const { return filter_kind(old_vars, VarKind::Input); }
VarList CoordChange::new_inputs() const { return filter_kind(new_vars, VarKind::Input); }

bool CoordChange::verify_roundtrip() const {
  if (old_vars.size() != new_vars.size()) return false;
  for (const Var& o : old_vars) {
    auto it = inverse.find(o);
    if (it == inverse.end()) return false;
    if (!(it->second.substitute(forward) == Expr::variable(o))) return false;
  }
  for (const Var& nv : new_vars) {
    auto it = forward.find(nv);
    if (it == forward.end()) return false;
    if (!(it->second.substitute(inverse) == Expr::variable(nv))) return false;
  }
  return true;
}

DiscreteSystem apply_change(const DiscreteSystem& sys, const CoordChange& ch) {
  if (ch.old_vars != sys.xu_chart().vars)
    throw ChartMismatch("coordinate change does not start from the system chart");

  std::map<Var, Expr> f_map;
  for (const Var& s : sys.states()) f_map[s] = sys.rhs(s);

  VarList new_states = ch.new_states();
  VarList new_inputs = ch.new_inputs();
  std::map<Var, Expr> new_f;
  for (const Var& ns : new_states) {
    Expr phi = ch.forward.at(ns);
    for (const Var& u : sys.inputs())
      if (phi.depends_on(u))
        throw ChartMismatch("state function for " + ns.display() + " depends on input " + u.display());
    new_f[ns] = phi.substitute(f_map).substitute(ch.inverse);
  }

  std::map<Var, Rat> new_eq;
  bool eq_ok = !sys.equilibrium().empty();
  if (eq_ok) {
    std::map<Var, Rat> point;
    for (const Var& v : sys.xu_chart().vars) point[v] = Rat(0);
    for (const auto& [v, q] : sys.equilibrium()) point[v] = q;
    for (const Var& nv : ch.new_vars) {
      std::optional<Rat> val = ch.forward.at(nv).eval_q(point);
      if (!val) {
        eq_ok = false;
        break;
      }
      new_eq[nv] = *val;
    }
  }
  if (!eq_ok) new_eq.clear();

  return DiscreteSystem(sys.name(), new_states, new_inputs, new_f, new_eq);
}

VectorField transform_xu(const VectorField& v, const CoordChange& ch, const Chart& new_chart) {
  std::vector<Expr> comps;
  comps.reserve(ch.new_vars.size());
  for (const Var& nv : new_chart.vars)
    comps.push_back(v.apply(ch.forward.at(nv)).substitute(ch.inverse));
  return VectorField{new_chart, comps};
}

Distribution transform_xu(const Distribution& d, const CoordChange& ch, const Chart& new_chart) {
  std::vector<VectorField> gens;
  for (const VectorField& g : d.basis()) gens.push_back(transform_xu(g, ch, new_chart));
  Distribution out(new_chart, gens);
  if (out.dim() != d.dim())
    throw InvariantViolation("coordinate change altered a distribution dimension");
  return out;
}

VectorField transform_xplus(const VectorField& v, const CoordChange& ch, const Chart& new_chart) {
  VarList old_states = ch.old_states();
  VarList new_states = ch.new_states();
  std::map<Var, Var> old_to_plus;
  for (const Var& s : old_states) old_to_plus[s] = s.plus();
  std::map<Var, Var> new_to_plus;
  for (const Var& s : new_states) new_to_plus[s] = s.plus();

  std::map<Var, Expr> inverse_plus;
  for (const Var& s : old_states) inverse_plus[s.plus()] = ch.inverse.at(s).rename(new_to_plus);

  std::vector<Expr> comps;
  for (const Var& ns : new_states) {
    Expr phi_plus = ch.forward.at(ns).rename(old_to_plus);
    comps.push_back(v.apply(phi_plus).substitute(inverse_plus));
  }
  return VectorField{new_chart, comps};
}

Distribution transform_xplus(const Distribution& d, const CoordChange& ch, const Chart& new_chart) {
  std::vector<VectorField> gens;
  for (const VectorField& g : d.basis()) gens.push_back(transform_xplus(g, ch, new_chart));
  Distribution out(new_chart, gens);
  if (out.dim() != d.dim())
    throw InvariantViolation("coordinate change altered a distribution dimension");
  return out;
}

Expr push_expr(const Expr& e, const CoordChange& ch) { return e.substitute(ch.inverse); }

Expr pull_expr(const Expr& e, const CoordChange& ch) { return e.substitute(ch.forward); }

Expr push_expr(const Expr& e, const std::vector<CoordChange>& chain) {
  Expr out = e;
  for (const CoordChange& ch : chain) out = push_expr(out, ch);
  return out;
}

Expr pull_expr(const Expr& e, const std::vector<CoordChange>& chain) {
  Expr out = e;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) out = pull_expr(out, *it);
  return out;
}

}  // namespace flatnf

#include "flatnf/system.hpp"

#include <set>

#include "flatnf/errors.hpp"

namespace flatnf {

bool is_reserved_name(const std::string& name) {
  if (name.size() > 2 && name.compare(name.size() - 2, 2, "_p") == 0) return true;
  if (name.size() < 2 || name[0] != 'y') return false;
  size_t i = 1;
  while (i < name.size() && std::isdigit(static_cast<unsigned char>(name[i]))) ++i;
  if (i == 1) return false;
  if (i == name.size()) return true;
  if (name[i] != '_' || i + 1 == name.size()) return false;
  for (size_t j = i + 1; j < name.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(name[j]))) return false;
  return true;
}

DiscreteSystem::DiscreteSystem(std::string name, VarList states, VarList inputs,
                               std::map<Var, Expr> f, std::map<Var, Rat> equilibrium)
    : name_(std::move(name)),
      states_(std::move(states)),
      inputs_(std::move(inputs)),
      f_(std::move(f)),
      eq_(std::move(equilibrium)) {
  if (states_.empty()) throw Error("system has no states");
  if (inputs_.empty()) throw Error("system has no inputs");
  std::set<Var> declared;
  for (Var v : states_) {
    if (v.kind() != VarKind::State) throw Error("state list holds a non-state variable");
    if (is_reserved_name(v.name())) throw Error("reserved variable name: " + v.name());
    if (!declared.insert(v).second) throw Error("duplicate state " + v.display());
  }
  for (Var v : inputs_) {
    if (v.kind() != VarKind::Input) throw Error("input list holds a non-input variable");
    if (is_reserved_name(v.name())) throw Error("reserved variable name: " + v.name());
    if (!declared.insert(v).second) throw Error("duplicate input " + v.display());
  }
  for (Var v : states_)
    if (!f_.count(v)) throw Error("missing update for state " + v.display());
  if (f_.size() != states_.size()) throw Error("update for an undeclared state");
  for (const auto& [v, e] : f_)
    for (Var w : e.vars())
      if (!declared.count(w))
        throw Error("update of " + v.display() + " uses undeclared " + w.display());
  for (const auto& [v, q] : eq_)
    if (!declared.count(v)) throw Error("equilibrium for undeclared " + v.display());

  xu_.tag = ChartTag::XU;
  xu_.vars = states_;
  for (Var v : inputs_) xu_.vars.push_back(v);
  xplus_.tag = ChartTag::Xplus;
  for (Var v : states_) xplus_.vars.push_back(v.plus());
}

const Expr& DiscreteSystem::rhs(Var state) const {
  auto it = f_.find(state);
  if (it == f_.end()) throw ChartMismatch("no update for " + state.display());
  return it->second;
}

const SymMatrix& DiscreteSystem::jacobian_xu() const {
  if (!jac_xu_) {
    auto J = std::make_shared<SymMatrix>(n(), n() + m());
    for (int i = 0; i < n(); ++i) {
      const Expr& fi = rhs(states_[i]);
      for (int j = 0; j < n() + m(); ++j) J->at(i, j) = fi.diff(xu_.vars[j]);
    }
    jac_xu_ = J;
  }
  return *jac_xu_;
}

const SymMatrix& DiscreteSystem::jacobian_u() const {
  if (!jac_u_) {
    auto J = std::make_shared<SymMatrix>(n(), m());
    for (int i = 0; i < n(); ++i) {
      const Expr& fi = rhs(states_[i]);
      for (int j = 0; j < m(); ++j) J->at(i, j) = fi.diff(inputs_[j]);
    }
    jac_u_ = J;
  }
  return *jac_u_;
}

const RrefResult& DiscreteSystem::jacobian_xu_rref() const {
  if (!jac_xu_rref_) jac_xu_rref_ = std::make_shared<RrefResult>(rref(jacobian_xu()));
  return *jac_xu_rref_;
}

void DiscreteSystem::require_well_posed(const Options& opt) const {
  if (well_posed_checked_) return;
  if (generic_rank(jacobian_xu(), opt.seed, opt.trials) != n())
    throw RankDeficientSystem("rank of d(x,u)f is below the state count for system " +
                              name_);
  if (generic_rank(jacobian_u(), opt.seed, opt.trials) != m())
    throw RankDeficientSystem("rank of d_u f is below the input count for system " +
                              name_);
  well_posed_checked_ = true;
}

namespace {

// Rank of an exactly evaluated matrix; nullopt when any entry hits a pole.
std::optional<int> rank_at_point(const SymMatrix& M, const std::map<Var, Rat>& point) {
  std::vector<std::vector<Rat>> rows(M.rows(), std::vector<Rat>(M.cols()));
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) {
      auto v = M.at(i, j).eval_q(point);
      if (!v) return std::nullopt;
      rows[i][j] = *v;
    }
  return M.cols() - static_cast<int>(rat_kernel(rows, M.cols()).size());
}

}  // namespace

bool DiscreteSystem::equilibrium_rank_drop() const {
  if (eq_.empty()) return false;
  std::map<Var, Rat> point = eq_;
  for (Var v : xu_.vars)
    if (!point.count(v)) point[v] = 0;
  auto rxu = rank_at_point(jacobian_xu(), point);
  if (!rxu || *rxu < n()) return true;
  auto ru = rank_at_point(jacobian_u(), point);
  return !ru || *ru < m();
}

}  // namespace flatnf

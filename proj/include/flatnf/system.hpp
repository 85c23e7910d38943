#pragma once
#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "flatnf/distribution.hpp"

namespace flatnf {

struct Options {
  uint64_t seed = 0;
  int trials = 5;
  int max_degree = 3;
  bool force_multi = false;
};

// x+ = f(x, u) with a declared coordinate order. Construction checks shape (one update
// per state, only declared variables on the right, no reserved names); the standing rank
// assumptions are checked by require_well_posed.
class DiscreteSystem {
 public:
  DiscreteSystem() = default;
  DiscreteSystem(std::string name, VarList states, VarList inputs, std::map<Var, Expr> f,
                 std::map<Var, Rat> equilibrium = {});

  const std::string& name() const { return name_; }
  const VarList& states() const { return states_; }
  const VarList& inputs() const { return inputs_; }
  int n() const { return static_cast<int>(states_.size()); }
  int m() const { return static_cast<int>(inputs_.size()); }
  const Expr& rhs(Var state) const;
  const std::map<Var, Expr>& f() const { return f_; }
  const std::map<Var, Rat>& equilibrium() const { return eq_; }

  const Chart& xu_chart() const { return xu_; }
  const Chart& xplus_chart() const { return xplus_; }

  // Rows follow the state order; columns the XU chart. Computed lazily and cached;
  // copies of the system share the caches (f is immutable after construction).
  const SymMatrix& jacobian_xu() const;
  const SymMatrix& jacobian_u() const;
  const RrefResult& jacobian_xu_rref() const;

  // Standing assumptions: rank d(x,u)f = n (submersion) and rank d_u f = m (no redundant
  // inputs). Throws RankDeficientSystem naming the violated one.
  void require_well_posed(const Options& opt) const;

  // True when either Jacobian loses rank (or hits a pole) at the recorded equilibrium.
  // False when no equilibrium is recorded.
  bool equilibrium_rank_drop() const;

 private:
  std::string name_;
  VarList states_, inputs_;
  std::map<Var, Expr> f_;
  std::map<Var, Rat> eq_;
  Chart xu_, xplus_;
  mutable std::shared_ptr<const SymMatrix> jac_xu_, jac_u_;
  mutable std::shared_ptr<const RrefResult> jac_xu_rref_;
  mutable bool well_posed_checked_ = false;
};

// Names ending in "_p" or matching y<digits>[_<digits>] collide with the printer's
// shifted-state and flat-output forms.
bool is_reserved_name(const std::string& name);

}  // namespace flatnf

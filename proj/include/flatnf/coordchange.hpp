#pragma once
#include <map>
#include <string>
#include <vector>

#include "flatnf/distribution.hpp"
#include "flatnf/system.hpp"

namespace flatnf {

enum class ChangeKind { State, Input };

// An invertible change of coordinates on the combined state/input space. Untouched
// coordinates appear in both charts as the same variable with identity entries. State
// changes map states to functions of states only; input changes may mix states and
// inputs into the new input but leave every state fixed.
struct CoordChange {
  ChangeKind kind = ChangeKind::State;
  std::string label;
  VarList old_vars;                // old chart, states then inputs
  VarList new_vars;                // new chart, positionally aligned with old_vars
  std::map<Var, Expr> forward;     // new var -> expression in old vars
  std::map<Var, Expr> inverse;     // old var -> expression in new vars
  bool structure_preserving = false;

  VarList old_states() const;
  VarList new_states() const;
  VarList old_inputs() const;
  VarList new_inputs() const;

  // Checks forward∘inverse and inverse∘forward against the identity, exactly.
  bool verify_roundtrip() const;
};

// Rewrites the update map into the new coordinates: fhat = forward ∘ f ∘ inverse.
// A recorded equilibrium is mapped through the forward functions; it is dropped if any
// of them has a pole there.
DiscreteSystem apply_change(const DiscreteSystem& sys, const CoordChange& ch);

// Pushes fields and distributions on the combined chart through the change.
VectorField transform_xu(const VectorField& v, const CoordChange& ch, const Chart& new_chart);
Distribution transform_xu(const Distribution& d, const CoordChange& ch, const Chart& new_chart);

// Same for the shifted chart; only the state part of the change is involved.
VectorField transform_xplus(const VectorField& v, const CoordChange& ch, const Chart& new_chart);
Distribution transform_xplus(const Distribution& d, const CoordChange& ch, const Chart& new_chart);

// Expression transport: push rewrites an expression in old coordinates into new ones,
// pull goes the other way.
Expr push_expr(const Expr& e, const CoordChange& ch);
Expr pull_expr(const Expr& e, const CoordChange& ch);

// Transport through a whole chain of changes, applied first-to-last (push) or unwound
// last-to-first (pull).
Expr push_expr(const Expr& e, const std::vector<CoordChange>& chain);
Expr pull_expr(const Expr& e, const std::vector<CoordChange>& chain);

}  // namespace flatnf

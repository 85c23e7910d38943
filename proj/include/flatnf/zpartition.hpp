#pragma once
#include <optional>
#include <vector>

#include "flatnf/straighten.hpp"

namespace flatnf {

// Per-step outcome of the z-partition construction. Full: D_k spans all of E_k and the
// whole current level enters z_k. Pair: the two current-level coordinates mix through a
// single generator; one of them is replaced by a first integral and carried as the
// complement. Chain: the carried complement mixes with the single current-level
// coordinate and is replaced again.
enum class StepCase { Full, Pair, Chain };

struct ZStep {
  int k = 0;
  StepCase kind = StepCase::Full;
  VarList z;                // z_k, in final coordinates
  std::optional<Var> zc;    // complement carried out of this step
  Expr alpha;               // mixing coefficient (zero for Full or a trivial mix)
  bool change_emitted = false;
};

struct ZPartitionResult {
  DiscreteSystem system;             // final coordinates
  std::vector<CoordChange> changes;  // in application order
  std::vector<ZStep> steps;          // k = 0..kbar-1
  std::vector<VarList> blocks;       // final level coordinates
  std::vector<Distribution> D;       // transformed to final coordinates
  std::vector<Distribution> Delta;
};

// Runs the step-by-step case analysis on a straightened two-input system, emitting the
// structure-preserving replacements it needs along the way. Afterwards every D_k is the
// span of the coordinate fields of z_0..z_k (asserted). The final step must come out
// Full; dimension patterns outside the three cases raise CaseAnalysisViolation.
ZPartitionResult build_zpartition(const StraightenResult& st, const Options& opt);

}  // namespace flatnf

#pragma once
#include <vector>

#include "flatnf/coordchange.hpp"
#include "flatnf/sequences.hpp"

namespace flatnf {

// Functions phi with v(phi) = 0 that avoid the fixed variables and genuinely depend on
// `replaced`. Candidates are deterministic: the plain coordinate itself first (when it
// qualifies), then polynomial solutions by ascending degree, then rational ones. The
// fields handed in here must have no component on a fixed coordinate.
std::vector<Expr> first_integral_candidates(const VectorField& v, const VarList& fixed,
                                            Var replaced, const Options& opt);
// First candidate; AnsatzExhausted when the search space is empty up to opt.max_degree.
Expr first_integral(const VectorField& v, const VarList& fixed, Var replaced,
                    const Options& opt);

struct StraightenResult {
  CoordChange change;
  DiscreteSystem system;        // in block coordinates
  std::vector<VarList> blocks;  // blocks[j-1] holds the level-(j) states
  std::vector<Distribution> D;  // transformed sequences
  std::vector<Distribution> E;
  std::vector<Distribution> Delta;
};

// State transformation putting every Delta_k into coordinate form: after the change,
// Delta_k is spanned by the shifted coordinate fields of blocks 1..k. Block functions
// are joint first integrals of the preceding Delta, picked greedily (plain coordinates
// in chart order first, then ansatz integrals) under strict rank growth of the stacked
// differentials, with bounded backtracking when the assembled map fails to invert.
StraightenResult straighten_delta(const DiscreteSystem& sys, const SequenceResult& seq,
                                  const Options& opt);

}  // namespace flatnf

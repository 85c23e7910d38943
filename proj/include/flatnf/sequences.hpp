#pragma once
#include <string>
#include <vector>

#include "flatnf/projectable.hpp"

namespace flatnf {

// Output of the nested-distribution iteration. D and E hold steps 0..kbar-1 on the XU
// chart; Delta holds the pushforwards, Delta[i] being the step-(i+1) distribution on the
// shifted chart. The step that detects stagnation is discarded (recorded in the audit).
struct SequenceResult {
  std::vector<Distribution> D;
  std::vector<Distribution> E;
  std::vector<Distribution> Delta;
  int kbar = 0;
  bool flat = false;
  bool sfl = false;
  std::vector<bool> d_equals_e;  // per kept step
  std::vector<std::string> audit;

  std::vector<int> delta_dims() const {
    std::vector<int> d;
    for (const Distribution& x : Delta) d.push_back(x.dim());
    return d;
  }
};

// E_0 = span of the input fields; D_k = largest projectable subdistribution of E_k;
// Delta_{k+1} = f_*(D_k); E_{k+1} is the projection preimage; stop on dimension
// stagnation. Once dim Delta reaches n the next step is stagnant by monotonicity, so the
// iteration stops there directly. Nestedness, involutivity, the dimension relation
// dim E = dim Delta + m, and (on a flat verdict) complete projectability of the last E
// are asserted on every run.
SequenceResult compute_sequences(const DiscreteSystem& sys, const Options& opt);

bool is_flat(const SequenceResult& r, int n);
bool is_static_feedback_linearizable(const SequenceResult& r, int n);
// span_equal(D_{kbar-1}, E_{kbar-1}); must hold whenever the system is flat.
bool check_last_step_projectable(const SequenceResult& r);

}  // namespace flatnf

#include "flatnf/sequences.hpp"

#include "flatnf/diffgeo.hpp"
#include "flatnf/errors.hpp"

namespace flatnf {

namespace {

std::string dims_line(const std::vector<int>& d) {
  std::string s = "(";
  for (size_t i = 0; i < d.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(d[i]);
  }
  return s + ")";
}

}  // namespace

SequenceResult compute_sequences(const DiscreteSystem& sys, const Options& opt) {
  sys.require_well_posed(opt);
  SequenceResult res;
  const Chart& xu = sys.xu_chart();
  const int n = sys.n();
  const int m = sys.m();

  Distribution kernel = kernel_distribution(sys, opt);
  Distribution delta_prev(sys.xplus_chart(), {});  // step-0 distribution is trivial
  for (int k = 0;; ++k) {
    if (k > n + 1)
      throw InvariantViolation("sequence iteration passed the state-dimension bound without stagnating");

    Distribution Ek = preimage_under_projection(delta_prev, xu);
    if (Ek.dim() != delta_prev.dim() + m)
      throw InvariantViolation("dim E_k != dim Delta_k + m at step " + std::to_string(k));

    ProjectableResult pr = largest_projectable_subdistribution(sys, Ek, opt, &kernel);
    for (const std::string& line : pr.audit)
      res.audit.push_back("step " + std::to_string(k) + ": " + line);

    if (pr.image.dim() == delta_prev.dim()) {
      res.kbar = k;
      res.audit.push_back("step " + std::to_string(k) + ": stagnation, image dimension stays " +
                          std::to_string(delta_prev.dim()) + "; step discarded, kbar = " +
                          std::to_string(k));
      break;
    }

    if (!pr.involutive)
      throw InvariantViolation("D_" + std::to_string(k) + " is not involutive");
    if (!is_involutive(pr.image))
      throw InvariantViolation("Delta_" + std::to_string(k + 1) + " is not involutive");
    for (const VectorField& g : pr.D.basis())
      if (!Ek.contains(g)) throw InvariantViolation("D_" + std::to_string(k) + " escapes E_" + std::to_string(k));
    if (k >= 1) {
      for (const VectorField& g : res.D.back().basis())
        if (!pr.D.contains(g))
          throw InvariantViolation("D_" + std::to_string(k - 1) + " is not contained in D_" + std::to_string(k));
      for (const VectorField& g : res.Delta.back().basis())
        if (!pr.image.contains(g))
          throw InvariantViolation("Delta_" + std::to_string(k) + " is not contained in Delta_" + std::to_string(k + 1));
    }

    res.D.push_back(pr.D);
    res.E.push_back(Ek);
    res.Delta.push_back(pr.image);
    res.d_equals_e.push_back(span_equal(pr.D, Ek));

    if (pr.image.dim() == n) {
      res.kbar = k + 1;
      res.audit.push_back("step " + std::to_string(k) + ": image dimension reached n = " +
                          std::to_string(n) + "; the next step is stagnant by monotonicity, kbar = " +
                          std::to_string(k + 1));
      break;
    }
    delta_prev = pr.image;
  }

  res.flat = is_flat(res, n);
  res.sfl = is_static_feedback_linearizable(res, n);
  res.audit.push_back("delta dims " + dims_line(res.delta_dims()) + ", kbar = " +
                      std::to_string(res.kbar) + (res.flat ? ", flat" : ", not flat") +
                      (res.sfl ? ", static feedback linearizable" : ""));

  if (res.flat && !check_last_step_projectable(res))
    throw InvariantViolation("flat verdict but E_{kbar-1} is not completely projectable");
  if (m == 2 && res.flat) {
    for (size_t i = 1; i < res.D.size(); ++i) {
      int growth = res.D[i].dim() - res.D[i - 1].dim();
      if (growth != 1 && growth != 2)
        throw InvariantViolation("two-input growth of D is " + std::to_string(growth) +
                                 " at step " + std::to_string(i));
    }
  }
  return res;
}

bool is_flat(const SequenceResult& r, int n) {
  return r.kbar >= 1 && !r.Delta.empty() && r.Delta.back().dim() == n;
}

bool is_static_feedback_linearizable(const SequenceResult& r, int n) {
  if (!is_flat(r, n)) return false;
  for (bool eq : r.d_equals_e)
    if (!eq) return false;
  return true;
}

bool check_last_step_projectable(const SequenceResult& r) {
  if (r.D.empty()) return false;
  return span_equal(r.D.back(), r.E.back());
}

}  // namespace flatnf

#include "flatnf/zpartition.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <string>

#include "flatnf/diffgeo.hpp"
#include "flatnf/errors.hpp"
#include "flatnf/solve.hpp"

namespace flatnf {

namespace {

bool in_list(const VarList& l, Var v) {
  return std::find(l.begin(), l.end(), v) != l.end();
}

std::string suffix_of(const std::string& name) {
  size_t i = 0;
  while (i < name.size() && std::isalpha(static_cast<unsigned char>(name[i]))) ++i;
  return i < name.size() ? name.substr(i) : name;
}

Var fresh_replacement(Var replaced, const Chart& chart) {
  bool is_input = replaced.kind() == VarKind::Input;
  std::string name = (is_input ? "uh" : "xh") + suffix_of(replaced.name());
  auto taken = [&](const std::string& s) {
    if (is_reserved_name(s)) return true;
    for (const Var& v : chart.vars)
      if (v.name() == s) return true;
    return false;
  };
  while (taken(name)) name += "b";
  return is_input ? Var::input(name) : Var::state(name);
}

Distribution coordinate_span(const Chart& chart, const VarList& vars) {
  std::vector<VectorField> gens;
  for (const Var& v : vars) gens.push_back(VectorField::coordinate(chart, v));
  return Distribution(chart, gens);
}

struct Walk {
  DiscreteSystem sys;
  std::vector<Distribution> D;
  std::vector<Distribution> Delta;
  std::vector<VarList> blocks;
  std::vector<CoordChange> changes;
  std::optional<Var> zc;
  VarList prior;  // z_0..z_{k-1} flattened

  void apply(const CoordChange& ch, int kbar) {
    DiscreteSystem next = apply_change(sys, ch);
    const Chart& nxu = next.xu_chart();
    const Chart& nxp = next.xplus_chart();
    for (Distribution& d : D) d = transform_xu(d, ch, nxu);
    for (Distribution& d : Delta) d = transform_xplus(d, ch, nxp);
    sys = next;
    changes.push_back(ch);

    // The replacement must leave the straightened sequence in coordinate form.
    if (ch.kind == ChangeKind::State) {
      VarList acc;
      for (int j = 1; j <= kbar; ++j) {
        for (const Var& b : blocks[j - 1]) acc.push_back(b.plus());
        if (!span_equal(Delta[j - 1], coordinate_span(sys.xplus_chart(), acc)))
          throw InvariantViolation("replacement broke the coordinate form at level " +
                                   std::to_string(j));
      }
    }
  }
};

// Replaces one coordinate by a first integral of alpha*d_replaced + d_kept. Returns the
// fresh coordinate, or nothing when no candidate integral inverts for the replaced one.
std::optional<Var> replace_coordinate(Walk& w, Var replaced, Var kept, const Expr& alpha,
                                      int kbar, const Options& opt) {
  const Chart xu = w.sys.xu_chart();
  std::vector<Expr> comps(xu.vars.size(), Expr());
  comps[xu.index_of(replaced)] = alpha;
  comps[xu.index_of(kept)] = Expr::integer(1);
  VectorField v{xu, comps};

  Var nv = fresh_replacement(replaced, xu);
  for (const Expr& phi : first_integral_candidates(v, w.prior, replaced, opt)) {
    std::map<Var, Expr> inv;
    if (!try_solve_for({Expr::variable(nv) - phi}, {replaced}, inv)) continue;

    CoordChange ch;
    ch.kind = replaced.kind() == VarKind::Input ? ChangeKind::Input : ChangeKind::State;
    ch.label = "replace " + replaced.display() + " by " + nv.display();
    ch.old_vars = xu.vars;
    for (const Var& ov : xu.vars) {
      if (ov == replaced) {
        ch.new_vars.push_back(nv);
        ch.forward[nv] = phi;
        ch.inverse[replaced] = inv.at(replaced);
      } else {
        ch.new_vars.push_back(ov);
        ch.forward[ov] = Expr::variable(ov);
        ch.inverse[ov] = Expr::variable(ov);
      }
    }
    ch.structure_preserving = true;
    if (!ch.verify_roundtrip()) continue;

    // Track the renamed coordinate through the level bookkeeping.
    for (VarList& blk : w.blocks)
      for (Var& b : blk)
        if (b == replaced) b = nv;
    if (w.zc && *w.zc == replaced) w.zc = nv;
    w.apply(ch, kbar);
    return nv;
  }
  return std::nullopt;
}

}  // namespace

ZPartitionResult build_zpartition(const StraightenResult& st, const Options& opt) {
  const int kbar = static_cast<int>(st.blocks.size());
  const int m = st.system.m();
  if (m != 2)
    throw CaseAnalysisViolation("the z-partition case analysis is specific to two inputs");

  Walk w{st.system, st.D, st.Delta, st.blocks, {}, std::nullopt, {}};
  std::vector<ZStep> steps;

  for (int k = 0; k < kbar; ++k) {
    const Chart xu = w.sys.xu_chart();
    VarList cur = (k == 0) ? w.sys.inputs() : w.blocks[k - 1];
    VarList evars = w.prior;
    if (w.zc) evars.push_back(*w.zc);
    for (const Var& c : cur) evars.push_back(c);

    int dim_delta = (k == 0) ? 0 : w.Delta[k - 1].dim();
    if (static_cast<int>(evars.size()) != dim_delta + m)
      throw CaseAnalysisViolation("E_" + std::to_string(k) + " bookkeeping is off: " +
                                  std::to_string(evars.size()) +
                                  " coordinates vs dim Delta + m = " +
                                  std::to_string(dim_delta + m));
    int extra = static_cast<int>(cur.size()) + (w.zc ? 1 : 0);
    if (extra > 2)
      throw CaseAnalysisViolation("step " + std::to_string(k) + " carries " +
                                  std::to_string(extra) + " unresolved coordinates");

    const Distribution& dk = w.D[k];
    for (const VectorField& g : dk.basis())
      for (size_t i = 0; i < g.comps.size(); ++i)
        if (!g.comps[i].is_zero() && !in_list(evars, xu.vars[i]))
          throw CaseAnalysisViolation("D_" + std::to_string(k) + " leaves the span of E_" +
                                      std::to_string(k));

    ZStep step;
    step.k = k;
    if (dk.dim() == static_cast<int>(evars.size())) {
      if (!span_equal(dk, coordinate_span(xu, evars)))
        throw CaseAnalysisViolation("D_" + std::to_string(k) +
                                    " has full dimension but is not the coordinate span");
      step.kind = StepCase::Full;
      step.z = cur;
      if (w.zc) step.z.push_back(*w.zc);
      w.zc.reset();
    } else {
      if (dk.dim() != static_cast<int>(evars.size()) - 1)
        throw CaseAnalysisViolation("D_" + std::to_string(k) + " has codimension " +
                                    std::to_string(evars.size() - dk.dim()) + " in E_" +
                                    std::to_string(k));
      if (k == kbar - 1)
        throw CaseAnalysisViolation("the final step did not come out full");

      // Reduce a basis field to the complement of span{d/d z_0..z_{k-1}}.
      VectorField wfield = VectorField::zero(xu);
      for (const VectorField& g : dk.basis()) {
        VectorField red = g;
        for (const Var& p : w.prior) red.comps[xu.index_of(p)] = Expr();
        if (!red.is_zero()) {
          wfield = red;
          break;
        }
      }
      if (wfield.is_zero())
        throw CaseAnalysisViolation("no generator of D_" + std::to_string(k) +
                                    " complements the resolved coordinates");
      if (!dk.contains(wfield))
        throw CaseAnalysisViolation("reduced generator left D_" + std::to_string(k));

      bool is_pair = !w.zc;
      std::vector<std::pair<Var, Var>> tries;  // (replaced, kept)
      if (is_pair) {
        if (cur.size() != 2)
          throw CaseAnalysisViolation("step " + std::to_string(k) + " mixes but the level has " +
                                      std::to_string(cur.size()) +
                                      " coordinates and no complement");
        tries = {{cur[0], cur[1]}, {cur[1], cur[0]}};
      } else {
        if (cur.size() != 1)
          throw CaseAnalysisViolation("step " + std::to_string(k) +
                                      " carries a complement but the level has " +
                                      std::to_string(cur.size()) + " coordinates");
        tries = {{*w.zc, cur[0]}};
      }

      bool resolved = false;
      for (auto& [replaced, kept] : tries) {
        const Expr& ck = wfield.comps[xu.index_of(kept)];
        if (ck.is_zero()) continue;
        Expr alpha = wfield.comps[xu.index_of(replaced)] / ck;
        for (const Var& p : w.prior)
          if (alpha.depends_on(p))
            throw CaseAnalysisViolation("mixing coefficient at step " + std::to_string(k) +
                                        " depends on the resolved coordinate " + p.display());
        step.kind = is_pair ? StepCase::Pair : StepCase::Chain;
        step.alpha = alpha;
        if (alpha.is_zero()) {
          step.z = {kept};
          step.zc = replaced;
          resolved = true;
        } else if (std::optional<Var> nv = replace_coordinate(w, replaced, kept, alpha, kbar, opt)) {
          step.change_emitted = true;
          step.z = {kept};
          step.zc = *nv;
          resolved = true;
        } else {
          continue;
        }
        w.zc = *step.zc;
        break;
      }
      if (!resolved)
        throw AnsatzExhausted("no invertible first integral resolves step " + std::to_string(k) +
                              " up to degree " + std::to_string(opt.max_degree));
    }

    for (const Var& z : step.z) w.prior.push_back(z);
    steps.push_back(std::move(step));
  }

  if (w.zc)
    throw CaseAnalysisViolation("the partition finished with an unresolved complement " +
                                w.zc->display());

  // Every D_k must now be the coordinate span of z_0..z_k.
  {
    const Chart& xu = w.sys.xu_chart();
    VarList acc;
    for (int k = 0; k < kbar; ++k) {
      for (const Var& z : steps[k].z) acc.push_back(z);
      if (!span_equal(w.D[k], coordinate_span(xu, acc)))
        throw InvariantViolation("D_" + std::to_string(k) +
                                 " is not the coordinate span of z_0..z_" + std::to_string(k));
    }
  }

  ZPartitionResult res;
  res.system = w.sys;
  res.changes = w.changes;
  res.steps = steps;
  res.blocks = w.blocks;
  res.D = w.D;
  res.Delta = w.Delta;
  return res;
}

}  // namespace flatnf

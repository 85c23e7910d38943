#include "flatnf/straighten.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "flatnf/ansatz.hpp"
#include "flatnf/diffgeo.hpp"
#include "flatnf/errors.hpp"
#include "flatnf/solve.hpp"

namespace flatnf {

namespace {

bool in_list(const VarList& l, Var v) {
  return std::find(l.begin(), l.end(), v) != l.end();
}

Expr primitive_form(const Expr& e) {
  if (!e.is_polynomial() || e.is_zero()) return e;
  return Expr::fraction(e.num().primitive(), Poly::constant(1));
}

void append_unique(std::vector<Expr>& out, const Expr& cand) {
  for (const Expr& e : out)
    if (e == cand) return;
  out.push_back(cand);
}

// Within one degree: fewer terms first, then the canonical string order.
void sort_block(std::vector<Expr>& block) {
  std::stable_sort(block.begin(), block.end(), [](const Expr& a, const Expr& b) {
    size_t ta = a.num().term_count(), tb = b.num().term_count();
    if (ta != tb) return ta < tb;
    return a.str() < b.str();
  });
}

std::vector<DerivationCondition> conditions_for(const std::vector<VectorField>& gens,
                                                const VarList& allowed, const Chart& chart) {
  std::vector<DerivationCondition> conds;
  for (const VectorField& g : gens) {
    DerivationCondition c;
    for (const Var& v : allowed) {
      const Expr& comp = g.comps[chart.index_of(v)];
      if (!comp.is_zero()) c.parts.emplace_back(v, comp);
    }
    conds.push_back(std::move(c));
  }
  return conds;
}

std::vector<Poly> denominator_seeds(const std::vector<VectorField>& gens, const VarList& allowed) {
  std::vector<Poly> seeds;
  std::set<Var> allowed_set(allowed.begin(), allowed.end());
  auto admissible = [&](const Poly& p) {
    if (p.is_constant()) return false;
    for (const Var& v : p.vars())
      if (!allowed_set.count(v)) return false;
    return true;
  };
  auto push = [&](const Poly& p) {
    if (!admissible(p)) return;
    Poly q = p.primitive();
    for (const Poly& s : seeds)
      if (s == q) return;
    seeds.push_back(q);
  };
  for (const VectorField& g : gens)
    for (const Expr& comp : g.comps) {
      push(comp.num());
      push(comp.den());
    }
  return seeds;
}

}  // namespace

std::vector<Expr> first_integral_candidates(const VectorField& v, const VarList& fixed,
                                            Var replaced, const Options& opt) {
  const Chart& chart = v.chart;
  VarList allowed;
  for (const Var& w : chart.vars)
    if (!in_list(fixed, w)) allowed.push_back(w);
  if (!in_list(allowed, replaced))
    throw InvariantViolation("integral target " + replaced.display() + " is a fixed coordinate");
  for (const Var& w : fixed)
    if (!v.comps[chart.index_of(w)].is_zero())
      throw InvariantViolation("field for the integral search moves the fixed coordinate " +
                               w.display());

  std::vector<Expr> out;
  if (v.comps[chart.index_of(replaced)].is_zero())
    out.push_back(Expr::variable(replaced));

  std::vector<DerivationCondition> conds = conditions_for({v}, allowed, chart);
  for (int deg = 1; deg <= opt.max_degree; ++deg) {
    std::vector<Expr> block;
    for (const Expr& cand : polynomial_integral_space(conds, allowed, deg)) {
      if (cand.diff(replaced).is_zero()) continue;
      block.push_back(primitive_form(cand));
    }
    sort_block(block);
    for (const Expr& cand : block) append_unique(out, cand);
  }

  std::vector<Poly> seeds = denominator_seeds({v}, allowed);
  if (!seeds.empty()) {
    std::vector<Expr> block;
    for (const Expr& cand : rational_integral_space(conds, allowed, opt.max_degree, seeds)) {
      if (cand.diff(replaced).is_zero()) continue;
      block.push_back(cand);
    }
    sort_block(block);
    for (const Expr& cand : block) append_unique(out, cand);
  }
  return out;
}

Expr first_integral(const VectorField& v, const VarList& fixed, Var replaced,
                    const Options& opt) {
  std::vector<Expr> cands = first_integral_candidates(v, fixed, replaced, opt);
  if (cands.empty())
    throw AnsatzExhausted("no first integral through " + replaced.display() +
                          " up to degree " + std::to_string(opt.max_degree));
  return cands.front();
}

namespace {

struct Level {
  int number;                    // 1-based block level
  int need;                      // block size
  std::vector<VectorField> conditions;
  std::vector<Expr> candidates;  // phase-dependent
};

std::vector<Expr> level_candidates(const Level& lvl, const Chart& chart, const Options& opt,
                                   bool with_rational) {
  std::vector<Expr> out;
  for (const Var& w : chart.vars) {
    bool integral = true;
    for (const VectorField& g : lvl.conditions)
      if (!g.comps[chart.index_of(w)].is_zero()) {
        integral = false;
        break;
      }
    if (integral) out.push_back(Expr::variable(w));
  }
  if (lvl.conditions.empty()) return out;  // plain coordinates already span everything

  std::vector<DerivationCondition> conds = conditions_for(lvl.conditions, chart.vars, chart);
  for (int deg = 1; deg <= opt.max_degree; ++deg) {
    std::vector<Expr> block;
    for (const Expr& cand : polynomial_integral_space(conds, chart.vars, deg))
      block.push_back(primitive_form(cand));
    sort_block(block);
    for (const Expr& cand : block) append_unique(out, cand);
  }
  if (with_rational) {
    std::vector<Poly> seeds = denominator_seeds(lvl.conditions, chart.vars);
    if (!seeds.empty()) {
      std::vector<Expr> block = rational_integral_space(conds, chart.vars, opt.max_degree, seeds);
      sort_block(block);
      for (const Expr& cand : block) append_unique(out, cand);
    }
  }
  return out;
}

struct Picker {
  const std::vector<Level>* levels;
  const Chart* chart;
  int n;
  long budget;
  std::vector<std::vector<Expr>> rows;      // stacked differentials
  std::vector<std::vector<Expr>> selected;  // per level

  bool rank_grows(const Expr& cand) {
    std::vector<Expr> row;
    for (const Var& v : chart->vars) row.push_back(cand.diff(v));
    rows.push_back(row);
    bool ok = rank_symbolic(SymMatrix::from_rows(rows)) == static_cast<int>(rows.size());
    if (!ok) rows.pop_back();
    return ok;
  }

  // Fill slot `slot` of level `li`, trying candidates from index `start` on. `accept`
  // is invoked on a complete selection and may reject it (inversion failure), which
  // resumes the search.
  template <typename F>
  bool fill(size_t li, int slot, size_t start, F&& accept) {
    if (budget-- <= 0) return false;
    if (li == levels->size()) return accept();
    const Level& lvl = (*levels)[li];
    if (slot == lvl.need) return fill(li + 1, 0, 0, accept);
    for (size_t c = start; c < lvl.candidates.size(); ++c) {
      if (!rank_grows(lvl.candidates[c])) continue;
      selected[li].push_back(lvl.candidates[c]);
      if (fill(li, slot + 1, c + 1, accept)) return true;
      selected[li].pop_back();
      rows.pop_back();
    }
    return false;
  }
};

std::string pick_prefix(const DiscreteSystem& sys, const std::vector<std::string>& options,
                        int levels, int n) {
  std::set<std::string> taken;
  for (const Var& v : sys.xu_chart().vars) taken.insert(v.name());
  for (const std::string& p : options) {
    bool clash = false;
    for (int j = 1; j <= levels && !clash; ++j)
      for (int i = 1; i <= n && !clash; ++i)
        if (taken.count(p + std::to_string(j) + "_" + std::to_string(i))) clash = true;
    if (!clash) return p;
  }
  throw InvariantViolation("no free block-coordinate prefix");
}

}  // namespace

StraightenResult straighten_delta(const DiscreteSystem& sys, const SequenceResult& seq,
                                  const Options& opt) {
  const int n = sys.n();
  if (!is_flat(seq, n)) throw NotFlat("straightening requires a flat system");
  const int kbar = seq.kbar;
  const Chart& xp = sys.xplus_chart();

  std::vector<Level> levels;  // processing order: top level first
  for (int j = kbar; j >= 1; --j) {
    Level lvl;
    lvl.number = j;
    int dim_prev = (j >= 2) ? seq.Delta[j - 2].dim() : 0;
    lvl.need = seq.Delta[j - 1].dim() - dim_prev;
    if (j >= 2) lvl.conditions = seq.Delta[j - 2].basis();
    levels.push_back(std::move(lvl));
  }

  std::string prefix = pick_prefix(sys, {"xb", "xc", "xd"}, kbar, n);

  CoordChange ch;
  std::vector<VarList> blocks(kbar);
  bool done = false;
  for (int phase = 0; phase < 2 && !done; ++phase) {
    for (Level& lvl : levels)
      lvl.candidates = level_candidates(lvl, xp, opt, phase == 1);

    Picker picker{&levels, &xp, n, 4000, {}, {}};
    picker.selected.resize(levels.size());

    done = picker.fill(0, 0, 0, [&]() {
      // Assemble the candidate change and keep it only if it inverts.
      std::map<Var, Var> plus_to_state;
      for (const Var& s : sys.states()) plus_to_state[s.plus()] = s;

      CoordChange cand;
      cand.kind = ChangeKind::State;
      cand.label = "straighten";
      cand.old_vars = sys.xu_chart().vars;
      std::vector<VarList> cand_blocks(kbar);
      std::vector<Expr> equations;
      VarList new_states;
      for (size_t li = 0; li < levels.size(); ++li) {
        int j = levels[li].number;
        for (size_t i = 0; i < picker.selected[li].size(); ++i) {
          Var nv = Var::state(prefix + std::to_string(j) + "_" + std::to_string(i + 1));
          Expr phi = picker.selected[li][i].rename(plus_to_state);
          cand_blocks[j - 1].push_back(nv);
          cand.forward[nv] = phi;
          equations.push_back(Expr::variable(nv) - phi);
        }
      }
      for (int j = 1; j <= kbar; ++j)
        for (const Var& nv : cand_blocks[j - 1]) new_states.push_back(nv);
      cand.new_vars = new_states;
      for (const Var& u : sys.inputs()) {
        cand.new_vars.push_back(u);
        cand.forward[u] = Expr::variable(u);
        cand.inverse[u] = Expr::variable(u);
      }

      std::map<Var, Expr> inv;
      if (!try_solve_for(equations, sys.states(), inv)) return false;
      for (const auto& [v, e] : inv) cand.inverse[v] = e;
      if (!cand.verify_roundtrip()) return false;
      ch = cand;
      blocks = cand_blocks;
      return true;
    });
  }
  if (!done)
    throw AnsatzExhausted("block integrals up to degree " + std::to_string(opt.max_degree) +
                          " do not straighten the sequence");

  StraightenResult res;
  res.change = ch;
  res.system = apply_change(sys, ch);
  res.blocks = blocks;
  const Chart& nxu = res.system.xu_chart();
  const Chart& nxp = res.system.xplus_chart();
  for (const Distribution& d : seq.D) res.D.push_back(transform_xu(d, ch, nxu));
  for (const Distribution& e : seq.E) res.E.push_back(transform_xu(e, ch, nxu));
  for (const Distribution& d : seq.Delta) res.Delta.push_back(transform_xplus(d, ch, nxp));

  std::vector<VectorField> coord_fields;
  for (int j = 1; j <= kbar; ++j) {
    for (const Var& b : blocks[j - 1])
      coord_fields.push_back(VectorField::coordinate(nxp, b.plus()));
    if (!span_equal(res.Delta[j - 1], Distribution(nxp, coord_fields)))
      throw InvariantViolation("straightened sequence is not in coordinate form at level " +
                               std::to_string(j));
  }
  return res;
}

}  // namespace flatnf

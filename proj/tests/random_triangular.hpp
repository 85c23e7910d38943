#pragma once
// Deterministic generator of scrambled triangular two-input systems, shared by the
// property tests and the acceptance run. Every generated system is flat by
// construction: the nominal form is block-triangular with unit-determinant step
// matrices, and the scrambles are exact invertible coordinate changes.
#include <random>
#include <string>
#include <vector>

#include "flatnf/coordchange.hpp"
#include "flatnf/system.hpp"

namespace tgen {

using namespace flatnf;

inline CoordChange identity_change(const Chart& xu, ChangeKind kind, const std::string& label) {
  CoordChange ch;
  ch.kind = kind;
  ch.label = label;
  ch.old_vars = xu.vars;
  ch.new_vars = xu.vars;
  for (const Var& v : xu.vars) {
    ch.forward[v] = Expr::variable(v);
    ch.inverse[v] = Expr::variable(v);
  }
  return ch;
}

// new target = old target + delta(other coordinates); exactly invertible since delta
// avoids the target itself.
inline CoordChange shear_change(const Chart& xu, Var target, const Expr& delta,
                                const std::string& label) {
  ChangeKind kind = target.kind() == VarKind::Input ? ChangeKind::Input : ChangeKind::State;
  CoordChange ch = identity_change(xu, kind, label);
  ch.forward[target] = Expr::variable(target) + delta;
  ch.inverse[target] = Expr::variable(target) - delta;
  return ch;
}

struct TriangularSpec {
  std::vector<int> level_dims;  // bottom-up, level 1 first
  int n = 0;
};

inline Expr small_poly(std::mt19937_64& rng, const VarList& pool, int max_terms) {
  std::uniform_int_distribution<int> coeff(-2, 2);
  std::uniform_int_distribution<size_t> pick(0, pool.empty() ? 0 : pool.size() - 1);
  std::uniform_int_distribution<int> nterms(0, max_terms);
  Expr e;
  if (pool.empty()) return Expr::integer(coeff(rng));
  int terms = nterms(rng);
  for (int t = 0; t < terms; ++t) {
    int c = coeff(rng);
    if (c == 0) continue;
    Expr mono = Expr::variable(pool[pick(rng)]);
    if (rng() % 2) mono = mono * Expr::variable(pool[pick(rng)]);
    e = e + Expr::integer(c) * mono;
  }
  return e;
}

// Nominal system: level-j states are affine in the level below (inputs for level 1)
// with a unit-determinant coefficient matrix whose off-diagonal entries may depend on
// higher levels.
inline DiscreteSystem nominal_triangular(std::mt19937_64& rng, TriangularSpec& spec) {
  int kbar = 2 + static_cast<int>(rng() % 2);
  spec.level_dims = {2};
  for (int j = 1; j < kbar; ++j) {
    int d = 1 + static_cast<int>(rng() % 2);
    spec.level_dims.push_back(std::min(d, spec.level_dims.back()));
  }
  spec.n = 0;
  for (int d : spec.level_dims) spec.n += d;

  VarList states, inputs = {Var::input("u1"), Var::input("u2")};
  std::vector<VarList> levels;
  for (int j = 0, idx = 1; j < kbar; ++j) {
    VarList lvl;
    for (int i = 0; i < spec.level_dims[j]; ++i)
      lvl.push_back(Var::state("x" + std::to_string(idx++)));
    levels.push_back(lvl);
    for (const Var& v : lvl) states.push_back(v);
  }

  std::uniform_int_distribution<int> sign(0, 1);
  std::map<Var, Expr> f;
  for (int j = 0; j < kbar; ++j) {
    VarList feed = j == 0 ? inputs : levels[j - 1];
    VarList pool;
    for (int a = j + 1; a < kbar; ++a)
      for (const Var& v : levels[a]) pool.push_back(v);

    int dj = spec.level_dims[j];
    std::vector<std::vector<Expr>> M(dj, std::vector<Expr>(feed.size()));
    if (dj == 2 && feed.size() == 2) {
      // L * U with unit diagonal keeps the determinant at +-1.
      Expr l = small_poly(rng, pool, 1), u = small_poly(rng, pool, 1);
      Expr s0 = Expr::integer(sign(rng) ? 1 : -1), s1 = Expr::integer(sign(rng) ? 1 : -1);
      M[0][0] = s0;
      M[0][1] = s0 * u;
      M[1][0] = l * s0;
      M[1][1] = l * s0 * u + s1;
    } else if (dj == 1 && feed.size() == 2) {
      M[0][0] = Expr::integer(sign(rng) ? 1 : -1);
      M[0][1] = small_poly(rng, pool, 1);
    } else {  // 1 x 1
      M[0][0] = Expr::integer(sign(rng) ? 1 : -1);
    }
    for (int i = 0; i < dj; ++i) {
      Expr rhs = small_poly(rng, pool, 2);
      for (size_t c = 0; c < feed.size(); ++c) rhs = rhs + M[i][c] * Expr::variable(feed[c]);
      f[levels[j][i]] = rhs;
    }
  }
  return DiscreteSystem("random", states, inputs, f);
}

// One shear term: a state or a product of two states, small coefficient. Composed
// quadratic shears multiply polynomial degrees, so only the first one may be quadratic;
// everything after stays linear to keep the scrambled updates tractable.
inline Expr shear_term(std::mt19937_64& rng, const VarList& pool, bool allow_quadratic) {
  Expr t = Expr::variable(pool[rng() % pool.size()]);
  if (allow_quadratic && rng() % 2) t = t * Expr::variable(pool[rng() % pool.size()]);
  return rng() % 2 ? t : -t;
}

inline DiscreteSystem random_scrambled_triangular(uint64_t seed, TriangularSpec* spec_out = nullptr) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ seed);
  TriangularSpec spec;
  DiscreteSystem sys = nominal_triangular(rng, spec);
  if (spec_out) *spec_out = spec;

  for (int s = 0; s < 2; ++s) {
    const Chart& xu = sys.xu_chart();
    VarList states = sys.states();
    Var target = states[rng() % states.size()];
    VarList others;
    for (const Var& v : states)
      if (v != target) others.push_back(v);
    Expr delta = shear_term(rng, others, s == 0);
    sys = apply_change(sys, shear_change(xu, target, delta, "scramble"));
  }

  // Input side: a unimodular mix plus one term of state feedback.
  {
    const Chart& xu = sys.xu_chart();
    Var u1 = sys.inputs()[0], u2 = sys.inputs()[1];
    bool flip = rng() % 2;
    Var target = flip ? u1 : u2;
    Expr mix = Expr::variable(flip ? u2 : u1);
    if (rng() % 2) mix = -mix;
    sys = apply_change(sys, shear_change(xu, target, mix, "scramble"));
  }
  {
    const Chart& xu = sys.xu_chart();
    Expr fb = shear_term(rng, sys.states(), false);
    Var target = sys.inputs()[rng() % 2];
    sys = apply_change(sys, shear_change(xu, target, fb, "scramble"));
  }
  return sys;
}

}  // namespace tgen

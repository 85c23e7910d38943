#include "flatnf/triangular.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>

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

Var fresh_redundancy_var(Var replaced, const Chart& chart) {
  bool is_input = replaced.kind() == VarKind::Input;
  std::string name = (is_input ? "ur" : "xr") + suffix_of(replaced.name());
  auto taken = [&](const std::string& s) {
    if (is_reserved_name(s)) return true;
    for (const Var& v : chart.vars)
      if (v.name() == s) return true;
    return false;
  };
  while (taken(name)) name += "b";
  return is_input ? Var::input(name) : Var::state(name);
}

Var fresh_mix_var(Var replaced, const Chart& chart) {
  std::string name = "xm" + suffix_of(replaced.name());
  auto taken = [&](const std::string& s) {
    if (is_reserved_name(s)) return true;
    for (const Var& v : chart.vars)
      if (v.name() == s) return true;
    return false;
  };
  while (taken(name)) name += "b";
  return Var::state(name);
}

int level_of_state(const std::vector<VarList>& blocks, Var v) {
  for (size_t j = 0; j < blocks.size(); ++j)
    if (in_list(blocks[j], v)) return static_cast<int>(j) + 1;
  return -1;
}

}  // namespace

void verify_triangular(const TriangularForm& tf, const Options& opt) {
  const int kbar = static_cast<int>(tf.blocks.size());
  const DiscreteSystem& sys = tf.system;
  if (static_cast<int>(tf.z.size()) != kbar)
    throw StructureViolation("z partition has " + std::to_string(tf.z.size()) +
                             " groups for " + std::to_string(kbar) + " levels");

  std::set<Var> state_set(sys.states().begin(), sys.states().end());
  std::set<Var> block_union;
  for (const VarList& blk : tf.blocks)
    for (const Var& v : blk)
      if (!block_union.insert(v).second)
        throw StructureViolation("variable " + v.display() + " sits in two levels");
  if (block_union != state_set)
    throw StructureViolation("the levels do not partition the states");

  std::set<Var> z_union;
  for (const VarList& zg : tf.z)
    for (const Var& v : zg)
      if (!z_union.insert(v).second)
        throw StructureViolation("variable " + v.display() + " sits in two z groups");
  std::set<Var> expected(sys.inputs().begin(), sys.inputs().end());
  for (int j = 0; j + 1 < kbar; ++j)
    for (const Var& v : tf.blocks[j]) expected.insert(v);
  if (z_union != expected)
    throw StructureViolation(
        "the z groups do not partition the inputs and the lower levels");

  // Level-k updates may touch only the top block and z_{kbar-1}..z_{k-1}.
  std::set<Var> allowed(tf.blocks[kbar - 1].begin(), tf.blocks[kbar - 1].end());
  for (int k = kbar; k >= 1; --k) {
    for (const Var& v : tf.z[k - 1]) allowed.insert(v);
    for (const Var& s : tf.blocks[k - 1])
      for (const Var& w : sys.rhs(s).vars())
        if (!allowed.count(w))
          throw StructureViolation("update of " + s.display() + " depends on " + w.display() +
                                   " below its level");
  }

  // Each lower level is covered by the z groups above it.
  for (int k = 1; k <= kbar - 1; ++k)
    for (const Var& v : tf.blocks[k - 1]) {
      bool found = false;
      for (int j = k; j <= kbar - 1 && !found; ++j) found = in_list(tf.z[j], v);
      if (!found)
        throw StructureViolation("level-" + std::to_string(k) + " variable " + v.display() +
                                 " appears in no later z group");
    }

  // Full generic rank of each level's update in its z_{k-1} arguments.
  for (int k = 1; k <= kbar; ++k) {
    const VarList& args = tf.z[k - 1];
    SymMatrix J(static_cast<int>(tf.blocks[k - 1].size()), static_cast<int>(args.size()));
    for (size_t i = 0; i < tf.blocks[k - 1].size(); ++i)
      for (size_t j = 0; j < args.size(); ++j)
        J.at(static_cast<int>(i), static_cast<int>(j)) =
            sys.rhs(tf.blocks[k - 1][i]).diff(args[j]);
    int want = static_cast<int>(tf.blocks[k - 1].size());
    int got = generic_rank(J, opt.seed, opt.trials);
    if (got != want)
      throw StructureViolation("level " + std::to_string(k) + " update has rank " +
                               std::to_string(got) + " in z_" + std::to_string(k - 1) +
                               ", expected " + std::to_string(want));
  }
}

TriangularForm assemble_triangular(const StraightenResult& st, const ZPartitionResult& zp,
                                   const Options& opt) {
  TriangularForm tf;
  tf.system = zp.system;
  tf.changes.push_back(st.change);
  for (const CoordChange& ch : zp.changes) tf.changes.push_back(ch);
  tf.steps = zp.steps;
  tf.blocks = zp.blocks;
  for (const ZStep& s : zp.steps) tf.z.push_back(s.z);
  verify_triangular(tf, opt);
  if (static_cast<int>(tf.blocks.back().size()) == tf.system.m())
    tf.flat_output = tf.blocks.back();
  return tf;
}

TriangularForm eliminate_redundant_input(const TriangularForm& tf, const Options& opt) {
  const int kbar = static_cast<int>(tf.blocks.size());
  if (tf.system.m() != 2)
    throw StructureViolation("redundant-input elimination is specific to two inputs");
  if (tf.blocks[kbar - 1].size() == 2) return tf;
  if (tf.blocks[kbar - 1].size() != 1)
    throw StructureViolation("top level has dimension " +
                             std::to_string(tf.blocks[kbar - 1].size()));

  int level = -1;
  for (int k = 1; k <= kbar; ++k)
    if (tf.z[k - 1].size() == 2 && tf.blocks[k - 1].size() == 1) {
      if (level != -1)
        throw StructureViolation("two levels feed a single update from a two-dimensional z");
      level = k;
    }
  if (level == -1)
    throw StructureViolation("no level feeds a single update from a two-dimensional z");
  if (level == 1)
    throw StructureViolation(
        "the slack level is the bottom one, contradicting the input rank assumption");

  bool invertible_issue = false;

  // Pick the component to replace: reverse declared order, first one the update really
  // moves and that keeps the replacement structure preserving.
  auto attempt = [&](const TriangularForm& t) -> std::optional<TriangularForm> {
    const DiscreteSystem& sys = t.system;
    const Chart xu = sys.xu_chart();
    Var xk = t.blocks[level - 1][0];
    Expr fk = sys.rhs(xk);
    for (int i = 1; i >= 0; --i) {
      Var c = t.z[level - 1][i];
      Var other = t.z[level - 1][1 - i];
      if (fk.diff(c).is_zero()) continue;
      if (c.kind() == VarKind::State) {
        int a = level_of_state(t.blocks, c);
        bool ok = true;
        for (const Var& w : fk.vars()) {
          if (w.kind() == VarKind::Input) ok = false;
          if (w.kind() == VarKind::State && level_of_state(t.blocks, w) < a) ok = false;
        }
        if (!ok) continue;
      }
      if (fk == Expr::variable(c)) {
        // Already in the target shape; only the bookkeeping is needed.
        TriangularForm out = t;
        out.redundancy_eliminated = true;
        out.redundancy_level = level;
        out.z[level - 1] = {other, c};
        out.steps[level - 1].z = out.z[level - 1];
        out.flat_output = {t.blocks[kbar - 1][0], other};
        verify_triangular(out, opt);
        return out;
      }
      Var nv = fresh_redundancy_var(c, xu);
      std::map<Var, Expr> inv;
      if (!try_solve_for({Expr::variable(nv) - fk}, {c}, inv)) {
        invertible_issue = true;
        continue;
      }

      CoordChange ch;
      ch.kind = c.kind() == VarKind::Input ? ChangeKind::Input : ChangeKind::State;
      ch.label = "redundancy: replace " + c.display() + " by " + nv.display();
      ch.old_vars = xu.vars;
      for (const Var& ov : xu.vars) {
        if (ov == c) {
          ch.new_vars.push_back(nv);
          ch.forward[nv] = fk;
          ch.inverse[c] = inv.at(c);
        } else {
          ch.new_vars.push_back(ov);
          ch.forward[ov] = Expr::variable(ov);
          ch.inverse[ov] = Expr::variable(ov);
        }
      }
      ch.structure_preserving = true;
      if (!ch.verify_roundtrip())
        throw InvariantViolation("redundancy replacement failed its round trip");

      TriangularForm out = t;
      out.system = apply_change(sys, ch);
      out.changes.push_back(ch);
      out.redundancy_eliminated = true;
      out.redundancy_level = level;
      out.z[level - 1] = {other, nv};
      out.steps[level - 1].z = out.z[level - 1];
      if (c.kind() == VarKind::State) {
        int a = level_of_state(t.blocks, c);
        for (Var& b : out.blocks[a - 1])
          if (b == c) b = nv;
      }
      out.flat_output = {out.blocks[kbar - 1][0], other};

      if (out.system.rhs(out.blocks[level - 1][0]) != Expr::variable(nv))
        throw InvariantViolation("redundancy replacement did not normalize the level-" +
                                 std::to_string(level) + " update");
      verify_triangular(out, opt);
      return out;
    }
    return std::nullopt;
  };

  if (auto out = attempt(tf)) return *out;
  if (!invertible_issue)
    throw StructureViolation("no z_" + std::to_string(level - 1) +
                             " component admits the redundancy replacement");

  // Neither declared component inverts rationally, but the basis of the pair is ours to
  // choose: rerun the attempt after a small unimodular recombination of the two
  // components. Restricted to a same-level state pair, where mixing keeps every
  // dependency constraint intact.
  Var v1 = tf.z[level - 1][0], v2 = tf.z[level - 1][1];
  if (v1.kind() == VarKind::State && v2.kind() == VarKind::State &&
      level_of_state(tf.blocks, v1) == level_of_state(tf.blocks, v2)) {
    const Chart xu = tf.system.xu_chart();
    for (int swapped = 0; swapped < 2; ++swapped) {
      Var a = swapped ? v2 : v1;
      Var b = swapped ? v1 : v2;
      for (int coef : {1, -1, 2, -2}) {
        Var mv = fresh_mix_var(a, xu);
        CoordChange ch;
        ch.kind = ChangeKind::State;
        ch.label = "redundancy: recombine pair, " + mv.display() + " = " + a.display() +
                   (coef < 0 ? " - " : " + ") +
                   (coef == 2 || coef == -2 ? "2*" : "") + b.display();
        ch.old_vars = xu.vars;
        for (const Var& ov : xu.vars) {
          if (ov == a) {
            ch.new_vars.push_back(mv);
            ch.forward[mv] = Expr::variable(a) + coef * Expr::variable(b);
            ch.inverse[a] = Expr::variable(mv) - coef * Expr::variable(b);
          } else {
            ch.new_vars.push_back(ov);
            ch.forward[ov] = Expr::variable(ov);
            ch.inverse[ov] = Expr::variable(ov);
          }
        }
        ch.structure_preserving = true;
        if (!ch.verify_roundtrip()) continue;
        TriangularForm mixed = tf;
        mixed.system = apply_change(tf.system, ch);
        mixed.changes.push_back(ch);
        for (VarList& blk : mixed.blocks)
          for (Var& w : blk)
            if (w == a) w = mv;
        for (VarList& zg : mixed.z)
          for (Var& w : zg)
            if (w == a) w = mv;
        for (ZStep& s : mixed.steps)
          for (Var& w : s.z)
            if (w == a) w = mv;
        try {
          verify_triangular(mixed, opt);
        } catch (const StructureViolation&) {
          continue;
        }
        if (auto out = attempt(mixed)) return *out;
      }
    }
  }
  throw UnsupportedAlgebraicForm("the redundancy replacement does not invert for any z_" +
                                 std::to_string(level - 1) + " pair combination");
}

std::vector<Expr> flat_output_in_original(const TriangularForm& tf) {
  std::vector<Expr> out;
  for (const Var& v : tf.flat_output) out.push_back(pull_expr(Expr::variable(v), tf.changes));
  return out;
}

}  // namespace flatnf

#include "doctest.h"

#include <algorithm>

#include "flatnf/errors.hpp"
#include "flatnf/parameterize.hpp"
#include "flatnf/parse.hpp"
#include "flatnf/solve.hpp"
#include "flatnf/sysfile.hpp"

using namespace flatnf;

namespace {

const std::string kFixtures = FLATNF_FIXTURE_DIR;

struct Pipeline {
  DiscreteSystem sys;
  SequenceResult seq;
  StraightenResult st;
  ZPartitionResult zp;
  TriangularForm tf;
};

Pipeline full_pipeline(const std::string& stem, Options opt = {}) {
  Pipeline p;
  p.sys = load_system(kFixtures + "/" + stem + ".dtsys");
  p.seq = compute_sequences(p.sys, opt);
  REQUIRE(p.seq.flat);
  p.st = straighten_delta(p.sys, p.seq, opt);
  p.zp = build_zpartition(p.st, opt);
  p.tf = eliminate_redundant_input(assemble_triangular(p.st, p.zp, opt), opt);
  return p;
}

std::vector<int> block_dims(const std::vector<VarList>& blocks) {
  std::vector<int> d;
  for (const VarList& b : blocks) d.push_back(static_cast<int>(b.size()));
  return d;
}

std::vector<std::string> names(const VarList& vars) {
  std::vector<std::string> out;
  for (const Var& v : vars) out.push_back(v.display());
  std::sort(out.begin(), out.end());
  return out;
}

Distribution coordinate_span(const Chart& c, const VarList& vars) {
  std::vector<VectorField> gens;
  for (const Var& v : vars) gens.push_back(VectorField::coordinate(c, v));
  return Distribution(c, gens);
}

// Shifted copies of the level functions, paired against a distribution on the
// shifted chart.
Expr to_plus(const Expr& e, const DiscreteSystem& sys) {
  std::map<Var, Var> ren;
  for (const Var& s : sys.states()) ren[s] = s.plus();
  return e.rename(ren);
}

SymbolTable table_of(const DiscreteSystem& sys) {
  SymbolTable t;
  for (const Var& v : sys.xu_chart().vars) t[v.display()] = v;
  return t;
}

}  // namespace

TEST_CASE("first integrals respect the fixed set and the replaced variable") {
  Var x1 = Var::state("x1"), x2 = Var::state("x2"), x3 = Var::state("x3");
  Chart c{ChartTag::XU, {x1, x2, x3}};
  VectorField v{c, {Expr::integer(1), Expr::variable(x3), Expr()}};
  Options opt;

  Expr phi = first_integral(v, {}, x1, opt);
  CHECK(v.apply(phi).is_zero());
  CHECK(phi.depends_on(x1));

  // Forbidding x3 leaves no integral that still moves with x1.
  CHECK_THROWS_AS(first_integral(v, {x3}, x1, opt), AnsatzExhausted);
}

TEST_CASE("five_state straightening and partition") {
  Pipeline p = full_pipeline("five_state");

  CHECK(p.st.change.verify_roundtrip());
  CHECK(block_dims(p.st.blocks) == std::vector<int>{2, 1, 2});

  // The transformed sequences are straight: Delta_k is the span of the shifted
  // coordinate fields of blocks 1..k.
  const Chart& xplus = p.st.system.xplus_chart();
  VarList acc;
  for (int k = 0; k < p.seq.kbar; ++k) {
    for (const Var& v : p.st.blocks[k]) acc.push_back(v.plus());
    CHECK(span_equal(p.st.Delta[k], coordinate_span(xplus, acc)));
  }

  REQUIRE(p.zp.steps.size() == 3);
  CHECK(p.zp.steps[0].kind == StepCase::Full);
  CHECK(p.zp.steps[1].kind == StepCase::Pair);
  CHECK(p.zp.steps[2].kind == StepCase::Full);
  // The pair step mixes trivially, so no replacement is emitted anywhere.
  CHECK(p.zp.steps[1].alpha.is_zero());
  CHECK(p.zp.changes.empty());
  CHECK(p.zp.steps[1].zc.has_value());

  REQUIRE(p.tf.z.size() == 3);
  CHECK(names(p.tf.z[0]) == std::vector<std::string>{"u1", "u2"});
  CHECK(p.tf.z[1].size() == 1);
  CHECK(p.tf.z[2].size() == 2);

  // Top block already has input dimension: no redundancy elimination.
  CHECK(!p.tf.redundancy_eliminated);
  CHECK(p.tf.flat_output.size() == 2);
  auto fo = flat_output_in_original(p.tf);
  CHECK(fo[0] == Expr::variable(Var::state("x4")));
  CHECK(fo[1] == Expr::variable(Var::state("x5")));

  CHECK_NOTHROW(verify_triangular(p.tf, Options{}));
}

TEST_CASE("tampering with the block order breaks the structure checks") {
  Pipeline p = full_pipeline("five_state");
  TriangularForm broken = p.tf;
  std::swap(broken.blocks.front(), broken.blocks.back());
  CHECK_THROWS_AS(verify_triangular(broken, Options{}), StructureViolation);
}

TEST_CASE("four_state straightening needs genuine functions") {
  Pipeline p = full_pipeline("four_state");
  SymbolTable t = table_of(p.sys);

  CHECK(p.st.change.verify_roundtrip());
  CHECK(block_dims(p.st.blocks) == std::vector<int>{1, 2, 1});

  // The top block coordinate is forced to be a function, not a plain coordinate.
  Var top = p.st.blocks[2][0];
  Expr top_fn = p.st.change.forward.at(top);
  CHECK(top_fn == parse_expr("x1*x3 + x1", t));

  REQUIRE(p.zp.steps.size() == 3);
  CHECK(p.zp.steps[0].kind == StepCase::Pair);
  CHECK(p.zp.steps[1].kind == StepCase::Full);
  CHECK(p.zp.steps[2].kind == StepCase::Full);

  // The step-0 replacement merges the inputs: its differential lies in
  // span{d(u1 + 2 u2), d u2} while still moving with u1.
  REQUIRE(!p.zp.changes.empty());
  const CoordChange& ch0 = p.zp.changes.front();
  CHECK(ch0.kind == ChangeKind::Input);
  Var nv = p.zp.steps[0].zc.value();
  Expr phi = ch0.forward.at(nv);
  CHECK(!phi.diff(Var::input("u1")).is_zero());
  Expr merged = parse_expr("u1 + 2*u2", t);
  std::vector<Expr> fns = {phi, merged, Expr::variable(Var::input("u2"))};
  SymMatrix rows(3, static_cast<int>(p.sys.xu_chart().vars.size()));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < rows.cols(); ++j)
      rows.at(i, j) = fns[i].diff(p.sys.xu_chart().vars[j]);
  CHECK(rank_symbolic(rows) == 2);

  // z levels, compared without block-internal order.
  REQUIRE(p.tf.z.size() == 3);
  CHECK(p.tf.z[0].size() == 1);
  CHECK(p.tf.z[0][0] == Var::input("u2"));
  CHECK(p.tf.z[1].size() == 2);
  CHECK(p.tf.z[2].size() == 2);
}

TEST_CASE("four_state eliminates exactly one redundant direction") {
  Pipeline p = full_pipeline("four_state");

  CHECK(p.tf.redundancy_eliminated);
  CHECK(p.tf.redundancy_level == 3);
  int redundancy_changes = 0;
  for (const CoordChange& ch : p.tf.changes)
    if (ch.label.rfind("redundancy", 0) == 0) ++redundancy_changes;
  CHECK(redundancy_changes == 1);

  // After the replacement the defining update is the new coordinate itself.
  const VarList& top = p.tf.blocks.back();
  REQUIRE(top.size() == 1);
  const VarList& feed = p.tf.z[2];
  REQUIRE(feed.size() == 2);
  Expr rhs_top = p.tf.system.rhs(top[0]);
  auto rhs_var = rhs_top.as_variable();
  REQUIRE(rhs_var.has_value());
  CHECK((rhs_var == feed[0] || rhs_var == feed[1]));

  // The two feed functions stay independent in original coordinates.
  std::vector<Expr> feed_orig;
  for (const Var& v : feed) feed_orig.push_back(pull_expr(Expr::variable(v), p.tf.changes));
  SymMatrix rows(2, static_cast<int>(p.sys.xu_chart().vars.size()));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < rows.cols(); ++j)
      rows.at(i, j) = feed_orig[i].diff(p.sys.xu_chart().vars[j]);
  CHECK(rank_symbolic(rows) == 2);

  auto fo = flat_output_in_original(p.tf);
  SymbolTable t = table_of(p.sys);
  REQUIRE(fo.size() == 2);
  CHECK(fo[0] == parse_expr("x1*x3 + x1", t));
  CHECK(fo[1] == Expr::variable(Var::state("x1")));

  CHECK_NOTHROW(verify_triangular(p.tf, Options{}));
}

TEST_CASE("the published alternative transformation also straightens four_state") {
  DiscreteSystem sys = load_system(kFixtures + "/four_state.dtsys");
  Options opt;
  SequenceResult seq = compute_sequences(sys, opt);
  SymbolTable t = table_of(sys);

  // Level functions: (x4 | x2 + 3 x4, x3 + x2 + 3 x4 | x1 (x3 + 1)).
  std::vector<Expr> level1 = {parse_expr("x4", t)};
  std::vector<Expr> level2 = {parse_expr("x2 + 3*x4", t), parse_expr("x3 + x2 + 3*x4", t)};
  std::vector<Expr> level3 = {parse_expr("x1*x3 + x1", t)};

  std::vector<Expr> all;
  all.insert(all.end(), level1.begin(), level1.end());
  all.insert(all.end(), level2.begin(), level2.end());
  all.insert(all.end(), level3.begin(), level3.end());

  // Independence of the stacked differentials.
  SymMatrix rows(4, sys.n());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < sys.n(); ++j) rows.at(i, j) = all[i].diff(sys.states()[j]);
  CHECK(rank_symbolic(rows) == 4);

  // Delta_1 moves only the level-1 function, Delta_2 leaves the top level fixed.
  for (const VectorField& v : seq.Delta[0].basis()) {
    CHECK(!v.apply(to_plus(level1[0], sys)).is_zero());
    for (const Expr& f : level2) CHECK(v.apply(to_plus(f, sys)).is_zero());
    CHECK(v.apply(to_plus(level3[0], sys)).is_zero());
  }
  SymMatrix pair2(3, seq.Delta[1].dim());
  for (const VectorField& v : seq.Delta[1].basis()) CHECK(v.apply(to_plus(level3[0], sys)).is_zero());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < seq.Delta[1].dim(); ++j)
      pair2.at(i, j) = seq.Delta[1].basis()[j].apply(to_plus(all[i], sys));
  CHECK(rank_symbolic(pair2) == 3);

  // The full map inverts: a state change built from these functions round-trips.
  CoordChange alt;
  alt.kind = ChangeKind::State;
  alt.label = "alternative";
  alt.old_vars = sys.xu_chart().vars;
  VarList new_states = {Var::state("xa1"), Var::state("xa2"), Var::state("xa3"),
                        Var::state("xa4")};
  alt.new_vars = new_states;
  alt.new_vars.push_back(Var::input("u1"));
  alt.new_vars.push_back(Var::input("u2"));
  std::vector<Expr> eqs;
  for (int i = 0; i < 4; ++i) {
    alt.forward[new_states[i]] = all[i];
    eqs.push_back(Expr::variable(new_states[i]) - all[i]);
  }
  alt.inverse = solve_for(eqs, {Var::state("x1"), Var::state("x2"), Var::state("x3"),
                                Var::state("x4")});
  for (const Var& u : sys.inputs()) {
    alt.forward[u] = Expr::variable(u);
    alt.inverse[u] = Expr::variable(u);
  }
  CHECK(alt.verify_roundtrip());

  // In the new coordinates the sequences are straight.
  DiscreteSystem alt_sys = apply_change(sys, alt);
  const Chart& xplus = alt_sys.xplus_chart();
  Distribution d1 = transform_xplus(seq.Delta[0], alt, xplus);
  Distribution d2 = transform_xplus(seq.Delta[1], alt, xplus);
  CHECK(span_equal(d1, Distribution(xplus, {VectorField::coordinate(xplus, new_states[0].plus())})));
  CHECK(span_equal(d2, Distribution(xplus, {VectorField::coordinate(xplus, new_states[0].plus()),
                                            VectorField::coordinate(xplus, new_states[1].plus()),
                                            VectorField::coordinate(xplus, new_states[2].plus())})));

  // The published alternative flat output fits the same frame.
  Expr alt_y1 = level3[0];
  Expr alt_y2 = level2[0];
  for (const VectorField& v : seq.Delta[1].basis()) CHECK(v.apply(to_plus(alt_y1, sys)).is_zero());
  for (const VectorField& v : seq.Delta[0].basis()) CHECK(v.apply(to_plus(alt_y2, sys)).is_zero());
  SymMatrix two(2, sys.n());
  for (int j = 0; j < sys.n(); ++j) {
    two.at(0, j) = alt_y1.diff(sys.states()[j]);
    two.at(1, j) = alt_y2.diff(sys.states()[j]);
  }
  CHECK(rank_symbolic(two) == 2);
}

TEST_CASE("brunovsky23 normal form is a renaming") {
  Pipeline p = full_pipeline("brunovsky23");

  CHECK(p.seq.sfl);
  for (const auto& [s, e] : p.st.change.forward) CHECK(e.as_variable().has_value());
  for (const ZStep& step : p.zp.steps) CHECK(step.kind == StepCase::Full);
  CHECK(p.zp.changes.empty());
  for (const Var& s : p.tf.system.states())
    CHECK(p.tf.system.rhs(s).as_variable().has_value());

  // The one-dimensional top block resolves by bookkeeping, without a new change.
  CHECK(p.tf.redundancy_eliminated);
  CHECK(p.tf.changes.size() == 1);
  auto fo = flat_output_in_original(p.tf);
  CHECK(fo[0] == Expr::variable(Var::state("x3")));
  CHECK(fo[1] == Expr::variable(Var::state("x1")));
}

TEST_CASE("five_state parameterization") {
  Pipeline p = full_pipeline("five_state");
  Parameterization par = build_parameterization(p.sys, p.tf, Options{});

  Expr y1 = Expr::variable(Var::output("y1", 0));
  Expr y2 = Expr::variable(Var::output("y2", 0));
  Expr y2_1 = Expr::variable(Var::output("y2", 1));
  CHECK(par.Fx.at(Var::state("x1")) == y2_1 - y1 - y2);
  CHECK(par.Fx.at(Var::state("x4")) == y1);
  CHECK(par.Fx.at(Var::state("x5")) == y2);
  CHECK(par.R == std::vector<int>{3, 3});
  CHECK(par.q == -1);

  for (const ParamCheck& c : verify_parameterization(p.sys, par)) CHECK(c.pass);
}

TEST_CASE("four_state parameterization") {
  Pipeline p = full_pipeline("four_state");
  Parameterization par = build_parameterization(p.sys, p.tf, Options{});

  CHECK(par.Fx.at(Var::state("x1")) == Expr::variable(Var::output("y2", 0)));
  CHECK(par.R == std::vector<int>{3, 2});
  CHECK(par.q == -1);
  for (const ParamCheck& c : verify_parameterization(p.sys, par)) CHECK(c.pass);
}

TEST_CASE("brunovsky23 parameterization") {
  Pipeline p = full_pipeline("brunovsky23");
  Parameterization par = build_parameterization(p.sys, p.tf, Options{});
  CHECK(par.R == std::vector<int>{3, 2});
  CHECK(par.q == -1);
  for (const ParamCheck& c : verify_parameterization(p.sys, par)) CHECK(c.pass);
}

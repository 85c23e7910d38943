#include "doctest.h"

#include "flatnf/errors.hpp"
#include "flatnf/linalg.hpp"

using namespace flatnf;

namespace {

Expr E(long v) { return Expr::integer(v); }

const Var vx = Var::state("x1");
const Var vy = Var::state("x2");
const Expr x = Expr::variable(vx);
const Expr y = Expr::variable(vy);

std::vector<Expr> mat_vec(const SymMatrix& M, const std::vector<Expr>& v) {
  std::vector<Expr> out(M.rows());
  for (int i = 0; i < M.rows(); ++i) {
    Expr s;
    for (int j = 0; j < M.cols(); ++j) s = s + M.at(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

}  // namespace

TEST_CASE("rref produces the canonical reduced form") {
  SymMatrix M = SymMatrix::from_rows({{E(1), x}, {y, x * y}});
  RrefResult r = rref(M);
  CHECK(r.rank == 1);
  CHECK(r.pivot_cols == std::vector<int>{0});
  CHECK(r.R.at(0, 0) == E(1));
  CHECK(r.R.at(0, 1) == x);
  CHECK(r.R.at(1, 0).is_zero());
  CHECK(r.R.at(1, 1).is_zero());
}

TEST_CASE("symbolic and randomized ranks agree on generic matrices") {
  SymMatrix M = SymMatrix::from_rows({{E(1), x, E(0)},
                                      {E(0), E(1), y},
                                      {E(1), x + E(1), y}});
  CHECK(rank_symbolic(M) == 2);
  bool agree = false;
  CHECK(generic_rank(M, 7, 5, &agree) == 2);
  CHECK(agree);
  CHECK(rank_numeric(M, 7, 5) <= 2);
}

TEST_CASE("nullspace vectors annihilate the matrix") {
  SymMatrix M = SymMatrix::from_rows({{E(1), x, y}});
  auto ns = nullspace(M);
  REQUIRE(ns.size() == 2);
  for (const auto& v : ns)
    for (const Expr& c : mat_vec(M, v)) CHECK(c.is_zero());
}

TEST_CASE("solve_linear distinguishes unique, free, and inconsistent") {
  SUBCASE("unique") {
    SymMatrix A = SymMatrix::from_rows({{E(2), E(0)}, {E(0), x}});
    auto s = solve_linear(A, {E(4), x * y});
    CHECK(s.consistent);
    CHECK(s.unique);
    CHECK(s.x[0] == E(2));
    CHECK(s.x[1] == y);
  }
  SUBCASE("underdetermined") {
    SymMatrix A = SymMatrix::from_rows({{E(1), x}});
    auto s = solve_linear(A, {E(1)});
    CHECK(s.consistent);
    CHECK(!s.unique);
    CHECK(mat_vec(A, s.x)[0] == E(1));
  }
  SUBCASE("inconsistent") {
    SymMatrix A = SymMatrix::from_rows({{E(1), E(1)}, {E(2), E(2)}});
    auto s = solve_linear(A, {E(1), E(3)});
    CHECK(!s.consistent);
  }
}

TEST_CASE("column span membership") {
  SymMatrix M = SymMatrix::from_rows({{E(1), E(0)}, {E(0), x}, {E(1), x}});
  CHECK(in_column_span(M, {E(1), x * y, E(1) + x * y}));
  CHECK(!in_column_span(M, {E(0), E(0), E(1)}));
}

TEST_CASE("rational kernel of an integer matrix") {
  auto k = rat_kernel({{Rat(1), Rat(2), Rat(3)}, {Rat(2), Rat(4), Rat(6)}}, 3);
  REQUIRE(k.size() == 2);
  for (const auto& v : k) {
    CHECK(v[0] + 2 * v[1] + 3 * v[2] == 0);
  }
}

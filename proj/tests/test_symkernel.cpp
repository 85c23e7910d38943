#include "doctest.h"

#include "flatnf/errors.hpp"
#include "flatnf/parse.hpp"
#include "flatnf/poly.hpp"
#include "flatnf/solve.hpp"
#include "flatnf/system.hpp"
#include "flatnf/var.hpp"

using namespace flatnf;

namespace {

SymbolTable table(std::initializer_list<Var> vars) {
  SymbolTable t;
  for (Var v : vars) t[v.display()] = v;
  return t;
}

}  // namespace

TEST_CASE("variable order is natural, display forms are stable") {
  Var x2 = Var::state("x2");
  Var x10 = Var::state("x10");
  CHECK(x2 < x10);
  CHECK(natural_compare("x2", "x10") < 0);
  CHECK(natural_compare("x10", "x10") == 0);

  CHECK(Var::state("x1").display() == "x1");
  CHECK(Var::state_plus("x1").display() == "x1_p");
  CHECK(Var::output("y1", 0).display() == "y1");
  CHECK(Var::output("y1", 2).display() == "y1_2");

  CHECK(Var::state("x1").plus() == Var::state_plus("x1"));
  CHECK(Var::state_plus("x1").unplus() == Var::state("x1"));
  CHECK(Var::output("y2", 1).shifted(2) == Var::output("y2", 3));
}

TEST_CASE("reserved names collide with printer forms") {
  CHECK(is_reserved_name("x1_p"));
  CHECK(is_reserved_name("y1"));
  CHECK(is_reserved_name("y12_3"));
  CHECK(!is_reserved_name("x1"));
  CHECK(!is_reserved_name("yaw"));
  CHECK(!is_reserved_name("u2"));
}

TEST_CASE("polynomial gcd divides both inputs") {
  Var x = Var::state("x1");
  Var y = Var::state("x2");
  Poly px = Poly::variable(x);
  Poly py = Poly::variable(y);
  Poly one = Poly::constant(1);

  Poly common = px + one;                  // x + 1
  Poly a = common * (px * py + one);       // (x+1)(xy+1)
  Poly b = common * (py + one);            // (x+1)(y+1)
  Poly g = Poly::gcd(a, b);
  CHECK(g == common);
  CHECK(Poly::divexact(a, g) == px * py + one);
  CHECK(Poly::divexact(b, g) == py + one);
}

TEST_CASE("coprime multivariate polynomials have gcd one") {
  Var x = Var::state("x1");
  Var y = Var::state("x2");
  Poly px = Poly::variable(x);
  Poly py = Poly::variable(y);
  Poly one = Poly::constant(1);

  CHECK(Poly::gcd(px * py + one, px + py).is_one());
  CHECK(Poly::gcd(px + one, py + one).is_one());
  // Shared variable but no common factor; the remainder sequence must not leak a
  // spurious factor in the other variables.
  Poly a = px * px * py + px;              // x(xy + 1)
  Poly b = px * py + py + one;             // y(x+1) + 1
  CHECK(Poly::gcd(a, b).is_one());
}

TEST_CASE("divexact rejects inexact division") {
  Var x = Var::state("x1");
  Poly px = Poly::variable(x);
  Poly one = Poly::constant(1);
  CHECK_THROWS_AS(Poly::divexact(px * px + one, px + one), Error);
}

TEST_CASE("expression construction cancels common factors") {
  Var x = Var::state("x1");
  Expr ex = Expr::variable(x);
  Expr num = ex * ex - Expr::integer(1);
  Expr den = ex - Expr::integer(1);
  Expr q = num / den;
  CHECK(q == ex + Expr::integer(1));
  CHECK(q.is_polynomial());

  // Denominators are normalized integer-primitive with positive leading coefficient.
  Expr half_over_x = Expr::integer(1) / (Expr::integer(2) * ex);
  CHECK(half_over_x.den() == Poly::variable(x));
  CHECK(half_over_x.num() == Poly::constant(Rat(1, 2)));
}

TEST_CASE("derivative of a quotient") {
  Var x2 = Var::state("x2"), x3 = Var::state("x3"), x4 = Var::state("x4");
  Var u1 = Var::input("u1"), u2 = Var::input("u2");
  SymbolTable t = table({x2, x3, x4, u1, u2});

  Expr g = parse_expr("(x2 + x3 + 3*x4)/(u1 + 2*u2 + 1)", t);
  Expr expected = parse_expr("-2*(x2 + x3 + 3*x4)/(u1 + 2*u2 + 1)^2", t);
  CHECK(g.diff(u2) == expected);
  CHECK(g.diff(x4) == parse_expr("3/(u1 + 2*u2 + 1)", t));
  CHECK(g.diff(Var::input("missing_from_g")).is_zero());
}

TEST_CASE("substitution is simultaneous") {
  Var x = Var::state("x1");
  Var y = Var::state("x2");
  Expr e = Expr::variable(x) - Expr::variable(y);
  std::map<Var, Expr> swap{{x, Expr::variable(y)}, {y, Expr::variable(x)}};
  CHECK(e.substitute(swap) == -e);
}

TEST_CASE("exact evaluation reports poles as nullopt") {
  Var x = Var::state("x1");
  Expr e = Expr::integer(1) / (Expr::variable(x) - Expr::integer(2));
  CHECK(e.eval_q({{x, Rat(3)}}) == Rat(1));
  CHECK(!e.eval_q({{x, Rat(2)}}).has_value());
}

TEST_CASE("parser handles precedence, powers, and rationals") {
  Var x = Var::state("x1");
  SymbolTable t = table({x});

  CHECK(parse_expr("2 + 3*4^2", t) == Expr::integer(50));
  CHECK(parse_expr("3/4", t) == Expr::constant(Rat(3, 4)));
  CHECK(parse_expr("-x1^2", t) == -Expr::variable(x).pow(2));
  CHECK(parse_expr("(2 + 3)*4", t) == Expr::integer(20));
  CHECK(parse_expr("2 - 3 - 4", t) == Expr::integer(-5));
  CHECK(parse_expr("12/4/3", t) == Expr::integer(1));
}

TEST_CASE("parser errors carry position and name") {
  SymbolTable t = table({Var::state("x1")});
  CHECK_THROWS_AS(parse_expr("x1 + ", t), SyntaxError);
  CHECK_THROWS_AS(parse_expr("x1 + )", t), SyntaxError);
  try {
    parse_expr("x1 + zz", t);
    FAIL("expected UndeclaredIdentifier");
  } catch (const UndeclaredIdentifier& e) {
    CHECK(e.name == "zz");
  }
}

TEST_CASE("parse-print-parse is a fixpoint") {
  Var x1 = Var::state("x1"), x2 = Var::state("x2");
  Var u1 = Var::input("u1");
  SymbolTable t = table({x1, x2, u1});
  const char* samples[] = {
      "(x1^2 - 2*x2 + 1/3)/(u1 + 1)",
      "-x1*x2*u1 + x2^3 - 7",
      "1/(x1*x2 - 1)",
      "x1/3 + 3/x2",
  };
  for (const char* s : samples) {
    Expr e = parse_expr(s, t);
    Expr again = parse_expr(e.str(), t);
    CHECK(again == e);
    CHECK(again.str() == e.str());
  }
}

TEST_CASE("solve_for handles affine chains and joint linear systems") {
  Var x = Var::state("x1"), y = Var::state("x2");
  Var u = Var::input("u1");
  Expr ex = Expr::variable(x), ey = Expr::variable(y), eu = Expr::variable(u);

  SUBCASE("single target with function coefficient") {
    auto sol = solve_for({ex * eu - Expr::integer(1)}, {u});
    CHECK(sol.at(u) == Expr::integer(1) / ex);
  }
  SUBCASE("jointly affine pair") {
    auto sol = solve_for({ex + ey - Expr::integer(3), ex - ey - Expr::integer(1)}, {x, y});
    CHECK(sol.at(x) == Expr::integer(2));
    CHECK(sol.at(y) == Expr::integer(1));
  }
  SUBCASE("sequential elimination") {
    // First equation yields x, the second then becomes affine in y.
    auto sol = solve_for({ex - eu * eu, ey * ex - Expr::integer(1)}, {x, y});
    CHECK(sol.at(x) == eu * eu);
    CHECK(sol.at(y) == Expr::integer(1) / (eu * eu));
  }
  SUBCASE("rank deficiency is detected") {
    CHECK_THROWS_AS(solve_for({ex + ey}, {x, y}), UnderdeterminedTargets);
  }
  SUBCASE("non-affine dead ends are reported") {
    CHECK_THROWS_AS(solve_for({ex * ex - eu}, {x}), UnsupportedAlgebraicForm);
  }
  SUBCASE("try_solve_for mirrors the throwing form") {
    std::map<Var, Expr> out;
    CHECK(try_solve_for({ex - Expr::integer(5)}, {x}, out));
    CHECK(out.at(x) == Expr::integer(5));
    CHECK(!try_solve_for({ex * ex - eu}, {x}, out));
  }
}

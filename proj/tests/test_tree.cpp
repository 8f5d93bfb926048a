#include <doctest.h>

#include <cmath>
#include <random>

#include "gpfusion/error.hpp"
#include "gpfusion/tree.hpp"

using namespace gpfusion;

TEST_CASE("eval_tree: documented examples") {
  const double ab[] = {0.2, 0.3};
  CHECK(eval_tree(parse_sexpr("(add (var 0) (var 1))"), ab) == doctest::Approx(0.5).epsilon(1e-15));
  const double any[] = {0.7, 0.4};
  CHECK(eval_tree(parse_sexpr("(div (var 0) (sub (var 1) (var 1)))"), any) == 1.0);
  const double pair[] = {0.2, 0.8};
  CHECK(eval_tree(parse_sexpr("(avg (max (var 0) (var 1)) (min (var 0) (var 1)))"), pair) == 0.5);
}

TEST_CASE("function set semantics") {
  CHECK(apply_function(Op::Add, 2, 3) == 5);
  CHECK(apply_function(Op::Sub, 2, 3) == -1);
  CHECK(apply_function(Op::Mul, 2, 3) == 6);
  CHECK(apply_function(Op::Div, 3, 2) == 1.5);
  CHECK(apply_function(Op::Div, 3, 1e-13) == 1.0);
  CHECK(apply_function(Op::Div, 3, -1e-13) == 1.0);
  CHECK(apply_function(Op::Div, 3, 1e-12) == doctest::Approx(3e12));
  CHECK(apply_function(Op::Min, 2, 3) == 2);
  CHECK(apply_function(Op::Max, 2, 3) == 3);
  CHECK(apply_function(Op::Avg, 2, 3) == 2.5);
}

TEST_CASE("evaluation stays finite under overflow") {
  // div by 1e-12 repeatedly squared overflows without clamping.
  std::string s = "(div (const 1) (const 1e-12))";
  for (int k = 0; k < 6; ++k) s = "(mul " + s + " " + s + ")";
  auto t = parse_sexpr("(sub " + s + " " + s + ")");
  const double x[] = {0.5, 0.5};
  CHECK(std::isfinite(eval_tree(parse_sexpr(s), x)));
  CHECK(std::isfinite(eval_tree(t, x)));
}

TEST_CASE("structure queries") {
  auto t = parse_sexpr("(add (var 0) (mul (const 0.5) (sub (var 1) (var 3))))");
  CHECK(t.size() == 7);
  CHECK(t.depth() == 3);
  CHECK(t.subtree_end(0) == 7);
  CHECK(t.subtree_end(1) == 2);
  CHECK(t.subtree_end(2) == 7);
  CHECK(t.subtree_depth(2) == 2);
  CHECK(t.node_levels() == std::vector<std::size_t>{0, 1, 1, 2, 2, 3, 3});
  CHECK(t.max_variable() == 3u);
  CHECK(t.is_valid(4, 8));
  CHECK_FALSE(t.is_valid(3, 8));
  CHECK_FALSE(t.is_valid(4, 2));
}

TEST_CASE("constructor rejects malformed trees and terminal roots") {
  CHECK_THROWS_AS(ExpressionTree({Node::var(0)}), ValidationError);
  CHECK_THROWS_AS(ExpressionTree({Node::function(Op::Add), Node::var(0)}), ValidationError);
  CHECK_THROWS_AS(ExpressionTree({Node::function(Op::Add), Node::var(0), Node::var(0), Node::var(1)}),
                  ValidationError);
}

TEST_CASE("s-expression parser") {
  SUBCASE("round trip") {
    const char* text = "(add (var 0) (div (const 0.5) (var 3)))";
    CHECK(to_sexpr(parse_sexpr(text)) == text);
    auto t = parse_sexpr("  ( min\n(const 0.020408163265306121)  (var 2))  ");
    CHECK(parse_sexpr(to_sexpr(t)) == t);
  }
  SUBCASE("unknown operator names the token") {
    try {
      parse_sexpr("(pow (var 0) (var 1))");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("'pow'") != std::string::npos);
    }
  }
  SUBCASE("other errors") {
    CHECK_THROWS_AS(parse_sexpr("(add (var 0))"), ParseError);
    CHECK_THROWS_AS(parse_sexpr("(add (var 0) (var 1)) extra"), ParseError);
    CHECK_THROWS_AS(parse_sexpr("(add (var -1) (var 1))"), ParseError);
    CHECK_THROWS_AS(parse_sexpr("(add (const nan) (var 1))"), ParseError);
    CHECK_THROWS_AS(parse_sexpr("(var 0)"), ParseError);
    CHECK_THROWS_AS(parse_sexpr(""), ParseError);
  }
  SUBCASE("constants round trip exactly") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int k = 0; k < 200; ++k) {
      ExpressionTree t({Node::function(Op::Add), Node::constant(u(rng)), Node::var(k % 4)});
      CHECK(parse_sexpr(to_sexpr(t)) == t);
    }
  }
}

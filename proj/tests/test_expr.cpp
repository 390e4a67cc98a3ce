#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "kt/errors.hpp"
#include "kt/expr.hpp"

using kt::Expr;

namespace {

double ev(const std::string& src, std::initializer_list<double> args) {
  std::vector<double> a(args);
  return Expr::parse(src).eval(a);
}

}  // namespace

TEST_SUITE("expr") {

TEST_CASE("literals and constants") {
  CHECK(ev("42", {}) == doctest::Approx(42.0));
  CHECK(ev("3.25e-1", {}) == doctest::Approx(0.325));
  CHECK(ev(".5", {}) == doctest::Approx(0.5));
  CHECK(ev("pi", {}) == doctest::Approx(M_PI));
  CHECK(ev("cos(pi)", {}) == doctest::Approx(-1.0));
}

TEST_CASE("variables and aliases") {
  CHECK(ev("u", {7.0}) == doctest::Approx(7.0));
  CHECK(ev("v", {0.0, -3.0}) == doctest::Approx(-3.0));
  // x1/x2 are aliases for u/v; higher indices extend the argument list.
  CHECK(ev("x1 + 10*x2", {1.0, 2.0}) == doctest::Approx(21.0));
  CHECK(ev("x3", {0.0, 0.0, 5.0}) == doctest::Approx(5.0));
  CHECK(Expr::parse("x3 + x1").arity() == 3);
  CHECK(Expr::parse("sin(v)").arity() == 2);
  CHECK(Expr::parse("2 + 2").arity() == 0);
}

TEST_CASE("arithmetic and precedence") {
  CHECK(ev("1 + 2*3", {}) == doctest::Approx(7.0));
  CHECK(ev("(1 + 2)*3", {}) == doctest::Approx(9.0));
  CHECK(ev("2 - 3 - 4", {}) == doctest::Approx(-5.0));
  CHECK(ev("12/3/2", {}) == doctest::Approx(2.0));
  CHECK(ev("2^3^2", {}) == doctest::Approx(512.0));  // right associative
  CHECK(ev("-2^2", {}) == doctest::Approx(-4.0));    // unary minus binds looser
  CHECK(ev("2^-3", {}) == doctest::Approx(0.125));
  CHECK(ev("--3", {}) == doctest::Approx(3.0));
  CHECK(ev("6*-2", {}) == doctest::Approx(-12.0));
}

TEST_CASE("functions") {
  CHECK(ev("sin(u)^2 + cos(u)^2", {1.234}) == doctest::Approx(1.0));
  CHECK(ev("sin(u)^2", {M_PI / 2.0}) == doctest::Approx(1.0));
  CHECK(ev("tan(u)", {0.3}) == doctest::Approx(std::tan(0.3)));
  CHECK(ev("sinh(1) + cosh(1)", {}) == doctest::Approx(std::exp(1.0)));
  CHECK(ev("tanh(0.5)", {}) == doctest::Approx(std::tanh(0.5)));
  CHECK(ev("exp(log(7))", {}) == doctest::Approx(7.0));
  CHECK(ev("sqrt(2)^2", {}) == doctest::Approx(2.0));
  CHECK(ev("abs(-3.5)", {}) == doctest::Approx(3.5));
  CHECK(ev("1/v^2", {1.0, 2.0}) == doctest::Approx(0.25));
}

TEST_CASE("syntax errors carry an offset") {
  CHECK_THROWS_AS(Expr::parse(""), kt::SyntaxError);
  CHECK_THROWS_AS(Expr::parse("1 +"), kt::SyntaxError);
  CHECK_THROWS_AS(Expr::parse("(u"), kt::SyntaxError);
  CHECK_THROWS_AS(Expr::parse("u v"), kt::SyntaxError);
  try {
    Expr::parse("sin(");
    FAIL("expected SyntaxError");
  } catch (const kt::SyntaxError& e) {
    CHECK(e.offset == 4);
  }
  try {
    Expr::parse("bogus(u)");
    FAIL("expected UnknownIdentifier");
  } catch (const kt::UnknownIdentifier& e) {
    CHECK(e.name == "bogus");
  }
  // Unknown identifiers are errors even without a call.
  CHECK_THROWS_AS(Expr::parse("u + w"), kt::UnknownIdentifier);
}

TEST_CASE("printer emits minimal parentheses") {
  CHECK(Expr::parse("u + v*u").str() == "u + v*u");
  CHECK(Expr::parse("(u + v)*u").str() == "(u + v)*u");
  CHECK(Expr::parse("u - (v - 1)").str() == "u - (v - 1)");
  CHECK(Expr::parse("-(u^2)").str() == "-u^2");
  CHECK(Expr::parse("(-u)^2").str() == "(-u)^2");
  CHECK(Expr::parse("sin(u)^2").str() == "sin(u)^2");
  CHECK(Expr::parse("(2^3)^2").str() == "(2^3)^2");
  CHECK(Expr::parse("2^(3^2)").str() == "2^3^2");
}

TEST_CASE("print/parse round trip is exact") {
  const std::vector<std::string> sources = {
      "sin(u)^2 + cos(v)*u",
      "1/(2 + cos(u))",
      "-u^2 + 3*u - 4/v",
      "exp(-(u^2 + v^2)/2)",
      "sqrt(abs(u - v)) + tanh(u*v)",
      "2^-3*u",
      "u/v/2 - u/(v/2)",
      "cos(pi*u) - sin(pi/2)",
  };
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> dist(0.25, 1.75);
  for (const auto& src : sources) {
    CAPTURE(src);
    const Expr a = Expr::parse(src);
    const std::string printed = a.str();
    const Expr b = Expr::parse(printed);
    // Canonical form is a fixed point of print-then-parse.
    CHECK(b.str() == printed);
    for (int k = 0; k < 10; ++k) {
      std::vector<double> args(2);
      for (auto& x : args) x = dist(rng);
      const double ya = a.eval(args);
      const double yb = b.eval(args);
      CHECK(ya == doctest::Approx(yb).epsilon(1e-15));
    }
  }
}

}  // TEST_SUITE

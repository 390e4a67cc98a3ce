#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kt/errors.hpp"

namespace kt {

// Arithmetic expressions over chart coordinates, used for user-supplied
// metric components, curve components and curvature profiles.
//
// Grammar (see docs/grammar.md for the EBNF):
//
//   expr   := term { ("+" | "-") term }
//   term   := factor { ("*" | "/") factor }
//   factor := "-" factor | power
//   power  := atom [ "^" factor ]            -- right-associative
//   atom   := number | "pi" | variable | name "(" expr ")" | "(" expr ")"
//
// Variables are exactly u, v, x1..x9 (u = x1, v = x2). "^" binds tighter than
// unary minus, so -u^2 parses as -(u^2). Functions: sin cos tan sinh cosh
// tanh exp log sqrt abs.
class Expr {
 public:
  // Throws SyntaxError (with byte offset) or UnknownIdentifier.
  static Expr parse(std::string_view source);

  // vars[0] binds u/x1, vars[1] binds v/x2, and so on.
  double eval(std::span<const double> vars) const;

  // Canonical text form; parsing it back yields an identically-evaluating AST.
  std::string str() const;

  // Number of leading coordinates referenced (0 for constant expressions).
  int arity() const { return max_var_ + 1; }

 private:
  enum class Op : std::uint8_t {
    kConst, kVar, kAdd, kSub, kMul, kDiv, kNeg, kPow,
    kSin, kCos, kTan, kSinh, kCosh, kTanh, kExp, kLog, kSqrt, kAbs,
  };

  struct Node {
    Op op;
    double value = 0.0;  // kConst
    std::int16_t var = -1;  // kVar
    std::int32_t lhs = -1;
    std::int32_t rhs = -1;
  };

  friend class ExprParser;

  double eval_node(std::int32_t id, std::span<const double> vars) const;
  void print_node(std::int32_t id, int parent_prec, bool right_operand,
                  std::string& out) const;

  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
  int max_var_ = -1;
};

}  // namespace kt

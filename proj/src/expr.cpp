#include "kt/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>

namespace kt {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct FunctionEntry {
  std::string_view name;
  int op;  // Expr::Op value, kept as int to stay out of the private enum here
};

}  // namespace

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : src_(src) {}

  Expr run() {
    Expr e;
    e.root_ = parse_expr(e);
    skip_ws();
    if (pos_ != src_.size()) throw SyntaxError(pos_, "end of input");
    for (const auto& n : e.nodes_)
      if (n.var > e.max_var_) e.max_var_ = n.var;
    return e;
  }

 private:
  using Op = Expr::Op;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  std::int32_t add(Expr& e, Expr::Node n) {
    e.nodes_.push_back(n);
    return static_cast<std::int32_t>(e.nodes_.size() - 1);
  }

  std::int32_t parse_expr(Expr& e) {
    std::int32_t lhs = parse_term(e);
    for (;;) {
      if (eat('+')) {
        std::int32_t rhs = parse_term(e);
        lhs = add(e, {Op::kAdd, 0.0, -1, lhs, rhs});
      } else if (eat('-')) {
        std::int32_t rhs = parse_term(e);
        lhs = add(e, {Op::kSub, 0.0, -1, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  std::int32_t parse_term(Expr& e) {
    std::int32_t lhs = parse_factor(e);
    for (;;) {
      if (eat('*')) {
        std::int32_t rhs = parse_factor(e);
        lhs = add(e, {Op::kMul, 0.0, -1, lhs, rhs});
      } else if (eat('/')) {
        std::int32_t rhs = parse_factor(e);
        lhs = add(e, {Op::kDiv, 0.0, -1, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  // Unary minus binds looser than '^': -u^2 = -(u^2).
  std::int32_t parse_factor(Expr& e) {
    if (eat('-')) {
      std::int32_t operand = parse_factor(e);
      return add(e, {Op::kNeg, 0.0, -1, operand, -1});
    }
    return parse_power(e);
  }

  std::int32_t parse_power(Expr& e) {
    std::int32_t base = parse_atom(e);
    if (eat('^')) {
      std::int32_t exponent = parse_factor(e);  // right-associative
      return add(e, {Op::kPow, 0.0, -1, base, exponent});
    }
    return base;
  }

  std::int32_t parse_atom(Expr& e) {
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError(pos_, "expression");
    const char c = src_[pos_];

    if (c == '(') {
      ++pos_;
      std::int32_t inner = parse_expr(e);
      if (!eat(')')) throw SyntaxError(pos_, "')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number(e);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier(e);
    throw SyntaxError(pos_, "expression");
  }

  std::int32_t parse_number(Expr& e) {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' was not an exponent; leave it for the identifier rules
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc() || ptr != src_.data() + pos_) throw SyntaxError(start, "number");
    return add(e, {Op::kConst, value, -1, -1, -1});
  }

  std::int32_t parse_identifier(Expr& e) {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    if (peek() == '(') {
      static const std::map<std::string_view, Op> kFunctions = {
          {"sin", Op::kSin},   {"cos", Op::kCos},   {"tan", Op::kTan},
          {"sinh", Op::kSinh}, {"cosh", Op::kCosh}, {"tanh", Op::kTanh},
          {"exp", Op::kExp},   {"log", Op::kLog},   {"sqrt", Op::kSqrt},
          {"abs", Op::kAbs},
      };
      auto it = kFunctions.find(name);
      if (it == kFunctions.end()) throw UnknownIdentifier(std::string(name), start);
      eat('(');
      std::int32_t arg = parse_expr(e);
      if (!eat(')')) throw SyntaxError(pos_, "')'");
      return add(e, {it->second, 0.0, -1, arg, -1});
    }

    if (name == "pi") return add(e, {Op::kConst, kPi, -1, -1, -1});
    if (name == "u") return add(e, {Op::kVar, 0.0, 0, -1, -1});
    if (name == "v") return add(e, {Op::kVar, 0.0, 1, -1, -1});
    if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '9')
      return add(e, {Op::kVar, 0.0, static_cast<std::int16_t>(name[1] - '1'), -1, -1});
    throw UnknownIdentifier(std::string(name), start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

Expr Expr::parse(std::string_view source) {
  if (source.empty()) throw SyntaxError(0, "expression");
  return ExprParser(source).run();
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

double Expr::eval(std::span<const double> vars) const {
  return eval_node(root_, vars);
}

double Expr::eval_node(std::int32_t id, std::span<const double> vars) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  switch (n.op) {
    case Op::kConst: return n.value;
    case Op::kVar:
      return n.var < static_cast<int>(vars.size()) ? vars[n.var]
                                                   : throw Error("expression variable out of range");
    case Op::kAdd: return eval_node(n.lhs, vars) + eval_node(n.rhs, vars);
    case Op::kSub: return eval_node(n.lhs, vars) - eval_node(n.rhs, vars);
    case Op::kMul: return eval_node(n.lhs, vars) * eval_node(n.rhs, vars);
    case Op::kDiv: return eval_node(n.lhs, vars) / eval_node(n.rhs, vars);
    case Op::kNeg: return -eval_node(n.lhs, vars);
    case Op::kPow: return std::pow(eval_node(n.lhs, vars), eval_node(n.rhs, vars));
    case Op::kSin: return std::sin(eval_node(n.lhs, vars));
    case Op::kCos: return std::cos(eval_node(n.lhs, vars));
    case Op::kTan: return std::tan(eval_node(n.lhs, vars));
    case Op::kSinh: return std::sinh(eval_node(n.lhs, vars));
    case Op::kCosh: return std::cosh(eval_node(n.lhs, vars));
    case Op::kTanh: return std::tanh(eval_node(n.lhs, vars));
    case Op::kExp: return std::exp(eval_node(n.lhs, vars));
    case Op::kLog: return std::log(eval_node(n.lhs, vars));
    case Op::kSqrt: return std::sqrt(eval_node(n.lhs, vars));
    case Op::kAbs: return std::abs(eval_node(n.lhs, vars));
  }
  throw Error("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

// Precedence levels for printing: additive 1, multiplicative 2, unary minus 3,
// power 4, atoms 5.
int node_precedence(int op_as_int) {
  switch (op_as_int) {
    case 2: case 3: return 1;   // add, sub
    case 4: case 5: return 2;   // mul, div
    case 6: return 3;           // neg
    case 7: return 4;           // pow
    default: return 5;
  }
}

const char* function_name(int op_as_int) {
  switch (op_as_int) {
    case 8: return "sin";
    case 9: return "cos";
    case 10: return "tan";
    case 11: return "sinh";
    case 12: return "cosh";
    case 13: return "tanh";
    case 14: return "exp";
    case 15: return "log";
    case 16: return "sqrt";
    case 17: return "abs";
    default: return nullptr;
  }
}

void append_number(double value, std::string& out) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  out += buf;
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  print_node(root_, 0, false, out);
  return out;
}

void Expr::print_node(std::int32_t id, int parent_prec, bool right_operand,
                      std::string& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  const int op = static_cast<int>(n.op);
  const int prec = node_precedence(op);

  if (const char* fn = function_name(op)) {
    out += fn;
    out += '(';
    print_node(n.lhs, 0, false, out);
    out += ')';
    return;
  }

  // Left-associative operators need parentheses around a right operand of
  // equal precedence; the right-associative '^' needs them on the left.
  bool parens = prec < parent_prec;
  if (prec == parent_prec) {
    if (parent_prec == 1 || parent_prec == 2) parens = right_operand;
    if (parent_prec == 4) parens = !right_operand;
  }
  if (parens) out += '(';

  switch (n.op) {
    case Op::kConst: append_number(n.value, out); break;
    case Op::kVar:
      if (n.var == 0) out += 'u';
      else if (n.var == 1) out += 'v';
      else { out += 'x'; out += static_cast<char>('1' + n.var); }
      break;
    case Op::kAdd:
      print_node(n.lhs, 1, false, out); out += " + "; print_node(n.rhs, 1, true, out); break;
    case Op::kSub:
      print_node(n.lhs, 1, false, out); out += " - "; print_node(n.rhs, 1, true, out); break;
    case Op::kMul:
      print_node(n.lhs, 2, false, out); out += "*"; print_node(n.rhs, 2, true, out); break;
    case Op::kDiv:
      print_node(n.lhs, 2, false, out); out += "/"; print_node(n.rhs, 2, true, out); break;
    case Op::kNeg:
      out += '-';
      print_node(n.lhs, 3, false, out);
      break;
    case Op::kPow:
      print_node(n.lhs, 4, false, out); out += "^"; print_node(n.rhs, 4, true, out); break;
    default: break;
  }

  if (parens) out += ')';
}

}  // namespace kt

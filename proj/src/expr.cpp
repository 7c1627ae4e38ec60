#include "backstep/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>

#include "backstep/errors.hpp"

namespace backstep {

namespace {

enum class Op {
  kConst,
  kVar,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPow,
  kNeg,
  kSin,
  kCos,
  kExp,
  kTanh,
  kSqrt,
};

}  // namespace

struct Expr::Node {
  Op op = Op::kConst;
  double value = 0.0;     // kConst
  std::size_t var = 0;    // kVar
  NodePtr a, b;           // operands
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_const(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::kConst;
  n->value = v;
  return n;
}

NodePtr make_var(std::size_t i) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::kVar;
  n->var = i;
  return n;
}

NodePtr make_node(Op op, NodePtr a, NodePtr b = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->op == Op::kConst && n->value == v;
}

// Light simplification keeps derivative trees small; nothing depends on it.
NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (a->op == Op::kConst && b->op == Op::kConst) return make_const(a->value + b->value);
  return make_node(Op::kAdd, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (a->op == Op::kConst && b->op == Op::kConst) return make_const(a->value - b->value);
  if (is_const(a, 0.0)) return make_node(Op::kNeg, std::move(b));
  return make_node(Op::kSub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  // 0*x is not folded away: uses() reports textual variable dependence, and
  // scope enforcement relies on that surviving simplification.
  if (a->op == Op::kConst && b->op == Op::kConst) return make_const(a->value * b->value);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return make_node(Op::kMul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
  if (a->op == Op::kConst && b->op == Op::kConst) return make_const(a->value / b->value);
  if (is_const(b, 1.0)) return a;
  return make_node(Op::kDiv, std::move(a), std::move(b));
}

class Parser {
public:
  Parser(std::string_view text, const std::vector<std::string>& vars)
      : text_(text), vars_(vars) {}

  NodePtr run() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      fail("unexpected trailing input");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("expression error at position " + std::to_string(pos_) +
                      " in \"" + std::string(text_) + "\": " + why);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr e = parse_term();
    for (;;) {
      if (eat('+'))
        e = add(e, parse_term());
      else if (eat('-'))
        e = sub(e, parse_term());
      else
        return e;
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_factor();
    for (;;) {
      if (eat('*'))
        e = mul(e, parse_factor());
      else if (eat('/'))
        e = div(e, parse_factor());
      else
        return e;
    }
  }

  // Unary minus binds looser than '^', so -x^2 means -(x^2); a '-' directly
  // after '^' still negates the (constant) exponent.
  NodePtr parse_factor() {
    if (eat('-')) {
      NodePtr inner = parse_factor();
      if (inner->op == Op::kConst) return make_const(-inner->value);
      return make_node(Op::kNeg, inner);
    }
    NodePtr base = parse_primary();
    if (eat('^')) {
      NodePtr e = parse_factor();
      if (e->op == Op::kPow && e->a->op == Op::kConst && e->b->op == Op::kConst)
        e = make_const(std::pow(e->a->value, e->b->value));
      if (e->op != Op::kConst) fail("exponent must be a numeric constant");
      if (base->op == Op::kConst) return make_const(std::pow(base->value, e->value));
      return make_node(Op::kPow, base, e);
    }
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      if (!eat(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    const char* begin = text_.data() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make_const(v);
  }

  NodePtr parse_ident() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (peek() == '(') {
      Op op;
      if (name == "sin")
        op = Op::kSin;
      else if (name == "cos")
        op = Op::kCos;
      else if (name == "exp")
        op = Op::kExp;
      else if (name == "tanh")
        op = Op::kTanh;
      else if (name == "sqrt")
        op = Op::kSqrt;
      else
        fail("unknown function \"" + name + "\"");
      eat('(');
      NodePtr arg = parse_expr();
      if (!eat(')')) fail("missing ')' after argument of " + name);
      return make_node(op, arg);
    }
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return make_var(i);
    fail("unknown symbol \"" + name + "\"");
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

double eval_node(const Expr::Node& n, std::span<const double> vals) {
  switch (n.op) {
    case Op::kConst: return n.value;
    case Op::kVar: return vals[n.var];
    case Op::kAdd: return eval_node(*n.a, vals) + eval_node(*n.b, vals);
    case Op::kSub: return eval_node(*n.a, vals) - eval_node(*n.b, vals);
    case Op::kMul: return eval_node(*n.a, vals) * eval_node(*n.b, vals);
    case Op::kDiv: return eval_node(*n.a, vals) / eval_node(*n.b, vals);
    case Op::kPow: return std::pow(eval_node(*n.a, vals), eval_node(*n.b, vals));
    case Op::kNeg: return -eval_node(*n.a, vals);
    case Op::kSin: return std::sin(eval_node(*n.a, vals));
    case Op::kCos: return std::cos(eval_node(*n.a, vals));
    case Op::kExp: return std::exp(eval_node(*n.a, vals));
    case Op::kTanh: return std::tanh(eval_node(*n.a, vals));
    case Op::kSqrt: return std::sqrt(eval_node(*n.a, vals));
  }
  return 0.0;
}

NodePtr diff_node(const NodePtr& n, std::size_t var) {
  switch (n->op) {
    case Op::kConst: return make_const(0.0);
    case Op::kVar: return make_const(n->var == var ? 1.0 : 0.0);
    case Op::kAdd: return add(diff_node(n->a, var), diff_node(n->b, var));
    case Op::kSub: return sub(diff_node(n->a, var), diff_node(n->b, var));
    case Op::kMul:
      return add(mul(diff_node(n->a, var), n->b), mul(n->a, diff_node(n->b, var)));
    case Op::kDiv:
      // (a/b)' = a'/b - a b'/b^2
      return sub(div(diff_node(n->a, var), n->b),
                 div(mul(n->a, diff_node(n->b, var)), make_node(Op::kMul, n->b, n->b)));
    case Op::kPow: {
      if (n->b->op != Op::kConst)
        throw ConfigError("cannot differentiate a power with a non-constant exponent");
      double p = n->b->value;
      // (a^p)' = p a^(p-1) a'
      return mul(mul(make_const(p), make_node(Op::kPow, n->a, make_const(p - 1.0))),
                 diff_node(n->a, var));
    }
    case Op::kNeg: return make_node(Op::kNeg, diff_node(n->a, var));
    case Op::kSin: return mul(make_node(Op::kCos, n->a), diff_node(n->a, var));
    case Op::kCos: return make_node(Op::kNeg, mul(make_node(Op::kSin, n->a), diff_node(n->a, var)));
    case Op::kExp: return mul(make_node(Op::kExp, n->a), diff_node(n->a, var));
    case Op::kTanh: {
      // (tanh a)' = (1 - tanh^2 a) a'
      NodePtr th = make_node(Op::kTanh, n->a);
      return mul(sub(make_const(1.0), make_node(Op::kMul, th, th)), diff_node(n->a, var));
    }
    case Op::kSqrt:
      // (sqrt a)' = a' / (2 sqrt a)
      return div(diff_node(n->a, var), mul(make_const(2.0), make_node(Op::kSqrt, n->a)));
  }
  return make_const(0.0);
}

bool uses_node(const Expr::Node& n, std::size_t var) {
  switch (n.op) {
    case Op::kConst: return false;
    case Op::kVar: return n.var == var;
    default:
      return (n.a && uses_node(*n.a, var)) || (n.b && uses_node(*n.b, var));
  }
}

void print_node(const Expr::Node& n, std::string& out, const std::vector<std::string>* names) {
  auto binary = [&](const char* sym) {
    out += '(';
    print_node(*n.a, out, names);
    out += sym;
    print_node(*n.b, out, names);
    out += ')';
  };
  auto fn = [&](const char* name) {
    out += name;
    out += '(';
    print_node(*n.a, out, names);
    out += ')';
  };
  switch (n.op) {
    case Op::kConst: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case Op::kVar:
      if (names && n.var < names->size())
        out += (*names)[n.var];
      else
        out += "$" + std::to_string(n.var);
      return;
    case Op::kAdd: binary("+"); return;
    case Op::kSub: binary("-"); return;
    case Op::kMul: binary("*"); return;
    case Op::kDiv: binary("/"); return;
    case Op::kPow: binary("^"); return;
    case Op::kNeg:
      out += "(-";
      print_node(*n.a, out, names);
      out += ')';
      return;
    case Op::kSin: fn("sin"); return;
    case Op::kCos: fn("cos"); return;
    case Op::kExp: fn("exp"); return;
    case Op::kTanh: fn("tanh"); return;
    case Op::kSqrt: fn("sqrt"); return;
  }
}

}  // namespace

Expr Expr::parse(std::string_view text, const std::vector<std::string>& vars) {
  Parser p(text, vars);
  NodePtr root = p.run();
  return Expr(std::move(root), std::make_shared<const std::vector<std::string>>(vars));
}

double Expr::eval(std::span<const double> values) const {
  if (!root_) throw ConfigError("evaluating an empty expression");
  return eval_node(*root_, values);
}

Expr Expr::derivative(std::size_t var_index) const {
  if (!root_) throw ConfigError("differentiating an empty expression");
  return Expr(diff_node(root_, var_index), names_);
}

bool Expr::uses(std::size_t var_index) const {
  return root_ && uses_node(*root_, var_index);
}

std::string Expr::to_string() const {
  if (!root_) return "<empty>";
  std::string out;
  print_node(*root_, out, names_ ? names_.get() : nullptr);
  return out;
}

}  // namespace backstep

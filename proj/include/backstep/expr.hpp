#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace backstep {

// Small scalar expression language used by scenario files for plant
// right-hand sides and reference signals:
//
//   expr    := term (('+' | '-') term)*
//   term    := factor (('*' | '/') factor)*
//   factor  := '-' factor | primary ('^' factor)?
//   primary := number | var | fn '(' expr ')' | '(' expr ')'
//   fn      := sin | cos | exp | tanh | sqrt
//
// Variables are fixed at parse time; unknown identifiers are rejected.
// Expressions in t can be differentiated symbolically (powers need constant
// exponents), which is how reference derivatives are obtained -- there is no
// numeric differentiation anywhere.
class Expr {
public:
  Expr() = default;

  // Throws ConfigError on syntax errors or identifiers not in `vars`.
  static Expr parse(std::string_view text, const std::vector<std::string>& vars);

  [[nodiscard]] double eval(std::span<const double> values) const;

  // d/d vars[var_index].  Throws ConfigError for d/dx of f^g with non-constant g.
  [[nodiscard]] Expr derivative(std::size_t var_index) const;

  [[nodiscard]] bool empty() const { return root_ == nullptr; }

  // True when the expression references vars[var_index].
  [[nodiscard]] bool uses(std::size_t var_index) const;

  [[nodiscard]] std::string to_string() const;

  // Tree representation; only the implementation constructs nodes.
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

private:
  using NamesPtr = std::shared_ptr<const std::vector<std::string>>;

  explicit Expr(NodePtr root, NamesPtr names = nullptr)
      : root_(std::move(root)), names_(std::move(names)) {}

  NodePtr root_;
  NamesPtr names_;  // variable names, kept so to_string() round-trips
};

}  // namespace backstep

#ifndef ALGMECH_EXPR_HPP
#define ALGMECH_EXPR_HPP

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "algmech/errors.hpp"

namespace algmech {

enum class BinOp { Add, Sub, Mul, Div, Pow };
enum class FunOp { Sin, Cos, Tan, Exp, Ln, Sqrt };

// Bindings for free variables during evaluation. Immutable by convention
// once handed to eval(); safe for concurrent reads.
class Env {
public:
  Env() = default;

  void set(std::string name, double value);
  const double* find(std::string_view name) const;
  void clear() { vars_.clear(); }

private:
  std::vector<std::pair<std::string, double>> vars_;
};

// Immutable symbolic expression over named real variables. Copies share
// structure; all operations are pure.
class Expr {
public:
  Expr();  // zero literal

  static Expr number(double value);
  static Expr variable(std::string name);
  static Expr pi();
  static Expr unary_minus(Expr operand);
  static Expr binary(BinOp op, Expr lhs, Expr rhs);
  static Expr call(FunOp fn, Expr arg);

  double eval(const Env& env) const;

  // Exact symbolic derivative, simplified. A variable absent from the
  // expression yields the zero literal.
  Expr derivative(std::string_view var) const;

  // Constant folding, neutral-element absorption and zero annihilation
  // only; no canonical reordering.
  Expr simplified() const;

  Expr substituted(const std::map<std::string, Expr>& bindings) const;

  std::string str() const;

  std::vector<std::string> variables() const;  // sorted, unique
  bool depends_on(std::string_view var) const;

  bool is_number() const;
  bool is_number(double value) const;
  double number_value() const;  // valid only when is_number()

  bool same_structure(const Expr& other) const;

  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  explicit Expr(NodePtr node) : node_(std::move(node)) {}
  const Node& node() const { return *node_; }
  const NodePtr& node_ptr() const { return node_; }

private:
  NodePtr node_;
};

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator-(Expr a);

Expr pow(Expr base, Expr exponent);
Expr sin(Expr a);
Expr cos(Expr a);
Expr tan(Expr a);
Expr exp(Expr a);
Expr ln(Expr a);
Expr sqrt(Expr a);

// Recursive-descent parser for the grammar documented in
// docs/expression-grammar.md: standard infix, '^' right-associative,
// unary minus, function-call syntax.
Expr parse_expr(std::string_view text);

std::string format_double(double value);  // shortest round-trip decimal

}  // namespace algmech

#endif

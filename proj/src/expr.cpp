#include "algmech/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

namespace algmech {

struct Expr::Node {
  enum class Kind { Number, Var, Pi, Binary, Neg, Call };

  Kind kind;
  double num = 0.0;
  std::string name;
  BinOp op = BinOp::Add;
  FunOp fn = FunOp::Sin;
  NodePtr a, b;
};

namespace {

using Node = Expr::Node;
using Kind = Expr::Node::Kind;
using NodePtr = Expr::NodePtr;

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->num = v;
  return n;
}

NodePtr make_var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->name = std::move(name);
  return n;
}

NodePtr make_pi() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Pi;
  return n;
}

NodePtr make_binary(BinOp op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_neg(NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Neg;
  n->a = std::move(a);
  return n;
}

NodePtr make_call(FunOp fn, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Call;
  n->fn = fn;
  n->a = std::move(a);
  return n;
}

bool node_is_number(const NodePtr& n, double v) {
  return n->kind == Kind::Number && n->num == v;
}

const char* fun_name(FunOp fn) {
  switch (fn) {
    case FunOp::Sin: return "sin";
    case FunOp::Cos: return "cos";
    case FunOp::Tan: return "tan";
    case FunOp::Exp: return "exp";
    case FunOp::Ln: return "ln";
    case FunOp::Sqrt: return "sqrt";
  }
  return "?";
}

std::string print_node(const NodePtr& n);

// Checked arithmetic shared by eval() and constant folding. The printed
// subexpression names the failure site.
double checked_binary(BinOp op, double x, double y, const NodePtr& site) {
  switch (op) {
    case BinOp::Add: return x + y;
    case BinOp::Sub: return x - y;
    case BinOp::Mul: return x * y;
    case BinOp::Div:
      if (y == 0.0) throw EvalError("division by zero", print_node(site));
      return x / y;
    case BinOp::Pow: {
      if (x < 0.0 && y != std::floor(y))
        throw EvalError("negative base with non-integer exponent", print_node(site));
      if (x == 0.0 && y < 0.0)
        throw EvalError("zero base with negative exponent", print_node(site));
      return std::pow(x, y);
    }
  }
  throw EvalError("unknown operator", print_node(site));
}

double checked_call(FunOp fn, double x, const NodePtr& site) {
  switch (fn) {
    case FunOp::Sin: return std::sin(x);
    case FunOp::Cos: return std::cos(x);
    case FunOp::Tan: return std::tan(x);
    case FunOp::Exp: return std::exp(x);
    case FunOp::Ln:
      if (x <= 0.0) throw EvalError("ln of non-positive value", print_node(site));
      return std::log(x);
    case FunOp::Sqrt:
      if (x < 0.0) throw EvalError("sqrt of negative value", print_node(site));
      return std::sqrt(x);
  }
  throw EvalError("unknown function", print_node(site));
}

double eval_node(const NodePtr& n, const Env& env) {
  switch (n->kind) {
    case Kind::Number: return n->num;
    case Kind::Pi: return M_PI;
    case Kind::Var: {
      const double* v = env.find(n->name);
      if (!v) throw EvalError("unbound variable '" + n->name + "'", print_node(n));
      return *v;
    }
    case Kind::Neg: return -eval_node(n->a, env);
    case Kind::Binary:
      return checked_binary(n->op, eval_node(n->a, env), eval_node(n->b, env), n);
    case Kind::Call: return checked_call(n->fn, eval_node(n->a, env), n);
  }
  throw EvalError("corrupt expression node", "?");
}

// ---- simplification ------------------------------------------------------

NodePtr simplify_node(const NodePtr& n);

NodePtr simplify_neg(NodePtr a) {
  if (a->kind == Kind::Number) return make_number(-a->num);
  if (a->kind == Kind::Neg) return a->a;
  return make_neg(std::move(a));
}

NodePtr simplify_binary(BinOp op, NodePtr a, NodePtr b, const NodePtr& orig) {
  const bool an = a->kind == Kind::Number;
  const bool bn = b->kind == Kind::Number;
  if (an && bn) {
    // Fold only when the result is defined and finite.
    try {
      double v = checked_binary(op, a->num, b->num, orig);
      if (std::isfinite(v)) return make_number(v);
    } catch (const EvalError&) {
    }
  }
  switch (op) {
    case BinOp::Add:
      if (node_is_number(a, 0.0)) return b;
      if (node_is_number(b, 0.0)) return a;
      break;
    case BinOp::Sub:
      if (node_is_number(b, 0.0)) return a;
      if (node_is_number(a, 0.0)) return simplify_neg(std::move(b));
      break;
    case BinOp::Mul: {
      if (node_is_number(a, 0.0) || node_is_number(b, 0.0)) return make_number(0.0);
      if (node_is_number(a, 1.0)) return b;
      if (node_is_number(b, 1.0)) return a;
      if (node_is_number(a, -1.0)) return simplify_neg(std::move(b));
      if (node_is_number(b, -1.0)) return simplify_neg(std::move(a));
      if (a->kind == Kind::Neg)
        return simplify_neg(simplify_binary(BinOp::Mul, a->a, std::move(b), orig));
      if (b->kind == Kind::Neg)
        return simplify_neg(simplify_binary(BinOp::Mul, std::move(a), b->a, orig));
      // Fold every numeric factor of the product chain into one leading
      // coefficient; non-numeric factor order is preserved.
      {
        std::vector<NodePtr> factors;
        double coeff = 1.0;
        int numbers = 0;
        auto gather = [&](auto&& self, const NodePtr& node) -> void {
          if (node->kind == Kind::Binary && node->op == BinOp::Mul) {
            self(self, node->a);
            self(self, node->b);
          } else if (node->kind == Kind::Number) {
            coeff *= node->num;
            ++numbers;
          } else {
            factors.push_back(node);
          }
        };
        gather(gather, a);
        gather(gather, b);
        const bool canonical = numbers == 0 || (numbers == 1 && an);
        if (!canonical) {
          if (coeff == 0.0) return make_number(0.0);
          NodePtr chain;
          for (auto& f : factors)
            chain = chain ? make_binary(BinOp::Mul, chain, f) : f;
          if (!chain) return make_number(coeff);
          if (coeff == 1.0) return chain;
          if (coeff == -1.0) return make_neg(std::move(chain));
          return make_binary(BinOp::Mul, make_number(coeff), std::move(chain));
        }
      }
      break;
    }
    case BinOp::Div:
      if (node_is_number(a, 0.0) && !node_is_number(b, 0.0)) return make_number(0.0);
      if (node_is_number(b, 1.0)) return a;
      if (node_is_number(b, -1.0)) return simplify_neg(std::move(a));
      if (a->kind == Kind::Neg)
        return simplify_neg(simplify_binary(BinOp::Div, a->a, std::move(b), orig));
      if (b->kind == Kind::Neg)
        return simplify_neg(simplify_binary(BinOp::Div, std::move(a), b->a, orig));
      break;
    case BinOp::Pow:
      if (node_is_number(b, 1.0)) return a;
      if (node_is_number(b, 0.0)) return make_number(1.0);
      if (node_is_number(a, 1.0)) return make_number(1.0);
      break;
  }
  return make_binary(op, std::move(a), std::move(b));
}

NodePtr simplify_node(const NodePtr& n) {
  switch (n->kind) {
    case Kind::Number:
    case Kind::Var:
    case Kind::Pi:
      return n;
    case Kind::Neg:
      return simplify_neg(simplify_node(n->a));
    case Kind::Binary:
      return simplify_binary(n->op, simplify_node(n->a), simplify_node(n->b), n);
    case Kind::Call: {
      NodePtr a = simplify_node(n->a);
      if (a->kind == Kind::Number) {
        try {
          double v = checked_call(n->fn, a->num, n);
          if (std::isfinite(v)) return make_number(v);
        } catch (const EvalError&) {
        }
      }
      return make_call(n->fn, std::move(a));
    }
  }
  return n;
}

// ---- differentiation -----------------------------------------------------

NodePtr diff_node(const NodePtr& n, std::string_view var) {
  switch (n->kind) {
    case Kind::Number:
    case Kind::Pi:
      return make_number(0.0);
    case Kind::Var:
      return make_number(n->name == var ? 1.0 : 0.0);
    case Kind::Neg:
      return make_neg(diff_node(n->a, var));
    case Kind::Binary: {
      const NodePtr& u = n->a;
      const NodePtr& v = n->b;
      NodePtr du = diff_node(u, var);
      NodePtr dv = diff_node(v, var);
      switch (n->op) {
        case BinOp::Add: return make_binary(BinOp::Add, du, dv);
        case BinOp::Sub: return make_binary(BinOp::Sub, du, dv);
        case BinOp::Mul:
          return make_binary(BinOp::Add, make_binary(BinOp::Mul, du, v),
                             make_binary(BinOp::Mul, u, dv));
        case BinOp::Div:
          // (du*v - u*dv) / v^2
          return make_binary(
              BinOp::Div,
              make_binary(BinOp::Sub, make_binary(BinOp::Mul, du, v),
                          make_binary(BinOp::Mul, u, dv)),
              make_binary(BinOp::Pow, v, make_number(2.0)));
        case BinOp::Pow: {
          if (v->kind == Kind::Number) {
            // k * u^(k-1) * du
            return make_binary(
                BinOp::Mul,
                make_binary(BinOp::Mul, make_number(v->num),
                            make_binary(BinOp::Pow, u, make_number(v->num - 1.0))),
                du);
          }
          if (u->kind == Kind::Number || u->kind == Kind::Pi) {
            // a^v * ln(a) * dv
            return make_binary(BinOp::Mul,
                               make_binary(BinOp::Mul, n, make_call(FunOp::Ln, u)), dv);
          }
          // u^v * (dv*ln(u) + v*du/u)
          return make_binary(
              BinOp::Mul, n,
              make_binary(BinOp::Add,
                          make_binary(BinOp::Mul, dv, make_call(FunOp::Ln, u)),
                          make_binary(BinOp::Div, make_binary(BinOp::Mul, v, du), u)));
        }
      }
      break;
    }
    case Kind::Call: {
      const NodePtr& u = n->a;
      NodePtr du = diff_node(u, var);
      switch (n->fn) {
        case FunOp::Sin:
          return make_binary(BinOp::Mul, make_call(FunOp::Cos, u), du);
        case FunOp::Cos:
          return make_neg(make_binary(BinOp::Mul, make_call(FunOp::Sin, u), du));
        case FunOp::Tan:
          return make_binary(
              BinOp::Div, du,
              make_binary(BinOp::Pow, make_call(FunOp::Cos, u), make_number(2.0)));
        case FunOp::Exp:
          return make_binary(BinOp::Mul, n, du);
        case FunOp::Ln:
          return make_binary(BinOp::Div, du, u);
        case FunOp::Sqrt:
          return make_binary(BinOp::Div, du,
                             make_binary(BinOp::Mul, make_number(2.0), n));
      }
      break;
    }
  }
  throw EvalError("cannot differentiate node", print_node(n));
}

// ---- printing ------------------------------------------------------------

// Levels mirror the grammar: 0 sum, 1 product, 2 unary, 3 power, 4 atom.
// A child is parenthesised when its level is below the context minimum, so
// printed output reparses to the identical tree.
int node_level(const NodePtr& n) {
  switch (n->kind) {
    case Kind::Number: return n->num < 0.0 ? 2 : 4;
    case Kind::Var:
    case Kind::Pi:
    case Kind::Call:
      return 4;
    case Kind::Neg: return 2;
    case Kind::Binary:
      switch (n->op) {
        case BinOp::Add:
        case BinOp::Sub: return 0;
        case BinOp::Mul:
        case BinOp::Div: return 1;
        case BinOp::Pow: return 3;
      }
  }
  return 4;
}

void print_to(std::string& out, const NodePtr& n, int min_level) {
  const int lvl = node_level(n);
  const bool parens = lvl < min_level;
  if (parens) out += '(';
  switch (n->kind) {
    case Kind::Number: out += format_double(n->num); break;
    case Kind::Var: out += n->name; break;
    case Kind::Pi: out += "pi"; break;
    case Kind::Neg:
      out += '-';
      print_to(out, n->a, 2);
      break;
    case Kind::Binary: {
      const char* sym = "";
      int left_min = 0, right_min = 0;
      switch (n->op) {
        case BinOp::Add: sym = "+"; left_min = 0; right_min = 1; break;
        case BinOp::Sub: sym = "-"; left_min = 0; right_min = 1; break;
        case BinOp::Mul: sym = "*"; left_min = 1; right_min = 2; break;
        case BinOp::Div: sym = "/"; left_min = 1; right_min = 2; break;
        case BinOp::Pow: sym = "^"; left_min = 4; right_min = 2; break;
      }
      print_to(out, n->a, left_min);
      out += sym;
      print_to(out, n->b, right_min);
      break;
    }
    case Kind::Call:
      out += fun_name(n->fn);
      out += '(';
      print_to(out, n->a, 0);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

std::string print_node(const NodePtr& n) {
  std::string out;
  print_to(out, n, 0);
  return out;
}

void collect_vars(const NodePtr& n, std::set<std::string>& out) {
  switch (n->kind) {
    case Kind::Var: out.insert(n->name); break;
    case Kind::Neg:
    case Kind::Call: collect_vars(n->a, out); break;
    case Kind::Binary:
      collect_vars(n->a, out);
      collect_vars(n->b, out);
      break;
    default: break;
  }
}

bool same_node(const NodePtr& a, const NodePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::Number: return a->num == b->num;
    case Kind::Var: return a->name == b->name;
    case Kind::Pi: return true;
    case Kind::Neg: return same_node(a->a, b->a);
    case Kind::Call: return a->fn == b->fn && same_node(a->a, b->a);
    case Kind::Binary:
      return a->op == b->op && same_node(a->a, b->a) && same_node(a->b, b->b);
  }
  return false;
}

NodePtr substitute_node(const NodePtr& n, const std::map<std::string, Expr>& bindings) {
  switch (n->kind) {
    case Kind::Number:
    case Kind::Pi:
      return n;
    case Kind::Var: {
      auto it = bindings.find(n->name);
      if (it == bindings.end()) return n;
      return it->second.node_ptr();
    }
    case Kind::Neg: return make_neg(substitute_node(n->a, bindings));
    case Kind::Call: return make_call(n->fn, substitute_node(n->a, bindings));
    case Kind::Binary:
      return make_binary(n->op, substitute_node(n->a, bindings),
                         substitute_node(n->b, bindings));
  }
  return n;
}

// ---- parser ---------------------------------------------------------------

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool consume(char c) {
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

  NodePtr parse_sum() {
    NodePtr e = parse_product();
    for (;;) {
      if (consume('+')) e = make_binary(BinOp::Add, e, parse_product());
      else if (consume('-')) e = make_binary(BinOp::Sub, e, parse_product());
      else return e;
    }
  }

  NodePtr parse_product() {
    NodePtr e = parse_unary();
    for (;;) {
      if (consume('*')) e = make_binary(BinOp::Mul, e, parse_unary());
      else if (consume('/')) e = make_binary(BinOp::Div, e, parse_unary());
      else return e;
    }
  }

  NodePtr parse_unary() {
    if (consume('-')) return make_neg(parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (consume('^')) return make_binary(BinOp::Pow, base, parse_unary());
    return base;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_sum();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      } else {
        pos_ = mark;  // 'e' belongs to a following identifier, not this number
      }
    }
    double value = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_)
      throw ParseError("malformed number", start);
    return make_number(value);
  }

  NodePtr parse_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (peek() == '(') {
      ++pos_;  // consume '('
      static const std::array<std::pair<const char*, FunOp>, 6> kFunctions = {{
          {"sin", FunOp::Sin}, {"cos", FunOp::Cos}, {"tan", FunOp::Tan},
          {"exp", FunOp::Exp}, {"ln", FunOp::Ln}, {"sqrt", FunOp::Sqrt},
      }};
      for (const auto& [fname, fop] : kFunctions) {
        if (name == fname) {
          NodePtr arg = parse_sum();
          if (!consume(')')) throw ParseError("expected ')' after function argument", pos_);
          return make_call(fop, arg);
        }
      }
      throw ParseError("unknown function '" + name + "'", start);
    }
    if (name == "pi") return make_pi();
    return make_var(std::move(name));
  }
};

}  // namespace

// ---- Env -------------------------------------------------------------------

void Env::set(std::string name, double value) {
  for (auto& [n, v] : vars_) {
    if (n == name) {
      v = value;
      return;
    }
  }
  vars_.emplace_back(std::move(name), value);
}

const double* Env::find(std::string_view name) const {
  for (const auto& [n, v] : vars_) {
    if (n == name) return &v;
  }
  return nullptr;
}

// ---- Expr ------------------------------------------------------------------

Expr::Expr() : node_(make_number(0.0)) {}

Expr Expr::number(double value) { return Expr(make_number(value)); }
Expr Expr::variable(std::string name) { return Expr(make_var(std::move(name))); }
Expr Expr::pi() { return Expr(make_pi()); }
Expr Expr::unary_minus(Expr operand) { return Expr(make_neg(operand.node_)); }

Expr Expr::binary(BinOp op, Expr lhs, Expr rhs) {
  return Expr(make_binary(op, lhs.node_, rhs.node_));
}

Expr Expr::call(FunOp fn, Expr arg) { return Expr(make_call(fn, arg.node_)); }

double Expr::eval(const Env& env) const { return eval_node(node_, env); }

Expr Expr::derivative(std::string_view var) const {
  return Expr(simplify_node(diff_node(node_, var)));
}

Expr Expr::simplified() const { return Expr(simplify_node(node_)); }

Expr Expr::substituted(const std::map<std::string, Expr>& bindings) const {
  return Expr(simplify_node(substitute_node(node_, bindings)));
}

std::string Expr::str() const { return print_node(node_); }

std::vector<std::string> Expr::variables() const {
  std::set<std::string> s;
  collect_vars(node_, s);
  return {s.begin(), s.end()};
}

bool Expr::depends_on(std::string_view var) const {
  std::set<std::string> s;
  collect_vars(node_, s);
  return s.count(std::string(var)) > 0;
}

bool Expr::is_number() const { return node_->kind == Node::Kind::Number; }

bool Expr::is_number(double value) const {
  return node_->kind == Node::Kind::Number && node_->num == value;
}

double Expr::number_value() const { return node_->num; }

bool Expr::same_structure(const Expr& other) const {
  return same_node(node_, other.node_);
}

Expr operator+(Expr a, Expr b) { return Expr::binary(BinOp::Add, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::binary(BinOp::Sub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::binary(BinOp::Mul, std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return Expr::binary(BinOp::Div, std::move(a), std::move(b)); }
Expr operator-(Expr a) { return Expr::unary_minus(std::move(a)); }

Expr pow(Expr base, Expr exponent) {
  return Expr::binary(BinOp::Pow, std::move(base), std::move(exponent));
}
Expr sin(Expr a) { return Expr::call(FunOp::Sin, std::move(a)); }
Expr cos(Expr a) { return Expr::call(FunOp::Cos, std::move(a)); }
Expr tan(Expr a) { return Expr::call(FunOp::Tan, std::move(a)); }
Expr exp(Expr a) { return Expr::call(FunOp::Exp, std::move(a)); }
Expr ln(Expr a) { return Expr::call(FunOp::Ln, std::move(a)); }
Expr sqrt(Expr a) { return Expr::call(FunOp::Sqrt, std::move(a)); }

Expr parse_expr(std::string_view text) { return Expr(Parser(text).parse()); }

std::string format_double(double value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace algmech

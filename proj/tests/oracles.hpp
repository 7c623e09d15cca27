#ifndef ALGMECH_TESTS_ORACLES_HPP
#define ALGMECH_TESTS_ORACLES_HPP

// Independent reference computations the tests check the library against.
// Everything here is deliberately written from scratch: plain loops over
// raw arrays, finite differences, and a separate expression evaluator, so
// the oracles share no code path with the implementation.

#include <cctype>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

// ---- finite differences ----

inline double central_diff(const std::function<double(double)>& f, double x,
                           double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// ---- Levi-Civita symbol ----

inline double epsilon3(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0.0;
  if ((i == 0 && j == 1 && k == 2) || (i == 1 && j == 2 && k == 0) ||
      (i == 2 && j == 0 && k == 1))
    return 1.0;
  return -1.0;
}

// ---- classical Christoffel symbols by finite differences ----
// gamma^l_{ij} = 1/2 g^{lk} (d_i g_{jk} + d_j g_{ik} - d_k g_{ij})

using MetricFn = std::function<std::vector<std::vector<double>>(const std::vector<double>&)>;

inline std::vector<std::vector<std::vector<double>>> christoffel_fd(
    const MetricFn& metric, const std::vector<double>& x, double h = 1e-6) {
  const std::size_t n = x.size();
  auto g = metric(x);

  // inverse by Gauss-Jordan
  std::vector<std::vector<double>> ginv(n, std::vector<double>(n, 0.0));
  {
    std::vector<std::vector<double>> a = g;
    for (std::size_t i = 0; i < n; ++i) ginv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < n; ++r)
        if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
      std::swap(a[piv], a[col]);
      std::swap(ginv[piv], ginv[col]);
      const double d = a[col][col];
      for (std::size_t cc = 0; cc < n; ++cc) {
        a[col][cc] /= d;
        ginv[col][cc] /= d;
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col) continue;
        const double f = a[r][col];
        for (std::size_t cc = 0; cc < n; ++cc) {
          a[r][cc] -= f * a[col][cc];
          ginv[r][cc] -= f * ginv[col][cc];
        }
      }
    }
  }

  // dg[k][i][j] = d g_{ij} / d x^k
  std::vector<std::vector<std::vector<double>>> dg(
      n, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    auto gp = metric(xp), gm = metric(xm);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) dg[k][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
  }

  std::vector<std::vector<std::vector<double>>> gamma(
      n, std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)));
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k)
          s += ginv[l][k] * (dg[i][j][k] + dg[j][i][k] - dg[k][i][j]);
        gamma[l][i][j] = 0.5 * s;
      }
  return gamma;
}

// ---- Euler rigid-body equations ----
// For the free rigid body with inertia I, ydot_1 = (I2 - I3) y2 y3 / I1
// and cyclic.

inline std::vector<double> euler_rigid_body(const std::vector<double>& inertia,
                                            const std::vector<double>& y) {
  return {(inertia[1] - inertia[2]) * y[1] * y[2] / inertia[0],
          (inertia[2] - inertia[0]) * y[2] * y[0] / inertia[1],
          (inertia[0] - inertia[1]) * y[0] * y[1] / inertia[2]};
}

// ---- standalone arithmetic-expression evaluator ----
// One-pass recursive descent over the same grammar, evaluating on the fly.
// No AST, no sharing with the library parser.

class TinyEval {
public:
  TinyEval(const std::string& text, const std::map<std::string, double>& vars)
      : text_(text), vars_(vars) {}

  double run() {
    double v = sum();
    skip();
    if (pos_ != text_.size()) throw std::runtime_error("tiny eval: trailing input");
    return v;
  }

private:
  const std::string& text_;
  const std::map<std::string, double>& vars_;
  std::size_t pos_ = 0;

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double sum() {
    double v = prod();
    for (;;) {
      if (eat('+')) v += prod();
      else if (eat('-')) v -= prod();
      else return v;
    }
  }
  double prod() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }
  double unary() {
    if (eat('-')) return -unary();
    return power();
  }
  double power() {
    double base = atom();
    if (eat('^')) return std::pow(base, unary());
    return base;
  }
  double atom() {
    skip();
    if (pos_ >= text_.size()) throw std::runtime_error("tiny eval: unexpected end");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      double v = sum();
      if (!eat(')')) throw std::runtime_error("tiny eval: missing )");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t end = pos_;
      while (end < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.' ||
              text_[end] == 'e' || text_[end] == 'E' ||
              ((text_[end] == '+' || text_[end] == '-') && end > pos_ &&
               (text_[end - 1] == 'e' || text_[end - 1] == 'E'))))
        ++end;
      double v = std::stod(text_.substr(pos_, end - pos_));
      pos_ = end;
      return v;
    }
    std::size_t end = pos_;
    while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) ||
                                  text_[end] == '_'))
      ++end;
    std::string name = text_.substr(pos_, end - pos_);
    pos_ = end;
    skip();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      double arg = sum();
      if (!eat(')')) throw std::runtime_error("tiny eval: missing )");
      if (name == "sin") return std::sin(arg);
      if (name == "cos") return std::cos(arg);
      if (name == "tan") return std::tan(arg);
      if (name == "exp") return std::exp(arg);
      if (name == "ln") return std::log(arg);
      if (name == "sqrt") return std::sqrt(arg);
      throw std::runtime_error("tiny eval: unknown function " + name);
    }
    if (name == "pi") return M_PI;
    auto it = vars_.find(name);
    if (it == vars_.end()) throw std::runtime_error("tiny eval: unbound " + name);
    return it->second;
  }
};

inline double tiny_eval(const std::string& text,
                        const std::map<std::string, double>& vars = {}) {
  return TinyEval(text, vars).run();
}

}  // namespace oracle

#endif

#include "algmech/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace algmech {

namespace {

struct Lu {
  MatD lu;
  std::vector<std::size_t> perm;
  bool singular = false;
};

Lu lu_factor(MatD a) {
  const std::size_t n = a.rows();
  Lu out{std::move(a), {}, false};
  out.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.perm[i] = i;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(out.lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(out.lu(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) {
      out.singular = true;
      return out;
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(out.lu(k, j), out.lu(piv, j));
      std::swap(out.perm[k], out.perm[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      out.lu(i, k) /= out.lu(k, k);
      const double f = out.lu(i, k);
      for (std::size_t j = k + 1; j < n; ++j) out.lu(i, j) -= f * out.lu(k, j);
    }
  }
  return out;
}

std::vector<double> lu_apply(const Lu& f, const std::vector<double>& b) {
  const std::size_t n = f.lu.rows();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (std::size_t i = 1; i < n; ++i) {
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s / f.lu(i, i);
  }
  return x;
}

double norm1(const MatD& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double colsum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) colsum += std::abs(a(i, j));
    best = std::max(best, colsum);
  }
  return best;
}

}  // namespace

std::vector<double> lu_solve(MatD a, std::vector<double> b, double cond_limit) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw ShapeError("lu_solve: dimension mismatch");
  if (a.rows() == 0) return {};
  const double c = cond1(a);
  if (!(c < cond_limit))
    throw DegeneracyError("singular matrix (condition estimate " +
                          format_double(c) + ")");
  Lu f = lu_factor(std::move(a));
  return lu_apply(f, b);
}

MatD lu_inverse(const MatD& a) {
  if (a.rows() != a.cols()) throw ShapeError("lu_inverse: matrix not square");
  const std::size_t n = a.rows();
  Lu f = lu_factor(a);
  if (f.singular) throw DegeneracyError("singular matrix in lu_inverse");
  MatD inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    std::vector<double> col = lu_apply(f, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

double cond1(const MatD& a) {
  if (a.rows() == 0) return 1.0;
  Lu f = lu_factor(a);
  if (f.singular) return std::numeric_limits<double>::infinity();
  MatD inv(a.rows(), a.cols());
  std::vector<double> e(a.rows(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    std::vector<double> col = lu_apply(f, e);
    for (std::size_t i = 0; i < a.rows(); ++i) inv(i, j) = col[i];
  }
  return norm1(a) * norm1(inv);
}

MatD matmul(const MatD& a, const MatD& b) {
  if (a.cols() != b.rows()) throw ShapeError("matmul: dimension mismatch");
  MatD out(a.rows(), b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double v = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += v * b(k, j);
    }
  return out;
}

MatD transpose(const MatD& a) {
  MatD out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

double max_abs_diff(const MatD& a, const MatD& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("max_abs_diff: dimension mismatch");
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      best = std::max(best, std::abs(a(i, j) - b(i, j)));
  return best;
}

MatD identity(std::size_t n) {
  MatD out(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

bool is_spd(const MatD& a) {
  if (a.rows() != a.cols()) return false;
  const std::size_t n = a.rows();
  MatD l(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0) return false;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return true;
}

ExprMat expr_identity(std::size_t n) {
  ExprMat out(n, n, Expr::number(0.0));
  for (std::size_t i = 0; i < n; ++i) out(i, i) = Expr::number(1.0);
  return out;
}

ExprMat expr_matmul(const ExprMat& a, const ExprMat& b) {
  if (a.cols() != b.rows()) throw ShapeError("expr_matmul: dimension mismatch");
  ExprMat out(a.rows(), b.cols(), Expr::number(0.0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Expr s = Expr::number(0.0);
      for (std::size_t k = 0; k < a.cols(); ++k) s = s + a(i, k) * b(k, j);
      out(i, j) = s.simplified();
    }
  return out;
}

namespace {

ExprMat expr_minor(const ExprMat& a, std::size_t row, std::size_t col) {
  ExprMat out(a.rows() - 1, a.cols() - 1);
  for (std::size_t i = 0, oi = 0; i < a.rows(); ++i) {
    if (i == row) continue;
    for (std::size_t j = 0, oj = 0; j < a.cols(); ++j) {
      if (j == col) continue;
      out(oi, oj) = a(i, j);
      ++oj;
    }
    ++oi;
  }
  return out;
}

bool expr_is_diagonal(const ExprMat& a) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j && !a(i, j).simplified().is_number(0.0)) return false;
  return true;
}

}  // namespace

Expr expr_determinant(const ExprMat& a) {
  if (a.rows() != a.cols()) throw ShapeError("expr_determinant: matrix not square");
  const std::size_t n = a.rows();
  if (n == 0) return Expr::number(1.0);
  if (n == 1) return a(0, 0);
  Expr det = Expr::number(0.0);
  for (std::size_t j = 0; j < n; ++j) {
    Expr term = a(0, j) * expr_determinant(expr_minor(a, 0, j));
    det = (j % 2 == 0) ? det + term : det - term;
  }
  return det.simplified();
}

ExprMat expr_inverse(const ExprMat& a) {
  if (a.rows() != a.cols()) throw ShapeError("expr_inverse: matrix not square");
  const std::size_t n = a.rows();
  ExprMat out(n, n, Expr::number(0.0));
  if (expr_is_diagonal(a)) {
    for (std::size_t i = 0; i < n; ++i)
      out(i, i) = (Expr::number(1.0) / a(i, i)).simplified();
    return out;
  }
  Expr det = expr_determinant(a);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Expr cof = expr_determinant(expr_minor(a, j, i));
      if ((i + j) % 2 == 1) cof = -cof;
      out(i, j) = (cof / det).simplified();
    }
  return out;
}

MatD eval_matrix(const ExprMat& a, const Env& env) {
  MatD out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j).eval(env);
  return out;
}

SampleBox SampleBox::cube(std::size_t dim, double lo, double hi) {
  SampleBox box;
  box.range.assign(dim, {lo, hi});
  return box;
}

std::vector<std::vector<double>> sample_points(const SampleBox& box, int count,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    std::vector<double> p(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i) {
      // Uniform in [lo, hi) from the top 53 bits; avoids distribution
      // differences between standard library implementations.
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      p[i] = box.range[i][0] + u * (box.range[i][1] - box.range[i][0]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace algmech

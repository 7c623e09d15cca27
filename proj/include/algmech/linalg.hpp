#ifndef ALGMECH_LINALG_HPP
#define ALGMECH_LINALG_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "algmech/errors.hpp"
#include "algmech/expr.hpp"

namespace algmech {

// Dense row-major rectangular array. Sized for chart-scale problems
// (a handful of rows and columns), not for large numerics.
template <class T>
class Grid2 {
public:
  Grid2() = default;
  Grid2(std::size_t rows, std::size_t cols, T init = T{})
      : rows_(rows), cols_(cols), v_(rows * cols, init) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }

  bool empty() const { return v_.empty(); }

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> v_;
};

template <class T>
class Grid3 {
public:
  Grid3() = default;
  Grid3(std::size_t d0, std::size_t d1, std::size_t d2, T init = T{})
      : d0_(d0), d1_(d1), d2_(d2), v_(d0 * d1 * d2, init) {}

  std::size_t dim0() const { return d0_; }
  std::size_t dim1() const { return d1_; }
  std::size_t dim2() const { return d2_; }

  T& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return v_[(i * d1_ + j) * d2_ + k];
  }
  const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return v_[(i * d1_ + j) * d2_ + k];
  }

private:
  std::size_t d0_ = 0, d1_ = 0, d2_ = 0;
  std::vector<T> v_;
};

using MatD = Grid2<double>;
using ExprMat = Grid2<Expr>;
using ExprCube = Grid3<Expr>;

// ---- numeric kernels (LU with partial pivoting) ----

// Solves A x = b; throws DegeneracyError when A is singular to working
// precision or the 1-norm condition estimate exceeds cond_limit.
std::vector<double> lu_solve(MatD a, std::vector<double> b,
                             double cond_limit = 1e12);
MatD lu_inverse(const MatD& a);
double cond1(const MatD& a);  // ||A||_1 * ||A^{-1}||_1, inf when singular

MatD matmul(const MatD& a, const MatD& b);
MatD transpose(const MatD& a);
double max_abs_diff(const MatD& a, const MatD& b);
MatD identity(std::size_t n);

// Cholesky test for symmetric positive definiteness.
bool is_spd(const MatD& a);

// ---- symbolic matrix helpers ----

ExprMat expr_identity(std::size_t n);
ExprMat expr_matmul(const ExprMat& a, const ExprMat& b);
Expr expr_determinant(const ExprMat& a);  // cofactor expansion, small sizes

// Adjugate-based inverse; diagonal matrices invert entrywise.
ExprMat expr_inverse(const ExprMat& a);

MatD eval_matrix(const ExprMat& a, const Env& env);

// ---- deterministic sampling ----

struct SampleBox {
  std::vector<std::array<double, 2>> range;  // [lo, hi] per coordinate

  static SampleBox cube(std::size_t dim, double lo, double hi);
  std::size_t dim() const { return range.size(); }
};

inline constexpr std::uint64_t kDefaultSampleSeed = 0xA16EB801;

std::vector<std::vector<double>> sample_points(const SampleBox& box, int count,
                                               std::uint64_t seed = kDefaultSampleSeed);

}  // namespace algmech

#endif

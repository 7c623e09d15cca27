#ifndef ALGMECH_TESTS_FIXTURES_HPP
#define ALGMECH_TESTS_FIXTURES_HPP

#include "algmech/config.hpp"
#include "algmech/models.hpp"

namespace fixtures {

using namespace algmech;

inline Expr ex(const std::string& text) { return parse_expr(text); }

// 2-sphere in polar coordinates: x1 is the polar angle, kept away from the
// poles by the sample box.
inline Algebroid sphere_algebroid() { return tangent_bundle(2); }

inline Metric sphere_metric() {
  ExprMat g(2, 2, Expr::number(0.0));
  g(0, 0) = ex("1");
  g(1, 1) = ex("sin(x1)^2");
  return Metric(std::move(g));
}

inline SampleBox sphere_base_box() {
  SampleBox box;
  box.range = {{0.4, 2.7}, {-3.0, 3.0}};
  return box;
}

inline Algebroid so3_algebroid() { return lie_algebra(so3_constants()); }

inline Metric inertia_metric(double i1, double i2, double i3) {
  ExprMat g(3, 3, Expr::number(0.0));
  g(0, 0) = Expr::number(i1);
  g(1, 1) = Expr::number(i2);
  g(2, 2) = Expr::number(i3);
  return Metric(std::move(g));
}

inline Algebroid sl2_algebroid() { return lie_algebra(sl2_constants()); }

// Skew-symmetric but non-Jacobi: c^3_12 = 1, c^1_23 = 1, c^1_13 = 1 with
// antisymmetric completion, trivial anchors.
inline Algebroid non_jacobi_algebroid() {
  Grid3<double> c(3, 3, 3, 0.0);
  c(2, 0, 1) = 1.0;
  c(2, 1, 0) = -1.0;
  c(0, 1, 2) = 1.0;
  c(0, 2, 1) = -1.0;
  c(0, 0, 2) = 1.0;
  c(0, 2, 0) = -1.0;
  return lie_algebra(c);
}

// A genuinely general algebroid: distinct anchors, c with no symmetry.
inline Algebroid nonskew_algebroid() {
  ExprMat rho(1, 2), sigma(1, 2);
  rho(0, 0) = ex("1");
  rho(0, 1) = ex("0.5*x1");
  sigma(0, 0) = ex("0.7");
  sigma(0, 1) = ex("0.3");
  ExprCube c(2, 2, 2, Expr::number(0.0));
  c(0, 0, 1) = ex("x1");
  c(1, 0, 0) = ex("0.4");
  c(1, 1, 0) = ex("0.2*x1");
  return Algebroid(1, 2, std::move(rho), std::move(sigma), std::move(c));
}

inline Metric nonskew_metric() {
  ExprMat g(2, 2);
  g(0, 0) = ex("2+x1^2");
  g(0, 1) = ex("0.3");
  g(1, 0) = ex("0.3");
  g(1, 1) = ex("1.5");
  return Metric(std::move(g));
}

inline SampleBox nonskew_base_box() {
  SampleBox box;
  box.range = {{-1.0, 1.0}};
  return box;
}

// Abelian Wong data on a curved 2d base: C = 0, one internal direction.
inline WongSetup wong_abelian() {
  WongSetup w;
  w.base_dim = 2;
  w.algebra_dim = 1;
  w.base_metric = ExprMat(2, 2, Expr::number(0.0));
  w.base_metric(0, 0) = ex("1+0.5*x1^2");
  w.base_metric(1, 1) = ex("1");
  w.C = Grid3<double>(1, 1, 1, 0.0);
  w.h = identity(1);
  w.A = ExprMat(1, 2, Expr::number(0.0));
  w.A(0, 0) = ex("x2");
  w.A(0, 1) = ex("0");
  return w;
}

// Non-abelian so(3) charge with invariant metric h = I.
inline WongSetup wong_so3() {
  WongSetup w;
  w.base_dim = 2;
  w.algebra_dim = 3;
  w.base_metric = ExprMat(2, 2, Expr::number(0.0));
  w.base_metric(0, 0) = ex("1+0.25*x2^2");
  w.base_metric(0, 1) = ex("0.1");
  w.base_metric(1, 0) = ex("0.1");
  w.base_metric(1, 1) = ex("1.5");
  w.C = so3_constants();
  w.h = identity(3);
  w.A = ExprMat(3, 2, Expr::number(0.0));
  w.A(0, 0) = ex("x1");
  w.A(1, 1) = ex("x2");
  w.A(2, 1) = ex("0.3");
  return w;
}

// Same setup with a deliberately non-invariant h for negative tests.
inline WongSetup wong_so3_noninvariant() {
  WongSetup w = wong_so3();
  w.h = MatD(3, 3, 0.0);
  w.h(0, 0) = 1.0;
  w.h(1, 1) = 2.0;
  w.h(2, 2) = 3.0;
  return w;
}

inline std::vector<std::vector<double>> base_samples(const Algebroid& alg, int count,
                                                     std::uint64_t seed = 11) {
  return sample_points(SampleBox::cube(alg.base_dim(), -1.0, 1.0), count, seed);
}

// Concatenated (x, fiber) rows.
inline std::vector<std::vector<double>> joint_samples(const SampleBox& base,
                                                      const SampleBox& fiber, int count,
                                                      std::uint64_t seed = 17) {
  SampleBox joint;
  joint.range = base.range;
  joint.range.insert(joint.range.end(), fiber.range.begin(), fiber.range.end());
  return sample_points(joint, count, seed);
}

}  // namespace fixtures

#endif

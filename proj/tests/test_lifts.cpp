#include <cmath>
#include <random>

#include "algmech/lifts.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace algmech;
using fixtures::ex;

namespace {

Env bundle_env(const Algebroid& alg, const std::vector<double>& x,
               const std::vector<double>& y) {
  Env env;
  for (std::size_t a = 0; a < alg.base_dim(); ++a) env.set(alg.chart().x[a], x[a]);
  for (std::size_t i = 0; i < alg.fiber_rank(); ++i) env.set(alg.chart().y[i], y[i]);
  return env;
}

std::vector<std::vector<double>> bundle_samples(const Algebroid& alg, int count,
                                                std::uint64_t seed = 41) {
  return sample_points(SampleBox::cube(alg.base_dim() + alg.fiber_rank(), -1.0, 1.0),
                       count, seed);
}

void split_sample(const Algebroid& alg, const std::vector<double>& row,
                  std::vector<double>& x, std::vector<double>& y) {
  x.assign(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(alg.base_dim()));
  y.assign(row.begin() + static_cast<std::ptrdiff_t>(alg.base_dim()), row.end());
}

}  // namespace

TEST_SUITE("lifts") {

TEST_CASE("vertical lift of a section copies coefficients to the fibre legs") {
  Algebroid sphere = fixtures::sphere_algebroid();
  VectorFieldOnE v = vertical_lift(sphere, Section::basis(2, 0));
  CHECK(v.dx[0].is_number(0.0));
  CHECK(v.dx[1].is_number(0.0));
  CHECK(v.dy[0].is_number(1.0));
  CHECK(v.dy[1].is_number(0.0));
}

TEST_CASE("vertical lift of a tensor") {
  Algebroid sphere = fixtures::sphere_algebroid();
  TensorField2 K{ExprMat(2, 2, Expr::number(0.0)), false};
  K.coeffs(0, 1) = ex("x1");
  Tensor2OnE lifted = vertical_lift(sphere, K);
  CHECK(lifted.comp(0, 1).same_structure(ex("x1")));
  CHECK(lifted.comp(1, 0).is_number(0.0));
  CHECK(lifted.comp(2, 2).is_number(0.0));  // no base legs
  CHECK(lifted.comp(0, 2).is_number(0.0));
}

TEST_CASE("scalar vertical lift is the pullback") {
  // f(x) = x1^2 regarded on E stays y-independent
  Expr f = ex("x1^2");
  CHECK_FALSE(f.depends_on("y1"));
}

TEST_CASE("complete lift of functions") {
  Algebroid tb1 = tangent_bundle(1);
  Expr lifted = complete_lift_function(tb1, ex("x1^2"));
  Env env;
  env.set("x1", 1.5);
  env.set("y1", 0.7);
  CHECK(lifted.eval(env) == doctest::Approx(2.0 * 1.5 * 0.7).epsilon(1e-15));

  CHECK(complete_lift_function(tb1, ex("3.5")).is_number(0.0));
  CHECK(complete_lift_function(fixtures::so3_algebroid(), ex("2")).is_number(0.0));
}

TEST_CASE("complete lift of sections: tangent bundle and so(3)") {
  Algebroid tb1 = tangent_bundle(1);
  VectorFieldOnE flat = complete_lift_section(tb1, Section::basis(1, 0));
  CHECK(flat.dx[0].is_number(1.0));
  CHECK(flat.dy[0].is_number(0.0));

  Algebroid so3 = fixtures::so3_algebroid();
  VectorFieldOnE lifted = complete_lift_section(so3, Section::basis(3, 2));
  // expected: c^k_{i3} y^i d_{y^k} with c from the epsilon symbol
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> y{u(rng), u(rng), u(rng)};
    Env env = bundle_env(so3, {}, y);
    for (int k = 0; k < 3; ++k) {
      double expected = 0.0;
      for (int i = 0; i < 3; ++i) expected += oracle::epsilon3(i, 2, k) * y[i];
      CHECK(lifted.dy[k].eval(env) == doctest::Approx(expected).epsilon(1e-14));
    }
    // the pattern y2 d_{y1} - y1 d_{y2}
    CHECK(lifted.dy[0].eval(env) == doctest::Approx(y[1]));
    CHECK(lifted.dy[1].eval(env) == doctest::Approx(-y[0]));
    CHECK(lifted.dy[2].eval(env) == doctest::Approx(0.0));
  }
}

TEST_CASE("complete lift is a derivation over the vertical lift") {
  // d(f X) = d(f) v(X) + f d(X) on a fixture with nonzero c and derivatives
  Algebroid gen = fixtures::nonskew_algebroid();
  Expr f = ex("x1");
  Section X = Section::basis(2, 0);
  Section fX{{(f * X.coeffs[0]).simplified(), (f * X.coeffs[1]).simplified()}};

  VectorFieldOnE lhs = complete_lift_section(gen, fX);
  Expr df = complete_lift_function(gen, f);
  VectorFieldOnE vX = vertical_lift(gen, X);
  VectorFieldOnE dX = complete_lift_section(gen, X);

  for (const auto& row : bundle_samples(gen, 25)) {
    std::vector<double> x, y;
    split_sample(gen, row, x, y);
    Env env = bundle_env(gen, x, y);
    const double fv = f.eval(env), dfv = df.eval(env);
    for (std::size_t a = 0; a < 1; ++a) {
      const double rhs = dfv * vX.dx[a].eval(env) + fv * dX.dx[a].eval(env);
      CHECK(lhs.dx[a].eval(env) == doctest::Approx(rhs).epsilon(1e-13));
    }
    for (std::size_t k = 0; k < 2; ++k) {
      const double rhs = dfv * vX.dy[k].eval(env) + fv * dX.dy[k].eval(env);
      CHECK(lhs.dy[k].eval(env) == doctest::Approx(rhs).epsilon(1e-13));
    }
  }
}

TEST_CASE("function derivation rule") {
  // d(f g) = d(f) v(g) + v(f) d(g), vertical lift of a function being its
  // pullback
  Algebroid gen = fixtures::nonskew_algebroid();
  Expr f = ex("x1^2");
  Expr g = ex("sin(x1)");
  Expr lhs = complete_lift_function(gen, (f * g).simplified());
  Expr df = complete_lift_function(gen, f);
  Expr dg = complete_lift_function(gen, g);
  for (const auto& row : bundle_samples(gen, 20)) {
    std::vector<double> x, y;
    split_sample(gen, row, x, y);
    Env env = bundle_env(gen, x, y);
    const double rhs = df.eval(env) * g.eval(env) + f.eval(env) * dg.eval(env);
    CHECK(lhs.eval(env) == doctest::Approx(rhs).epsilon(1e-13));
  }
}

TEST_CASE("complete lift of the contravariant metric w.r.t. the adjoint structure") {
  // Component identities: the mixed block carries -g^{ij} rho^a_j and the
  // fibre block carries g^{kj} c^i_{ks} + g^{ki} c^j_{ks} - dg^{ij} sigma^a_s
  // contracted with y^s.
  struct Case {
    Algebroid alg;
    Metric metric;
    SampleBox box;
  };
  std::vector<Case> cases;
  cases.push_back({fixtures::sphere_algebroid(), fixtures::sphere_metric(),
                   fixtures::sphere_base_box()});
  cases.push_back({fixtures::so3_algebroid(), fixtures::inertia_metric(1, 2, 3),
                   SampleBox::cube(0, 0, 1)});
  cases.push_back({fixtures::nonskew_algebroid(), fixtures::nonskew_metric(),
                   fixtures::nonskew_base_box()});

  for (auto& tc : cases) {
    const std::size_t n = tc.alg.base_dim(), m = tc.alg.fiber_rank();
    TensorField2 G{tc.metric.inverse(), true};
    Tensor2OnE lift = complete_lift_tensor2(adjoint(tc.alg), G);

    SampleBox joint;
    joint.range = tc.box.range;
    for (std::size_t i = 0; i < m; ++i) joint.range.push_back({-1.0, 1.0});
    for (const auto& row : sample_points(joint, 20, 23)) {
      std::vector<double> x(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n));
      std::vector<double> y(row.begin() + static_cast<std::ptrdiff_t>(n), row.end());
      Env env = bundle_env(tc.alg, x, y);
      MatD ginv = tc.metric.inverse_at(env);

      // mixed blocks
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t a = 0; a < n; ++a) {
          double rho_tilde = 0.0;
          for (std::size_t j = 0; j < m; ++j)
            rho_tilde -= ginv(i, j) * tc.alg.rho()(a, j).eval(env);
          CHECK(lift.comp(i, m + a).eval(env) ==
                doctest::Approx(rho_tilde).epsilon(1e-10));
          CHECK(lift.comp(m + a, i).eval(env) ==
                doctest::Approx(rho_tilde).epsilon(1e-10));
        }

      // fibre block: numeric dg^{ij}/dx^a from -ginv dg ginv
      std::vector<MatD> dginv(n, MatD(m, m, 0.0));
      for (std::size_t a = 0; a < n; ++a) {
        MatD dg(m, m);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j)
            dg(i, j) = tc.metric.g()(i, j).derivative(tc.alg.chart().x[a]).eval(env);
        MatD tmp = matmul(matmul(ginv, dg), ginv);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j) dginv[a](i, j) = -tmp(i, j);
      }
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          double expected = 0.0;
          for (std::size_t s = 0; s < m; ++s) {
            double ctilde = 0.0;
            for (std::size_t k = 0; k < m; ++k)
              ctilde += ginv(k, j) * tc.alg.c()(i, k, s).eval(env) +
                        ginv(k, i) * tc.alg.c()(j, k, s).eval(env);
            for (std::size_t a = 0; a < n; ++a)
              ctilde -= dginv[a](i, j) * tc.alg.sigma()(a, s).eval(env);
            expected += ctilde * y[s];
          }
          CHECK(lift.comp(i, j).eval(env) == doctest::Approx(expected).epsilon(1e-9));
        }
    }
  }
}

TEST_CASE("complete lift of a decomposable tensor on so(3) by hand expansion") {
  Algebroid so3 = fixtures::so3_algebroid();
  TensorField2 K{ExprMat(3, 3, Expr::number(0.0)), true};
  K.coeffs(0, 0) = ex("1");  // e_1 (x) e_1
  Tensor2OnE lift = complete_lift_tensor2(so3, K);
  // derivation rule: d(e1 (x) e1) = d(e1) (x) v(e1) + v(e1) (x) d(e1),
  // d(e1) = c^k_{s1} y^s d_{y^k}
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> y{u(rng), u(rng), u(rng)};
    Env env = bundle_env(so3, {}, y);
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        double d_e1_k = 0.0;
        for (int s = 0; s < 3; ++s) d_e1_k += oracle::epsilon3(s, 0, k) * y[s];
        double d_e1_l = 0.0;
        for (int s = 0; s < 3; ++s) d_e1_l += oracle::epsilon3(s, 0, l) * y[s];
        const double expected = d_e1_k * (l == 0 ? 1.0 : 0.0) +
                                (k == 0 ? 1.0 : 0.0) * d_e1_l;
        CHECK(lift.comp(k, l).eval(env) == doctest::Approx(expected).epsilon(1e-13));
      }
  }
}

TEST_CASE("complete lift vanishes when all structure functions vanish") {
  ExprMat zero_anchor(1, 2, Expr::number(0.0));
  ExprCube zero_c(2, 2, 2, Expr::number(0.0));
  Algebroid trivial(1, 2, zero_anchor, zero_anchor, zero_c);
  TensorField2 K{ExprMat(2, 2, Expr::number(0.0)), false};
  K.coeffs(0, 0) = ex("x1^2");
  K.coeffs(1, 0) = ex("sin(x1)");
  Tensor2OnE lift = complete_lift_tensor2(trivial, K);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(lift.comp(i, j).is_number(0.0));

  Section X{{ex("x1"), ex("1")}};
  VectorFieldOnE vf = complete_lift_section(trivial, X);
  CHECK(vf.dx[0].is_number(0.0));
  CHECK(vf.dy[0].is_number(0.0));
  CHECK(vf.dy[1].is_number(0.0));
}

TEST_CASE("complete lifts are fibrewise linear") {
  // second y-derivatives of every component vanish identically
  Algebroid gen = fixtures::nonskew_algebroid();
  Section X{{ex("x1*x1"), ex("sin(x1)")}};
  VectorFieldOnE vf = complete_lift_section(gen, X);
  TensorField2 K{fixtures::nonskew_metric().inverse(), true};
  Tensor2OnE lift = complete_lift_tensor2(gen, K);

  auto check_linear = [&](const Expr& e) {
    for (const std::string& yi : gen.chart().y) {
      Expr second = e.derivative(yi).derivative(yi);
      for (const auto& row : bundle_samples(gen, 10)) {
        std::vector<double> x, y;
        split_sample(gen, row, x, y);
        Env env = bundle_env(gen, x, y);
        CHECK(std::abs(second.eval(env)) < 1e-12);
      }
    }
  };
  for (const Expr& e : vf.dx) check_linear(e);
  for (const Expr& e : vf.dy) check_linear(e);
  for (std::size_t i = 0; i < lift.comp.rows(); ++i)
    for (std::size_t j = 0; j < lift.comp.cols(); ++j) check_linear(lift.comp(i, j));
}

TEST_CASE("lift-bracket morphism on Lie algebroids") {
  // d([X,Y]) = [d(X), d(Y)] as vector fields on E, for Lie fixtures
  std::vector<Algebroid> algs;
  algs.push_back(tangent_bundle(2));
  algs.push_back(fixtures::so3_algebroid());
  for (const Algebroid& alg : algs) {
    const std::size_t m = alg.fiber_rank();
    Section X, Y;
    for (std::size_t i = 0; i < m; ++i) {
      if (alg.base_dim() > 0) {
        X.coeffs.push_back(ex(i == 0 ? "x1*x2" : "1+x1"));
        Y.coeffs.push_back(ex(i == 0 ? "x2" : "x1*x1"));
      } else {
        X.coeffs.push_back(Expr::number(0.5 + double(i)));
        Y.coeffs.push_back(Expr::number(1.0 - 0.25 * double(i)));
      }
    }
    VectorFieldOnE lhs = complete_lift_section(alg, bracket(alg, X, Y));
    VectorFieldOnE rhs =
        commutator(alg, complete_lift_section(alg, X), complete_lift_section(alg, Y));
    for (const auto& row : bundle_samples(alg, 20)) {
      std::vector<double> x, y;
      split_sample(alg, row, x, y);
      Env env = bundle_env(alg, x, y);
      for (std::size_t a = 0; a < alg.base_dim(); ++a)
        CHECK(lhs.dx[a].eval(env) == doctest::Approx(rhs.dx[a].eval(env)).epsilon(1e-10));
      for (std::size_t k = 0; k < m; ++k)
        CHECK(lhs.dy[k].eval(env) == doctest::Approx(rhs.dy[k].eval(env)).epsilon(1e-10));
    }
  }
}

TEST_CASE("lift-bracket morphism fails on the non-Jacobi fixture") {
  Algebroid bad = fixtures::non_jacobi_algebroid();
  Section X = Section::basis(3, 0);
  Section Y = Section::basis(3, 1);
  Section Z = Section::basis(3, 2);
  // the morphism property for all basis pairs is equivalent to Jacobi on
  // constant-structure algebras; at least one pair must break
  double worst = 0.0;
  for (const Section* A : {&X, &Y, &Z})
    for (const Section* B : {&X, &Y, &Z}) {
      VectorFieldOnE lhs = complete_lift_section(bad, bracket(bad, *A, *B));
      VectorFieldOnE rhs = commutator(bad, complete_lift_section(bad, *A),
                                      complete_lift_section(bad, *B));
      std::vector<double> y{0.3, -0.8, 1.1};
      Env env = bundle_env(bad, {}, y);
      for (std::size_t k = 0; k < 3; ++k)
        worst = std::max(worst, std::abs(lhs.dy[k].eval(env) - rhs.dy[k].eval(env)));
    }
  CHECK(worst > 0.1);
}

}  // TEST_SUITE

#include "algmech/lifts.hpp"

namespace algmech {

namespace {

Expr zero() { return Expr::number(0.0); }

}  // namespace

VectorFieldOnE vertical_lift(const Algebroid& alg, const Section& X) {
  if (X.coeffs.size() != alg.fiber_rank())
    throw ShapeError("vertical_lift: section has wrong rank");
  VectorFieldOnE out;
  out.dx.assign(alg.base_dim(), zero());
  out.dy = X.coeffs;
  return out;
}

Tensor2OnE vertical_lift(const Algebroid& alg, const TensorField2& K) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  if (K.coeffs.rows() != m || K.coeffs.cols() != m)
    throw ShapeError("vertical_lift: tensor has wrong rank");
  Tensor2OnE out{ExprMat(m + n, m + n, zero())};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out.comp(i, j) = K.coeffs(i, j);
  return out;
}

Expr complete_lift_function(const Algebroid& alg, const Expr& f) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  Expr out = zero();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t a = 0; a < n; ++a) {
      out = out + Expr::variable(alg.chart().y[i]) * alg.rho()(a, i) *
                      f.derivative(alg.chart().x[a]);
    }
  }
  return out.simplified();
}

VectorFieldOnE complete_lift_section(const Algebroid& alg, const Section& X) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  if (X.coeffs.size() != m) throw ShapeError("complete_lift_section: wrong rank");

  VectorFieldOnE out;
  out.dx.assign(n, zero());
  out.dy.assign(m, zero());
  for (std::size_t a = 0; a < n; ++a) {
    Expr s = zero();
    for (std::size_t i = 0; i < m; ++i) s = s + X.coeffs[i] * alg.sigma()(a, i);
    out.dx[a] = s.simplified();
  }
  for (std::size_t k = 0; k < m; ++k) {
    Expr s = zero();
    for (std::size_t i = 0; i < m; ++i) {
      Expr yi = Expr::variable(alg.chart().y[i]);
      for (std::size_t a = 0; a < n; ++a)
        s = s + yi * alg.rho()(a, i) * X.coeffs[k].derivative(alg.chart().x[a]);
      for (std::size_t j = 0; j < m; ++j)
        s = s + alg.c()(k, i, j) * yi * X.coeffs[j];
    }
    out.dy[k] = s.simplified();
  }
  return out;
}

Tensor2OnE complete_lift_tensor2(const Algebroid& alg, const TensorField2& K) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  if (K.coeffs.rows() != m || K.coeffs.cols() != m)
    throw ShapeError("complete_lift_tensor2: wrong rank");

  // Expanding d(K^{ij} e_i (x) e_j) by the derivation rule gives
  //   [yy](k,l) = d(K^{kl}) + c^k_{si} y^s K^{il} + c^l_{sj} y^s K^{kj},
  //   [yx](k,a) = K^{kj} sigma^a_j,   [xy](a,l) = K^{il} sigma^a_i,
  // with d(f) the complete lift of the coefficient function.
  Tensor2OnE out{ExprMat(m + n, m + n, zero())};
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t l = 0; l < m; ++l) {
      Expr s = complete_lift_function(alg, K.coeffs(k, l));
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t t = 0; t < m; ++t) {
          Expr yt = Expr::variable(alg.chart().y[t]);
          s = s + alg.c()(k, t, i) * yt * K.coeffs(i, l);
          s = s + alg.c()(l, t, i) * yt * K.coeffs(k, i);
        }
      out.comp(k, l) = s.simplified();
    }
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t a = 0; a < n; ++a) {
      Expr s1 = zero(), s2 = zero();
      for (std::size_t j = 0; j < m; ++j) {
        s1 = s1 + K.coeffs(k, j) * alg.sigma()(a, j);
        s2 = s2 + K.coeffs(j, k) * alg.sigma()(a, j);
      }
      out.comp(k, m + a) = s1.simplified();
      out.comp(m + a, k) = s2.simplified();
    }
  return out;
}

Expr lie_derivative(const Algebroid& alg, const VectorFieldOnE& V, const Expr& F) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  if (V.dx.size() != n || V.dy.size() != m)
    throw ShapeError("lie_derivative: field shape mismatch");
  Expr out = zero();
  for (std::size_t a = 0; a < n; ++a)
    out = out + V.dx[a] * F.derivative(alg.chart().x[a]);
  for (std::size_t i = 0; i < m; ++i)
    out = out + V.dy[i] * F.derivative(alg.chart().y[i]);
  return out.simplified();
}

VectorFieldOnE commutator(const Algebroid& alg, const VectorFieldOnE& V,
                          const VectorFieldOnE& W) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  if (V.dx.size() != n || V.dy.size() != m || W.dx.size() != n || W.dy.size() != m)
    throw ShapeError("commutator: field shape mismatch");

  VectorFieldOnE out;
  out.dx.assign(n, zero());
  out.dy.assign(m, zero());
  auto directional = [&](const VectorFieldOnE& U, const Expr& f) {
    Expr s = zero();
    for (std::size_t a = 0; a < n; ++a) s = s + U.dx[a] * f.derivative(alg.chart().x[a]);
    for (std::size_t i = 0; i < m; ++i) s = s + U.dy[i] * f.derivative(alg.chart().y[i]);
    return s;
  };
  for (std::size_t a = 0; a < n; ++a)
    out.dx[a] = (directional(V, W.dx[a]) - directional(W, V.dx[a])).simplified();
  for (std::size_t i = 0; i < m; ++i)
    out.dy[i] = (directional(V, W.dy[i]) - directional(W, V.dy[i])).simplified();
  return out;
}

}  // namespace algmech

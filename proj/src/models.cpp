#include "algmech/models.hpp"

#include <algorithm>
#include <cmath>

namespace algmech {

Metric::Metric(ExprMat g, std::optional<ExprMat> inverse) : g_(std::move(g)) {
  if (g_.rows() != g_.cols()) throw ShapeError("metric: matrix must be square");
  if (inverse) {
    if (inverse->rows() != g_.rows() || inverse->cols() != g_.cols())
      throw ShapeError("metric: supplied inverse has wrong shape");
    ginv_ = std::move(*inverse);
  } else {
    ginv_ = expr_inverse(g_);
  }
}

MatD Metric::at(const Env& env) const { return eval_matrix(g_, env); }

MatD Metric::inverse_at(const Env& env) const { return lu_inverse(at(env)); }

CheckResult validate_metric(const Metric& metric, const ChartNames& chart,
                            const std::vector<std::vector<double>>& samples,
                            double tol) {
  CheckResult out;
  const std::size_t m = metric.rank();
  for (const auto& x : samples) {
    Env env;
    for (std::size_t a = 0; a < chart.x.size(); ++a) env.set(chart.x[a], x[a]);
    MatD g = metric.at(env);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        out.max_abs = std::max(out.max_abs, std::abs(g(i, j) - g(j, i)));
    if (!is_spd(g)) {
      out.passed = false;
      out.detail = "metric not positive definite at a sample point";
      return out;
    }
    const double dev = max_abs_diff(matmul(g, eval_matrix(metric.inverse(), env)),
                                    identity(m));
    out.max_abs = std::max(out.max_abs, dev);
  }
  out.passed = out.max_abs < tol;
  if (!out.passed && out.detail.empty())
    out.detail = "symmetry or inverse residual " + format_double(out.max_abs);
  return out;
}

Lagrangian metric_lagrangian(const Metric& metric, const ChartNames& chart) {
  const std::size_t m = metric.rank();
  if (chart.y.size() != m) throw ShapeError("metric_lagrangian: rank mismatch");
  Expr L = Expr::number(0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      L = L + Expr::number(0.5) * metric.g()(i, j) * Expr::variable(chart.y[i]) *
                  Expr::variable(chart.y[j]);
  return Lagrangian(L.simplified(), chart);
}

Hamiltonian metric_hamiltonian(const Metric& metric, const ChartNames& chart) {
  const std::size_t m = metric.rank();
  if (chart.xi.size() != m) throw ShapeError("metric_hamiltonian: rank mismatch");
  Expr H = Expr::number(0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      H = H + Expr::number(0.5) * metric.inverse()(i, j) * Expr::variable(chart.xi[i]) *
                  Expr::variable(chart.xi[j]);
  return Hamiltonian(H.simplified(), chart);
}

GammaSymbols gamma_symbols(const Algebroid& alg, const Metric& metric) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  if (metric.rank() != m) throw ShapeError("gamma_symbols: metric rank mismatch");

  const ExprMat& g = metric.g();
  const ExprMat& ginv = metric.inverse();
  GammaSymbols out{ExprCube(m, m, m, Expr::number(0.0))};
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        Expr acc = Expr::number(0.0);
        for (std::size_t k = 0; k < m; ++k) {
          Expr inner = Expr::number(0.0);
          for (std::size_t a = 0; a < n; ++a) {
            const std::string& xa = alg.chart().x[a];
            inner = inner + alg.rho()(a, j) * g(i, k).derivative(xa) +
                    alg.rho()(a, i) * g(j, k).derivative(xa) -
                    alg.sigma()(a, k) * g(i, j).derivative(xa);
          }
          for (std::size_t s = 0; s < m; ++s)
            inner = inner - alg.c()(s, i, k) * g(s, j) - alg.c()(s, j, k) * g(s, i);
          acc = acc + ginv(k, l) * inner;
        }
        out.coeffs(l, i, j) = (Expr::number(0.5) * acc).simplified();
      }
  return out;
}

VelocityDerivative geodesic_field(const Algebroid& alg, const Metric& metric,
                                  const VelocityPoint& v) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  if (v.x.size() != n || v.y.size() != m)
    throw ShapeError("geodesic_field: point shape mismatch");
  GammaSymbols gamma = gamma_symbols(alg, metric);
  return geodesic_field_at(alg, gamma, v);
}

VelocityDerivative geodesic_field_at(const Algebroid& alg, const GammaSymbols& gamma,
                                     const VelocityPoint& v) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  if (v.x.size() != n || v.y.size() != m)
    throw ShapeError("geodesic_field: point shape mismatch");
  Env env = alg.base_env(v.x);

  VelocityDerivative out;
  out.xdot.assign(n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t k = 0; k < m; ++k)
      out.xdot[a] += alg.rho()(a, k).eval(env) * v.y[k];
  out.ydot.assign(m, 0.0);
  for (std::size_t l = 0; l < m; ++l) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        s += gamma.coeffs(l, i, j).eval(env) * v.y[i] * v.y[j];
    out.ydot[l] = -s;
  }
  return out;
}

StateFn make_geodesic_flow(const Algebroid& alg, const Metric& metric) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  GammaSymbols gamma = gamma_symbols(alg, metric);
  Algebroid alg_copy = alg;
  return [alg_copy, gamma, n, m](double, const std::vector<double>& s) {
    if (s.size() != n + m) throw ShapeError("geodesic flow: state width mismatch");
    VelocityPoint v;
    v.x.assign(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n));
    v.y.assign(s.begin() + static_cast<std::ptrdiff_t>(n), s.end());
    VelocityDerivative d = geodesic_field_at(alg_copy, gamma, v);
    std::vector<double> out;
    out.reserve(n + m);
    out.insert(out.end(), d.xdot.begin(), d.xdot.end());
    out.insert(out.end(), d.ydot.begin(), d.ydot.end());
    return out;
  };
}

PhaseDerivative geodesic_hamiltonian_field(const Algebroid& alg, const Metric& metric,
                                           const PhasePoint& p) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  if (p.x.size() != n || p.xi.size() != m)
    throw ShapeError("geodesic_hamiltonian_field: point shape mismatch");
  Env env = alg.base_env(p.x);

  MatD ginv = metric.inverse_at(env);
  MatD rho(n, m), sigma(n, m);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < m; ++i) {
      rho(a, i) = alg.rho()(a, i).eval(env);
      sigma(a, i) = alg.sigma()(a, i).eval(env);
    }

  PhaseDerivative out;
  out.xdot.assign(n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        out.xdot[a] += rho(a, i) * ginv(i, j) * p.xi[j];

  // dg^{sl}/dx^a = -(ginv dg/dx^a ginv)^{sl}, from the symbolic dg.
  std::vector<MatD> dginv(n, MatD(m, m, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    MatD dg(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        dg(i, j) = metric.g()(i, j).derivative(alg.chart().x[a]).eval(env);
    MatD tmp = matmul(matmul(ginv, dg), ginv);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) dginv[a](i, j) = -tmp(i, j);
  }

  out.xidot.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t sidx = 0; sidx < m; ++sidx)
      for (std::size_t l = 0; l < m; ++l) {
        double coeff = 0.0;
        for (std::size_t j = 0; j < m; ++j)
          coeff += alg.c()(l, j, i).eval(env) * ginv(j, sidx);
        for (std::size_t a = 0; a < n; ++a)
          coeff -= 0.5 * sigma(a, i) * dginv[a](sidx, l);
        s += coeff * p.xi[sidx] * p.xi[l];
      }
    out.xidot[i] = s;
  }
  return out;
}

Tensor2OnDual lifted_metric_pushforward(const Algebroid& alg, const Metric& metric) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  if (metric.rank() != m) throw ShapeError("lifted_metric_pushforward: metric rank mismatch");

  TensorField2 G{metric.inverse(), true};
  Tensor2OnE lift = complete_lift_tensor2(adjoint(alg), G);

  const ExprMat& g = metric.g();
  // Jacobian rows of the fibre map xi_i = g_{it}(x) y^t.
  ExprMat jac_x(m, n, Expr::number(0.0));  // dxi_i/dx^a
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t a = 0; a < n; ++a) {
      Expr s = Expr::number(0.0);
      for (std::size_t t = 0; t < m; ++t)
        s = s + g(i, t).derivative(alg.chart().x[a]) * Expr::variable(alg.chart().y[t]);
      jac_x(i, a) = s.simplified();
    }

  ExprMat comp(m + n, m + n, Expr::number(0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      Expr s = Expr::number(0.0);
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l)
          s = s + g(i, k) * g(j, l) * lift.comp(k, l);
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t b = 0; b < n; ++b)
          s = s + g(i, k) * jac_x(j, b) * lift.comp(k, m + b);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t l = 0; l < m; ++l)
          s = s + jac_x(i, a) * g(j, l) * lift.comp(m + a, l);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          s = s + jac_x(i, a) * jac_x(j, b) * lift.comp(m + a, m + b);
      comp(i, j) = s.simplified();
    }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t b = 0; b < n; ++b) {
      Expr s1 = Expr::number(0.0), s2 = Expr::number(0.0);
      for (std::size_t k = 0; k < m; ++k) {
        s1 = s1 + g(i, k) * lift.comp(k, m + b);
        s2 = s2 + g(i, k) * lift.comp(m + b, k);
      }
      for (std::size_t a = 0; a < n; ++a) {
        s1 = s1 + jac_x(i, a) * lift.comp(m + a, m + b);
        s2 = s2 + jac_x(i, a) * lift.comp(m + b, m + a);
      }
      comp(i, m + b) = s1.simplified();
      comp(m + b, i) = s2.simplified();
    }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) comp(m + a, m + b) = lift.comp(m + a, m + b);

  // Express everything in (x, xi) through y^t = g^{ts}(x) xi_s.
  std::map<std::string, Expr> subst;
  for (std::size_t t = 0; t < m; ++t) {
    Expr yt = Expr::number(0.0);
    for (std::size_t s = 0; s < m; ++s)
      yt = yt + metric.inverse()(t, s) * Expr::variable(alg.chart().xi[s]);
    subst[alg.chart().y[t]] = yt.simplified();
  }
  Tensor2OnDual out{ExprMat(m + n, m + n, Expr::number(0.0))};
  for (std::size_t i = 0; i < m + n; ++i)
    for (std::size_t j = 0; j < m + n; ++j)
      out.comp(i, j) = comp(i, j).substituted(subst);
  return out;
}

Connection lc_connection(const Algebroid& alg, const Metric& metric) {
  const std::size_t m = alg.fiber_rank();
  Tensor2OnDual gt = lifted_metric_pushforward(alg, metric);

  Connection out{ExprCube(m, m, m, Expr::number(0.0))};
  for (std::size_t i = 0; i < m; ++i) {
    Section ei = Section::basis(m, i);
    for (std::size_t j = 0; j < m; ++j) {
      Section br = bracket(alg, ei, Section::basis(m, j));
      for (std::size_t l = 0; l < m; ++l) {
        // Coefficient of xi_l in the fibrewise-linear [xi,xi] block.
        std::map<std::string, Expr> basis_sub;
        for (std::size_t t = 0; t < m; ++t)
          basis_sub[alg.chart().xi[t]] = Expr::number(t == l ? 1.0 : 0.0);
        Expr gt_coeff = gt.comp(i, j).substituted(basis_sub);
        out.coeffs(l, i, j) =
            (Expr::number(0.5) * (br.coeffs[l] - gt_coeff)).simplified();
      }
    }
  }
  return out;
}

Section connection_apply(const Algebroid& alg, const Connection& conn, const Section& X,
                         const Section& Y) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  if (X.coeffs.size() != m || Y.coeffs.size() != m)
    throw ShapeError("connection_apply: section rank mismatch");
  Section out;
  out.coeffs.assign(m, Expr::number(0.0));
  for (std::size_t l = 0; l < m; ++l) {
    Expr s = Expr::number(0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j)
        s = s + X.coeffs[i] * Y.coeffs[j] * conn.coeffs(l, i, j);
      for (std::size_t a = 0; a < n; ++a)
        s = s + X.coeffs[i] * alg.rho()(a, i) * Y.coeffs[l].derivative(alg.chart().x[a]);
    }
    out.coeffs[l] = s.simplified();
  }
  return out;
}

// ---- Wong ----

void validate_wong(const WongSetup& w) {
  const std::size_t n = w.base_dim, mg = w.algebra_dim;
  if (w.base_metric.rows() != n || w.base_metric.cols() != n)
    throw ShapeError("wong: base metric must be n x n");
  if (w.C.dim0() != mg || w.C.dim1() != mg || w.C.dim2() != mg)
    throw ShapeError("wong: structure constants must be m^3");
  if (w.h.rows() != mg || w.h.cols() != mg)
    throw ShapeError("wong: algebra metric must be m x m");
  if (!is_spd(w.h)) throw ShapeError("wong: algebra metric must be positive definite");
  if (w.A.rows() != mg || w.A.cols() != n)
    throw ShapeError("wong: connection coefficients must be m x n");
}

Algebroid wong_product_algebroid(const WongSetup& w) {
  validate_wong(w);
  const std::size_t n = w.base_dim, mg = w.algebra_dim, m = n + mg;
  ExprMat rho(n, m, Expr::number(0.0));
  for (std::size_t a = 0; a < n; ++a) rho(a, a) = Expr::number(1.0);
  ExprCube c(m, m, m, Expr::number(0.0));
  for (std::size_t l = 0; l < mg; ++l)
    for (std::size_t i = 0; i < mg; ++i)
      for (std::size_t j = 0; j < mg; ++j)
        c(n + l, n + i, n + j) = Expr::number(w.C(l, i, j));
  ExprMat sigma = rho;
  return Algebroid(n, m, std::move(rho), std::move(sigma), std::move(c));
}

ExprCube wong_curvature(const WongSetup& w) {
  const std::size_t n = w.base_dim, mg = w.algebra_dim;
  ChartNames chart = ChartNames::standard(n, n + mg);
  ExprCube f(mg, n, n, Expr::number(0.0));
  for (std::size_t l = 0; l < mg; ++l)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        Expr s = w.A(l, b).derivative(chart.x[a]) - w.A(l, a).derivative(chart.x[b]);
        for (std::size_t i = 0; i < mg; ++i)
          for (std::size_t j = 0; j < mg; ++j)
            s = s + w.A(i, a) * w.A(j, b) * Expr::number(w.C(l, i, j));
        f(l, a, b) = s.simplified();
      }
  return f;
}

Algebroid wong_deformed(const WongSetup& w,
                        const std::vector<std::vector<double>>& samples) {
  Algebroid product = wong_product_algebroid(w);
  const std::size_t n = w.base_dim, m = n + w.algebra_dim;

  // The isomorphism Abar maps (u, wbar) to (u, A u + wbar); the deformed
  // structure is the product structure carried through its inverse, which
  // is what reproduces the curvature block with the printed sign.
  ExprMat abar(m, m, Expr::number(0.0));
  ExprMat abar_inv(m, m, Expr::number(0.0));
  for (std::size_t a = 0; a < n; ++a) {
    abar(a, a) = Expr::number(1.0);
    abar_inv(a, a) = Expr::number(1.0);
  }
  for (std::size_t i = 0; i < w.algebra_dim; ++i) {
    abar_inv(n + i, n + i) = Expr::number(1.0);
    abar(n + i, n + i) = Expr::number(1.0);
    for (std::size_t a = 0; a < n; ++a) {
      abar(n + i, a) = w.A(i, a);
      abar_inv(n + i, a) = (-w.A(i, a)).simplified();
    }
  }
  return transport(product, abar_inv, abar, samples);
}

Metric wong_product_metric(const WongSetup& w) {
  const std::size_t n = w.base_dim, m = n + w.algebra_dim;
  ExprMat g(m, m, Expr::number(0.0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) g(a, b) = w.base_metric(a, b);
  for (std::size_t i = 0; i < w.algebra_dim; ++i)
    for (std::size_t j = 0; j < w.algebra_dim; ++j)
      g(n + i, n + j) = Expr::number(w.h(i, j));
  return Metric(std::move(g));
}

Lagrangian wong_lagrangian(const WongSetup& w, const ChartNames& chart) {
  return metric_lagrangian(wong_product_metric(w), chart);
}

Hamiltonian wong_hamiltonian(const WongSetup& w, const ChartNames& chart) {
  return metric_hamiltonian(wong_product_metric(w), chart);
}

namespace {

// Symbolic pieces shared across evaluation points.
struct WongCompiled {
  WongSetup w;
  ChartNames chart;
  ExprCube F;          // curvature (l, a, b)
  ExprCube dg;         // dg(a, b, c) = d g_{bc} / d x^a
  MatD hinv;

  explicit WongCompiled(const WongSetup& setup) : w(setup) {
    validate_wong(w);
    const std::size_t n = w.base_dim;
    chart = ChartNames::standard(n, n + w.algebra_dim);
    F = wong_curvature(w);
    dg = ExprCube(n, n, n, Expr::number(0.0));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          dg(a, b, c) = w.base_metric(b, c).derivative(chart.x[a]);
    hinv = lu_inverse(w.h);
  }
};

struct WongEval {
  std::size_t n, mg;
  MatD g, ginv, hinv;
  std::vector<MatD> dginv;  // per base coordinate
  std::vector<MatD> dg;     // per base coordinate
  Grid3<double> F;          // F(l, a, b)
  MatD A;                   // A(i, a)
};

WongEval wong_eval(const WongCompiled& wc, std::span<const double> x) {
  const std::size_t n = wc.w.base_dim, mg = wc.w.algebra_dim;
  Env env;
  for (std::size_t a = 0; a < n; ++a) env.set(wc.chart.x[a], x[a]);

  WongEval out;
  out.n = n;
  out.mg = mg;
  out.g = eval_matrix(wc.w.base_metric, env);
  out.ginv = lu_inverse(out.g);
  out.hinv = wc.hinv;
  out.dg.assign(n, MatD(n, n, 0.0));
  out.dginv.assign(n, MatD(n, n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) out.dg[a](b, c) = wc.dg(a, b, c).eval(env);
    MatD tmp = matmul(matmul(out.ginv, out.dg[a]), out.ginv);
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) out.dginv[a](b, c) = -tmp(b, c);
  }
  out.F = Grid3<double>(mg, n, n, 0.0);
  for (std::size_t l = 0; l < mg; ++l)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) out.F(l, a, b) = wc.F(l, a, b).eval(env);
  out.A = eval_matrix(wc.w.A, env);
  return out;
}

PhaseDerivative wong_phase_eval(const WongCompiled& wc, const PhasePoint& p) {
  const WongSetup& w = wc.w;
  const std::size_t n = w.base_dim, mg = w.algebra_dim;
  if (p.x.size() != n || p.xi.size() != n + mg)
    throw ShapeError("wong_phase_field: point shape mismatch");
  WongEval ev = wong_eval(wc, p.x);
  std::span<const double> pc(p.xi.data(), n);       // p_a
  std::span<const double> vc(p.xi.data() + n, mg);  // v_i

  PhaseDerivative out;
  out.xdot.assign(n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) out.xdot[a] += ev.ginv(a, b) * pc[b];

  out.xidot.assign(n + mg, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    double s = 0.0;
    for (std::size_t l = 0; l < mg; ++l)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          s += ev.F(l, b, a) * ev.ginv(b, c) * pc[c] * vc[l];
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        s -= 0.5 * ev.dginv[a](b, c) * pc[b] * pc[c];
    for (std::size_t j = 0; j < mg; ++j)
      for (std::size_t l = 0; l < mg; ++l)
        for (std::size_t i = 0; i < mg; ++i)
          for (std::size_t sdx = 0; sdx < mg; ++sdx)
            s += ev.A(j, a) * w.C(l, i, j) * ev.hinv(i, sdx) * vc[sdx] * vc[l];
    out.xidot[a] = s;
  }
  for (std::size_t i = 0; i < mg; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < mg; ++j)
      for (std::size_t l = 0; l < mg; ++l)
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b)
            s += ev.A(j, a) * w.C(l, j, i) * ev.ginv(a, b) * pc[b] * vc[l];
    for (std::size_t j = 0; j < mg; ++j)
      for (std::size_t l = 0; l < mg; ++l)
        for (std::size_t sdx = 0; sdx < mg; ++sdx)
          s += w.C(l, j, i) * ev.hinv(j, sdx) * vc[l] * vc[sdx];
    out.xidot[n + i] = s;
  }
  return out;
}

VelocityDerivative wong_el_eval(const WongCompiled& wc, const VelocityPoint& v) {
  const WongSetup& w = wc.w;
  const std::size_t n = w.base_dim, mg = w.algebra_dim;
  if (v.x.size() != n || v.y.size() != n + mg)
    throw ShapeError("wong_el_field: point shape mismatch");
  WongEval ev = wong_eval(wc, v.x);
  std::span<const double> xd(v.y.data(), n);        // xdot^a
  std::span<const double> vb(v.y.data() + n, mg);   // vbar^i

  VelocityDerivative out;
  out.xdot.assign(xd.begin(), xd.end());
  out.ydot.assign(n + mg, 0.0);

  for (std::size_t d = 0; d < n; ++d) {
    double s = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      double inner = 0.0;
      for (std::size_t l = 0; l < mg; ++l)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t sdx = 0; sdx < mg; ++sdx)
            inner += ev.F(l, b, a) * w.h(l, sdx) * xd[b] * vb[sdx];
      for (std::size_t j = 0; j < mg; ++j)
        for (std::size_t l = 0; l < mg; ++l)
          for (std::size_t i = 0; i < mg; ++i)
            for (std::size_t sdx = 0; sdx < mg; ++sdx)
              inner += ev.A(j, a) * w.C(l, i, j) * w.h(l, sdx) * vb[i] * vb[sdx];
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          inner += 0.5 * ev.dg[a](b, c) * xd[b] * xd[c];
      s += ev.ginv(d, a) * inner;
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          s -= ev.ginv(d, a) * ev.dg[c](a, b) * xd[c] * xd[b];
    out.ydot[d] = s;
  }
  for (std::size_t k = 0; k < mg; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < mg; ++i) {
      double inner = 0.0;
      for (std::size_t j = 0; j < mg; ++j)
        for (std::size_t l = 0; l < mg; ++l) {
          for (std::size_t a = 0; a < n; ++a)
            for (std::size_t sdx = 0; sdx < mg; ++sdx)
              inner += ev.A(j, a) * w.C(l, j, i) * w.h(l, sdx) * xd[a] * vb[sdx];
          for (std::size_t sdx = 0; sdx < mg; ++sdx)
            inner += w.C(l, j, i) * w.h(l, sdx) * vb[j] * vb[sdx];
        }
      s += ev.hinv(i, k) * inner;
    }
    out.ydot[n + k] = s;
  }
  return out;
}

}  // namespace

PhaseDerivative wong_phase_field(const WongSetup& w, const PhasePoint& p) {
  return wong_phase_eval(WongCompiled(w), p);
}

VelocityDerivative wong_el_field(const WongSetup& w, const VelocityPoint& v) {
  return wong_el_eval(WongCompiled(w), v);
}

StateFn make_wong_phase_flow(const WongSetup& w) {
  auto wc = std::make_shared<WongCompiled>(w);
  const std::size_t n = w.base_dim, m = n + w.algebra_dim;
  return [wc, n, m](double, const std::vector<double>& s) {
    if (s.size() != n + m) throw ShapeError("wong phase flow: state width mismatch");
    PhasePoint p;
    p.x.assign(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n));
    p.xi.assign(s.begin() + static_cast<std::ptrdiff_t>(n), s.end());
    PhaseDerivative d = wong_phase_eval(*wc, p);
    std::vector<double> out;
    out.reserve(n + m);
    out.insert(out.end(), d.xdot.begin(), d.xdot.end());
    out.insert(out.end(), d.xidot.begin(), d.xidot.end());
    return out;
  };
}

StateFn make_wong_el_flow(const WongSetup& w) {
  auto wc = std::make_shared<WongCompiled>(w);
  const std::size_t n = w.base_dim, m = n + w.algebra_dim;
  return [wc, n, m](double, const std::vector<double>& s) {
    if (s.size() != n + m) throw ShapeError("wong el flow: state width mismatch");
    VelocityPoint v;
    v.x.assign(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n));
    v.y.assign(s.begin() + static_cast<std::ptrdiff_t>(n), s.end());
    VelocityDerivative d = wong_el_eval(*wc, v);
    std::vector<double> out;
    out.reserve(n + m);
    out.insert(out.end(), d.xdot.begin(), d.xdot.end());
    out.insert(out.end(), d.ydot.begin(), d.ydot.end());
    return out;
  };
}

PhaseDerivative wong_reduced_field(const WongSetup& w, const PhasePoint& p) {
  const std::size_t n = w.base_dim, mg = w.algebra_dim;
  if (p.x.size() != n || p.xi.size() != n + mg)
    throw ShapeError("wong_reduced_field: point shape mismatch");
  WongCompiled wc(w);
  WongEval ev = wong_eval(wc, p.x);
  std::span<const double> pc(p.xi.data(), n);
  std::span<const double> vc(p.xi.data() + n, mg);

  std::vector<double> xdot(n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) xdot[a] += ev.ginv(a, b) * pc[b];

  PhaseDerivative out;
  out.xdot = xdot;
  out.xidot.assign(n + mg, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    double s = 0.0;
    for (std::size_t l = 0; l < mg; ++l)
      for (std::size_t b = 0; b < n; ++b) s += ev.F(l, b, a) * xdot[b] * vc[l];
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        s -= 0.5 * ev.dginv[a](b, c) * pc[b] * pc[c];
    out.xidot[a] = s;
  }
  for (std::size_t i = 0; i < mg; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < mg; ++j)
      for (std::size_t l = 0; l < mg; ++l)
        for (std::size_t a = 0; a < n; ++a)
          s += ev.A(j, a) * w.C(l, j, i) * xdot[a] * vc[l];
    out.xidot[n + i] = s;
  }
  return out;
}

Grid3<double> so3_constants() {
  Grid3<double> c(3, 3, 3, 0.0);
  c(2, 0, 1) = 1.0;
  c(2, 1, 0) = -1.0;
  c(0, 1, 2) = 1.0;
  c(0, 2, 1) = -1.0;
  c(1, 2, 0) = 1.0;
  c(1, 0, 2) = -1.0;
  return c;
}

Grid3<double> sl2_constants() {
  // Basis (h, e, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h.
  Grid3<double> c(3, 3, 3, 0.0);
  c(1, 0, 1) = 2.0;
  c(1, 1, 0) = -2.0;
  c(2, 0, 2) = -2.0;
  c(2, 2, 0) = 2.0;
  c(0, 1, 2) = 1.0;
  c(0, 2, 1) = -1.0;
  return c;
}

}  // namespace algmech

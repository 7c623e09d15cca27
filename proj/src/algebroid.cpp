#include "algmech/algebroid.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace algmech {

namespace {

void require(bool cond, const std::string& message) {
  if (!cond) throw ShapeError(message);
}

void check_base_only(const Expr& e, const ChartNames& chart, const std::string& where) {
  std::set<std::string> allowed(chart.x.begin(), chart.x.end());
  for (const auto& v : e.variables()) {
    if (!allowed.count(v))
      throw ShapeError(where + ": expression '" + e.str() +
                       "' depends on non-base variable '" + v + "'");
  }
}

}  // namespace

ChartNames ChartNames::standard(std::size_t n, std::size_t m) {
  ChartNames out;
  for (std::size_t a = 1; a <= n; ++a) out.x.push_back("x" + std::to_string(a));
  for (std::size_t i = 1; i <= m; ++i) out.y.push_back("y" + std::to_string(i));
  for (std::size_t i = 1; i <= m; ++i) out.xi.push_back("xi" + std::to_string(i));
  return out;
}

Section Section::basis(std::size_t m, std::size_t i) {
  Section s;
  s.coeffs.assign(m, Expr::number(0.0));
  s.coeffs[i] = Expr::number(1.0);
  return s;
}

Algebroid::Algebroid(std::size_t n, std::size_t m, ExprMat rho, ExprMat sigma,
                     ExprCube c, ChartNames chart)
    : n_(n), m_(m), rho_(std::move(rho)), sigma_(std::move(sigma)), c_(std::move(c)) {
  require(rho_.rows() == n && rho_.cols() == m,
          "algebroid: rho must be " + std::to_string(n) + "x" + std::to_string(m) +
              ", got " + std::to_string(rho_.rows()) + "x" + std::to_string(rho_.cols()));
  require(sigma_.rows() == n && sigma_.cols() == m,
          "algebroid: sigma must be " + std::to_string(n) + "x" + std::to_string(m) +
              ", got " + std::to_string(sigma_.rows()) + "x" +
              std::to_string(sigma_.cols()));
  require(c_.dim0() == m && c_.dim1() == m && c_.dim2() == m,
          "algebroid: c must be " + std::to_string(m) + "^3");

  if (chart.x.empty() && chart.y.empty() && chart.xi.empty())
    chart = ChartNames::standard(n, m);
  require(chart.x.size() == n && chart.y.size() == m && chart.xi.size() == m,
          "algebroid: chart name counts do not match (n, m)");
  chart_ = std::move(chart);

  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < m; ++i) {
      check_base_only(rho_(a, i), chart_, "rho");
      check_base_only(sigma_(a, i), chart_, "sigma");
    }
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) check_base_only(c_(k, i, j), chart_, "c");
}

Env Algebroid::base_env(std::span<const double> x) const {
  if (x.size() != n_) throw ShapeError("base point has wrong dimension");
  Env env;
  for (std::size_t a = 0; a < n_; ++a) env.set(chart_.x[a], x[a]);
  return env;
}

Algebroid tangent_bundle(std::size_t n) {
  ExprMat delta(n, n, Expr::number(0.0));
  for (std::size_t a = 0; a < n; ++a) delta(a, a) = Expr::number(1.0);
  return Algebroid(n, n, delta, delta, ExprCube(n, n, n, Expr::number(0.0)));
}

Algebroid lie_algebra(const Grid3<double>& structure_constants) {
  const std::size_t m = structure_constants.dim0();
  if (structure_constants.dim1() != m || structure_constants.dim2() != m)
    throw ShapeError("lie_algebra: structure constants must be m^3");
  ExprCube c(m, m, m, Expr::number(0.0));
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        c(k, i, j) = Expr::number(structure_constants(k, i, j));
  return Algebroid(0, m, ExprMat(0, m), ExprMat(0, m), std::move(c));
}

TangentDualPoint structure_map(const Algebroid& alg, const CotangentPoint& q) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  if (q.x.size() != n || q.y.size() != m || q.p.size() != n || q.pi.size() != m)
    throw ShapeError("structure_map: point shape mismatch");

  Env env = alg.base_env(q.x);
  TangentDualPoint out;
  out.x = q.x;
  out.xi = q.pi;
  out.xdot.assign(n, 0.0);
  out.xidot.assign(m, 0.0);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t k = 0; k < m; ++k) out.xdot[b] += alg.rho()(b, k).eval(env) * q.y[k];
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t i = 0; i < m; ++i)
        s += alg.c()(k, i, j).eval(env) * q.y[i] * q.pi[k];
    for (std::size_t a = 0; a < n; ++a) s += alg.sigma()(a, j).eval(env) * q.p[a];
    out.xidot[j] = s;
  }
  return out;
}

MatD structure_tensor(const Algebroid& alg, std::span<const double> x,
                   std::span<const double> xi) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  if (xi.size() != m) throw ShapeError("structure_tensor: xi has wrong dimension");
  Env env = alg.base_env(x);

  MatD out(m + n, m + n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += alg.c()(k, i, j).eval(env) * xi[k];
      out(i, j) = s;
    }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t b = 0; b < n; ++b) out(i, m + b) = alg.rho()(b, i).eval(env);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t j = 0; j < m; ++j) out(m + a, j) = -alg.sigma()(a, j).eval(env);
  return out;
}

Section bracket(const Algebroid& alg, const Section& X, const Section& Y) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  if (X.coeffs.size() != m || Y.coeffs.size() != m)
    throw ShapeError("bracket: section has wrong rank");

  Section out;
  out.coeffs.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    Expr s = Expr::number(0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        s = s + alg.c()(k, i, j) * X.coeffs[i] * Y.coeffs[j];
    for (std::size_t a = 0; a < n; ++a) {
      const std::string& xa = alg.chart().x[a];
      for (std::size_t i = 0; i < m; ++i)
        s = s + alg.rho()(a, i) * X.coeffs[i] * Y.coeffs[k].derivative(xa);
      for (std::size_t j = 0; j < m; ++j)
        s = s - alg.sigma()(a, j) * Y.coeffs[j] * X.coeffs[k].derivative(xa);
    }
    out.coeffs.push_back(s.simplified());
  }
  return out;
}

AnchorPair anchors(const Algebroid& alg) { return {alg.rho(), alg.sigma()}; }

ConnectionKind classify_connection(const Algebroid& alg,
                                   const std::vector<std::vector<double>>& samples,
                                   double tol) {
  double rho_max = 0.0, sigma_max = 0.0;
  for (const auto& x : samples) {
    Env env = alg.base_env(x);
    for (std::size_t a = 0; a < alg.base_dim(); ++a)
      for (std::size_t i = 0; i < alg.fiber_rank(); ++i) {
        rho_max = std::max(rho_max, std::abs(alg.rho()(a, i).eval(env)));
        sigma_max = std::max(sigma_max, std::abs(alg.sigma()(a, i).eval(env)));
      }
  }
  const bool rho_trivial = rho_max < tol;
  const bool sigma_trivial = sigma_max < tol;
  if (rho_trivial && sigma_trivial) return ConnectionKind::BothTrivial;
  if (sigma_trivial) return ConnectionKind::LeftConnection;   // right anchor trivial
  if (rho_trivial) return ConnectionKind::RightConnection;    // left anchor trivial
  return ConnectionKind::General;
}

std::string to_string(ConnectionKind kind) {
  switch (kind) {
    case ConnectionKind::General: return "general algebroid";
    case ConnectionKind::LeftConnection: return "left connection";
    case ConnectionKind::RightConnection: return "right connection";
    case ConnectionKind::BothTrivial: return "both anchors trivial";
  }
  return "?";
}

Algebroid adjoint(const Algebroid& alg) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  ExprMat rho_adj(n, m), sigma_adj(n, m);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < m; ++i) {
      rho_adj(a, i) = (-alg.sigma()(a, i)).simplified();
      sigma_adj(a, i) = (-alg.rho()(a, i)).simplified();
    }
  ExprCube c_adj(m, m, m);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) c_adj(k, i, j) = alg.c()(k, j, i);
  return Algebroid(n, m, std::move(rho_adj), std::move(sigma_adj), std::move(c_adj),
                   alg.chart());
}

CheckResult check_skew(const Algebroid& alg,
                       const std::vector<std::vector<double>>& samples, double tol) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  CheckResult out;
  for (const auto& x : samples) {
    Env env = alg.base_env(x);
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          const double r =
              std::abs(alg.c()(k, i, j).eval(env) + alg.c()(k, j, i).eval(env));
          if (r > out.max_abs) {
            out.max_abs = r;
            if (r >= tol)
              out.detail = "c^" + std::to_string(k + 1) + "_{" + std::to_string(i + 1) +
                           std::to_string(j + 1) + "} not antisymmetric";
          }
        }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t i = 0; i < m; ++i) {
        const double r =
            std::abs(alg.rho()(a, i).eval(env) - alg.sigma()(a, i).eval(env));
        if (r > out.max_abs) {
          out.max_abs = r;
          if (r >= tol)
            out.detail = "rho^" + std::to_string(a + 1) + "_" + std::to_string(i + 1) +
                         " differs from sigma";
        }
      }
  }
  out.passed = out.max_abs < tol;
  if (out.passed) out.detail.clear();
  return out;
}

CheckResult check_lie(const Algebroid& alg,
                      const std::vector<std::vector<double>>& samples, double tol) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();

  CheckResult skew = check_skew(alg, samples, tol);
  if (!skew.passed) {
    skew.detail = "skew-symmetry fails: " + skew.detail;
    return skew;
  }

  CheckResult out;
  out.max_abs = skew.max_abs;

  // Jacobiator on basis sections. The inner brackets have x-dependent
  // coefficients, so the outer bracket picks up anchor-derivative terms.
  std::vector<Section> basis;
  for (std::size_t i = 0; i < m; ++i) basis.push_back(Section::basis(m, i));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t k = j + 1; k < m; ++k) {
        Section jac1 = bracket(alg, bracket(alg, basis[i], basis[j]), basis[k]);
        Section jac2 = bracket(alg, bracket(alg, basis[j], basis[k]), basis[i]);
        Section jac3 = bracket(alg, bracket(alg, basis[k], basis[i]), basis[j]);
        for (const auto& x : samples) {
          Env env = alg.base_env(x);
          for (std::size_t l = 0; l < m; ++l) {
            const double r = std::abs(jac1.coeffs[l].eval(env) +
                                      jac2.coeffs[l].eval(env) +
                                      jac3.coeffs[l].eval(env));
            if (r > out.max_abs) {
              out.max_abs = r;
              if (r >= tol)
                out.detail = "Jacobiator(" + std::to_string(i + 1) + "," +
                             std::to_string(j + 1) + "," + std::to_string(k + 1) +
                             ") component " + std::to_string(l + 1) + " nonzero";
            }
          }
        }
      }

  // Anchor homomorphism: rho([e_i, e_j]) must equal the commutator of the
  // anchor vector fields.
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      Section br = bracket(alg, basis[i], basis[j]);
      for (std::size_t a = 0; a < n; ++a) {
        Expr lhs = Expr::number(0.0);
        for (std::size_t k = 0; k < m; ++k) lhs = lhs + alg.rho()(a, k) * br.coeffs[k];
        Expr rhs = Expr::number(0.0);
        for (std::size_t b = 0; b < n; ++b) {
          const std::string& xb = alg.chart().x[b];
          rhs = rhs + alg.rho()(b, i) * alg.rho()(a, j).derivative(xb) -
                alg.rho()(b, j) * alg.rho()(a, i).derivative(xb);
        }
        Expr residual = (lhs - rhs).simplified();
        for (const auto& x : samples) {
          Env env = alg.base_env(x);
          const double r = std::abs(residual.eval(env));
          if (r > out.max_abs) {
            out.max_abs = r;
            if (r >= tol)
              out.detail = "anchor homomorphism fails for (e_" + std::to_string(i + 1) +
                           ", e_" + std::to_string(j + 1) + ")";
          }
        }
      }
    }

  out.passed = out.max_abs < tol;
  if (out.passed) out.detail.clear();
  return out;
}

Algebroid transport(const Algebroid& alg, const ExprMat& phi, const ExprMat& phi_inv,
                    const std::vector<std::vector<double>>& samples, double tol) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  if (phi.rows() != m || phi.cols() != m || phi_inv.rows() != m || phi_inv.cols() != m)
    throw ShapeError("transport: Phi must be m x m");

  ExprMat product = expr_matmul(phi, phi_inv);
  for (const auto& x : samples) {
    Env env = alg.base_env(x);
    const double dev = max_abs_diff(eval_matrix(product, env), identity(m));
    if (dev > tol)
      throw ShapeError("transport: Phi*PhiInv deviates from identity by " +
                       format_double(dev));
  }

  // New anchors: rho' = rho Phi^{-1}, sigma' = sigma Phi^{-1}.
  ExprMat rho_t = expr_matmul(alg.rho(), phi_inv);
  ExprMat sigma_t = expr_matmul(alg.sigma(), phi_inv);

  // New bracket coefficients from [e_i, e_j]' = Phi [Phi^{-1} e_i, Phi^{-1} e_j]:
  //   c'^t_{ij} = Phi^t_s ( c^s_{kl} psi^k_i psi^l_j
  //                         + rho^d_k psi^k_i d(psi^s_j)/dx^d
  //                         - sigma^d_l psi^l_j d(psi^s_i)/dx^d ).
  const ExprMat& psi = phi_inv;
  ExprCube c_t(m, m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<Expr> inner(m, Expr::number(0.0));
      for (std::size_t s = 0; s < m; ++s) {
        Expr acc = Expr::number(0.0);
        for (std::size_t k = 0; k < m; ++k)
          for (std::size_t l = 0; l < m; ++l)
            acc = acc + alg.c()(s, k, l) * psi(k, i) * psi(l, j);
        for (std::size_t d = 0; d < n; ++d) {
          const std::string& xd = alg.chart().x[d];
          for (std::size_t k = 0; k < m; ++k)
            acc = acc + alg.rho()(d, k) * psi(k, i) * psi(s, j).derivative(xd);
          for (std::size_t l = 0; l < m; ++l)
            acc = acc - alg.sigma()(d, l) * psi(l, j) * psi(s, i).derivative(xd);
        }
        inner[s] = acc.simplified();
      }
      for (std::size_t t = 0; t < m; ++t) {
        Expr acc = Expr::number(0.0);
        for (std::size_t s = 0; s < m; ++s) acc = acc + phi(t, s) * inner[s];
        c_t(t, i, j) = acc.simplified();
      }
    }

  return Algebroid(n, m, std::move(rho_t), std::move(sigma_t), std::move(c_t),
                   alg.chart());
}

}  // namespace algmech

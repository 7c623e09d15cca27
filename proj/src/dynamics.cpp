#include "algmech/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "algmech/lifts.hpp"

namespace algmech {

namespace {

void check_free_vars(const Expr& e, const std::vector<std::string>& a,
                     const std::vector<std::string>& b, const std::string& what) {
  std::set<std::string> allowed(a.begin(), a.end());
  allowed.insert(b.begin(), b.end());
  for (const auto& v : e.variables()) {
    if (!allowed.count(v))
      throw ShapeError(what + " depends on unknown variable '" + v + "'");
  }
}

}  // namespace

Lagrangian::Lagrangian(Expr L, const ChartNames& chart)
    : L_(std::move(L)), chart_(chart) {
  check_free_vars(L_, chart_.x, chart_.y, "Lagrangian");
  const std::size_t n = chart_.x.size(), m = chart_.y.size();
  dLdy_.reserve(m);
  for (std::size_t i = 0; i < m; ++i) dLdy_.push_back(L_.derivative(chart_.y[i]));
  dLdx_.reserve(n);
  for (std::size_t a = 0; a < n; ++a) dLdx_.push_back(L_.derivative(chart_.x[a]));
  d2Ldydy_ = ExprMat(m, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t l = 0; l < m; ++l) d2Ldydy_(j, l) = dLdy_[j].derivative(chart_.y[l]);
  d2Ldydx_ = ExprMat(m, n);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t a = 0; a < n; ++a) d2Ldydx_(j, a) = dLdy_[j].derivative(chart_.x[a]);
}

Env Lagrangian::env_at(const VelocityPoint& v) const {
  if (v.x.size() != chart_.x.size() || v.y.size() != chart_.y.size())
    throw ShapeError("velocity point shape mismatch");
  Env env;
  for (std::size_t a = 0; a < v.x.size(); ++a) env.set(chart_.x[a], v.x[a]);
  for (std::size_t i = 0; i < v.y.size(); ++i) env.set(chart_.y[i], v.y[i]);
  return env;
}

Hamiltonian::Hamiltonian(Expr H, const ChartNames& chart)
    : H_(std::move(H)), chart_(chart) {
  check_free_vars(H_, chart_.x, chart_.xi, "Hamiltonian");
  const std::size_t n = chart_.x.size(), m = chart_.xi.size();
  dHdxi_.reserve(m);
  for (std::size_t i = 0; i < m; ++i) dHdxi_.push_back(H_.derivative(chart_.xi[i]));
  dHdx_.reserve(n);
  for (std::size_t a = 0; a < n; ++a) dHdx_.push_back(H_.derivative(chart_.x[a]));
}

Env Hamiltonian::env_at(const PhasePoint& p) const {
  if (p.x.size() != chart_.x.size() || p.xi.size() != chart_.xi.size())
    throw ShapeError("phase point shape mismatch");
  Env env;
  for (std::size_t a = 0; a < p.x.size(); ++a) env.set(chart_.x[a], p.x[a]);
  for (std::size_t i = 0; i < p.xi.size(); ++i) env.set(chart_.xi[i], p.xi[i]);
  return env;
}

PhasePoint legendre_map(const Lagrangian& L, const VelocityPoint& v) {
  Env env = L.env_at(v);
  PhasePoint out;
  out.x = v.x;
  out.xi.reserve(L.fiber_rank());
  for (const Expr& d : L.dLdy()) out.xi.push_back(d.eval(env));
  return out;
}

VelocityPoint legendre_inverse(const Lagrangian& L, const PhasePoint& p,
                               std::vector<double> y_guess, const NewtonOptions& opts) {
  const std::size_t m = L.fiber_rank();
  if (p.xi.size() != m) throw ShapeError("legendre_inverse: phase point shape mismatch");
  if (y_guess.empty()) y_guess.assign(m, 0.0);
  if (y_guess.size() != m) throw ShapeError("legendre_inverse: guess shape mismatch");

  VelocityPoint v{p.x, std::move(y_guess)};
  for (int it = 0; it < opts.max_iterations; ++it) {
    Env env = L.env_at(v);
    std::vector<double> residual(m);
    double rmax = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      residual[j] = L.dLdy()[j].eval(env) - p.xi[j];
      rmax = std::max(rmax, std::abs(residual[j]));
    }
    if (rmax < opts.tolerance) return v;

    MatD hess(m, m);
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t l = 0; l < m; ++l) hess(j, l) = L.hessian()(j, l).eval(env);
    std::vector<double> delta;
    try {
      delta = lu_solve(std::move(hess), residual, opts.cond_limit);
    } catch (const DegeneracyError& e) {
      throw DegeneracyError(std::string("legendre_inverse: ") + e.what() +
                            " (non-hyperregular point)");
    }
    for (std::size_t j = 0; j < m; ++j) v.y[j] -= delta[j];
  }
  throw DegeneracyError("legendre_inverse: Newton did not converge in " +
                        std::to_string(opts.max_iterations) +
                        " iterations (non-hyperregular point)");
}

TangentDualPoint lagrangian_dynamics(const Algebroid& alg, const Lagrangian& L,
                            const VelocityPoint& v) {
  Env env = L.env_at(v);
  CotangentPoint q;
  q.x = v.x;
  q.y = v.y;
  q.p.reserve(alg.base_dim());
  for (const Expr& d : L.dLdx()) q.p.push_back(d.eval(env));
  q.pi.reserve(alg.fiber_rank());
  for (const Expr& d : L.dLdy()) q.pi.push_back(d.eval(env));
  return structure_map(alg, q);
}

VelocityDerivative euler_lagrange_field(const Algebroid& alg, const Lagrangian& L,
                             const VelocityPoint& v) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  Env env = L.env_at(v);

  VelocityDerivative out;
  out.xdot.assign(n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t k = 0; k < m; ++k)
      out.xdot[a] += alg.rho()(a, k).eval(env) * v.y[k];

  std::vector<double> dLdy(m);
  for (std::size_t k = 0; k < m; ++k) dLdy[k] = L.dLdy()[k].eval(env);

  std::vector<double> rhs(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t i = 0; i < m; ++i)
        rhs[j] += alg.c()(k, i, j).eval(env) * v.y[i] * dLdy[k];
    for (std::size_t a = 0; a < n; ++a)
      rhs[j] += alg.sigma()(a, j).eval(env) * L.dLdx()[a].eval(env);
    for (std::size_t a = 0; a < n; ++a)
      rhs[j] -= L.mixed()(j, a).eval(env) * out.xdot[a];
  }

  MatD hess(m, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t l = 0; l < m; ++l) hess(j, l) = L.hessian()(j, l).eval(env);
  try {
    out.ydot = lu_solve(std::move(hess), std::move(rhs));
  } catch (const DegeneracyError& e) {
    throw DegeneracyError(std::string("euler_lagrange_field: degenerate Hessian, ") + e.what());
  }
  return out;
}

double weak_el_residual(const Algebroid& alg, const Lagrangian& L, const Trajectory& gamma,
                    const Trajectory& y0_path, double legendre_tol) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  if (gamma.size() != y0_path.size() || gamma.size() < 3)
    throw ShapeError("weak_el_residual: trajectories must share a grid of >= 3 samples");

  const std::size_t steps = gamma.size();
  auto point_of = [&](const Trajectory& tr, std::size_t k) {
    const auto& row = tr.states[k];
    if (row.size() != n + m) throw ShapeError("weak_el_residual: state row has wrong width");
    VelocityPoint v;
    v.x.assign(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n));
    v.y.assign(row.begin() + static_cast<std::ptrdiff_t>(n), row.end());
    return v;
  };

  // Shared base path and matching Legendre images are preconditions.
  for (std::size_t k = 0; k < steps; ++k) {
    VelocityPoint a = point_of(gamma, k), b = point_of(y0_path, k);
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(a.x[i] - b.x[i]) > 1e-12)
        throw ShapeError("weak_el_residual: paths do not share the base path");
    PhasePoint pa = legendre_map(L, a), pb = legendre_map(L, b);
    for (std::size_t i = 0; i < m; ++i)
      if (std::abs(pa.xi[i] - pb.xi[i]) > legendre_tol)
        throw ShapeError("weak_el_residual: Legendre images of gamma and y0 differ at sample " +
                         std::to_string(k));
  }

  double residual = 0.0;
  for (std::size_t k = 1; k + 1 < steps; ++k) {
    const double dt = gamma.times[k + 1] - gamma.times[k - 1];
    VelocityPoint cur = point_of(gamma, k);
    VelocityPoint curr0 = point_of(y0_path, k);
    Env env0 = L.env_at(curr0);
    Env env = L.env_at(cur);

    // Admissibility against the companion velocity: xdot = rho(x) y0.
    for (std::size_t a = 0; a < n; ++a) {
      const double xdot =
          (gamma.states[k + 1][a] - gamma.states[k - 1][a]) / dt;
      double rho_y0 = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        rho_y0 += alg.rho()(a, i).eval(env0) * curr0.y[i];
      residual = std::max(residual, std::abs(xdot - rho_y0));
    }

    // d/dt of dL/dy along gamma against the structure-function right side
    // evaluated at (x, y0).
    VelocityPoint prev = point_of(gamma, k - 1), next = point_of(gamma, k + 1);
    Env env_prev = L.env_at(prev), env_next = L.env_at(next);
    std::vector<double> dLdy0(m);
    for (std::size_t i = 0; i < m; ++i) dLdy0[i] = L.dLdy()[i].eval(env0);
    for (std::size_t j = 0; j < m; ++j) {
      const double ddt =
          (L.dLdy()[j].eval(env_next) - L.dLdy()[j].eval(env_prev)) / dt;
      double rhs = 0.0;
      for (std::size_t kk = 0; kk < m; ++kk)
        for (std::size_t i = 0; i < m; ++i)
          rhs += alg.c()(kk, i, j).eval(env0) * curr0.y[i] * dLdy0[kk];
      for (std::size_t a = 0; a < n; ++a)
        rhs += alg.sigma()(a, j).eval(env0) * L.dLdx()[a].eval(env0);
      residual = std::max(residual, std::abs(ddt - rhs));
    }
    (void)env;
  }
  return residual;
}

PhaseDerivative hamiltonian_field(const Algebroid& alg, const Hamiltonian& H,
                                  const PhasePoint& p) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  Env env = H.env_at(p);

  std::vector<double> dHdxi(m), dHdx(n);
  for (std::size_t i = 0; i < m; ++i) dHdxi[i] = H.dHdxi()[i].eval(env);
  for (std::size_t a = 0; a < n; ++a) dHdx[a] = H.dHdx()[a].eval(env);

  PhaseDerivative out;
  out.xdot.assign(n, 0.0);
  out.xidot.assign(m, 0.0);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t i = 0; i < m; ++i)
      out.xdot[b] += alg.rho()(b, i).eval(env) * dHdxi[i];
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t i = 0; i < m; ++i)
        s += alg.c()(k, i, j).eval(env) * p.xi[k] * dHdxi[i];
    for (std::size_t a = 0; a < n; ++a) s -= alg.sigma()(a, j).eval(env) * dHdx[a];
    out.xidot[j] = s;
  }
  return out;
}

double hamiltonian_from_lagrangian(const Algebroid& alg, const Lagrangian& L,
                                   const PhasePoint& p, std::vector<double> y_guess) {
  (void)alg;
  VelocityPoint v = legendre_inverse(L, p, std::move(y_guess));
  Env env = L.env_at(v);
  double delta = 0.0;
  for (std::size_t i = 0; i < L.fiber_rank(); ++i)
    delta += v.y[i] * L.dLdy()[i].eval(env);
  return delta - L.expr().eval(env);
}

Expr lagrangian_energy(const Lagrangian& L) {
  Expr e = Expr::number(0.0);
  for (std::size_t i = 0; i < L.fiber_rank(); ++i)
    e = e + Expr::variable(L.chart().y[i]) * L.dLdy()[i];
  return (e - L.expr()).simplified();
}

CheckResult noether_check(const Algebroid& alg, const Lagrangian& L, const Section& X,
                          const Expr& f,
                          const std::vector<std::vector<double>>& samples_xy,
                          double tol) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  if (X.coeffs.size() != m) throw ShapeError("noether_check: section rank mismatch");

  Expr lhs = lie_derivative(alg, complete_lift_section(alg, X), L.expr());
  Expr rhs = complete_lift_function(alg, f);
  Expr residual = (lhs - rhs).simplified();

  CheckResult out;
  for (const auto& row : samples_xy) {
    if (row.size() != n + m) throw ShapeError("noether_check: sample row width mismatch");
    Env env;
    for (std::size_t a = 0; a < n; ++a) env.set(alg.chart().x[a], row[a]);
    for (std::size_t i = 0; i < m; ++i) env.set(alg.chart().y[i], row[n + i]);
    out.max_abs = std::max(out.max_abs, std::abs(residual.eval(env)));
  }
  out.passed = out.max_abs < tol;
  if (!out.passed) out.detail = "symmetry residual " + format_double(out.max_abs);
  return out;
}

Expr noether_integral(const Lagrangian& L, const Section& X, const Expr& f) {
  if (X.coeffs.size() != L.fiber_rank())
    throw ShapeError("noether_integral: section rank mismatch");
  Expr out = Expr::number(0.0);
  for (std::size_t i = 0; i < L.fiber_rank(); ++i)
    out = out + X.coeffs[i] * L.dLdy()[i];
  return (out - f).simplified();
}

StateFn make_euler_lagrange_flow(const Algebroid& alg, const Lagrangian& L) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  return [alg, L, n, m](double, const std::vector<double>& s) {
    if (s.size() != n + m) throw ShapeError("euler-lagrange flow: state width mismatch");
    VelocityPoint v;
    v.x.assign(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n));
    v.y.assign(s.begin() + static_cast<std::ptrdiff_t>(n), s.end());
    VelocityDerivative d = euler_lagrange_field(alg, L, v);
    std::vector<double> out;
    out.reserve(n + m);
    out.insert(out.end(), d.xdot.begin(), d.xdot.end());
    out.insert(out.end(), d.ydot.begin(), d.ydot.end());
    return out;
  };
}

StateFn make_hamiltonian_flow(const Algebroid& alg, const Hamiltonian& H) {
  const std::size_t n = alg.base_dim(), m = alg.fiber_rank();
  return [alg, H, n, m](double, const std::vector<double>& s) {
    if (s.size() != n + m) throw ShapeError("hamiltonian flow: state width mismatch");
    PhasePoint p;
    p.x.assign(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n));
    p.xi.assign(s.begin() + static_cast<std::ptrdiff_t>(n), s.end());
    PhaseDerivative d = hamiltonian_field(alg, H, p);
    std::vector<double> out;
    out.reserve(n + m);
    out.insert(out.end(), d.xdot.begin(), d.xdot.end());
    out.insert(out.end(), d.xidot.begin(), d.xidot.end());
    return out;
  };
}

}  // namespace algmech

#ifndef ALGMECH_DYNAMICS_HPP
#define ALGMECH_DYNAMICS_HPP

#include <optional>

#include "algmech/algebroid.hpp"
#include "algmech/integrate.hpp"

namespace algmech {

struct VelocityPoint {
  std::vector<double> x, y;  // point of E
};

struct PhasePoint {
  std::vector<double> x, xi;  // point of E*
};

// Lagrangian L(x, y) with cached first and second fibre partials.
class Lagrangian {
public:
  Lagrangian(Expr L, const ChartNames& chart);

  const Expr& expr() const { return L_; }
  const std::vector<Expr>& dLdy() const { return dLdy_; }
  const std::vector<Expr>& dLdx() const { return dLdx_; }
  const ExprMat& hessian() const { return d2Ldydy_; }   // m x m
  const ExprMat& mixed() const { return d2Ldydx_; }     // m x n, (j, a)
  const ChartNames& chart() const { return chart_; }
  std::size_t base_dim() const { return chart_.x.size(); }
  std::size_t fiber_rank() const { return chart_.y.size(); }

  Env env_at(const VelocityPoint& v) const;

private:
  Expr L_;
  ChartNames chart_;
  std::vector<Expr> dLdy_, dLdx_;
  ExprMat d2Ldydy_, d2Ldydx_;
};

// Hamiltonian H(x, xi) with cached partials.
class Hamiltonian {
public:
  Hamiltonian(Expr H, const ChartNames& chart);

  const Expr& expr() const { return H_; }
  const std::vector<Expr>& dHdxi() const { return dHdxi_; }
  const std::vector<Expr>& dHdx() const { return dHdx_; }
  const ChartNames& chart() const { return chart_; }

  Env env_at(const PhasePoint& p) const;

private:
  Expr H_;
  ChartNames chart_;
  std::vector<Expr> dHdxi_, dHdx_;
};

// Legendre map: (x, y) -> (x, xi_i = dL/dy^i).
PhasePoint legendre_map(const Lagrangian& L, const VelocityPoint& v);

struct NewtonOptions {
  double tolerance = 1e-12;
  int max_iterations = 50;
  double cond_limit = 1e12;
};

// Newton inversion of the fibre derivative; requires the Hessian to stay
// nonsingular along the iteration.
VelocityPoint legendre_inverse(const Lagrangian& L, const PhasePoint& p,
                               std::vector<double> y_guess = {},
                               const NewtonOptions& opts = {});

// The dynamics as parametrised by E: equals structure_map applied to the
// differential of L.
TangentDualPoint lagrangian_dynamics(const Algebroid& alg, const Lagrangian& L,
                            const VelocityPoint& v);

struct VelocityDerivative {
  std::vector<double> xdot, ydot;
};

struct PhaseDerivative {
  std::vector<double> xdot, xidot;
};

// Explicit form of the strong Euler-Lagrange equation: xdot = rho y and the
// fibre acceleration solved from the Hessian system
//   (d2L/dy dy) ydot = RHS - (d2L/dy dx) xdot,
//   RHS_j = c^k_{ij} y^i dL/dy^k + sigma^a_j dL/dx^a.
VelocityDerivative euler_lagrange_field(const Algebroid& alg, const Lagrangian& L,
                             const VelocityPoint& v);

// Residual of the weak equation over a discrete path gamma with companion
// velocities y0 sharing gamma's base path and Legendre image. Time
// derivatives by centred differences on the trajectory grid.
double weak_el_residual(const Algebroid& alg, const Lagrangian& L, const Trajectory& gamma,
                    const Trajectory& y0_path, double legendre_tol = 1e-10);

// Contraction of the structure tensor with dH in the first slot:
//   xdot^b = rho^b_i dH/dxi_i,
//   xidot_j = c^k_{ij} xi_k dH/dxi_i - sigma^a_j dH/dx^a.
PhaseDerivative hamiltonian_field(const Algebroid& alg, const Hamiltonian& H,
                                  const PhasePoint& p);

// Value of (Delta_E L - L) o Leg^{-1} at p; Delta_E L = y^i dL/dy^i.
double hamiltonian_from_lagrangian(const Algebroid& alg, const Lagrangian& L,
                                   const PhasePoint& p,
                                   std::vector<double> y_guess = {});

// Fibre-radial energy y^i dL/dy^i - L as a symbolic function on E.
Expr lagrangian_energy(const Lagrangian& L);

// Residual of the symmetry condition: the derivative of L along the
// complete lift of X minus the complete lift of f, evaluated at samples in
// E given as concatenated (x, y) rows.
CheckResult noether_check(const Algebroid& alg, const Lagrangian& L, const Section& X,
                          const Expr& f,
                          const std::vector<std::vector<double>>& samples_xy,
                          double tol = 1e-12);

// First integral (x, y) -> X^i(x) dL/dy^i(x, y) - f(x).
Expr noether_integral(const Lagrangian& L, const Section& X, const Expr& f);

// State-vector adapters for the integrator; states are concatenated (x, y)
// resp. (x, xi) rows.
StateFn make_euler_lagrange_flow(const Algebroid& alg, const Lagrangian& L);
StateFn make_hamiltonian_flow(const Algebroid& alg, const Hamiltonian& H);

}  // namespace algmech

#endif

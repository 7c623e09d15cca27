#ifndef ALGMECH_MODELS_HPP
#define ALGMECH_MODELS_HPP

#include <optional>

#include "algmech/dynamics.hpp"
#include "algmech/lifts.hpp"

namespace algmech {

// Fibre metric g_{ij}(x) with its contravariant companion. The symbolic
// inverse is the user-supplied one when given, otherwise computed by
// adjugate (diagonal metrics invert entrywise); numeric paths go through LU
// per evaluation point.
class Metric {
public:
  explicit Metric(ExprMat g, std::optional<ExprMat> inverse = std::nullopt);

  std::size_t rank() const { return g_.rows(); }
  const ExprMat& g() const { return g_; }
  const ExprMat& inverse() const { return ginv_; }

  MatD at(const Env& env) const;
  MatD inverse_at(const Env& env) const;  // numeric LU of g(x)

private:
  ExprMat g_, ginv_;
};

// Symmetry, positive definiteness (Cholesky) and, when a symbolic inverse
// was supplied, g * ginv = I, all at the sample points.
CheckResult validate_metric(const Metric& metric, const ChartNames& chart,
                            const std::vector<std::vector<double>>& samples,
                            double tol = 1e-12);

// L(x, y) = 1/2 g_{ij}(x) y^i y^j.
Lagrangian metric_lagrangian(const Metric& metric, const ChartNames& chart);

// H(x, xi) = 1/2 g^{ij}(x) xi_i xi_j.
Hamiltonian metric_hamiltonian(const Metric& metric, const ChartNames& chart);

// Generalised Christoffel coefficients:
//   Gamma^l_{ij} = 1/2 g^{kl} ( rho^a_j dg_{ik}/dx^a + rho^a_i dg_{jk}/dx^a
//                               - sigma^a_k dg_{ij}/dx^a
//                               - c^s_{ik} g_{sj} - c^s_{jk} g_{si} ).
struct GammaSymbols {
  ExprCube coeffs;  // coeffs(l, i, j)
};
GammaSymbols gamma_symbols(const Algebroid& alg, const Metric& metric);

// xdot^a = rho^a_k y^k, ydot^l = -Gamma^l_{ij} y^i y^j.
VelocityDerivative geodesic_field(const Algebroid& alg, const Metric& metric,
                                  const VelocityPoint& v);
VelocityDerivative geodesic_field_at(const Algebroid& alg, const GammaSymbols& gamma,
                                     const VelocityPoint& v);
StateFn make_geodesic_flow(const Algebroid& alg, const Metric& metric);

// Closed form of the Hamiltonian dynamics for the metric Hamiltonian:
//   xdot^a = rho^a_i g^{ij} xi_j,
//   xidot_i = (c^l_{ji} g^{js} - 1/2 sigma^a_i dg^{sl}/dx^a) xi_s xi_l.
PhaseDerivative geodesic_hamiltonian_field(const Algebroid& alg, const Metric& metric,
                                           const PhasePoint& p);

// Push-forward of the complete lift (adjoint structure) of the contravariant
// metric through the fibre map xi = g(x) y; a fibrewise-linear 2-tensor on
// E* whose [xi,xi] block carries -2 Gamma.
Tensor2OnDual lifted_metric_pushforward(const Algebroid& alg, const Metric& metric);

// Left connection nabla_{e_i} e_j = 1/2 ([e_i, e_j] - Gtilde(e_i, e_j)).
struct Connection {
  ExprCube coeffs;  // nabla_{e_i} e_j = coeffs(l, i, j) e_l
};
Connection lc_connection(const Algebroid& alg, const Metric& metric);

// Extension of the connection to arbitrary sections by the left Leibniz laws.
Section connection_apply(const Algebroid& alg, const Connection& conn, const Section& X,
                         const Section& Y);

// ---- generalised Wong equations ----

// Product bundle TM x g over the base chart: a base metric, an R-algebra
// with structure constants C^l_{ij} and invariant-candidate metric h, and
// connection coefficients A^i_a(x).
struct WongSetup {
  std::size_t base_dim = 0;     // n = dim M
  std::size_t algebra_dim = 0;  // dim of the algebra
  ExprMat base_metric;          // n x n, entries in x
  Grid3<double> C;              // C(l, i, j)
  MatD h;                       // algebra metric
  ExprMat A;                    // A(i, a): algebra index i, base index a
};

void validate_wong(const WongSetup& w);

// Fibre coordinate layout of the product bundle: TM slots first (rank n),
// algebra slots after (rank algebra_dim).
Algebroid wong_product_algebroid(const WongSetup& w);

// Curvature F^l_{ab} = dA^l_b/dx^a - dA^l_a/dx^b + A^i_a A^j_b C^l_{ij}.
ExprCube wong_curvature(const WongSetup& w);  // (l, a, b)

// Deformed structure carrying the product bracket through the connection
// isomorphism; its tensor has the C blocks, the A-coupling blocks and the
// curvature block over the canonical T*M part.
Algebroid wong_deformed(const WongSetup& w,
                        const std::vector<std::vector<double>>& samples);

// Block-diagonal product metric diag(g, h) on TM x g.
Metric wong_product_metric(const WongSetup& w);

Lagrangian wong_lagrangian(const WongSetup& w, const ChartNames& chart);
Hamiltonian wong_hamiltonian(const WongSetup& w, const ChartNames& chart);

// Phase dynamics on T*M x g*, state split (x; xi = (p_a, v_i)):
//   d/dt x^a = g^{ab} p_b,
//   d/dt p_a = F^l_{ba} g^{bc} p_c v_l - 1/2 dg^{bc}/dx^a p_b p_c
//              + A^j_a C^l_{ij} h^{is} v_s v_l,
//   d/dt v_i = A^j_a C^l_{ji} g^{ab} p_b v_l + C^l_{ji} h^{js} v_l v_s.
PhaseDerivative wong_phase_field(const WongSetup& w, const PhasePoint& p);

// Velocity dynamics on E, state split (x; y = (xdot^a, vbar^i)).
VelocityDerivative wong_el_field(const WongSetup& w, const VelocityPoint& v);

StateFn make_wong_phase_flow(const WongSetup& w);
StateFn make_wong_el_flow(const WongSetup& w);

// Reduced equations for an invariant algebra metric (the C-h term drops):
//   d/dt v_i = A^j_a C^l_{ji} xdot^a v_l,
//   d/dt p_a = F^l_{ba} xdot^b v_l - 1/2 dg^{bc}/dx^a p_b p_c.
PhaseDerivative wong_reduced_field(const WongSetup& w, const PhasePoint& p);

// Structure constants of the worked algebra examples.
Grid3<double> so3_constants();
Grid3<double> sl2_constants();

}  // namespace algmech

#endif

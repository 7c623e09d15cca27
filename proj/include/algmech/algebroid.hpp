#ifndef ALGMECH_ALGEBROID_HPP
#define ALGMECH_ALGEBROID_HPP

#include <span>
#include <string>
#include <vector>

#include "algmech/expr.hpp"
#include "algmech/linalg.hpp"

namespace algmech {

// Coordinate names of a single global chart: x1..xn on the base, y1..ym on
// the fibre of E, xi1..xim on the fibre of E*.
struct ChartNames {
  std::vector<std::string> x, y, xi;

  static ChartNames standard(std::size_t n, std::size_t m);
};

// Point of T*E in adapted coordinates (x^a, y^i, p_b, pi_j).
struct CotangentPoint {
  std::vector<double> x, y, p, pi;
};

// Point of T E* in adapted coordinates (x^a, xi_i, xdot^b, xidot_j).
struct TangentDualPoint {
  std::vector<double> x, xi, xdot, xidot;
};

// Section X = f^i(x) e_i of the bundle.
struct Section {
  std::vector<Expr> coeffs;

  static Section basis(std::size_t m, std::size_t i);
};

enum class Carrier { Base, Bundle, DualBundle };

struct ScalarField {
  Expr expr;
  Carrier carrier = Carrier::Base;
};

struct CheckResult {
  bool passed = true;
  double max_abs = 0.0;
  std::string detail;
};

// General algebroid on a trivial bundle R^n x R^m, given by the structure
// functions rho^a_i (left anchor), sigma^a_j (right anchor) and c^k_{ij}
// (bracket coefficients), all functions of the base coordinates only.
// Immutable after construction.
class Algebroid {
public:
  Algebroid(std::size_t n, std::size_t m, ExprMat rho, ExprMat sigma, ExprCube c,
            ChartNames chart = {});

  std::size_t base_dim() const { return n_; }
  std::size_t fiber_rank() const { return m_; }
  const ChartNames& chart() const { return chart_; }

  const ExprMat& rho() const { return rho_; }      // n x m, rho(a, i)
  const ExprMat& sigma() const { return sigma_; }  // n x m
  const ExprCube& c() const { return c_; }         // c(k, i, j)

  Env base_env(std::span<const double> x) const;

private:
  std::size_t n_, m_;
  ChartNames chart_;
  ExprMat rho_, sigma_;
  ExprCube c_;
};

Algebroid tangent_bundle(std::size_t n);
Algebroid lie_algebra(const Grid3<double>& structure_constants);

// The map epsilon of the algebroid in coordinates:
//   (x, xi = pi, xdot^b = rho^b_k y^k, xidot_j = c^k_{ij} y^i pi_k + sigma^a_j p_a).
TangentDualPoint structure_map(const Algebroid& alg, const CotangentPoint& q);

// Matrix of the fibrewise-linear tensor on E* in coordinate order
// (xi_1..xi_m, x^1..x^n): the [xi,xi] block is c^k_{ij} xi_k, the
// [xi_i, x^b] block is rho^b_i, the [x^a, xi_j] block is -sigma^a_j.
MatD structure_tensor(const Algebroid& alg, std::span<const double> x,
                   std::span<const double> xi);

// Bracket of sections:
//   [X,Y]^k = c^k_{ij} f^i g^j + rho^a_i f^i dg^k/dx^a - sigma^a_j g^j df^k/dx^a.
Section bracket(const Algebroid& alg, const Section& X, const Section& Y);

struct AnchorPair {
  ExprMat left;   // rho
  ExprMat right;  // sigma
};
AnchorPair anchors(const Algebroid& alg);

enum class ConnectionKind { General, LeftConnection, RightConnection, BothTrivial };
ConnectionKind classify_connection(const Algebroid& alg,
                                   const std::vector<std::vector<double>>& samples,
                                   double tol = 1e-12);
std::string to_string(ConnectionKind kind);

// Algebroid whose tensor is the pointwise transpose:
//   c+^k_{ij} = c^k_{ji}, rho+ = -sigma, sigma+ = -rho.
Algebroid adjoint(const Algebroid& alg);

CheckResult check_skew(const Algebroid& alg,
                       const std::vector<std::vector<double>>& samples,
                       double tol = 1e-12);

// Skew-symmetry, vanishing basis-section Jacobiators, and the anchor
// homomorphism condition, all tested by evaluation at the samples.
CheckResult check_lie(const Algebroid& alg,
                      const std::vector<std::vector<double>>& samples,
                      double tol = 1e-12);

// Pushes the structure through the fibre isomorphism Phi (m x m, entries in
// x): the result satisfies bracket'(Phi X, Phi Y) = Phi bracket(X, Y) and
// anchors' o Phi = anchors. phi_inv must be the pointwise inverse of phi.
Algebroid transport(const Algebroid& alg, const ExprMat& phi, const ExprMat& phi_inv,
                    const std::vector<std::vector<double>>& samples,
                    double tol = 1e-10);

}  // namespace algmech

#endif

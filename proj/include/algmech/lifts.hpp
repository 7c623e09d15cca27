#ifndef ALGMECH_LIFTS_HPP
#define ALGMECH_LIFTS_HPP

#include "algmech/algebroid.hpp"

namespace algmech {

// Contravariant 2-tensor field K = K^{ij}(x) e_i (x) e_j on the base.
struct TensorField2 {
  ExprMat coeffs;  // m x m, entries in x
  bool symmetric = false;
};

// Vector field on the total space E, components over d/dx^a and d/dy^i,
// entries in (x, y).
struct VectorFieldOnE {
  std::vector<Expr> dx;  // n entries
  std::vector<Expr> dy;  // m entries
};

// Contravariant 2-tensor on E; component order is fibre block first:
// indices 0..m-1 are d/dy^i, indices m..m+n-1 are d/dx^a.
struct Tensor2OnE {
  ExprMat comp;  // (m+n) x (m+n), entries in (x, y)
};

// Contravariant 2-tensor on E*, same ordering with d/dxi_i first;
// entries in (x, xi).
struct Tensor2OnDual {
  ExprMat comp;
};

// Vertical lifts: coefficients copied onto the d/dy legs.
VectorFieldOnE vertical_lift(const Algebroid& alg, const Section& X);
Tensor2OnE vertical_lift(const Algebroid& alg, const TensorField2& K);

// Complete lift of a base function: y^i rho^a_i(x) df/dx^a.
Expr complete_lift_function(const Algebroid& alg, const Expr& f);

// Complete lift of a section:
//   f^i sigma^a_i d/dx^a + (y^i rho^a_i df^k/dx^a + c^k_{ij} y^i f^j) d/dy^k.
VectorFieldOnE complete_lift_section(const Algebroid& alg, const Section& X);

// Complete lift of a 2-contravariant tensor, through the degree-0
// derivation rule on decomposables. Fibrewise linear in y.
Tensor2OnE complete_lift_tensor2(const Algebroid& alg, const TensorField2& K);

// Directional derivative of a function on E along a vector field on E.
Expr lie_derivative(const Algebroid& alg, const VectorFieldOnE& V, const Expr& F);

// Commutator of vector fields on E, [V,W]^A = V^B dW^A/dz^B - W^B dV^A/dz^B.
VectorFieldOnE commutator(const Algebroid& alg, const VectorFieldOnE& V,
                          const VectorFieldOnE& W);

}  // namespace algmech

#endif

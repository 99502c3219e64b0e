#pragma once

#include <functional>

#include "allax/lax.hpp"

namespace allax {

/// Spectral involution sqrt(beta/alpha)/z; omega(tau(z)) = omega(z).
Cx tau(Cx z, const ModelParams& p);

/// General left reflection matrix with coefficients a, b, c, d.
C2Matrix k_minus(Cx z, const BoundaryParams& bp, const ModelParams& p);

/// Diagonal right reflection matrix (vanishing fields at site N+1).
C2Matrix k_plus(Cx z, const ModelParams& p);

/// Operator norm of the four-term reflection-equation combination for the
/// candidate matrix function k. Vanishes for k_minus and for z -> k_plus(tau(z)).
double reflection_residual(const std::function<C2Matrix(Cx)>& k, Cx w, Cx z,
                           const ModelParams& p);

/// Double-row transfer tr(k+(z) L(z) k-(z) L(tau(z))^{-1}).
Cx double_row_transfer(const LatticeState& s, Cx z, const BoundaryParams& bp,
                       const ModelParams& p);

struct OpenCharges {
  Cx I0;  // coefficient of z^{-2N-4}
  Cx I1;  // coefficient of z^{-2N-2}
  Cx H;   // open Hamiltonian from the charge combination
};

/// Extracts the two leading charges of the double-row transfer and forms the
/// open Hamiltonian from them; cross-checks against the closed form to 1e-8
/// and throws NumericalError on disagreement.
OpenCharges open_charges_and_hamiltonian(const LatticeState& s, const BoundaryParams& bp,
                                         const ModelParams& p);

/// Closed form: bulk sum plus the boundary term B(q0, r0, q1, r1).
Cx open_hamiltonian_closed_form(const LatticeState& s, const BoundaryParams& bp,
                                const ModelParams& p);

/// Double-row time Lax matrix A(j, z) for 0 <= j <= N+1; traceless. Sites 0
/// and 1 carry the boundary-modified forms, N+1 the right-edge form.
C2Matrix boundary_lax(const LatticeState& s, int j, Cx z, const BoundaryParams& bp,
                      const ModelParams& p);

}  // namespace allax

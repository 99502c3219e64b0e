#pragma once

#include <map>

#include "allax/laurent.hpp"
#include "allax/model.hpp"

namespace allax {

/// Space Lax matrix (1-qr)^{-1/2} [[z, q],[r, 1/z]]; unit determinant.
///
/// A one-parameter family of normalisations (1-qr)^s exists, each with its
/// own r-matrix; only s = -1/2 is built here, the value for which the
/// r-matrix is symmetric in the auxiliary spaces.
C2Matrix ell(Cx qj, Cx rj, Cx z);

/// Classical r-matrix on C^2 (x) C^2; poles at z = +-1.
C4Matrix r_matrix(Cx z);

/// alpha z^2 + gamma + beta / z^2.
Cx omega(Cx z, const ModelParams& p);

/// Time Lax matrix of the bulk flow; traceless by construction.
C2Matrix time_lax_A(Cx qj, Cx rj, Cx qjm1, Cx rjm1, Cx z, const ModelParams& p);

/// Ordered product ell(N)...ell(0).
C2Matrix monodromy(const LatticeState& s, Cx z);

/// Trace of the single-row monodromy.
Cx transfer(const LatticeState& s, Cx z);

/// Conserved charges of the periodic chain.
struct ChargeSet {
  Cx C;                 // product charge prod (1-qr)^{-1/2}
  std::map<int, Cx> I;  // Laurent charges of the transfer, exponents -N-1..N+1 step 2
};

ChargeSet transfer_and_charges(const LatticeState& s, const ModelParams& p);

/// 2 sum_j (-alpha r_j q_{j+1} - beta q_j r_{j+1} + gamma ln(1-q_j r_j)),
/// periodic wraparound.
Cx hamiltonian_periodic(const LatticeState& s, const ModelParams& p);

}  // namespace allax

#pragma once

#include <functional>
#include <span>

#include "allax/dynamics.hpp"

namespace allax {

/// Gauge matrix concentrated at site 0; unit determinant.
C2Matrix gauge_G(Cx q0, Cx r0, const BoundaryParams& bp, Cx z);

/// Time-dependent reflection matrix in the extrinsic variables. Equals
/// G(z) k^-(z) G(tau(z))^{-1} when (q0, r0) is the branch-matched preimage
/// of (Q0, R0).
C2Matrix K_minus_td(Cx Q0, Cx R0, Cx z, const BoundaryParams& bp, const ModelParams& p);

/// Extrinsic time Lax matrix at site 0: the bulk form fed with the ghost
/// values from the closure.
C2Matrix extrinsic_A0(const ExtrinsicState& e, Cx z, const ModelParams& p);

struct F1Root {
  Cx value;
  int multiplicity = 1;
  bool is_real = false;
};

/// All roots of the factored quartic constraint on f1_inf, via the four
/// quadratic factors in closed form.
std::vector<F1Root> f1_infinity_roots(const BoundaryParams& bp, const ModelParams& p);

/// Diagonal entry of the Backlund matrix at infinity:
/// f z + a b f / (alpha (f^2 - c d) z) - c d beta / (alpha f z^3).
Cx phi(Cx z, Cx f1inf, const BoundaryParams& bp, const ModelParams& p);

/// Field pair on the full line as functions of (site, time).
struct FieldFns {
  std::function<Cx(int, double)> Q, R;
};

/// Mirror-image fields: Qt_j = -(beta/alpha)^{1/2+j} Q_{-j-1} and
/// Rt_j = -(alpha/beta)^{1/2+j} R_{-j-1}.
FieldFns fold(const FieldFns& f, const ModelParams& p);

/// Soliton spectrum on the half lattice: zeros zeta_n (|zeta_n| > 1) with
/// norming constants D_n, the chosen real root f1inf, and the boundary data.
struct DiscreteData {
  std::vector<Cx> zetas;
  std::vector<Cx> Ds;
  double f1inf = 1.0;
  BoundaryParams bp;

  int k() const { return static_cast<int>(zetas.size()); }
  void validate() const;
};

double F_infinity(const DiscreteData& dd);
Cx s11_trace(Cx z, const DiscreteData& dd);
Cx s11_derivative(Cx z, const DiscreteData& dd);
Cx s22_trace(Cx z, const DiscreteData& dd);

/// The 2k zeros/norming constants of both analyticity regions generated by
/// the model, reduction and folding symmetries. Stored in extended precision;
/// the accessors round to double. Cm/Cbarm hold the norming constants of the
/// mirror-image solution (same zeros, constants scaled by phi(z_n)/phi(1/z_n)),
/// used to evaluate the deep mirror side where the direct determinant
/// representation degrades.
struct OctetData {
  std::vector<CxL> z, zbar, C, Cbar;
  std::vector<CxL> Cm, Cbarm;

  int pairs() const { return static_cast<int>(z.size()); }
  Cx z_at(int n) const { return Cx(static_cast<double>(z[n].real()), static_cast<double>(z[n].imag())); }
  Cx zbar_at(int n) const { return Cx(static_cast<double>(zbar[n].real()), static_cast<double>(zbar[n].imag())); }
  Cx C_at(int n) const { return Cx(static_cast<double>(C[n].real()), static_cast<double>(C[n].imag())); }
  Cx Cbar_at(int n) const { return Cx(static_cast<double>(Cbar[n].real()), static_cast<double>(Cbar[n].imag())); }
};

OctetData octet_expand(const DiscreteData& dd, const ModelParams& p);

/// Q_j(t) of the k-soliton solution; defined for every integer j. The
/// 2k x 2k system is solved by partial-pivot elimination with condition
/// monitoring (throws NumericalError past 1e12).
Cx soliton_solution(const OctetData& oct, int j, double t, const ModelParams& p);

/// Full-line field functions of the soliton solution under the dnls
/// reduction (R = nu conj(Q)).
FieldFns soliton_fields(const OctetData& oct, const ModelParams& p);

/// Max over the samples of the time-dependent boundary-closure residual at
/// the ghost site, on the branch configured in dd.bp. The Robin sub-case is
/// checked through its linear closure instead.
double verify_boundary(const DiscreteData& dd, std::span<const double> t_samples,
                       const ModelParams& p);

/// Coefficient block of the Backlund ansatz at one site.
struct BacklundCoeffs {
  Cx f1, f2, g1, g2, x1, x2, y1, y2;
};

/// Seed values fixing B(0, t, z) = K^-(z) on the configured branch.
BacklundCoeffs backlund_seeds(Cx Q0, Cx R0, const BoundaryParams& bp, const ModelParams& p);

/// Field values of both solutions around one site, as consumed by the
/// ansatz, the recursion and the constraints.
struct BacklundStencil {
  Cx qm2, rm2, qm, rm, q, r, qp, rp;
  Cx qtm2, rtm2, qtm, rtm, qt, rt, qtp, rtp;
};

BacklundStencil backlund_stencil(const FieldFns& plain, const FieldFns& mirror, int j,
                                 double t);

C2Matrix backlund_matrix(const BacklundStencil& st, const BacklundCoeffs& co, Cx z);

/// Coefficients at j+1 from those at j (stencil taken at j).
BacklundCoeffs backlund_advance(const BacklundStencil& st, const BacklundCoeffs& co);

/// Coefficients at j from those at j+1 (stencil taken at j).
BacklundCoeffs backlund_retreat(const BacklundStencil& st, const BacklundCoeffs& co);

/// Residual of the two scalar constraints tying the coefficients to the
/// fields at one site.
double backlund_constraint_residual(const BacklundStencil& st, const BacklundCoeffs& co);

struct BacklundScan {
  double recursion_residual = 0;   // gauge relation B(j+1) Lt(j) = L(j) B(j)
  double constraint_residual = 0;  // the two scalar constraints per site
  double det_spread = 0;           // variation of det B over the window
  double seed_matches_K = 0;       // |B(0,t,z) - K^-(z)|
  double time_eq_residual = 0;     // dB(0)/dt vs A(0,z) B - B A(0,tau(z))
  double tail_equality = 0;        // |B(+J) - B(-J)|
  double tail_asymptote = 0;       // |B(+J) - diag(phi(z), phi(tau(z)))|
  double tail_field = 0;           // max |Q| at the window edges
  double symB_residual = 0;        // B(j,z) J^j B(-j,tau(z)) J^-j = phi phi_tau I
};

/// Runs the seeded two-sided recursion over j in [-J, J] at time t for each
/// spectral point in zs, in extended precision internally, and reports every
/// residual of the folding construction.
BacklundScan backlund_scan(const DiscreteData& dd, const ModelParams& p, int J, double t,
                           std::span<const Cx> zs);

}  // namespace allax

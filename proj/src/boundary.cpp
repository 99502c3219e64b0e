#include "allax/boundary.hpp"

#include <cmath>
#include <numbers>

namespace allax {

namespace {

const Cx kI(0.0, 1.0);

Cx boundary_denominator(const LatticeState& s, const BoundaryParams& bp) {
  const Cx den = bp.a + bp.d * s.q[0] - bp.c * s.r[0];
  if (std::abs(den) < kFieldFloor)
    throw SingularError("boundary: a + d q0 - c r0 below floor");
  return den;
}

}  // namespace

Cx tau(Cx z, const ModelParams& p) {
  if (z == Cx(0)) throw SingularError("tau: z must be nonzero");
  return std::sqrt(p.beta / p.alpha) / z;
}

C2Matrix k_minus(Cx z, const BoundaryParams& bp, const ModelParams& p) {
  if (z == Cx(0)) throw SingularError("k_minus: z must be nonzero");
  const Cx sab = std::sqrt(p.alpha / p.beta);
  const Cx sba = Cx(1) / sab;
  const Cx z2 = z * z;
  return {bp.a * z + bp.b / (p.alpha * z), bp.c * (z2 * sab - sba / z2),
          bp.d * (z2 - p.beta / (p.alpha * z2)),
          bp.a * sba / z + bp.b * z / std::sqrt(p.alpha * p.beta)};
}

C2Matrix k_plus(Cx z, const ModelParams& p) {
  if (z == Cx(0)) throw SingularError("k_plus: z must be nonzero");
  return {z, Cx(0), Cx(0), std::sqrt(p.beta / p.alpha) / z};
}

double reflection_residual(const std::function<C2Matrix(Cx)>& k, Cx w, Cx z,
                           const ModelParams& p) {
  const Cx tw = tau(w, p), tz = tau(z, p);
  const C2Matrix I2 = C2Matrix::identity();
  const C4Matrix ka = kron(k(w), I2);
  const C4Matrix kb = kron(I2, k(z));
  const C4Matrix X = r_matrix(w / z) * ka * kb + ka * kb * r_matrix(tw / tz) -
                     ka * r_matrix(tw / z) * kb - kb * r_matrix(w / tz) * ka;
  return X.max_abs();
}

Cx double_row_transfer(const LatticeState& s, Cx z, const BoundaryParams& bp,
                       const ModelParams& p) {
  if (s.topology == Topology::periodic)
    throw ValidationError("double_row_transfer: open topology required");
  const C2Matrix L = monodromy(s, z);
  const C2Matrix Lt = monodromy(s, tau(z, p));
  return (k_plus(z, p) * L * k_minus(z, bp, p) * Lt.inverse()).trace();
}

Cx open_hamiltonian_closed_form(const LatticeState& s, const BoundaryParams& bp,
                                const ModelParams& p) {
  s.validate();
  if (s.N() < 1) throw ValidationError("open_hamiltonian: needs at least two sites");
  const int N = s.N();
  Cx H = 0;
  for (int j = 0; j < N; ++j)
    H += -2.0 * (p.alpha * s.r[j] * s.q[j + 1] + p.beta * s.q[j] * s.r[j + 1]);
  for (int j = 0; j <= N; ++j) H += 2.0 * p.gamma * std::log(Cx(1) - s.q[j] * s.r[j]);
  const Cx den = boundary_denominator(s, bp);
  const Cx bb = bp.b + p.alpha * bp.d * s.q[1] - p.beta * bp.c * s.r[1];
  H += -2.0 * (Cx(1) - s.q[0] * s.r[0]) * bb / den - 2.0 * p.gamma * std::log(den);
  return H;
}

OpenCharges open_charges_and_hamiltonian(const LatticeState& s, const BoundaryParams& bp,
                                         const ModelParams& p) {
  s.validate();
  const int N = s.N();
  // The two wanted charges sit at the deepest negative exponents; sampling
  // on the reciprocal circle keeps their relative extraction error at
  // roundoff level even for large N. The window must still span every
  // exponent of the expansion or the high end would alias into the low end.
  const auto f = [&](Cx z) { return double_row_transfer(s, z, bp, p); };
  const auto series = laurent_extract(f, -2 * N - 4, 2 * N + 4, 1.0 / 1.3);

  OpenCharges out;
  out.I0 = series.coeff(-2 * N - 4);
  out.I1 = series.coeff(-2 * N - 2);
  if (std::abs(out.I0) < kFieldFloor)
    throw SingularError("open_charges: leading charge I0 vanishes");
  const Cx norm = std::pow(p.alpha / p.beta, (static_cast<double>(N) + 3.0) / 2.0);
  out.H = -2.0 * p.beta * out.I1 / out.I0 - 2.0 * p.gamma * std::log(norm * out.I0);

  // The two routes take principal logarithms of a product and of its
  // factors, so they may differ by the additive lattice 4 pi i gamma Z.
  // That constant never enters flows or drift monitoring; the cross-check
  // compares modulo the lattice.
  const Cx closed = open_hamiltonian_closed_form(s, bp, p);
  Cx diff = out.H - closed;
  if (p.gamma != Cx(0)) {
    const Cx step = Cx(0.0, 4.0 * std::numbers::pi) * p.gamma;
    diff -= std::round((diff / step).real()) * step;
  }
  if (std::abs(diff) > 1e-8 * std::max(1.0, std::abs(closed)))
    throw NumericalError("open_charges: charge-based Hamiltonian disagrees with closed form");
  return out;
}

C2Matrix boundary_lax(const LatticeState& s, int j, Cx z, const BoundaryParams& bp,
                      const ModelParams& p) {
  if (s.topology == Topology::periodic)
    throw ValidationError("boundary_lax: open topology required");
  const int N = s.N();
  if (j < 0 || j > N + 1)
    throw ValidationError("boundary_lax: site index out of range 0..N+1");
  if (z == Cx(0)) throw SingularError("boundary_lax: z must be nonzero");

  if (j >= 2 && j <= N)
    return time_lax_A(s.q[j], s.r[j], s.q[j - 1], s.r[j - 1], z, p);

  const Cx w = omega(z, p);
  if (j == N + 1) {
    return {kI * w, kI * (-2.0 * p.beta * s.q[N] / z), kI * (2.0 * p.alpha * s.r[N] * z),
            -kI * w};
  }

  const Cx den = boundary_denominator(s, bp);
  const Cx u = Cx(1) - s.q[0] * s.r[0];

  if (j == 1) {
    // Bulk form plus the site-1 boundary correction. The off-diagonal
    // entries carry the same factor 2 as every other off-diagonal here.
    const Cx diag = p.beta * bp.c * s.r[1] - p.alpha * bp.d * s.q[1];
    const C2Matrix corr{kI * u / den * diag, kI * u / den * 2.0 * p.beta * bp.c / z,
                        kI * u / den * 2.0 * p.alpha * bp.d * z, -kI * u / den * diag};
    return time_lax_A(s.q[1], s.r[1], s.q[0], s.r[0], z, p) + corr;
  }

  // j == 0
  const Cx bb = bp.b + p.alpha * bp.d * s.q[1] - p.beta * bp.c * s.r[1];
  const Cx t1 = w - u * bb / den;
  C2Matrix m1{bp.a, 2.0 * bp.c / z, 2.0 * bp.d * z, -bp.a};
  C2Matrix m2{Cx(1) + s.q[0] * s.r[0], 2.0 * s.q[0] / z, -2.0 * s.r[0] * z,
              -Cx(1) - s.q[0] * s.r[0]};
  const Cx cdq = bp.c * s.r[0] + bp.d * s.q[0];
  const Cx zz = p.alpha * z * z - p.beta / (z * z);
  C2Matrix m3{cdq * zz, 2.0 * p.alpha * (bp.c - bp.a * s.q[0] + bp.c * s.q[0] * s.r[0]) * z,
              2.0 * p.beta * (bp.d + bp.a * s.r[0] + bp.d * s.q[0] * s.r[0]) / z, -cdq * zz};
  return (kI / den) * (t1 * m1 + bp.b * m2 - m3);
}

}  // namespace allax

#include "allax/lax.hpp"

#include <cmath>

namespace allax {

namespace {
const Cx kI(0.0, 1.0);
}

C2Matrix ell(Cx qj, Cx rj, Cx z) {
  if (z == Cx(0)) throw SingularError("ell: z must be nonzero");
  const Cx w = Cx(1) - qj * rj;
  if (std::abs(w) < kFieldFloor) throw SingularError("ell: 1 - q r below floor");
  const Cx f = Cx(1) / std::sqrt(w);  // principal branch
  return {f * z, f * qj, f * rj, f / z};
}

C4Matrix r_matrix(Cx z) {
  const Cx den = Cx(1) - z * z;
  if (std::abs(den) < kDetFloor) throw SingularError("r_matrix: pole at z = +-1");
  const Cx pref = kI / (2.0 * den);
  C4Matrix r;
  r(0, 0) = pref * (z * z + Cx(1));
  r(3, 3) = r(0, 0);
  r(1, 2) = pref * 2.0 * z;
  r(2, 1) = r(1, 2);
  return r;
}

Cx omega(Cx z, const ModelParams& p) {
  if (z == Cx(0)) throw SingularError("omega: z must be nonzero");
  return p.alpha * z * z + p.gamma + p.beta / (z * z);
}

C2Matrix time_lax_A(Cx qj, Cx rj, Cx qjm1, Cx rjm1, Cx z, const ModelParams& p) {
  if (z == Cx(0)) throw SingularError("time_lax_A: z must be nonzero");
  const Cx w = omega(z, p);
  const Cx diag = -p.beta * rj * qjm1 - p.alpha * qj * rjm1;
  return {kI * (w + diag), kI * (2.0 * p.alpha * z * qj - 2.0 * p.beta * qjm1 / z),
          kI * (2.0 * p.alpha * z * rjm1 - 2.0 * p.beta * rj / z), kI * (-w - diag)};
}

C2Matrix monodromy(const LatticeState& s, Cx z) {
  if (s.topology == Topology::half_infinite)
    throw ValidationError("monodromy: needs periodic or open topology");
  C2Matrix L = C2Matrix::identity();
  for (int j = 0; j <= s.N(); ++j) L = ell(s.q[j], s.r[j], z) * L;
  return L;
}

Cx transfer(const LatticeState& s, Cx z) { return monodromy(s, z).trace(); }

ChargeSet transfer_and_charges(const LatticeState& s, const ModelParams& p) {
  (void)p;
  if (s.topology != Topology::periodic)
    throw ValidationError("transfer_and_charges: periodic topology required");
  s.validate();
  const int N = s.N();

  ChargeSet out;
  out.C = Cx(1);
  for (int j = 0; j <= N; ++j) out.C /= std::sqrt(Cx(1) - s.q[j] * s.r[j]);

  const auto series = laurent_extract([&](Cx z) { return transfer(s, z); }, -(N + 1), N + 1);
  for (int n = -(N + 1); n <= N + 1; n += 2) out.I[n] = series.coeff(n);
  return out;
}

Cx hamiltonian_periodic(const LatticeState& s, const ModelParams& p) {
  if (s.topology != Topology::periodic)
    throw ValidationError("hamiltonian_periodic: periodic topology required");
  s.validate();
  const int N = s.N();
  Cx H = 0;
  for (int j = 0; j <= N; ++j) {
    const int jp = (j + 1) % (N + 1);
    H += -p.alpha * s.r[j] * s.q[jp] - p.beta * s.q[j] * s.r[jp] +
         p.gamma * std::log(Cx(1) - s.q[j] * s.r[j]);
  }
  return 2.0 * H;
}

}  // namespace allax

#include "allax/poisson.hpp"

#include <cmath>

namespace allax {

namespace {

const Cx kI(0.0, 1.0);

enum class Coord { q, r };

Cx partial(const Observable& F, const LatticeState& s, int j, Coord which, double h) {
  LatticeState sp = s, sm = s;
  auto& fp = which == Coord::q ? sp.q[j] : sp.r[j];
  auto& fm = which == Coord::q ? sm.q[j] : sm.r[j];
  fp += h;
  fm -= h;
  const Cx val = (F.eval(sp) - F.eval(sm)) / (2.0 * h);
  if (!std::isfinite(val.real()) || !std::isfinite(val.imag()))
    throw NumericalError("bracket: non-finite evaluation of observable " + F.label);
  return val;
}

}  // namespace

Cx bracket(const Observable& F, const Observable& G, const LatticeState& s, double h) {
  s.validate();
  Cx total = 0;
  for (int j = 0; j <= s.N(); ++j) {
    const Cx Fq = partial(F, s, j, Coord::q, h);
    const Cx Fr = partial(F, s, j, Coord::r, h);
    const Cx Gq = partial(G, s, j, Coord::q, h);
    const Cx Gr = partial(G, s, j, Coord::r, h);
    total += kI * (Cx(1) - s.q[j] * s.r[j]) * (Fq * Gr - Fr * Gq);
  }
  return total;
}

FlowRhs hamiltonian_flow_rhs(const Observable& H, const LatticeState& s, double h) {
  s.validate();
  FlowRhs rhs;
  rhs.dq.resize(s.sites());
  rhs.dr.resize(s.sites());
  for (int j = 0; j <= s.N(); ++j) {
    const Cx Hq = partial(H, s, j, Coord::q, h);
    const Cx Hr = partial(H, s, j, Coord::r, h);
    const Cx w = kI * (Cx(1) - s.q[j] * s.r[j]);
    // {H, q_j} = -i(1-qr) dH/dr_j ; {H, r_j} = i(1-qr) dH/dq_j
    rhs.dq[j] = -w * Hr;
    rhs.dr[j] = w * Hq;
  }
  return rhs;
}

}  // namespace allax

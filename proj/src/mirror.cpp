#include "allax/mirror.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace allax {

namespace {

template <class T>
using Cp = std::complex<T>;

/// Model/boundary constants lifted to scalar type T.
template <class T>
struct ParamsT {
  Cp<T> a, b, c, d, alpha, beta, gamma;
  int eps;  // closure branch sign

  static ParamsT from(const BoundaryParams& bp, const ModelParams& p) {
    const auto up = [](Cx v) { return Cp<T>(static_cast<T>(v.real()), static_cast<T>(v.imag())); };
    return {up(bp.a), up(bp.b), up(bp.c), up(bp.d),
            up(p.alpha), up(p.beta), up(p.gamma), branch_sign(bp.branch)};
  }
};

template <class T>
Cp<T> omega_T(Cp<T> z, const ParamsT<T>& pp) {
  return pp.alpha * z * z + pp.gamma + pp.beta / (z * z);
}

template <class T>
Cp<T> closure_root_T(const ParamsT<T>& pp, Cp<T> u) {
  return std::sqrt(Cp<T>(4) * pp.c * pp.d * u + pp.a * pp.a);
}

template <class T>
Cp<T> phi_T(Cp<T> z, Cp<T> f1, const ParamsT<T>& pp) {
  const Cp<T> cd = pp.c * pp.d;
  const Cp<T> den = f1 * f1 - cd;
  if (std::abs(den) < 1e-12 || std::abs(f1) < 1e-12)
    throw SingularError("phi: degenerate root, f1inf^2 = c d or f1inf = 0");
  return f1 * z + pp.a * pp.b * f1 / (pp.alpha * den * z) -
         cd * pp.beta / (pp.alpha * f1 * z * z * z);
}

template <class T>
Mat2<Cp<T>> scrL_T(Cp<T> Q, Cp<T> R, Cp<T> z) {
  const Cp<T> f = Cp<T>(1) / std::sqrt(Cp<T>(1) - Q * R);
  return {f * z, f * Q, f * R, f / z};
}

template <class T>
Mat2<Cp<T>> K_td_T(Cp<T> Q0, Cp<T> R0, Cp<T> z, const ParamsT<T>& pp) {
  const Cp<T> u = Cp<T>(1) - Q0 * R0;
  const Cp<T> S = closure_root_T(pp, u);
  const Cp<T> sab = std::sqrt(pp.alpha / pp.beta);
  Mat2<Cp<T>> K{pp.a * z + pp.b / (pp.alpha * z), Cp<T>(0), Cp<T>(0),
                pp.a / (sab * z) + pp.b * z / std::sqrt(pp.alpha * pp.beta)};
  const Cp<T> pref = (pp.beta / (pp.alpha * z * z) - z * z) *
                     (pp.a + Cp<T>(static_cast<T>(pp.eps)) * S) / (Cp<T>(2) * u);
  K += pref * Mat2<Cp<T>>{Cp<T>(1) / z, Q0 * sab, -R0, -z * sab};
  return K;
}

/// Bulk-form time Lax matrix in type T with explicit neighbour values.
template <class T>
Mat2<Cp<T>> A_bulk_T(Cp<T> Qj, Cp<T> Rj, Cp<T> Qjm1, Cp<T> Rjm1, Cp<T> z,
                     const ParamsT<T>& pp) {
  const Cp<T> i(0, 1);
  const Cp<T> w = omega_T(z, pp);
  const Cp<T> diag = -pp.beta * Rj * Qjm1 - pp.alpha * Qj * Rjm1;
  return {i * (w + diag), i * (Cp<T>(2) * pp.alpha * z * Qj - Cp<T>(2) * pp.beta * Qjm1 / z),
          i * (Cp<T>(2) * pp.alpha * z * Rjm1 - Cp<T>(2) * pp.beta * Rj / z), i * (-w - diag)};
}

template <class T>
struct StencilT {
  Cp<T> qm2, rm2, qm, rm, q, r, qp, rp;
  Cp<T> qtm2, rtm2, qtm, rtm, qt, rt, qtp, rtp;
};

template <class T>
struct CoeffsT {
  Cp<T> f1, f2, g1, g2, x1, x2, y1, y2;
};

template <class T>
Mat2<Cp<T>> bmatrix_T(const StencilT<T>& s, const CoeffsT<T>& c, Cp<T> z) {
  const Cp<T> z2 = z * z;
  Mat2<Cp<T>> B{z * c.f1 + c.g1 / z, c.f1 * s.qt - c.f2 * s.q,
                -c.g1 * s.r + c.g2 * s.rt, z * c.f2 + c.g2 / z};
  B += (c.x1 / z2) * Mat2<Cp<T>>{Cp<T>(1) / z, -s.qtm,
                                 -s.r - z2 * s.rp * (Cp<T>(1) - s.q * s.r), z * s.r * s.qtm};
  B += (c.x2 / z2) * Mat2<Cp<T>>{z * s.rt * s.qm, s.qm,
                                 s.rt + z2 * s.rtp * (Cp<T>(1) - s.qt * s.rt), Cp<T>(1) / z};
  B += (z2 * c.y2) * Mat2<Cp<T>>{s.q * s.rtm / z, -s.q - s.qp * (Cp<T>(1) - s.r * s.q) / z2,
                                 -s.rtm, z};
  B += (z2 * c.y1) * Mat2<Cp<T>>{z, s.qt + s.qtp * (Cp<T>(1) - s.rt * s.qt) / z2,
                                 s.rm, s.qt * s.rm / z};
  return B;
}

template <class T>
Cp<T> stretch_T(const StencilT<T>& s) {
  const Cp<T> num = Cp<T>(1) - s.r * s.q;
  const Cp<T> den = Cp<T>(1) - s.rt * s.qt;
  if (std::abs(num) < 1e-12 || std::abs(den) < 1e-12)
    throw SingularError("backlund: 1 - r q vanishing along the recursion");
  return std::sqrt(num / den);
}

template <class T>
CoeffsT<T> advance_T(const StencilT<T>& s, const CoeffsT<T>& c) {
  const Cp<T> sj = stretch_T(s);
  CoeffsT<T> n;
  n.x1 = c.x1 * sj;
  n.y2 = c.y2 * sj;
  n.y1 = c.y1 / sj;
  n.x2 = c.x2 / sj;
  n.f1 = (c.f1 + c.y1 * (s.q * s.rm - s.qtp * s.rt)) / sj;
  n.g2 = (c.g2 + c.x2 * (s.qm * s.r - s.qt * s.rtp)) / sj;
  n.g1 = (c.g1 + c.x1 * (s.qtm * s.rt - s.q * s.rp)) * sj;
  n.f2 = (c.f2 + c.y2 * (s.qt * s.rtm - s.qp * s.r)) * sj;
  return n;
}

template <class T>
CoeffsT<T> retreat_T(const StencilT<T>& s, const CoeffsT<T>& c) {
  const Cp<T> sj = stretch_T(s);
  CoeffsT<T> n;
  n.x1 = c.x1 / sj;
  n.y2 = c.y2 / sj;
  n.y1 = c.y1 * sj;
  n.x2 = c.x2 * sj;
  n.f1 = c.f1 * sj - n.y1 * (s.q * s.rm - s.qtp * s.rt);
  n.g2 = c.g2 * sj - n.x2 * (s.qm * s.r - s.qt * s.rtp);
  n.g1 = c.g1 / sj - n.x1 * (s.qtm * s.rt - s.q * s.rp);
  n.f2 = c.f2 / sj - n.y2 * (s.qt * s.rtm - s.qp * s.r);
  return n;
}

template <class T>
T constraints_T(const StencilT<T>& s, const CoeffsT<T>& c) {
  const Cp<T> one(1);
  const Cp<T> c1 = (c.f1 * s.qt - c.f2 * s.q - c.y2 * s.qp * (one - s.q * s.r) +
                    c.y1 * s.qtp * (one - s.qt * s.rt)) -
                   (c.g2 * s.qm - c.g1 * s.qtm - c.x1 * s.qtm2 * (one - s.qtm * s.rtm) +
                    c.x2 * s.qm2 * (one - s.qm * s.rm));
  const Cp<T> c2 = (c.g2 * s.rt - c.g1 * s.r - c.x1 * s.rp * (one - s.q * s.r) +
                    c.x2 * s.rtp * (one - s.qt * s.rt)) -
                   (c.f1 * s.rm - c.f2 * s.rtm - c.y2 * s.rtm2 * (one - s.qtm * s.rtm) +
                    c.y1 * s.rm2 * (one - s.qm * s.rm));
  return std::max(std::abs(c1), std::abs(c2));
}

template <class T>
CoeffsT<T> seeds_T(Cp<T> Q0, Cp<T> R0, const ParamsT<T>& pp) {
  const Cp<T> u = Cp<T>(1) - Q0 * R0;
  const Cp<T> S = closure_root_T(pp, u);
  const Cp<T> cd = pp.c * pp.d;
  CoeffsT<T> c;
  c.y1 = 0;
  c.x2 = 0;
  c.g1 = pp.b / pp.alpha;
  c.f2 = pp.b / std::sqrt(pp.alpha * pp.beta);
  // The seed diagonal carries the opposite sign of the closure branch.
  c.f1 = (pp.a - Cp<T>(static_cast<T>(pp.eps)) * S) / Cp<T>(2);
  c.g2 = std::sqrt(pp.beta / pp.alpha) * c.f1;
  if (cd == Cp<T>(0)) {
    c.y2 = 0;
    c.x1 = 0;
  } else {
    if (std::abs(c.f1) < 1e-12)
      throw SingularError("backlund_seeds: vanishing f1 seed on this branch");
    c.y2 = -std::sqrt(pp.alpha / pp.beta) * cd / c.f1;
    c.x1 = -(pp.beta / pp.alpha) * cd / c.f1;
  }
  return c;
}

// --- soliton machinery in extended precision ---

CxL omega_L(CxL z, const ModelParams& p) {
  const CxL al(p.alpha.real(), p.alpha.imag());
  const CxL be(p.beta.real(), p.beta.imag());
  const CxL ga(p.gamma.real(), p.gamma.imag());
  return al * z * z + ga + be / (z * z);
}

CxL pow2j(CxL base, long e) { return std::pow(base, static_cast<long double>(e)); }

/// Factor lists of s11 in extended precision; the derivative is assembled by
/// the product rule so that evaluation at a spectrum zero stays regular.
struct S11Parts {
  std::vector<CxL> nums, dens;
  long double Finf;
};

S11Parts s11_parts(CxL z, const std::vector<CxL>& zetas) {
  S11Parts out;
  out.Finf = 1;
  for (const auto& zn : zetas) {
    out.Finf *= std::norm(zn) * std::norm(zn);
    out.nums.push_back(z * z - zn * zn);
    out.nums.push_back(z * z - std::conj(zn) * std::conj(zn));
    out.dens.push_back(z * z - CxL(1) / (std::conj(zn) * std::conj(zn)));
    out.dens.push_back(z * z - CxL(1) / (zn * zn));
  }
  return out;
}

CxL s11_L(CxL z, const std::vector<CxL>& zetas) {
  const auto parts = s11_parts(z, zetas);
  CxL v(1.0L / parts.Finf);
  for (const auto& n : parts.nums) v *= n;
  for (const auto& d : parts.dens) {
    if (std::abs(d) < 1e-14L) throw SingularError("s11: evaluation at a pole");
    v /= d;
  }
  return v;
}

CxL s11_deriv_L(CxL z, const std::vector<CxL>& zetas) {
  const auto parts = s11_parts(z, zetas);
  CxL P(1), Q(1);
  for (const auto& n : parts.nums) P *= n;
  for (const auto& d : parts.dens) Q *= d;
  if (std::abs(Q) < 1e-14L) throw SingularError("s11_derivative: evaluation at a pole");
  CxL Pp(0), Qp(0);
  for (std::size_t i = 0; i < parts.nums.size(); ++i) {
    CxL term = CxL(2) * z;
    for (std::size_t j = 0; j < parts.nums.size(); ++j)
      if (j != i) term *= parts.nums[j];
    Pp += term;
  }
  for (std::size_t i = 0; i < parts.dens.size(); ++i) {
    CxL term = CxL(2) * z;
    for (std::size_t j = 0; j < parts.dens.size(); ++j)
      if (j != i) term *= parts.dens[j];
    Qp += term;
  }
  return (Pp * Q - P * Qp) / (CxL(parts.Finf) * Q * Q);
}

struct SolitonEval {
  CxL value;
  long double quality;  // smallest pivot of the equilibrated solve, in [0, 1]
};

SolitonEval soliton_eval_core(const OctetData& oct, const std::vector<CxL>& Cs,
                              const std::vector<CxL>& Cbs, int j, long double t,
                              const ModelParams& p) {
  const int n2 = oct.pairs();
  if (n2 == 0) return {CxL(0), 1.0L};

  std::vector<CxL> omz(n2), omzb(n2);
  for (int n = 0; n < n2; ++n) {
    omz[n] = omega_L(oct.z[n], p);
    omzb[n] = omega_L(oct.zbar[n], p);
  }

  // mu-bar with the phase signs that make Q solve the stated equations
  std::vector<CxL> mu(static_cast<std::size_t>(n2) * n2);
  const CxL i2(0, 2);
  for (int n = 0; n < n2; ++n) {
    const CxL rown = Cbs[n] * pow2j(oct.zbar[n], 2L * (j + 1));
    for (int l = 0; l < n2; ++l) {
      CxL s(0);
      for (int pq = 0; pq < n2; ++pq) {
        const CxL num = Cs[pq] * rown * pow2j(oct.z[pq], -2L * j) *
                        std::exp(-i2 * (omz[pq] - omzb[n]) * t);
        const CxL den = (oct.zbar[n] * oct.zbar[n] - oct.z[pq] * oct.z[pq]) *
                        (oct.z[pq] * oct.z[pq] - oct.zbar[l] * oct.zbar[l]);
        s += num / den;
      }
      mu[static_cast<std::size_t>(n) * n2 + l] = (n == l ? CxL(1) : CxL(0)) - CxL(4) * s;
    }
  }

  std::vector<CxL> v(n2);
  for (int n = 0; n < n2; ++n)
    v[n] = Cbs[n] * pow2j(oct.zbar[n], 2L * j) * std::exp(i2 * omzb[n] * t);

  // Two-sided equilibration: the rows and columns carry exponential phase
  // factors spread over many orders of magnitude (the bound states separate
  // in time) while the scaled system stays solvable.
  const auto at = [&](int rr, int cc) -> CxL& {
    return mu[static_cast<std::size_t>(rr) * n2 + cc];
  };
  for (int rr = 0; rr < n2; ++rr) {
    long double rowmax = 0;
    for (int cc = 0; cc < n2; ++cc) rowmax = std::max(rowmax, std::abs(at(rr, cc)));
    if (rowmax == 0) throw NumericalError("soliton_solution: mu-bar has a zero row");
    for (int cc = 0; cc < n2; ++cc) at(rr, cc) /= rowmax;
    v[rr] /= rowmax;
  }
  // partial-pivot elimination; the worst pivot of the equilibrated system is
  // the quality figure used for route selection
  long double quality = 1.0L;
  for (int col = 0; col < n2; ++col) {
    int piv = col;
    long double best = std::abs(at(col, col));
    for (int rr = col + 1; rr < n2; ++rr) {
      if (std::abs(at(rr, col)) > best) {
        best = std::abs(at(rr, col));
        piv = rr;
      }
    }
    if (best == 0) return {CxL(0), 0.0L};
    if (piv != col) {
      for (int cc = 0; cc < n2; ++cc) std::swap(at(piv, cc), at(col, cc));
      std::swap(v[piv], v[col]);
    }
    const CxL pivval = at(col, col);
    quality = std::min(quality, std::abs(pivval));
    for (int rr = col + 1; rr < n2; ++rr) {
      const CxL f = at(rr, col) / pivval;
      if (f == CxL(0)) continue;
      for (int cc = col; cc < n2; ++cc) at(rr, cc) -= f * at(col, cc);
      v[rr] -= f * v[col];
    }
  }
  std::vector<CxL> x(n2);
  for (int rr = n2 - 1; rr >= 0; --rr) {
    CxL s = v[rr];
    for (int cc = rr + 1; cc < n2; ++cc) s -= at(rr, cc) * x[cc];
    x[rr] = s / at(rr, rr);
  }
  CxL q(0);
  for (const auto& xi : x) q += xi;
  return {CxL(-2) * q, quality};
}

/// The determinant representation is anchored at j -> +infinity; for sites
/// deep on the mirror side its rows lose the identity part to the phase
/// growth. There the folding symmetry supplies the same value through the
/// mirror solution evaluated at -j-1 (same zeros, rescaled norming
/// constants). The usable windows of the two routes overlap around the
/// origin; the value comes from the route whose equilibrated solve keeps the
/// larger worst pivot, and only a solve with essentially no headroom is an
/// error.
CxL soliton_eval_L(const OctetData& oct, int j, long double t, const ModelParams& p) {
  if (oct.pairs() == 0) return CxL(0);
  const auto a = soliton_eval_core(oct, oct.C, oct.Cbar, j, t, p);
  if (a.quality > 1e-3L) return a.value;
  SolitonEval b = soliton_eval_core(oct, oct.Cm, oct.Cbarm, -j - 1, t, p);
  b.value = -b.value;
  const auto& pick = b.quality > a.quality ? b : a;
  if (pick.quality < 1e-12L)
    throw NumericalError("soliton_solution: mu-bar ill-conditioned (estimate > 1e12)");
  return pick.value;
}

Cx down(CxL v) { return Cx(static_cast<double>(v.real()), static_cast<double>(v.imag())); }
CxL up(Cx v) { return CxL(v.real(), v.imag()); }

}  // namespace

C2Matrix gauge_G(Cx q0, Cx r0, const BoundaryParams& bp, Cx z) {
  if (z == Cx(0)) throw SingularError("gauge_G: z must be nonzero");
  const Cx rad = (bp.a + bp.d * q0) * (bp.a - bp.c * r0) + bp.c * bp.d;
  if (std::abs(rad) < kFieldFloor) throw SingularError("gauge_G: singular normalisation");
  const Cx f = Cx(1) / std::sqrt(rad);
  return {f * (bp.a + bp.d * q0), f * bp.c / z, -f * bp.d * z, f * (bp.a - bp.c * r0)};
}

C2Matrix K_minus_td(Cx Q0, Cx R0, Cx z, const BoundaryParams& bp, const ModelParams& p) {
  if (z == Cx(0)) throw SingularError("K_minus_td: z must be nonzero");
  if (std::abs(Cx(1) - Q0 * R0) < kFieldFloor)
    throw SingularError("K_minus_td: 1 - Q0 R0 below floor");
  const auto pp = ParamsT<double>::from(bp, p);
  return K_td_T<double>(Q0, R0, z, pp);
}

C2Matrix extrinsic_A0(const ExtrinsicState& e, Cx z, const ModelParams& p) {
  const auto [Qm1, Rm1] = ghost_closure(e, p);
  return time_lax_A(e.Q[0], e.R[0], Qm1, Rm1, z, p);
}

std::vector<F1Root> f1_infinity_roots(const BoundaryParams& bp, const ModelParams& p) {
  const Cx cd = bp.c * bp.d;
  const Cx bs = bp.b / std::sqrt(p.alpha * p.beta);
  std::vector<Cx> raw;
  for (const Cx& lin : {bp.a, -bp.a, bs, -bs}) {
    // f^2 + lin f - cd = 0
    const Cx disc = std::sqrt(lin * lin + 4.0 * cd);
    raw.push_back((-lin + disc) / 2.0);
    raw.push_back((-lin - disc) / 2.0);
  }
  std::vector<F1Root> out;
  for (const Cx& r : raw) {
    bool merged = false;
    for (auto& o : out) {
      if (std::abs(o.value - r) < 1e-12) {
        ++o.multiplicity;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back({r, 1, std::abs(r.imag()) < 1e-12});
  }
  return out;
}

Cx phi(Cx z, Cx f1inf, const BoundaryParams& bp, const ModelParams& p) {
  if (z == Cx(0)) throw SingularError("phi: z must be nonzero");
  const auto pp = ParamsT<double>::from(bp, p);
  return phi_T<double>(z, f1inf, pp);
}

FieldFns fold(const FieldFns& f, const ModelParams& p) {
  const Cx ratio = p.beta / p.alpha;
  FieldFns out;
  out.Q = [f, ratio](int j, double t) {
    return -std::pow(ratio, 0.5 + j) * f.Q(-j - 1, t);
  };
  out.R = [f, ratio](int j, double t) {
    return -std::pow(Cx(1) / ratio, 0.5 + j) * f.R(-j - 1, t);
  };
  return out;
}

void DiscreteData::validate() const {
  if (zetas.size() != Ds.size())
    throw ValidationError("DiscreteData: zetas and Ds must have the same length");
  for (const auto& z : zetas)
    if (std::abs(z) <= 1.0)
      throw ValidationError("DiscreteData: every zeta must satisfy |zeta| > 1");
  // simple-zero requirement across the whole symmetrized spectrum
  std::vector<Cx> sq;
  for (const auto& z : zetas) {
    sq.push_back(z * z);
    sq.push_back(std::conj(z) * std::conj(z));
    sq.push_back(Cx(1) / (z * z));
    sq.push_back(Cx(1) / (std::conj(z) * std::conj(z)));
  }
  for (std::size_t i = 0; i < sq.size(); ++i)
    for (std::size_t j = i + 1; j < sq.size(); ++j)
      if (std::abs(sq[i] - sq[j]) < 1e-12)
        throw ValidationError("DiscreteData: coincident spectrum points (simple zeros required)");
  // chosen root must satisfy the reduced constraint
  const Cx cd = bp.c * bp.d;
  const Cx f(f1inf, 0.0);
  const Cx f2 = f * f;
  const Cx quart = ((f2 - cd) * (f2 - cd) - bp.a * bp.a * f2) *
                   ((f2 - cd) * (f2 - cd) - 4.0 * bp.b * bp.b * f2);
  if (std::abs(quart) > 1e-10)
    throw ValidationError("DiscreteData: f1inf is not a root of the closure constraint");
  if (std::abs(f2 - cd) < 1e-12)
    throw ValidationError("DiscreteData: f1inf^2 must differ from c d");
}

double F_infinity(const DiscreteData& dd) {
  double F = 1;
  for (const auto& z : dd.zetas) F *= std::norm(z) * std::norm(z);
  return F;
}

Cx s11_trace(Cx z, const DiscreteData& dd) {
  std::vector<CxL> zl;
  for (const auto& zz : dd.zetas) zl.push_back(up(zz));
  return down(s11_L(up(z), zl));
}

Cx s11_derivative(Cx z, const DiscreteData& dd) {
  std::vector<CxL> zl;
  for (const auto& zz : dd.zetas) zl.push_back(up(zz));
  return down(s11_deriv_L(up(z), zl));
}

Cx s22_trace(Cx z, const DiscreteData& dd) {
  // explicit product, independent of the s11 route
  const double F = F_infinity(dd);
  Cx v(1.0 / F, 0.0);
  for (const auto& zn : dd.zetas) {
    const Cx num = (z * z - Cx(1) / (std::conj(zn) * std::conj(zn))) * (z * z - Cx(1) / (zn * zn));
    const Cx den = (z * z - zn * zn) * (z * z - std::conj(zn) * std::conj(zn));
    if (std::abs(den) < 1e-14) throw SingularError("s22: evaluation at a pole");
    v *= std::norm(zn) * std::norm(zn) * std::norm(zn) * std::norm(zn) * num / den;
  }
  return v;
}

OctetData octet_expand(const DiscreteData& dd, const ModelParams& p) {
  dd.validate();
  dd.bp.validate_for(p);
  const int k = dd.k();

  std::vector<CxL> zl;
  for (const auto& zz : dd.zetas) zl.push_back(up(zz));
  const auto ppL = ParamsT<long double>::from(dd.bp, p);
  const CxL f1(static_cast<long double>(dd.f1inf), 0.0L);

  OctetData oct;
  oct.z.resize(2 * k);
  oct.zbar.resize(2 * k);
  oct.C.resize(2 * k);
  oct.Cbar.resize(2 * k);
  for (int n = 0; n < k; ++n) {
    const CxL zn = zl[n];
    const CxL Dn = up(dd.Ds[n]);
    const CxL sp = s11_deriv_L(zn, zl);
    const CxL ph_z = phi_T<long double>(zn, f1, ppL);
    const CxL ph_iz = phi_T<long double>(CxL(1) / zn, f1, ppL);
    if (std::abs(ph_z) < 1e-14L || std::abs(ph_iz) < 1e-14L)
      throw SingularError("octet_expand: phi vanishes at a spectrum point");

    oct.z[n] = zn;
    oct.z[n + k] = std::conj(zn);
    oct.zbar[n] = CxL(1) / zn;
    oct.zbar[n + k] = CxL(1) / std::conj(zn);
    oct.C[n] = Dn;
    oct.C[n + k] =
        -std::conj(ph_iz) / (std::conj(Dn) * std::conj(sp) * std::conj(sp) * std::conj(ph_z));
    oct.Cbar[n] = -ph_iz / (Dn * (zn * sp) * (zn * sp) * ph_z);
    oct.Cbar[n + k] = std::conj(Dn) / (std::conj(zn) * std::conj(zn));
  }
  // mirror-image constants: same zeros, both families scaled by phi(z)/phi(1/z)
  oct.Cm.resize(2 * k);
  oct.Cbarm.resize(2 * k);
  for (int n = 0; n < 2 * k; ++n) {
    const CxL m = phi_T<long double>(oct.z[n], f1, ppL) /
                  phi_T<long double>(CxL(1) / oct.z[n], f1, ppL);
    oct.Cm[n] = oct.C[n] * m;
    oct.Cbarm[n] = oct.Cbar[n] * m;
  }
  return oct;
}

Cx soliton_solution(const OctetData& oct, int j, double t, const ModelParams& p) {
  return down(soliton_eval_L(oct, j, static_cast<long double>(t), p));
}

FieldFns soliton_fields(const OctetData& oct, const ModelParams& p) {
  const double nu = p.reduction == Reduction::dnls ? p.nu : -1;
  FieldFns f;
  f.Q = [oct, p](int j, double t) {
    return down(soliton_eval_L(oct, j, static_cast<long double>(t), p));
  };
  f.R = [oct, p, nu](int j, double t) {
    return nu * std::conj(down(soliton_eval_L(oct, j, static_cast<long double>(t), p)));
  };
  return f;
}

double verify_boundary(const DiscreteData& dd, std::span<const double> t_samples,
                       const ModelParams& p) {
  const auto oct = octet_expand(dd, p);
  const auto ppL = ParamsT<long double>::from(dd.bp, p);
  double worst = 0;
  for (const double t : t_samples) {
    const long double tl = t;
    const CxL Qm1 = soliton_eval_L(oct, -1, tl, p);
    const CxL Q0 = soliton_eval_L(oct, 0, tl, p);
    const CxL Q1 = soliton_eval_L(oct, 1, tl, p);
    if (dd.bp.robin()) {
      // linear Robin closure: beta Q_{-1} + (b/a) Q_0 = 0
      worst = std::max(worst, static_cast<double>(std::abs(
                                  ppL.beta * Qm1 + (ppL.b / ppL.a) * Q0)));
      continue;
    }
    const long double nu = p.nu;
    const CxL u = CxL(1) - nu * Q0 * std::conj(Q0);
    const CxL S = std::sqrt(ppL.a * ppL.a + CxL(4) * ppL.c * ppL.d * u);
    const CxL pred = Q1 + (ppL.a * Q1 + CxL(2) * ppL.b * Q0) *
                              (ppL.a + CxL(static_cast<long double>(ppL.eps)) * S) /
                              (CxL(2) * ppL.c * ppL.d * u);
    worst = std::max(worst, static_cast<double>(std::abs(Qm1 - pred)));
  }
  return worst;
}

BacklundCoeffs backlund_seeds(Cx Q0, Cx R0, const BoundaryParams& bp, const ModelParams& p) {
  const auto pp = ParamsT<double>::from(bp, p);
  const auto c = seeds_T<double>(Q0, R0, pp);
  return {c.f1, c.f2, c.g1, c.g2, c.x1, c.x2, c.y1, c.y2};
}

BacklundStencil backlund_stencil(const FieldFns& plain, const FieldFns& mirror, int j,
                                 double t) {
  BacklundStencil s;
  s.qm2 = plain.Q(j - 2, t);
  s.rm2 = plain.R(j - 2, t);
  s.qm = plain.Q(j - 1, t);
  s.rm = plain.R(j - 1, t);
  s.q = plain.Q(j, t);
  s.r = plain.R(j, t);
  s.qp = plain.Q(j + 1, t);
  s.rp = plain.R(j + 1, t);
  s.qtm2 = mirror.Q(j - 2, t);
  s.rtm2 = mirror.R(j - 2, t);
  s.qtm = mirror.Q(j - 1, t);
  s.rtm = mirror.R(j - 1, t);
  s.qt = mirror.Q(j, t);
  s.rt = mirror.R(j, t);
  s.qtp = mirror.Q(j + 1, t);
  s.rtp = mirror.R(j + 1, t);
  return s;
}

namespace {

template <class T>
StencilT<T> lift(const BacklundStencil& s) {
  const auto u = [](Cx v) { return Cp<T>(static_cast<T>(v.real()), static_cast<T>(v.imag())); };
  return {u(s.qm2), u(s.rm2), u(s.qm), u(s.rm), u(s.q), u(s.r), u(s.qp), u(s.rp),
          u(s.qtm2), u(s.rtm2), u(s.qtm), u(s.rtm), u(s.qt), u(s.rt), u(s.qtp), u(s.rtp)};
}

template <class T>
CoeffsT<T> liftc(const BacklundCoeffs& c) {
  const auto u = [](Cx v) { return Cp<T>(static_cast<T>(v.real()), static_cast<T>(v.imag())); };
  return {u(c.f1), u(c.f2), u(c.g1), u(c.g2), u(c.x1), u(c.x2), u(c.y1), u(c.y2)};
}

BacklundCoeffs lower(const CoeffsT<double>& c) {
  return {c.f1, c.f2, c.g1, c.g2, c.x1, c.x2, c.y1, c.y2};
}

}  // namespace

C2Matrix backlund_matrix(const BacklundStencil& st, const BacklundCoeffs& co, Cx z) {
  return bmatrix_T<double>(lift<double>(st), liftc<double>(co), z);
}

BacklundCoeffs backlund_advance(const BacklundStencil& st, const BacklundCoeffs& co) {
  return lower(advance_T<double>(lift<double>(st), liftc<double>(co)));
}

BacklundCoeffs backlund_retreat(const BacklundStencil& st, const BacklundCoeffs& co) {
  return lower(retreat_T<double>(lift<double>(st), liftc<double>(co)));
}

double backlund_constraint_residual(const BacklundStencil& st, const BacklundCoeffs& co) {
  return constraints_T<double>(lift<double>(st), liftc<double>(co));
}

BacklundScan backlund_scan(const DiscreteData& dd, const ModelParams& p, int J, double t,
                           std::span<const Cx> zs) {
  const auto oct = octet_expand(dd, p);
  const auto ppL = ParamsT<long double>::from(dd.bp, p);
  const long double nu = p.reduction == Reduction::dnls ? p.nu : -1;

  // cached field values of the plain solution; mirror via the fold
  std::map<std::pair<int, int>, CxL> cache;  // (j, tick) -> Q, tick in {-1,0,1}
  const long double h = 1e-4L;
  const auto Qof = [&](int j, int tick) {
    const auto key = std::make_pair(j, tick);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const CxL v = soliton_eval_L(oct, j, static_cast<long double>(t) + tick * h, p);
    cache.emplace(key, v);
    return v;
  };
  const auto Rof = [&](int j, int tick) { return nu * std::conj(Qof(j, tick)); };
  const auto Qt = [&](int j, int tick) { return -Qof(-j - 1, tick); };
  const auto Rt = [&](int j, int tick) { return -Rof(-j - 1, tick); };

  const auto stencil_at = [&](int j, int tick) {
    StencilT<long double> s;
    s.qm2 = Qof(j - 2, tick);
    s.rm2 = Rof(j - 2, tick);
    s.qm = Qof(j - 1, tick);
    s.rm = Rof(j - 1, tick);
    s.q = Qof(j, tick);
    s.r = Rof(j, tick);
    s.qp = Qof(j + 1, tick);
    s.rp = Rof(j + 1, tick);
    s.qtm2 = Qt(j - 2, tick);
    s.rtm2 = Rt(j - 2, tick);
    s.qtm = Qt(j - 1, tick);
    s.rtm = Rt(j - 1, tick);
    s.qt = Qt(j, tick);
    s.rt = Rt(j, tick);
    s.qtp = Qt(j + 1, tick);
    s.rtp = Rt(j + 1, tick);
    return s;
  };

  // two-sided recursion from the seeds
  std::map<int, CoeffsT<long double>> co;
  co[0] = seeds_T<long double>(Qof(0, 0), Rof(0, 0), ppL);
  for (int j = 0; j < J; ++j) co[j + 1] = advance_T<long double>(stencil_at(j, 0), co[j]);
  for (int j = 0; j > -J; --j) co[j - 1] = retreat_T<long double>(stencil_at(j - 1, 0), co[j]);

  BacklundScan scan;
  const CxL f1(static_cast<long double>(dd.f1inf), 0.0L);

  for (int j = -J; j <= J; ++j) {
    const double cres =
        static_cast<double>(constraints_T<long double>(stencil_at(j, 0), co[j]));
    if (cres > 1e-8)
      throw NumericalError("backlund: field constraints violated at site j=" +
                           std::to_string(j) + " (residual " + std::to_string(cres) +
                           "; branch/f1inf mismatch?)");
    scan.constraint_residual = std::max(scan.constraint_residual, cres);
  }

  for (const Cx& zd : zs) {
    const CxL z = up(zd);
    const CxL tz = std::sqrt(ppL.beta / ppL.alpha) / z;

    std::map<int, Mat2<CxL>> B;
    for (int j = -J; j <= J; ++j) B[j] = bmatrix_T<long double>(stencil_at(j, 0), co[j], z);

    // gauge relation and determinant constancy
    const CxL det0 = B[0].det();
    for (int j = -J; j <= J; ++j) {
      scan.det_spread =
          std::max(scan.det_spread, static_cast<double>(std::abs(B[j].det() - det0)));
      if (j == J) break;
      const auto st = stencil_at(j, 0);
      const Mat2<CxL> L = scrL_T<long double>(st.q, st.r, z);
      const Mat2<CxL> Lt = scrL_T<long double>(st.qt, st.rt, z);
      const Mat2<CxL> res = B[j + 1] * Lt - L * B[j];
      scan.recursion_residual = std::max(scan.recursion_residual, res.max_abs());
    }

    // seed equals the time-dependent reflection matrix
    const Mat2<CxL> K = K_td_T<long double>(Qof(0, 0), Rof(0, 0), z, ppL);
    scan.seed_matches_K = std::max(scan.seed_matches_K, (B[0] - K).max_abs());

    // time equation at j = 0, derivative by central difference of the seeds
    const auto cop = seeds_T<long double>(Qof(0, 1), Rof(0, 1), ppL);
    const auto com = seeds_T<long double>(Qof(0, -1), Rof(0, -1), ppL);
    const Mat2<CxL> Bp = bmatrix_T<long double>(stencil_at(0, 1), cop, z);
    const Mat2<CxL> Bm = bmatrix_T<long double>(stencil_at(0, -1), com, z);
    const Mat2<CxL> dB = (Bp - Bm) * (CxL(1) / (2.0L * h));
    const Mat2<CxL> A0z = A_bulk_T<long double>(Qof(0, 0), Rof(0, 0), Qof(-1, 0), Rof(-1, 0), z, ppL);
    const Mat2<CxL> A0t = A_bulk_T<long double>(Qof(0, 0), Rof(0, 0), Qof(-1, 0), Rof(-1, 0), tz, ppL);
    scan.time_eq_residual =
        std::max(scan.time_eq_residual, (dB - (A0z * B[0] - B[0] * A0t)).max_abs());

    // tails
    scan.tail_equality = std::max(scan.tail_equality, (B[J] - B[-J]).max_abs());
    const Mat2<CxL> Binf{phi_T<long double>(z, f1, ppL), CxL(0), CxL(0),
                         phi_T<long double>(tz, f1, ppL)};
    scan.tail_asymptote = std::max(scan.tail_asymptote, (B[J] - Binf).max_abs());

    // folding symmetry of B against the reversed site at the involuted point
    const CxL scale = phi_T<long double>(z, f1, ppL) * phi_T<long double>(tz, f1, ppL);
    for (int j = 0; j <= J; ++j) {
      const Mat2<CxL> Bm2 = bmatrix_T<long double>(stencil_at(-j, 0), co[-j], tz);
      Mat2<CxL> prod = B[j] * Bm2;
      prod -= scale * Mat2<CxL>::identity();
      scan.symB_residual = std::max(scan.symB_residual, prod.max_abs());
    }
  }

  scan.tail_field = std::max({static_cast<double>(std::abs(Qof(J, 0))),
                              static_cast<double>(std::abs(Qof(-J - 1, 0)))});
  return scan;
}

}  // namespace allax

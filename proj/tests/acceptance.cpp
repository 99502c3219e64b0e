// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs everything from fixed seeds; no tolerance is configurable.

#include <chrono>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include "allax/io.hpp"
#include "allax/poisson.hpp"

using namespace allax;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& what, bool pass, double measured, double tol,
            double seconds) {
  std::printf("criterion %d [%s] %-46s measured %.3e  tol %.1e  (%.1fs)\n", criterion,
              pass ? "PASS" : "FAIL", what.c_str(), measured, tol, seconds);
  if (!pass) ++g_failures;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::mt19937_64 gen(2024);
Cx rc(double scale) {
  std::normal_distribution<double> n;
  return scale * Cx(n(gen), n(gen));
}
Cx annulus(double lo, double hi) {
  std::uniform_real_distribution<double> r(lo, hi), th(0, 2 * std::numbers::pi);
  return std::polar(r(gen), th(gen));
}
LatticeState random_state(int N, Topology topo, double scale) {
  std::vector<Cx> q(N + 1), r(N + 1);
  for (auto& v : q) v = rc(scale);
  for (auto& v : r) v = rc(scale);
  return LatticeState(q, r, topo);
}
LatticeState random_dnls_state(int N, Topology topo, double scale) {
  std::vector<Cx> q(N + 1), r(N + 1);
  for (int j = 0; j <= N; ++j) {
    q[j] = rc(scale);
    r[j] = -std::conj(q[j]);
  }
  return LatticeState(q, r, topo);
}

bool away_from_poles(std::initializer_list<Cx> ratios) {
  for (const Cx& x : ratios)
    if (std::abs(Cx(1) - x * x) < 0.3) return false;
  return true;
}

BoundaryParams fig1a_bp() {
  BoundaryParams bp;
  bp.a = 1.0;
  bp.b = -1.7;
  bp.d = Cx(1.1, 0.0);
  bp.c = std::conj(bp.d);
  bp.branch = Branch::minus;
  return bp;
}
DiscreteData fig1a_data() {
  DiscreteData dd;
  dd.zetas = {Cx(0.6, 1.9)};
  dd.Ds = {Cx(0.1, 0.0)};
  dd.bp = fig1a_bp();
  dd.f1inf = (1.0 + std::sqrt(1.0 + 4.0 * 1.21)) / 2.0;
  return dd;
}
BoundaryParams generic_bp() {
  BoundaryParams bp;
  bp.a = Cx(0.7, 0.3);
  bp.b = Cx(-1.1, 0.2);
  bp.c = Cx(0.4, -0.6);
  bp.d = Cx(0.9, 0.1);
  return bp;
}

C2Matrix dell_dt(Cx q, Cx r, Cx dq, Cx dr, Cx z) {
  const Cx w = Cx(1) - q * r;
  const Cx f = std::pow(w, -0.5);
  const Cx df = 0.5 * (dq * r + q * dr) * std::pow(w, -1.5);
  return {df * z, df * q + f * dq, df * r + f * dr, df / z};
}

// ---- criterion 1: Figure 1a reproduction ----
void criterion1() {
  Timer timer;
  const auto p = ModelParams::dnls(-1);
  const auto dd = fig1a_data();
  const auto oct = octet_expand(dd, p);

  const double h = 1e-4;
  double bulk = 0;
  for (int j = -1; j <= 40; ++j) {
    for (int it = 0; it <= 40; ++it) {
      const double t = -10.0 + 0.5 * it;
      const Cx d5 = (-soliton_solution(oct, j, t + 2 * h, p) +
                     8.0 * soliton_solution(oct, j, t + h, p) -
                     8.0 * soliton_solution(oct, j, t - h, p) +
                     soliton_solution(oct, j, t - 2 * h, p)) /
                    (12.0 * h);
      const Cx q0 = soliton_solution(oct, j, t, p);
      const Cx q1 = soliton_solution(oct, j + 1, t, p);
      const Cx qm = soliton_solution(oct, j - 1, t, p);
      const Cx rhs = Cx(0, 1) * (q1 - 2.0 * q0 + qm + std::norm(q0) * (q1 + qm));
      bulk = std::max(bulk, std::abs(d5 - rhs));
    }
  }

  std::vector<double> ts;
  for (int i = -10; i <= 10; ++i) ts.push_back(i);
  auto ddm = dd;
  ddm.bp.branch = Branch::minus;
  const double res_minus = verify_boundary(ddm, ts, p);
  ddm.bp.branch = Branch::plus;
  const double res_plus = verify_boundary(ddm, ts, p);
  const int certified = (res_minus < 1e-8 ? 1 : 0) + (res_plus < 1e-8 ? 1 : 0);

  const double secs = timer.elapsed();
  report(1, "figure-1a bulk equation on the (j,t) grid", bulk < 1e-6, bulk, 1e-6, secs);
  report(1, "figure-1a boundary closure on one branch",
         certified == 1 && std::min(res_minus, res_plus) < 1e-8,
         std::min(res_minus, res_plus), 1e-8, secs);
  report(1, "figure-1a runtime below 10 s", secs < 10.0, secs, 10.0, secs);
}

// ---- criterion 2: algebraic identity suite ----
void criterion2(bool corrupt, int tag) {
  Timer timer;
  const auto g = ModelParams::general(Cx(0.3, 0.15), Cx(0.8, -0.2), Cx(0.1, 0.05));
  auto bp = generic_bp();

  double worst = 0;
  const auto swap_spaces = [](const C4Matrix& m) {
    C4Matrix s;
    const auto pi = [](int i) { return 2 * (i & 1) + (i >> 1); };
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) s(pi(i), pi(j)) = m(i, j);
    return s;
  };
  for (int trial = 0; trial < 100; ++trial) {
    Cx w, z;
    do {
      w = annulus(0.5, 1.5);
      z = annulus(0.5, 1.5);
    } while (!away_from_poles({w, w / z, tau(w, g) / tau(z, g), tau(w, g) / z, w / tau(z, g)}));
    worst = std::max(worst, (r_matrix(w) + swap_spaces(r_matrix(Cx(1) / w))).max_abs());
    worst = std::max(worst, (r_matrix(w) - swap_spaces(r_matrix(w))).max_abs());
    const auto km = [&](Cx u) {
      C2Matrix k = k_minus(u, bp, g);
      if (corrupt) k(0, 1) += 1e-3;
      return k;
    };
    worst = std::max(worst, reflection_residual(km, w, z, g));
    worst = std::max(worst,
                     reflection_residual([&](Cx u) { return k_plus(tau(u, g), g); }, w, z, g));
    worst = std::max(worst, std::abs(omega(tau(z, g), g) - omega(z, g)));
  }

  if (!corrupt) {
    // Yang-Baxter on C^2 (x) C^2 (x) C^2
    using M8 = std::array<Cx, 64>;
    const auto embed = [](const C4Matrix& m, int sa, int sb) {
      M8 out{};
      const int sc = 3 - sa - sb;
      for (int i = 0; i < 8; ++i) {
        const int ib[3] = {(i >> 2) & 1, (i >> 1) & 1, i & 1};
        for (int j = 0; j < 8; ++j) {
          const int jb[3] = {(j >> 2) & 1, (j >> 1) & 1, j & 1};
          if (ib[sc] != jb[sc]) continue;
          out[8 * i + j] = m(2 * ib[sa] + ib[sb], 2 * jb[sa] + jb[sb]);
        }
      }
      return out;
    };
    const auto mul = [](const M8& a, const M8& b) {
      M8 c{};
      for (int i = 0; i < 8; ++i)
        for (int k = 0; k < 8; ++k) {
          const Cx aik = a[8 * i + k];
          if (aik == Cx(0)) continue;
          for (int j = 0; j < 8; ++j) c[8 * i + j] += aik * b[8 * k + j];
        }
      return c;
    };
    for (int trial = 0; trial < 100; ++trial) {
      Cx w, z, nu;
      do {
        w = annulus(0.5, 1.5);
        z = annulus(0.5, 1.5);
        nu = annulus(0.5, 1.5);
      } while (!away_from_poles({w / nu, z / nu, w / z}));
      const M8 rac = embed(r_matrix(w / nu), 0, 2);
      const M8 rbc = embed(r_matrix(z / nu), 1, 2);
      const M8 rab = embed(r_matrix(w / z), 0, 1);
      M8 total{};
      const auto acc = [&](const M8& x, const M8& y, double sign) {
        const M8 xy = mul(x, y);
        for (int i = 0; i < 64; ++i) total[i] += sign * xy[i];
      };
      acc(rac, rbc, 1.0);
      acc(rbc, rac, -1.0);
      acc(rab, rac, 1.0);
      acc(rac, rab, -1.0);
      acc(rab, rbc, 1.0);
      acc(rbc, rab, -1.0);
      for (const auto& v : total) worst = std::max(worst, std::abs(v));
    }
  }

  report(tag, corrupt ? "algebraic suite with corrupted k^- (must fail)"
                      : "algebraic identity suite at 100 random points",
         corrupt ? worst >= 1e-12 : worst < 1e-12, worst, 1e-12, timer.elapsed());
  if (!corrupt) report(2, "algebraic suite runtime below 5 s", timer.elapsed() < 5.0,
                       timer.elapsed(), 5.0, timer.elapsed());
}

// ---- criterion 3: Poisson-structure suite ----
void criterion3() {
  Timer timer;
  const auto p = ModelParams::dnls(-1);
  const auto bp = generic_bp();
  double worst = 0;

  // rll on N=1 states
  for (int trial = 0; trial < 3; ++trial) {
    const auto s = random_state(1, Topology::periodic, 0.3);
    const Cx w = annulus(0.7, 1.3), z = annulus(0.7, 1.3);
    C4Matrix lhs;
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 2; ++n)
        for (int pp = 0; pp < 2; ++pp)
          for (int qq = 0; qq < 2; ++qq) {
            Observable F{[=](const LatticeState& st) { return ell(st.q[0], st.r[0], w)(m, n); },
                         "la"};
            Observable G{[=](const LatticeState& st) { return ell(st.q[0], st.r[0], z)(pp, qq); },
                         "lb"};
            lhs(2 * m + pp, 2 * n + qq) = bracket(F, G, s);
          }
    const auto la = kron(ell(s.q[0], s.r[0], w), C2Matrix::identity());
    const auto lb = kron(C2Matrix::identity(), ell(s.q[0], s.r[0], z));
    worst = std::max(worst, (lhs - commutator(r_matrix(w / z), la * lb)).max_abs());
  }

  // involution of single- and double-row transfers; closed-form flows
  for (int trial = 0; trial < 3; ++trial) {
    const auto s = random_state(3, Topology::periodic, 0.2);
    const Cx w = annulus(0.95, 1.15), z = annulus(0.85, 0.98);
    Observable Fw{[=](const LatticeState& st) { return transfer(st, w); }, "tw"};
    Observable Fz{[=](const LatticeState& st) { return transfer(st, z); }, "tz"};
    worst = std::max(worst, std::abs(bracket(Fw, Fz, s)));

    const auto so = random_state(3, Topology::open, 0.2);
    Observable Bw{[&](const LatticeState& st) { return double_row_transfer(st, w, bp, p); },
                  "bw"};
    Observable Bz{[&](const LatticeState& st) { return double_row_transfer(st, z, bp, p); },
                  "bz"};
    worst = std::max(worst, std::abs(bracket(Bw, Bz, so)));

    Observable H{[&](const LatticeState& st) { return hamiltonian_periodic(st, p); }, "H"};
    const auto flow = hamiltonian_flow_rhs(H, s);
    const auto rhs = rhs_periodic(s, p);
    for (int j = 0; j <= s.N(); ++j) {
      worst = std::max(worst, std::abs(flow.dq[j] - rhs.dq[j]));
      worst = std::max(worst, std::abs(flow.dr[j] - rhs.dr[j]));
    }
    Observable HH{[&](const LatticeState& st) { return open_hamiltonian_closed_form(st, bp, p); },
                  "HH"};
    const auto oflow = hamiltonian_flow_rhs(HH, so);
    const auto orhs = rhs_open_intrinsic(so, bp, p);
    for (int j = 0; j <= so.N(); ++j) {
      worst = std::max(worst, std::abs(oflow.dq[j] - orhs.dq[j]));
      worst = std::max(worst, std::abs(oflow.dr[j] - orhs.dr[j]));
    }
  }
  report(3, "Poisson-structure suite on random states", worst < 1e-6, worst, 1e-6,
         timer.elapsed());
  report(3, "Poisson suite runtime below 60 s", timer.elapsed() < 60.0, timer.elapsed(), 60.0,
         timer.elapsed());
}

// ---- criterion 4: zero-curvature suite ----
void criterion4() {
  Timer timer;
  const auto p = ModelParams::dnls(-1);
  const auto bpg = generic_bp();
  double algebraic = 0;

  for (int trial = 0; trial < 5; ++trial) {
    const Cx z = annulus(0.6, 1.4);
    {
      const auto s = random_state(3, Topology::periodic, 0.3);
      const auto d = rhs_periodic(s, p);
      const int n = s.sites();
      for (int j = 0; j < n; ++j) {
        const int jp = (j + 1) % n, jm = (j - 1 + n) % n;
        const auto Aj = time_lax_A(s.q[j], s.r[j], s.q[jm], s.r[jm], z, p);
        const auto Ajp = time_lax_A(s.q[jp], s.r[jp], s.q[j], s.r[j], z, p);
        const auto lhs = dell_dt(s.q[j], s.r[j], d.dq[j], d.dr[j], z);
        algebraic = std::max(algebraic,
                             (lhs - (Ajp * ell(s.q[j], s.r[j], z) - ell(s.q[j], s.r[j], z) * Aj))
                                 .max_abs());
      }
    }
    {
      const auto s = random_state(4, Topology::open, 0.3);
      const auto d = rhs_open_intrinsic(s, bpg, p);
      for (int j = 0; j <= s.N(); ++j) {
        const auto Aj = boundary_lax(s, j, z, bpg, p);
        const auto Ajp = boundary_lax(s, j + 1, z, bpg, p);
        const auto lhs = dell_dt(s.q[j], s.r[j], d.dq[j], d.dr[j], z);
        algebraic = std::max(algebraic,
                             (lhs - (Ajp * ell(s.q[j], s.r[j], z) - ell(s.q[j], s.r[j], z) * Aj))
                                 .max_abs());
      }
      const Cx tz = tau(z, p);
      const auto km = k_minus(z, bpg, p);
      const auto kp = k_plus(z, p);
      algebraic = std::max(algebraic, (boundary_lax(s, 0, z, bpg, p) * km -
                                       km * boundary_lax(s, 0, tz, bpg, p))
                                          .max_abs());
      algebraic = std::max(algebraic, (boundary_lax(s, s.N() + 1, tz, bpg, p) * kp -
                                       kp * boundary_lax(s, s.N() + 1, z, bpg, p))
                                          .max_abs());
    }
    {
      const auto bp = fig1a_bp();
      auto s = random_dnls_state(6, Topology::open, 0.1);
      auto e = to_extrinsic(s, bp);
      e.bp = bp;
      const auto d = rhs_open_extrinsic(e, p);
      const auto [Qm1, Rm1] = ghost_closure(e, p);
      for (int j = 0; j < e.N(); ++j) {
        const Cx qm = j == 0 ? Qm1 : e.Q[j - 1];
        const Cx rm = j == 0 ? Rm1 : e.R[j - 1];
        const auto Aj = time_lax_A(e.Q[j], e.R[j], qm, rm, z, p);
        const auto Ajp = time_lax_A(e.Q[j + 1], e.R[j + 1], e.Q[j], e.R[j], z, p);
        const auto lhs = dell_dt(e.Q[j], e.R[j], d.dq[j], d.dr[j], z);
        algebraic = std::max(algebraic,
                             (lhs - (Ajp * ell(e.Q[j], e.R[j], z) - ell(e.Q[j], e.R[j], z) * Aj))
                                 .max_abs());
      }
    }
  }
  report(4, "zero-curvature suite (algebraic)", algebraic < 1e-10, algebraic, 1e-10,
         timer.elapsed());

  // time-dependent boundary relation with finite-difference dK/dt
  const auto bp = fig1a_bp();
  const auto s0 = random_dnls_state(10, Topology::open, 0.05);
  const auto e0 = to_extrinsic(s0, bp);
  const LatticeState se0(e0.Q, e0.R, Topology::open);
  IntegrateOptions io;
  io.dt = 1e-4;
  io.sample_stride = 1 << 30;
  io.monitors = false;
  const auto at_time = [&](double tt) {
    io.t_end = tt;
    const auto tr = integrate(se0, RhsKind::open_extrinsic, bp, p, io);
    ExtrinsicState e;
    e.Q = tr.qs.back();
    e.R = tr.rs.back();
    e.bp = bp;
    return e;
  };
  const double h = 1e-4;
  const Cx z(1.18, 0.37);
  const auto ep = at_time(0.3 + h), em = at_time(0.3 - h), ec = at_time(0.3);
  const auto Kp = K_minus_td(ep.Q[0], ep.R[0], z, bp, p);
  const auto Km = K_minus_td(em.Q[0], em.R[0], z, bp, p);
  const auto Kc = K_minus_td(ec.Q[0], ec.R[0], z, bp, p);
  const C2Matrix dK = (Kp - Km) * Cx(1.0 / (2.0 * h));
  const auto A0z = extrinsic_A0(ec, z, p);
  const auto A0t = extrinsic_A0(ec, tau(z, p), p);
  const double td = (dK - (A0z * Kc - Kc * A0t)).max_abs();
  report(4, "time-dependent boundary relation (FD in t)", td < 1e-6, td, 1e-6, timer.elapsed());
}

// ---- criterion 5: conservation and RK order ----
void criterion5() {
  Timer timer;
  const auto p = ModelParams::dnls(-1);
  const auto bp = fig1a_bp();
  const auto s0 = random_dnls_state(20, Topology::open, 0.1 / 3.0);  // |q| <= ~0.1

  IntegrateOptions io;
  io.t_end = 10.0;
  io.dt = 1e-3;
  io.sample_stride = 500;
  const auto tr = integrate(s0, RhsKind::open_intrinsic, bp, p, io);
  double drift = tr.aborted ? 1.0 : 0.0;
  const auto m0 = tr.monitors.front();
  for (const auto& m : tr.monitors) {
    drift = std::max(drift, std::abs(m.H - m0.H) / std::max(1.0, std::abs(m0.H)));
    drift = std::max(drift, std::abs(m.I0 - m0.I0) / std::max(1.0, std::abs(m0.I0)));
    drift = std::max(drift, std::abs(m.I1 - m0.I1) / std::max(1.0, std::abs(m0.I1)));
  }
  report(5, "open-chain conservation of H, I0, I1 to t=10", drift <= 1e-6, drift, 1e-6,
         timer.elapsed());

  const auto sp = random_state(4, Topology::periodic, 0.2);
  const double e1 = step_halving_error(sp, RhsKind::periodic, bp, p, 1.0, 2e-3);
  const double e2 = step_halving_error(sp, RhsKind::periodic, bp, p, 1.0, 1e-3);
  const double order = std::log2(e1 / e2);
  report(5, "measured one-step order 4 +- 0.2", order > 3.8 && order < 4.2, order, 4.2,
         timer.elapsed());
  report(5, "conservation runtime below 60 s", timer.elapsed() < 60.0, timer.elapsed(), 60.0,
         timer.elapsed());
}

// ---- criterion 6: picture equivalence ----
void criterion6() {
  Timer timer;
  const auto p = ModelParams::dnls(-1);
  const auto bp = fig1a_bp();
  const auto s0 = random_dnls_state(10, Topology::open, 0.05);
  const auto e0 = to_extrinsic(s0, bp);
  const LatticeState se0(e0.Q, e0.R, Topology::open);

  IntegrateOptions io;
  io.t_end = 5.0;
  io.dt = 1e-3;
  io.sample_stride = 500;
  io.monitors = false;
  const auto ti = integrate(s0, RhsKind::open_intrinsic, bp, p, io);
  const auto te = integrate(se0, RhsKind::open_extrinsic, bp, p, io);
  double worst = (ti.aborted || te.aborted) ? 1.0 : 0.0;
  for (std::size_t i = 0; i < ti.times.size(); ++i) {
    const LatticeState si(ti.qs[i], ti.rs[i], Topology::open);
    const auto em = to_extrinsic(si, bp);
    for (int j = 0; j <= si.N(); ++j) {
      worst = std::max(worst, std::abs(em.Q[j] - te.qs[i][j]));
      worst = std::max(worst, std::abs(em.R[j] - te.rs[i][j]));
    }
  }
  report(6, "intrinsic vs extrinsic over t in [0,5], N=10", worst < 1e-8, worst, 1e-8,
         timer.elapsed());
}

// ---- criterion 7: Backlund suite ----
void criterion7() {
  Timer timer;
  const auto p = ModelParams::dnls(-1);
  const auto dd = fig1a_data();
  const std::array<Cx, 2> zs = {Cx(1.23, 0.51), Cx(0.8, -0.35)};
  // J chosen so the tail fields sit below 1e-10; the window covers [-15, 15]
  const auto scan = backlund_scan(dd, p, 22, 0.4, zs);
  report(7, "backlund gauge relation over the window", scan.recursion_residual < 1e-10,
         scan.recursion_residual, 1e-10, timer.elapsed());
  report(7, "B(0,t,z) equals K^-(z)", scan.seed_matches_K < 1e-10, scan.seed_matches_K, 1e-10,
         timer.elapsed());
  report(7, "det B constant in j", scan.det_spread < 1e-10, scan.det_spread, 1e-10,
         timer.elapsed());
  report(7, "time equation at j=0 (FD)", scan.time_eq_residual < 1e-6, scan.time_eq_residual,
         1e-6, timer.elapsed());
  report(7, "tail fields below 1e-10 at the window edge", scan.tail_field < 1e-10,
         scan.tail_field, 1e-10, timer.elapsed());
  report(7, "tail equality B(-J) = B(+J)", scan.tail_equality < 1e-8, scan.tail_equality, 1e-8,
         timer.elapsed());
}

// ---- criterion 8: scattering-data suite ----
void criterion8() {
  Timer timer;
  const auto p = ModelParams::dnls(-1);
  const auto dd = fig1a_data();
  double sym = 0, unit = 0, prod = 0, robin = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Cx z = annulus(0.7, 1.4);
    sym = std::max(sym, std::abs(s11_trace(Cx(1) / z, dd) - s22_trace(z, dd)));
    const Cx zu = std::polar(1.0, std::uniform_real_distribution<double>(0, 6.28)(gen));
    unit = std::max(unit, std::abs(s11_trace(zu, dd) * s22_trace(zu, dd) - Cx(1)));
  }
  const auto oct = octet_expand(dd, p);
  for (int n = 0; n < oct.pairs(); ++n) {
    const Cx zn = oct.z_at(n);
    const Cx sp = s11_derivative(zn, dd);
    const Cx pred = -phi(Cx(1) / zn, dd.f1inf, dd.bp, p) /
                    ((zn * sp) * (zn * sp) * phi(zn, dd.f1inf, dd.bp, p));
    prod = std::max(prod, std::abs(oct.C_at(n) * oct.Cbar_at(n) - pred));
  }
  // Robin limit of f(z) = -phi(z)/phi(1/z)
  const double chi = 0.8;
  BoundaryParams rob;
  rob.a = -1.0;
  rob.b = 1.0 / (2.0 * chi);
  const double f1 = 2.0 * rob.b.real();
  for (int trial = 0; trial < 20; ++trial) {
    const Cx z = annulus(0.7, 1.4);
    const Cx f = -phi(z, f1, rob, p) / phi(Cx(1) / z, f1, rob, p);
    const Cx want = (z * chi * f1 * f1 - Cx(1) / z) / (z - chi * f1 * f1 / z);
    robin = std::max(robin, std::abs(f - want));
  }
  report(8, "s11(1/z) = s22(z) and unit determinant on |z|=1",
         sym < 1e-12 && unit < 1e-12, std::max(sym, unit), 1e-12, timer.elapsed());
  report(8, "octet product relation", prod < 1e-10, prod, 1e-10, timer.elapsed());
  report(8, "Robin limit of f(z)", robin < 1e-10, robin, 1e-10, timer.elapsed());
}

// ---- criterion 9: negative controls ----
void criterion9() {
  Timer timer;
  const auto p = ModelParams::dnls(-1);
  std::vector<double> ts;
  for (int i = -10; i <= 10; ++i) ts.push_back(i);

  // the octets are built from the reference parameters; the closure is then
  // tested against perturbed boundary parameters
  const auto dd = fig1a_data();
  const auto oct = octet_expand(dd, p);
  const auto residual_with = [&](BoundaryParams bp) {
    double worst = 0;
    for (double t : ts) {
      const Cx Qm1 = soliton_solution(oct, -1, t, p);
      const Cx Q0 = soliton_solution(oct, 0, t, p);
      const Cx Q1 = soliton_solution(oct, 1, t, p);
      const double u = 1.0 + std::norm(Q0);
      const double S = std::sqrt(std::norm(bp.a) + 4.0 * std::norm(bp.d) * u);
      const Cx pred = Q1 + (bp.a * Q1 + 2.0 * bp.b * Q0) * (bp.a + branch_sign(bp.branch) * S) /
                               (2.0 * std::norm(bp.d) * u);
      worst = std::max(worst, std::abs(Qm1 - pred));
    }
    return worst;
  };

  double weakest = 1e300;
  for (int which = 0; which < 3; ++which) {
    BoundaryParams bp = fig1a_bp();
    if (which == 0) bp.a += 1e-3;
    if (which == 1) bp.b += 1e-3;
    if (which == 2) {
      bp.d += 1e-3;
      bp.c = std::conj(bp.d);
    }
    weakest = std::min(weakest, residual_with(bp));
  }
  report(9, "boundary-parameter perturbations are detected", weakest > 1e-4, weakest, 1e-4,
         timer.elapsed());

  criterion2(true, 9);  // corrupted k^- must fail the reflection equation
}

}  // namespace

int main() {
  criterion1();
  criterion2(false, 2);
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (g_failures == 0) {
    std::printf("acceptance: all criteria PASS\n");
    return 0;
  }
  std::printf("acceptance: %d criterion check(s) FAILED\n", g_failures);
  return 1;
}

#include "allax/verify.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "allax/poisson.hpp"

namespace allax {

namespace {

const Cx kI(0.0, 1.0);

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  Cx cx(double scale) {
    std::normal_distribution<double> n;
    return scale * Cx(n(gen), n(gen));
  }
  Cx on_annulus(double rlo, double rhi) {
    return std::polar(uniform(rlo, rhi), uniform(0.0, 2.0 * std::numbers::pi));
  }
  std::vector<Cx> field(int n, double scale) {
    std::vector<Cx> v(n);
    for (auto& x : v) x = cx(scale);
    return v;
  }
};

// 8x8 workspace for the Yang-Baxter check on C^2 (x) C^2 (x) C^2.
struct M8 {
  std::array<Cx, 64> e{};
  Cx& operator()(int i, int j) { return e[8 * i + j]; }
  const Cx& operator()(int i, int j) const { return e[8 * i + j]; }

  friend M8 operator*(const M8& a, const M8& b) {
    M8 c;
    for (int i = 0; i < 8; ++i)
      for (int k = 0; k < 8; ++k) {
        const Cx aik = a(i, k);
        if (aik == Cx(0)) continue;
        for (int j = 0; j < 8; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }
  friend M8 operator-(M8 a, const M8& b) {
    for (int i = 0; i < 64; ++i) a.e[i] -= b.e[i];
    return a;
  }
  friend M8 operator+(M8 a, const M8& b) {
    for (int i = 0; i < 64; ++i) a.e[i] += b.e[i];
    return a;
  }
  double max_abs() const {
    double m = 0;
    for (const auto& v : e) m = std::max(m, std::abs(v));
    return m;
  }
};

/// Embeds a two-space operator into the (sa, sb) pair of three C^2 factors.
M8 embed(const C4Matrix& m, int sa, int sb) {
  M8 out;
  int sc = 3 - sa - sb;
  for (int i = 0; i < 8; ++i) {
    const int ib[3] = {(i >> 2) & 1, (i >> 1) & 1, i & 1};
    for (int j = 0; j < 8; ++j) {
      const int jb[3] = {(j >> 2) & 1, (j >> 1) & 1, j & 1};
      if (ib[sc] != jb[sc]) continue;
      out(i, j) = m(2 * ib[sa] + ib[sb], 2 * jb[sa] + jb[sb]);
    }
  }
  return out;
}

M8 comm8(const M8& a, const M8& b) { return a * b - b * a; }

C4Matrix space_swap(const C4Matrix& m) {
  C4Matrix s;
  const auto pi = [](int i) { return 2 * (i & 1) + (i >> 1); };
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s(pi(i), pi(j)) = m(i, j);
  return s;
}

C2Matrix dell_dt(Cx q, Cx r, Cx dq, Cx dr, Cx z) {
  const Cx w = Cx(1) - q * r;
  const Cx f = std::pow(w, -0.5);
  const Cx df = 0.5 * (dq * r + q * dr) * std::pow(w, -1.5);
  return {df * z, df * q + f * dq, df * r + f * dr, df / z};
}

LatticeState random_state(Rng& rng, int N, double scale, Topology topo) {
  return LatticeState(rng.field(N + 1, scale), rng.field(N + 1, scale), topo);
}

/// The r-matrix has poles at argument +-1; spectral points must keep every
/// ratio that will be formed away from them.
bool away_from_poles(std::initializer_list<Cx> ratios) {
  for (const Cx& x : ratios)
    if (std::abs(Cx(1) - x * x) < 0.3) return false;
  return true;
}

LatticeState random_dnls_state(Rng& rng, int N, double scale, Topology topo) {
  auto q = rng.field(N + 1, scale);
  std::vector<Cx> r(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) r[i] = -std::conj(q[i]);
  return LatticeState(std::move(q), std::move(r), topo);
}

BoundaryParams generic_boundary(Rng& rng) {
  BoundaryParams bp;
  bp.a = rng.cx(1.0);
  bp.b = rng.cx(1.0);
  bp.c = rng.cx(0.7);
  bp.d = rng.cx(0.7);
  bp.branch = Branch::minus;
  return bp;
}

DiscreteData reference_soliton() {
  DiscreteData dd;
  dd.zetas = {Cx(0.6, 1.9)};
  dd.Ds = {Cx(0.1, 0.0)};
  dd.bp.a = 1.0;
  dd.bp.b = -1.7;
  dd.bp.d = 1.1;
  dd.bp.c = std::conj(dd.bp.d);
  dd.bp.branch = Branch::minus;
  dd.f1inf = (1.0 + std::sqrt(1.0 + 4.0 * std::norm(dd.bp.d))) / 2.0;
  return dd;
}

}  // namespace

std::vector<CheckResult> run_identity_battery(const VerifyOptions& opt) {
  Rng rng(opt.seed);
  std::vector<CheckResult> out;
  const auto add = [&](const std::string& name, double res, double tol) {
    out.push_back({name, res, tol, res <= tol});
  };

  const ModelParams dnls = ModelParams::dnls(-1);
  const ModelParams generic = ModelParams::general(Cx(0.3, 0.15), Cx(0.8, -0.2), Cx(0.1, 0.05));

  // --- exact r-matrix algebra ---
  {
    double yb = 0, skew = 0, sym = 0;
    for (int trial = 0; trial < opt.algebraic_trials; ++trial) {
      Cx w, z, nu;
      do {
        w = rng.on_annulus(0.4, 1.6);
        z = rng.on_annulus(0.4, 1.6);
        nu = rng.on_annulus(0.4, 1.6);
      } while (!away_from_poles({w / nu, z / nu, w / z, w}));
      const M8 rac = embed(r_matrix(w / nu), 0, 2);
      const M8 rbc = embed(r_matrix(z / nu), 1, 2);
      const M8 rab = embed(r_matrix(w / z), 0, 1);
      yb = std::max(yb, (comm8(rac, rbc) + comm8(rab, rac) + comm8(rab, rbc)).max_abs());
      skew = std::max(skew, (r_matrix(w) + space_swap(r_matrix(Cx(1) / w))).max_abs());
      sym = std::max(sym, (r_matrix(w) - space_swap(r_matrix(w))).max_abs());
    }
    add("yang_baxter", yb, 1e-12);
    add("r_skew_symmetry", skew, 1e-12);
    add("r_space_symmetry", sym, 1e-12);
  }

  // --- reflection equation, involution of tau and omega ---
  {
    double rkm = 0, rkp = 0, invol = 0;
    BoundaryParams bp = generic_boundary(rng);
    if (opt.corrupt_kminus) bp.c += 1e-3;  // breaks the c,d pairing inside k^-
    const auto km = [&](Cx z) {
      C2Matrix k = k_minus(z, bp, generic);
      if (opt.corrupt_kminus) k(0, 1) += 1e-3;
      return k;
    };
    const auto kp = [&](Cx z) { return k_plus(tau(z, generic), generic); };
    for (int trial = 0; trial < opt.algebraic_trials; ++trial) {
      Cx w, z;
      do {
        w = rng.on_annulus(0.5, 1.5);
        z = rng.on_annulus(0.5, 1.5);
      } while (!away_from_poles(
          {w / z, tau(w, generic) / tau(z, generic), tau(w, generic) / z, w / tau(z, generic)}));
      rkm = std::max(rkm, reflection_residual(km, w, z, generic));
      rkp = std::max(rkp, reflection_residual(kp, w, z, generic));
      invol = std::max(invol, std::abs(omega(tau(z, generic), generic) - omega(z, generic)));
      invol = std::max(invol, std::abs(tau(tau(z, generic), generic) - z));
    }
    add("reflection_equation_k_minus", rkm, 1e-12);
    add("reflection_equation_k_plus_tau", rkp, 1e-12);
    add("omega_tau_involution", invol, 1e-12);
  }

  // --- Poisson structure ---
  {
    double rll = 0;
    for (int trial = 0; trial < opt.state_trials; ++trial) {
      const auto s = random_state(rng, 1, 0.3, Topology::periodic);
      const Cx w = rng.on_annulus(0.7, 1.3), z = rng.on_annulus(0.7, 1.3);
      C4Matrix lhs;
      for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n)
          for (int pp = 0; pp < 2; ++pp)
            for (int qq = 0; qq < 2; ++qq) {
              Observable F{[=](const LatticeState& st) { return ell(st.q[0], st.r[0], w)(m, n); }, "l_a"};
              Observable G{[=](const LatticeState& st) { return ell(st.q[0], st.r[0], z)(pp, qq); }, "l_b"};
              lhs(2 * m + pp, 2 * n + qq) = bracket(F, G, s);
            }
      const C4Matrix la = kron(ell(s.q[0], s.r[0], w), C2Matrix::identity());
      const C4Matrix lb = kron(C2Matrix::identity(), ell(s.q[0], s.r[0], z));
      const C4Matrix rhs = commutator(r_matrix(w / z), la * lb);
      rll = std::max(rll, (lhs - rhs).max_abs());
    }
    add("rll_poisson_algebra", rll, 1e-6);

    double tt = 0, bb = 0;
    const BoundaryParams bp = generic_boundary(rng);
    for (int trial = 0; trial < opt.state_trials; ++trial) {
      // moderate amplitudes keep the finite-difference cancellation noise
      // well inside the 1e-6 bracket budget
      const auto s = random_state(rng, 2, 0.2, Topology::periodic);
      // |b(z)| grows like |z|^(2N+4); points near the unit circle keep the
      // evaluations O(1) and the difference noise inside the budget
      const Cx w = rng.on_annulus(0.95, 1.15), z = rng.on_annulus(0.85, 0.98);
      Observable Fw{[=](const LatticeState& st) { return transfer(st, w); }, "t(w)"};
      Observable Fz{[=](const LatticeState& st) { return transfer(st, z); }, "t(z)"};
      tt = std::max(tt, std::abs(bracket(Fw, Fz, s)));

      auto so = s;
      so.topology = Topology::open;
      Observable Bw{[=](const LatticeState& st) { return double_row_transfer(st, w, bp, dnls); }, "b(w)"};
      Observable Bz{[=](const LatticeState& st) { return double_row_transfer(st, z, bp, dnls); }, "b(z)"};
      bb = std::max(bb, std::abs(bracket(Bw, Bz, so)));
    }
    add("transfer_involution", tt, 1e-6);
    add("double_row_involution", bb, 1e-6);
  }

  // --- Hamiltonian flows against closed-form right-hand sides ---
  {
    double per = 0, open = 0, dual = 0;
    const BoundaryParams bp = generic_boundary(rng);
    for (int trial = 0; trial < opt.state_trials; ++trial) {
      const auto s = random_state(rng, 3, 0.3, Topology::periodic);
      Observable H{[&](const LatticeState& st) { return hamiltonian_periodic(st, dnls); }, "H"};
      const auto flow = hamiltonian_flow_rhs(H, s);
      const auto rhs = rhs_periodic(s, dnls);
      for (int j = 0; j <= s.N(); ++j) {
        per = std::max(per, std::abs(flow.dq[j] - rhs.dq[j]));
        per = std::max(per, std::abs(flow.dr[j] - rhs.dr[j]));
      }

      auto so = random_state(rng, 3, 0.3, Topology::open);
      Observable HH{[&](const LatticeState& st) {
                      return open_hamiltonian_closed_form(st, bp, dnls);
                    },
                    "HH"};
      const auto oflow = hamiltonian_flow_rhs(HH, so);
      const auto orhs = rhs_open_intrinsic(so, bp, dnls);
      for (int j = 0; j <= so.N(); ++j) {
        open = std::max(open, std::abs(oflow.dq[j] - orhs.dq[j]));
        open = std::max(open, std::abs(oflow.dr[j] - orhs.dr[j]));
      }
      const auto oc = open_charges_and_hamiltonian(so, bp, dnls);
      Cx d = oc.H - open_hamiltonian_closed_form(so, bp, dnls);
      const Cx step = Cx(0.0, 4.0 * std::numbers::pi) * dnls.gamma;
      d -= std::round((d / step).real()) * step;
      dual = std::max(dual, std::abs(d));
    }
    add("periodic_rhs_vs_poisson_flow", per, 1e-6);
    add("open_rhs_vs_poisson_flow", open, 1e-6);
    add("open_hamiltonian_dual_route", dual, 1e-8);
  }

  // --- zero curvature: bulk, open, boundary relations, extrinsic ---
  {
    double bulk = 0, openzc = 0, bnd = 0, ext = 0;
    const BoundaryParams bpg = generic_boundary(rng);
    for (int trial = 0; trial < opt.state_trials; ++trial) {
      const Cx z = rng.on_annulus(0.6, 1.4);
      {
        const auto s = random_state(rng, 3, 0.3, Topology::periodic);
        const auto d = rhs_periodic(s, dnls);
        const int n = s.sites();
        for (int j = 0; j < n; ++j) {
          const int jp = (j + 1) % n, jm = (j - 1 + n) % n;
          const auto Aj = time_lax_A(s.q[j], s.r[j], s.q[jm], s.r[jm], z, dnls);
          const auto Ajp = time_lax_A(s.q[jp], s.r[jp], s.q[j], s.r[j], z, dnls);
          const auto lhs = dell_dt(s.q[j], s.r[j], d.dq[j], d.dr[j], z);
          const auto rhs = Ajp * ell(s.q[j], s.r[j], z) - ell(s.q[j], s.r[j], z) * Aj;
          bulk = std::max(bulk, (lhs - rhs).max_abs());
        }
      }
      {
        const auto s = random_state(rng, 4, 0.3, Topology::open);
        const auto d = rhs_open_intrinsic(s, bpg, dnls);
        for (int j = 0; j <= s.N(); ++j) {
          const auto Aj = boundary_lax(s, j, z, bpg, dnls);
          const auto Ajp = boundary_lax(s, j + 1, z, bpg, dnls);
          const auto lhs = dell_dt(s.q[j], s.r[j], d.dq[j], d.dr[j], z);
          const auto rhs = Ajp * ell(s.q[j], s.r[j], z) - ell(s.q[j], s.r[j], z) * Aj;
          openzc = std::max(openzc, (lhs - rhs).max_abs());
        }
        const Cx tz = tau(z, dnls);
        const auto km = k_minus(z, bpg, dnls);
        const auto kpz = k_plus(z, dnls);
        bnd = std::max(bnd, (boundary_lax(s, 0, z, bpg, dnls) * km -
                             km * boundary_lax(s, 0, tz, bpg, dnls))
                                .max_abs());
        bnd = std::max(bnd, (boundary_lax(s, s.N() + 1, tz, bpg, dnls) * kpz -
                             kpz * boundary_lax(s, s.N() + 1, z, bpg, dnls))
                                .max_abs());
      }
      {
        // extrinsic picture with a dnls-compatible boundary
        BoundaryParams bp;
        bp.a = 1.0;
        bp.b = -1.7;
        bp.d = Cx(1.1, 0.0);
        bp.c = std::conj(bp.d);
        bp.branch = Branch::minus;
        auto s = random_dnls_state(rng, 6, 0.1, Topology::open);
        ExtrinsicState e = to_extrinsic(s, bp);
        const auto d = rhs_open_extrinsic(e, dnls);
        const auto [Qm1, Rm1] = ghost_closure(e, dnls);
        const int N = e.N();
        for (int j = 0; j < N; ++j) {
          const Cx qm = j == 0 ? Qm1 : e.Q[j - 1];
          const Cx rm = j == 0 ? Rm1 : e.R[j - 1];
          const auto Aj = time_lax_A(e.Q[j], e.R[j], qm, rm, z, dnls);
          const auto Ajp = time_lax_A(e.Q[j + 1], e.R[j + 1], e.Q[j], e.R[j], z, dnls);
          const auto lhs = dell_dt(e.Q[j], e.R[j], d.dq[j], d.dr[j], z);
          const auto rhs = Ajp * ell(e.Q[j], e.R[j], z) - ell(e.Q[j], e.R[j], z) * Aj;
          ext = std::max(ext, (lhs - rhs).max_abs());
        }
      }
    }
    add("zero_curvature_bulk", bulk, 1e-10);
    add("zero_curvature_open", openzc, 1e-10);
    add("boundary_zero_curvature_relations", bnd, 1e-10);
    add("zero_curvature_extrinsic", ext, 1e-10);
  }

  // --- time-dependent boundary relation and picture equivalence ---
  {
    BoundaryParams bp;
    bp.a = 1.0;
    bp.b = -1.7;
    bp.d = Cx(1.1, 0.0);
    bp.c = std::conj(bp.d);
    bp.branch = Branch::minus;

    auto s0 = random_dnls_state(rng, 10, 0.05, Topology::open);
    const ExtrinsicState e0 = to_extrinsic(s0, bp);
    LatticeState se0(e0.Q, e0.R, Topology::open);

    IntegrateOptions io;
    io.t_end = 1.0;
    io.dt = 1e-3;
    io.sample_stride = 200;
    io.monitors = false;

    const auto ti = integrate(s0, RhsKind::open_intrinsic, bp, dnls, io);
    const auto te = integrate(se0, RhsKind::open_extrinsic, bp, dnls, io);
    double pict = 0;
    for (std::size_t i = 0; i < ti.times.size(); ++i) {
      LatticeState si(ti.qs[i], ti.rs[i], Topology::open);
      const auto em = to_extrinsic(si, bp);
      for (int j = 0; j <= si.N(); ++j) {
        pict = std::max(pict, std::abs(em.Q[j] - te.qs[i][j]));
        pict = std::max(pict, std::abs(em.R[j] - te.rs[i][j]));
      }
    }
    add("picture_equivalence", pict, 1e-8);

    // dK/dt against the extrinsic Lax pair along the flow, h = 1e-4
    const double h = 1e-4;
    const Cx z = Cx(1.18, 0.37);
    IntegrateOptions io2;
    io2.dt = 1e-4;
    io2.sample_stride = 1 << 30;
    io2.monitors = false;
    const auto at_time = [&](double tt) {
      io2.t_end = tt;
      const auto tr = integrate(se0, RhsKind::open_extrinsic, bp, dnls, io2);
      ExtrinsicState e;
      e.Q = tr.qs.back();
      e.R = tr.rs.back();
      e.bp = bp;
      return e;
    };
    const auto ep = at_time(0.3 + h);
    const auto em = at_time(0.3 - h);
    const auto ec = at_time(0.3);
    const auto Kp = K_minus_td(ep.Q[0], ep.R[0], z, bp, dnls);
    const auto Km = K_minus_td(em.Q[0], em.R[0], z, bp, dnls);
    const auto Kc = K_minus_td(ec.Q[0], ec.R[0], z, bp, dnls);
    const C2Matrix dK = (Kp - Km) * Cx(1.0 / (2.0 * h));
    const auto A0z = extrinsic_A0(ec, z, dnls);
    const auto A0t = extrinsic_A0(ec, tau(z, dnls), dnls);
    add("time_dependent_boundary_relation", (dK - (A0z * Kc - Kc * A0t)).max_abs(), 1e-6);
  }

  // --- folding construction on the reference soliton ---
  {
    const auto dd = reference_soliton();
    const std::array<Cx, 2> zs = {Cx(1.23, 0.51), Cx(0.64, -0.41)};
    // J = 22 puts the tail fields below 1e-10 at t = 0.4
    const auto scan = backlund_scan(dd, dnls, 22, 0.4, zs);
    add("backlund_gauge_relation", scan.recursion_residual, 1e-10);
    add("backlund_constraints", scan.constraint_residual, 1e-10);
    add("backlund_seed_equals_K", scan.seed_matches_K, 1e-10);
    add("backlund_det_constant", scan.det_spread, 1e-10);
    add("backlund_time_equation", scan.time_eq_residual, 1e-6);
    add("backlund_tail_equality", scan.tail_equality, 1e-8);
    add("backlund_tail_asymptote", scan.tail_asymptote, 1e-8);
    add("backlund_folding_symmetry", scan.symB_residual, 1e-8);

    // scattering symmetries and the octet product relation
    double sym = 0, unit = 0, prod = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const Cx zr = rng.on_annulus(0.7, 1.4);
      sym = std::max(sym, std::abs(s11_trace(Cx(1) / zr, dd) - s22_trace(zr, dd)));
      const Cx zu = std::polar(1.0, rng.uniform(0.0, 2.0 * std::numbers::pi));
      unit = std::max(unit, std::abs(s11_trace(zu, dd) * s22_trace(zu, dd) - Cx(1)));
    }
    const auto oct = octet_expand(dd, dnls);
    for (int n = 0; n < oct.pairs(); ++n) {
      const Cx zn = oct.z_at(n);
      const Cx pred = -phi(Cx(1) / zn, dd.f1inf, dd.bp, dnls) /
                      (std::pow(zn * s11_derivative(zn, dd), 2) * phi(zn, dd.f1inf, dd.bp, dnls));
      prod = std::max(prod, std::abs(oct.C_at(n) * oct.Cbar_at(n) - pred));
    }
    add("scattering_s11_s22_symmetry", sym, 1e-12);
    add("scattering_unit_determinant", unit, 1e-12);
    add("octet_product_relation", prod, 1e-10);

    // the soliton solves the bulk equation and the boundary closure
    const auto oc2 = octet_expand(dd, dnls);
    double bulkres = 0;
    const double h = 1e-4;
    for (int j = -5; j <= 8; ++j) {
      for (double t : {-3.0, 0.4, 2.0}) {
        const Cx d5 = (-soliton_solution(oc2, j, t + 2 * h, dnls) +
                       8.0 * soliton_solution(oc2, j, t + h, dnls) -
                       8.0 * soliton_solution(oc2, j, t - h, dnls) +
                       soliton_solution(oc2, j, t - 2 * h, dnls)) /
                      (12.0 * h);
        const Cx q0 = soliton_solution(oc2, j, t, dnls);
        const Cx q1 = soliton_solution(oc2, j + 1, t, dnls);
        const Cx qm = soliton_solution(oc2, j - 1, t, dnls);
        const Cx rhs = kI * (q1 - 2.0 * q0 + qm + std::norm(q0) * (q1 + qm));
        bulkres = std::max(bulkres, std::abs(d5 - rhs));
      }
    }
    add("soliton_bulk_equation", bulkres, 1e-6);

    std::vector<double> ts;
    for (int i = -10; i <= 10; ++i) ts.push_back(i);
    add("soliton_boundary_closure", verify_boundary(dd, ts, dnls), 1e-8);
  }

  return out;
}

bool all_pass(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace allax

#include "allax/dynamics.hpp"

#include <cmath>

namespace allax {

namespace {

const Cx kI(0.0, 1.0);

Cx closure_root(const BoundaryParams& bp, Cx u) {
  // sqrt(4 c d (1 - Q0 R0) + a^2) on the principal branch
  return std::sqrt(4.0 * bp.c * bp.d * u + bp.a * bp.a);
}

Cx bulk_dq(Cx qm, Cx q, Cx qp, Cx r, const ModelParams& p) {
  return 2.0 * kI *
         (p.alpha * qp + p.gamma * q + p.beta * qm - q * r * (p.alpha * qp + p.beta * qm));
}

Cx bulk_dr(Cx rm, Cx r, Cx rp, Cx q, const ModelParams& p) {
  return -2.0 * kI *
         (p.beta * rp + p.gamma * r + p.alpha * rm - q * r * (p.alpha * rm + p.beta * rp));
}

}  // namespace

FieldDeriv rhs_periodic(const LatticeState& s, const ModelParams& p) {
  if (s.topology != Topology::periodic)
    throw ValidationError("rhs_periodic: periodic topology required");
  s.validate();
  const int n = s.sites();
  FieldDeriv d;
  d.dq.resize(n);
  d.dr.resize(n);
  for (int j = 0; j < n; ++j) {
    const int jp = (j + 1) % n, jm = (j - 1 + n) % n;
    d.dq[j] = bulk_dq(s.q[jm], s.q[j], s.q[jp], s.r[j], p);
    d.dr[j] = bulk_dr(s.r[jm], s.r[j], s.r[jp], s.q[j], p);
  }
  return d;
}

FieldDeriv rhs_open_intrinsic(const LatticeState& s, const BoundaryParams& bp,
                              const ModelParams& p) {
  if (s.topology == Topology::periodic)
    throw ValidationError("rhs_open_intrinsic: open topology required");
  s.validate();
  const int N = s.N();
  if (N < 1) throw ValidationError("rhs_open_intrinsic: needs at least two sites");
  FieldDeriv d;
  d.dq.resize(N + 1);
  d.dr.resize(N + 1);

  const Cx den = bp.a + bp.d * s.q[0] - bp.c * s.r[0];
  if (std::abs(den) < kFieldFloor)
    throw SingularError("rhs_open_intrinsic: boundary denominator below floor");
  const Cx u0 = Cx(1) - s.q[0] * s.r[0];
  const Cx bb = bp.b + p.alpha * bp.d * s.q[1] - p.beta * bp.c * s.r[1];

  d.dq[0] = 2.0 * kI *
            (p.alpha * s.q[1] + p.gamma * s.q[0] - p.alpha * s.q[0] * s.r[0] * s.q[1] +
             u0 / den *
                 ((bp.c - bp.a * s.q[0] - bp.d * s.q[0] * s.q[0]) * bb / den - p.gamma * bp.c));
  d.dr[0] = -2.0 * kI *
            (p.beta * s.r[1] + p.gamma * s.r[0] - p.beta * s.q[0] * s.r[0] * s.r[1] -
             u0 / den *
                 ((bp.d + bp.a * s.r[0] - bp.c * s.r[0] * s.r[0]) * bb / den - p.gamma * bp.d));

  const Cx q2 = N >= 2 ? s.q[2] : Cx(0);
  const Cx r2 = N >= 2 ? s.r[2] : Cx(0);
  const Cx u1 = Cx(1) - s.q[1] * s.r[1];
  d.dq[1] = 2.0 * kI *
            (p.alpha * q2 + p.gamma * s.q[1] + p.beta * s.q[0] -
             s.q[1] * s.r[1] * (p.alpha * q2 + p.beta * s.q[0]) -
             p.beta * bp.c * u0 * u1 / den);
  d.dr[1] = -2.0 * kI *
            (p.beta * r2 + p.gamma * s.r[1] + p.alpha * s.r[0] -
             s.q[1] * s.r[1] * (p.alpha * s.r[0] + p.beta * r2) +
             p.alpha * bp.d * u0 * u1 / den);

  for (int j = 2; j < N; ++j) {
    d.dq[j] = bulk_dq(s.q[j - 1], s.q[j], s.q[j + 1], s.r[j], p);
    d.dr[j] = bulk_dr(s.r[j - 1], s.r[j], s.r[j + 1], s.q[j], p);
  }
  if (N >= 2) {
    d.dq[N] = 2.0 * kI *
              (p.gamma * s.q[N] + p.beta * s.q[N - 1] -
               p.beta * s.q[N] * s.r[N] * s.q[N - 1]);
    d.dr[N] = -2.0 * kI *
              (p.gamma * s.r[N] + p.alpha * s.r[N - 1] -
               p.alpha * s.q[N] * s.r[N] * s.r[N - 1]);
  }
  return d;
}

void ExtrinsicState::validate(double floor) const {
  if (Q.size() != R.size() || Q.size() < 2)
    throw ValidationError("ExtrinsicState: Q and R must have equal length >= 2");
  for (std::size_t j = 0; j < Q.size(); ++j)
    if (std::abs(Cx(1) - Q[j] * R[j]) < floor)
      throw SingularError("ExtrinsicState: 1 - Q R singular at site " + std::to_string(j));
}

ExtrinsicState to_extrinsic(const LatticeState& s, const BoundaryParams& bp) {
  s.validate();
  ExtrinsicState e;
  e.Q = s.q;
  e.R = s.r;
  e.bp = bp;
  if (bp.robin()) return e;  // identity map
  const Cx den = bp.a + bp.d * s.q[0] - bp.c * s.r[0];
  if (std::abs(den) < kFieldFloor) throw SingularError("to_extrinsic: boundary denominator below floor");
  const Cx w = s.q[0] * s.r[0] - Cx(1);
  e.Q[0] = s.q[0] + bp.c * w / den;
  e.R[0] = s.r[0] - bp.d * w / den;
  return e;
}

LatticeState from_extrinsic(const ExtrinsicState& e) {
  e.validate();
  LatticeState s(e.Q, e.R, Topology::open);
  if (e.bp.robin()) return s;
  if (e.bp.c == Cx(0) || e.bp.d == Cx(0))
    throw SingularError("from_extrinsic: needs c d != 0 (or the Robin case c = d = 0)");
  const Cx u = Cx(1) - e.Q[0] * e.R[0];
  const Cx apm =
      e.bp.a + static_cast<double>(branch_sign(e.bp.branch)) * closure_root(e.bp, u);
  s.q[0] = e.Q[0] - apm / (2.0 * e.bp.d);
  s.r[0] = e.R[0] + apm / (2.0 * e.bp.c);
  return s;
}

std::pair<Cx, Cx> ghost_closure(const ExtrinsicState& e, const ModelParams& p) {
  e.validate();
  const auto& bp = e.bp;
  if (bp.robin()) {
    if (bp.a == Cx(0)) throw SingularError("ghost_closure: Robin closure needs a != 0");
    return {-bp.b * e.Q[0] / (bp.a * p.beta), -bp.b * e.R[0] / (bp.a * p.alpha)};
  }
  if (bp.c == Cx(0) || bp.d == Cx(0))
    throw SingularError("ghost_closure: needs c d != 0 (or the Robin case c = d = 0)");
  const Cx u = Cx(1) - e.Q[0] * e.R[0];
  const Cx apm = bp.a + static_cast<double>(branch_sign(bp.branch)) * closure_root(bp, u);
  const Cx cd = bp.c * bp.d;
  const Cx Qm1 = (p.alpha / p.beta) * e.Q[1] +
                 (bp.a * p.alpha * e.Q[1] + bp.b * e.Q[0]) * apm / (2.0 * cd * p.beta * u);
  const Cx Rm1 = (p.beta / p.alpha) * e.R[1] +
                 (bp.a * p.beta * e.R[1] + bp.b * e.R[0]) * apm / (2.0 * cd * p.alpha * u);
  return {Qm1, Rm1};
}

std::pair<Cx, Cx> ghost_closure_td(const ExtrinsicState& e, Cx Qdot0, Cx Rdot0,
                                   const ModelParams& p) {
  e.validate();
  const auto& bp = e.bp;
  if (bp.robin()) {
    if (bp.a == Cx(0)) throw SingularError("ghost_closure_td: Robin closure needs a != 0");
    return {-bp.b * e.Q[0] / (bp.a * p.beta), -bp.b * e.R[0] / (bp.a * p.alpha)};
  }
  const double eps = branch_sign(bp.branch);
  const Cx u = Cx(1) - e.Q[0] * e.R[0];
  const Cx S = closure_root(bp, u);
  const Cx aeS = bp.a + eps * S;
  const Cx Qm1 =
      eps *
      (-0.25 * kI * Qdot0 * aeS - 0.5 * p.gamma * e.Q[0] * aeS + u * bp.b * e.Q[0]) /
      (u * p.beta * S);
  const Cx Rm1 =
      eps *
      (0.25 * kI * Rdot0 * aeS - 0.5 * p.gamma * e.R[0] * aeS + u * bp.b * e.R[0]) /
      (u * p.alpha * S);
  return {Qm1, Rm1};
}

FieldDeriv rhs_open_extrinsic(const ExtrinsicState& e, const ModelParams& p) {
  const auto [Qm1, Rm1] = ghost_closure(e, p);
  const int N = e.N();
  FieldDeriv d;
  d.dq.resize(N + 1);
  d.dr.resize(N + 1);
  for (int j = 0; j <= N; ++j) {
    const Cx qm = j == 0 ? Qm1 : e.Q[j - 1];
    const Cx rm = j == 0 ? Rm1 : e.R[j - 1];
    const Cx qp = j == N ? Cx(0) : e.Q[j + 1];
    const Cx rp = j == N ? Cx(0) : e.R[j + 1];
    d.dq[j] = bulk_dq(qm, e.Q[j], qp, e.R[j], p);
    d.dr[j] = bulk_dr(rm, e.R[j], rp, e.Q[j], p);
  }
  return d;
}

std::vector<Cx> rhs_reduced(const std::vector<Cx>& Q, Topology topo,
                            const BoundaryParams& bp, const ModelParams& p) {
  if (p.reduction == Reduction::none)
    throw ValidationError("rhs_reduced: a dnls or dmkdv reduction is required");
  if (topo != Topology::periodic) bp.validate_for(p);
  const int n = static_cast<int>(Q.size());
  const double nu = p.nu;

  // Companion field under the reduction: dnls r = nu conj(q), dmkdv r = nu q.
  const auto companion = [&](Cx v) {
    return p.reduction == Reduction::dnls ? nu * std::conj(v) : nu * v;
  };

  std::vector<Cx> d(n);
  Cx ghost = 0;
  if (topo != Topology::periodic) {
    const Cx u = Cx(1) - Q[0] * companion(Q[0]);
    if (bp.robin()) {
      ghost = bp.a == Cx(0) ? Cx(0) : -bp.b * Q[0] / (bp.a * p.beta);
    } else {
      const Cx apm = bp.a + static_cast<double>(branch_sign(bp.branch)) * closure_root(bp, u);
      if (p.reduction == Reduction::dnls)
        ghost = Q[1] + (bp.a * Q[1] + 2.0 * bp.b * Q[0]) * apm / (2.0 * bp.c * bp.d * u);
      else
        ghost = -Q[1] - bp.a * Q[1] * apm / (2.0 * bp.c * bp.d * u);
    }
  }

  for (int j = 0; j < n; ++j) {
    Cx qm, qp;
    if (topo == Topology::periodic) {
      qm = Q[(j - 1 + n) % n];
      qp = Q[(j + 1) % n];
    } else {
      qm = j == 0 ? ghost : Q[j - 1];
      qp = j == n - 1 ? Cx(0) : Q[j + 1];
    }
    if (p.reduction == Reduction::dnls) {
      d[j] = kI * (qp - 2.0 * Q[j] + qm - nu * std::norm(Q[j]) * (qp + qm));
    } else {
      d[j] = qm - qp + nu * Q[j] * Q[j] * (qp - qm);
    }
  }
  return d;
}

namespace {

struct Flow {
  RhsKind kind;
  const BoundaryParams* bp;
  const ModelParams* p;

  FieldDeriv operator()(const std::vector<Cx>& q, const std::vector<Cx>& r) const {
    switch (kind) {
      case RhsKind::periodic: {
        LatticeState s(q, r, Topology::periodic);
        return rhs_periodic(s, *p);
      }
      case RhsKind::open_intrinsic: {
        LatticeState s(q, r, Topology::open);
        return rhs_open_intrinsic(s, *bp, *p);
      }
      case RhsKind::open_extrinsic: {
        ExtrinsicState e;
        e.Q = q;
        e.R = r;
        e.bp = *bp;
        return rhs_open_extrinsic(e, *p);
      }
    }
    throw ValidationError("integrate: unknown rhs kind");
  }
};

void axpy(std::vector<Cx>& y, double a, const std::vector<Cx>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void rk4_step(std::vector<Cx>& q, std::vector<Cx>& r, const Flow& f, double dt) {
  const auto k1 = f(q, r);
  auto q2 = q, r2 = r;
  axpy(q2, 0.5 * dt, k1.dq);
  axpy(r2, 0.5 * dt, k1.dr);
  const auto k2 = f(q2, r2);
  q2 = q;
  r2 = r;
  axpy(q2, 0.5 * dt, k2.dq);
  axpy(r2, 0.5 * dt, k2.dr);
  const auto k3 = f(q2, r2);
  q2 = q;
  r2 = r;
  axpy(q2, dt, k3.dq);
  axpy(r2, dt, k3.dr);
  const auto k4 = f(q2, r2);
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] += dt / 6.0 * (k1.dq[i] + 2.0 * k2.dq[i] + 2.0 * k3.dq[i] + k4.dq[i]);
    r[i] += dt / 6.0 * (k1.dr[i] + 2.0 * k2.dr[i] + 2.0 * k3.dr[i] + k4.dr[i]);
  }
}

bool exceeded_cap(const std::vector<Cx>& q, const std::vector<Cx>& r, double cap) {
  for (const auto& v : q)
    if (!(std::abs(v) < cap)) return true;
  for (const auto& v : r)
    if (!(std::abs(v) < cap)) return true;
  return false;
}

MonitorSample take_monitor(double t, const std::vector<Cx>& q, const std::vector<Cx>& r,
                           RhsKind kind, const BoundaryParams& bp, const ModelParams& p) {
  MonitorSample m;
  m.t = t;
  if (kind == RhsKind::periodic) {
    LatticeState s(q, r, Topology::periodic);
    m.H = hamiltonian_periodic(s, p);
    const auto cs = transfer_and_charges(s, p);
    m.I0 = cs.C;
    m.I1 = cs.I.count(s.N() - 1) ? cs.I.at(s.N() - 1) : Cx(0);
  } else {
    // Monitors are defined on the intrinsic open chain; map extrinsic
    // states back first.
    LatticeState s(q, r, Topology::open);
    if (kind == RhsKind::open_extrinsic) {
      ExtrinsicState e;
      e.Q = q;
      e.R = r;
      e.bp = bp;
      s = from_extrinsic(e);
    }
    const auto oc = open_charges_and_hamiltonian(s, bp, p);
    m.H = oc.H;
    m.I0 = oc.I0;
    m.I1 = oc.I1;
  }
  return m;
}

}  // namespace

Trajectory integrate(const LatticeState& s0, RhsKind kind, const BoundaryParams& bp,
                     const ModelParams& p, const IntegrateOptions& opt) {
  if (opt.dt <= 0) throw ValidationError("integrate: dt must be positive");
  if (opt.t_end < opt.t_start) throw ValidationError("integrate: t_end before t_start");

  Flow flow{kind, &bp, &p};
  std::vector<Cx> q = s0.q, r = s0.r;

  Trajectory traj;
  const auto record = [&](double t) {
    traj.times.push_back(t);
    traj.qs.push_back(q);
    traj.rs.push_back(r);
    if (opt.monitors) traj.monitors.push_back(take_monitor(t, q, r, kind, bp, p));
    traj.last_valid_time = t;
  };

  const long nsteps = std::lround((opt.t_end - opt.t_start) / opt.dt);
  record(opt.t_start);
  for (long step = 0; step < nsteps; ++step) {
    try {
      rk4_step(q, r, flow, opt.dt);
    } catch (const Error&) {
      traj.aborted = true;
      return traj;
    }
    if (exceeded_cap(q, r, opt.blowup_cap)) {
      traj.aborted = true;
      return traj;
    }
    const double t = opt.t_start + (step + 1) * opt.dt;
    if ((step + 1) % opt.sample_stride == 0 || step + 1 == nsteps) record(t);
  }
  return traj;
}

double step_halving_error(const LatticeState& s0, RhsKind kind, const BoundaryParams& bp,
                          const ModelParams& p, double t_end, double dt) {
  IntegrateOptions o;
  o.t_end = t_end;
  o.dt = dt;
  o.monitors = false;
  o.sample_stride = 1 << 30;
  const auto full = integrate(s0, kind, bp, p, o);
  o.dt = dt / 2;
  const auto half = integrate(s0, kind, bp, p, o);
  double m = 0;
  const auto& qa = full.qs.back();
  const auto& qb = half.qs.back();
  for (std::size_t i = 0; i < qa.size(); ++i) m = std::max(m, std::abs(qa[i] - qb[i]));
  return m;
}

}  // namespace allax

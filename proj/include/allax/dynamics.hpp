#pragma once

#include <optional>
#include <utility>

#include "allax/boundary.hpp"

namespace allax {

struct FieldDeriv {
  std::vector<Cx> dq, dr;
};

/// Closed-form bulk flow with periodic wraparound.
FieldDeriv rhs_periodic(const LatticeState& s, const ModelParams& p);

/// Open-chain flow: boundary-modified forms at sites 0 and 1, bulk in
/// between, right-edge form at site N.
FieldDeriv rhs_open_intrinsic(const LatticeState& s, const BoundaryParams& bp,
                              const ModelParams& p);

/// Extrinsic fields Q, R over sites 0..N; the ghost slot at -1 is always
/// recomputed from the closure, never integrated.
struct ExtrinsicState {
  std::vector<Cx> Q, R;
  BoundaryParams bp;

  int N() const { return static_cast<int>(Q.size()) - 1; }
  void validate(double floor = kFieldFloor) const;
};

/// Change of variables concentrated at site 0.
ExtrinsicState to_extrinsic(const LatticeState& s, const BoundaryParams& bp);

/// Inverse change of variables; the branch selector of e.bp picks the root.
/// Robin (c = d = 0) is the identity map on the site-0 fields.
LatticeState from_extrinsic(const ExtrinsicState& e);

/// Ghost values (Q_{-1}, R_{-1}) from the closure on the configured branch;
/// Robin uses the linear relation beta Q_{-1} + (b/a) Q_0 = 0 instead.
std::pair<Cx, Cx> ghost_closure(const ExtrinsicState& e, const ModelParams& p);

/// Equivalent time-dependent form of the closure, eliminating the site-1
/// fields in favour of the site-0 time derivatives.
std::pair<Cx, Cx> ghost_closure_td(const ExtrinsicState& e, Cx Qdot0, Cx Rdot0,
                                   const ModelParams& p);

/// Uniform bulk formula for all j >= 0 with ghost values from the closure
/// and Dirichlet continuation beyond site N.
FieldDeriv rhs_open_extrinsic(const ExtrinsicState& e, const ModelParams& p);

/// Single-field reduced flow (dnls or dmkdv). For open topology Q holds the
/// extrinsic fields and the reduced closure supplies the ghost; boundary
/// parameters must satisfy the reduction constraints.
std::vector<Cx> rhs_reduced(const std::vector<Cx>& Q, Topology topo,
                            const BoundaryParams& bp, const ModelParams& p);

enum class RhsKind { periodic, open_intrinsic, open_extrinsic };

struct MonitorSample {
  double t;
  Cx H;   // open Hamiltonian (or the periodic one)
  Cx I0;  // leading double-row charge (periodic: product charge C)
  Cx I1;  // subleading double-row charge (periodic: I^(N-1))
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<Cx>> qs, rs;
  std::vector<MonitorSample> monitors;
  bool aborted = false;        // blow-up or singularity hit
  double last_valid_time = 0;  // time of the last stored state
};

struct IntegrateOptions {
  double t_start = 0.0;
  double t_end = 1.0;
  double dt = 1e-3;
  int sample_stride = 10;    // state/monitor recording cadence in steps
  double blowup_cap = 1e6;   // abort when any |field| exceeds this
  bool monitors = true;
};

/// Classical fixed-step 4th-order integration. For open_extrinsic the state
/// holds (Q, R). Blow-up aborts with the last valid time recorded.
Trajectory integrate(const LatticeState& s0, RhsKind kind, const BoundaryParams& bp,
                     const ModelParams& p, const IntegrateOptions& opt);

/// Max field difference at t_end between a dt run and a dt/2 run; dividing
/// two such estimates measures the order of the one-step method.
double step_halving_error(const LatticeState& s0, RhsKind kind, const BoundaryParams& bp,
                          const ModelParams& p, double t_end, double dt);

}  // namespace allax

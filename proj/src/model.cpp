#include "allax/model.hpp"

#include <cmath>

namespace allax {

ModelParams ModelParams::general(Cx alpha, Cx beta, Cx gamma) {
  ModelParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.reduction = Reduction::none;
  p.validate();
  return p;
}

ModelParams ModelParams::dnls(int nu) {
  ModelParams p;
  p.alpha = 0.5;
  p.beta = 0.5;
  p.gamma = -1.0;
  p.reduction = Reduction::dnls;
  p.nu = nu;
  p.validate();
  return p;
}

ModelParams ModelParams::dmkdv(int nu) {
  ModelParams p;
  p.alpha = Cx(0, 0.5);
  p.beta = Cx(0, -0.5);
  p.gamma = 0.0;
  p.reduction = Reduction::dmkdv;
  p.nu = nu;
  p.validate();
  return p;
}

void ModelParams::validate() const {
  if (alpha * beta == Cx(0)) throw ValidationError("ModelParams: alpha*beta must be nonzero");
  if (reduction != Reduction::none && nu != 1 && nu != -1)
    throw ValidationError("ModelParams: nu must be +1 or -1");
  if (reduction == Reduction::dnls &&
      (alpha != Cx(0.5) || beta != Cx(0.5) || gamma != Cx(-1.0)))
    throw ValidationError("ModelParams: dnls requires alpha=beta=1/2, gamma=-1");
  if (reduction == Reduction::dmkdv &&
      (alpha != Cx(0, 0.5) || beta != Cx(0, -0.5) || gamma != Cx(0)))
    throw ValidationError("ModelParams: dmkdv requires alpha=-beta=i/2, gamma=0");
}

LatticeState LatticeState::zeros(int N, Topology topo) {
  if (N < 0) throw ValidationError("LatticeState: N must be >= 0");
  return LatticeState(std::vector<Cx>(N + 1, Cx(0)), std::vector<Cx>(N + 1, Cx(0)), topo);
}

void LatticeState::validate(double floor) const {
  if (q.size() != r.size() || q.empty())
    throw ValidationError("LatticeState: q and r must be nonempty and of equal length");
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (std::abs(Cx(1) - q[j] * r[j]) < floor)
      throw SingularError("LatticeState: 1 - q r singular at site " + std::to_string(j));
  }
}

std::string branch_name(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

void BoundaryParams::validate_for(const ModelParams& p) const {
  if (p.reduction == Reduction::dnls) {
    if (a.imag() != 0 || b.imag() != 0)
      throw ValidationError("BoundaryParams: dnls reduction requires a, b real");
    if (c != -static_cast<double>(p.nu) * std::conj(d))
      throw ValidationError("BoundaryParams: dnls reduction requires c = -nu*conj(d)");
  } else if (p.reduction == Reduction::dmkdv) {
    if (a.imag() != 0 || b.imag() != 0 || c.imag() != 0 || d.imag() != 0)
      throw ValidationError("BoundaryParams: dmkdv reduction requires a, b, c, d real");
    if (b != Cx(0)) throw ValidationError("BoundaryParams: dmkdv reduction requires b=0");
    if (c != -static_cast<double>(p.nu) * d)
      throw ValidationError("BoundaryParams: dmkdv reduction requires c = -nu*d");
  }
}

}  // namespace allax

#pragma once

#include <functional>
#include <string>

#include "allax/model.hpp"

namespace allax {

/// A function of the lattice fields, analytic in each q_j, r_j near the
/// evaluation point.
struct Observable {
  std::function<Cx(const LatticeState&)> eval;
  std::string label;
};

/// sum_j i (1 - q_j r_j) (dF/dq_j dG/dr_j - dF/dr_j dG/dq_j), partials by
/// central differences with real step h (holomorphic dependence makes the
/// real-direction derivative the complex derivative). Default h = 1e-6,
/// bracket-level tolerance budget 1e-6.
Cx bracket(const Observable& F, const Observable& G, const LatticeState& s, double h = 1e-6);

struct FlowRhs {
  std::vector<Cx> dq, dr;
};

/// {H, q_j} and {H, r_j} for every site.
FlowRhs hamiltonian_flow_rhs(const Observable& H, const LatticeState& s, double h = 1e-6);

}  // namespace allax

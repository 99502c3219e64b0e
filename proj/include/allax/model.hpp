#pragma once

#include <string>
#include <vector>

#include "allax/complexmat.hpp"

namespace allax {

/// Modulus floor under which 1 - q_j r_j counts as singular.
inline constexpr double kFieldFloor = 1e-12;

enum class Reduction { none, dnls, dmkdv };

/// Bulk coefficients of the three-parameter lattice model. The dnls and
/// dmkdv reductions pin the coefficients and carry the sign nu = +-1.
struct ModelParams {
  Cx alpha{0.5, 0.0};
  Cx beta{0.5, 0.0};
  Cx gamma{-1.0, 0.0};
  Reduction reduction = Reduction::none;
  int nu = -1;

  static ModelParams general(Cx alpha, Cx beta, Cx gamma);
  static ModelParams dnls(int nu = -1);
  static ModelParams dmkdv(int nu = 1);

  void validate() const;
};

enum class Topology { periodic, open, half_infinite };

/// Complex field sequences q, r over sites 0..N.
struct LatticeState {
  std::vector<Cx> q, r;
  Topology topology = Topology::periodic;

  LatticeState() = default;
  LatticeState(std::vector<Cx> q_, std::vector<Cx> r_, Topology topo)
      : q(std::move(q_)), r(std::move(r_)), topology(topo) {}

  static LatticeState zeros(int N, Topology topo);

  int N() const { return static_cast<int>(q.size()) - 1; }
  int sites() const { return static_cast<int>(q.size()); }

  /// Throws when sizes mismatch or some 1 - q_j r_j is within the floor.
  void validate(double floor = kFieldFloor) const;
};

/// Branch selector for the square root entering the closure, its inversion
/// and the time-dependent reflection matrix: plus -> +1, minus -> -1.
enum class Branch { plus, minus };

inline int branch_sign(Branch b) { return b == Branch::plus ? +1 : -1; }
std::string branch_name(Branch b);

/// Left-boundary reflection coefficients a, b, c, d.
struct BoundaryParams {
  Cx a{1.0, 0.0};
  Cx b{0.0, 0.0};
  Cx c{0.0, 0.0};
  Cx d{0.0, 0.0};
  Branch branch = Branch::minus;

  /// Diagonal (Robin) sub-case c = d = 0.
  bool robin() const { return c == Cx(0) && d == Cx(0); }

  /// Checks the reduction constraints: dnls needs a, b real and
  /// c = -nu * conj(d); dmkdv needs a, b, c, d real with c = -nu d, b = 0.
  /// Throws ValidationError naming the violated relation.
  void validate_for(const ModelParams& p) const;
};

}  // namespace allax

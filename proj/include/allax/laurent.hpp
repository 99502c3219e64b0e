#pragma once

#include <functional>
#include <map>

#include "allax/complexmat.hpp"

namespace allax {

/// Finitely supported Laurent series.
struct LaurentSeries {
  std::map<int, Cx> coefficients;
  double radius = 1.3;

  Cx coeff(int k) const {
    auto it = coefficients.find(k);
    return it == coefficients.end() ? Cx(0) : it->second;
  }

  Cx eval(Cx z) const {
    Cx s = 0;
    for (const auto& [k, c] : coefficients) s += c * std::pow(z, k);
    return s;
  }
};

/// Recovers coefficients of f over the exponent window [k_min, k_max] by
/// sampling f on the circle |z| = radius and inverting the discrete Fourier
/// sum directly. Throws NumericalError when the reconstruction residual at
/// the sample points exceeds tol (window too small, or f singular on the
/// circle).
LaurentSeries laurent_extract(const std::function<Cx(Cx)>& f, int k_min, int k_max,
                              double radius = 1.3, double tol = 1e-8);

}  // namespace allax

#include "allax/laurent.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace allax {

LaurentSeries laurent_extract(const std::function<Cx(Cx)>& f, int k_min, int k_max,
                              double radius, double tol) {
  if (k_min > k_max) throw ValidationError("laurent_extract: empty window");
  if (radius <= 0) throw ValidationError("laurent_extract: radius must be positive");

  const int width = k_max - k_min + 1;
  const int M = width + 8;  // >= width + 2 as required for exact inversion
  std::vector<Cx> zs(M), fs(M);
  for (int m = 0; m < M; ++m) {
    const double th = 2.0 * std::numbers::pi * m / M;
    zs[m] = std::polar(radius, th);
    fs[m] = f(zs[m]);
    if (!std::isfinite(fs[m].real()) || !std::isfinite(fs[m].imag()))
      throw NumericalError("laurent_extract: non-finite sample on circle");
  }

  LaurentSeries out;
  out.radius = radius;
  for (int k = k_min; k <= k_max; ++k) {
    Cx c = 0;
    for (int m = 0; m < M; ++m) {
      const double th = 2.0 * std::numbers::pi * m / M;
      // f(z_m) z_m^{-k} averaged over the circle
      c += fs[m] * std::polar(std::pow(radius, -k), -th * k);
    }
    out.coefficients[k] = c / static_cast<double>(M);
  }

  // Residual gate at the sample points.
  double fmax = 1.0, res = 0.0;
  for (int m = 0; m < M; ++m) fmax = std::max(fmax, std::abs(fs[m]));
  for (int m = 0; m < M; ++m) res = std::max(res, std::abs(out.eval(zs[m]) - fs[m]));
  if (res > tol * fmax)
    throw NumericalError("laurent_extract: reconstruction residual " + std::to_string(res) +
                         " exceeds tolerance (window too small or f singular on circle)");
  return out;
}

}  // namespace allax

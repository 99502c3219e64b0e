#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "allax/errors.hpp"

namespace allax {

using Cx = std::complex<double>;
using CxL = std::complex<long double>;

/// Determinant modulus below which 2x2 inversion is refused.
inline constexpr double kDetFloor = 1e-14;

/// Dense 2x2 complex matrix, row-major, value semantics.
template <class T>
struct Mat2 {
  std::array<T, 4> e{};

  Mat2() = default;
  Mat2(T a11, T a12, T a21, T a22) : e{a11, a12, a21, a22} {}

  static Mat2 identity() { return {T(1), T(0), T(0), T(1)}; }

  T& operator()(int i, int j) { return e[2 * i + j]; }
  const T& operator()(int i, int j) const { return e[2 * i + j]; }

  Mat2& operator+=(const Mat2& o) {
    for (int i = 0; i < 4; ++i) e[i] += o.e[i];
    return *this;
  }
  Mat2& operator-=(const Mat2& o) {
    for (int i = 0; i < 4; ++i) e[i] -= o.e[i];
    return *this;
  }
  Mat2& operator*=(T s) {
    for (auto& v : e) v *= s;
    return *this;
  }

  friend Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
  friend Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
  friend Mat2 operator*(T s, Mat2 a) { return a *= s; }
  friend Mat2 operator*(Mat2 a, T s) { return a *= s; }

  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.e[0] * b.e[0] + a.e[1] * b.e[2], a.e[0] * b.e[1] + a.e[1] * b.e[3],
            a.e[2] * b.e[0] + a.e[3] * b.e[2], a.e[2] * b.e[1] + a.e[3] * b.e[3]};
  }

  T trace() const { return e[0] + e[3]; }
  T det() const { return e[0] * e[3] - e[1] * e[2]; }

  Mat2 inverse() const {
    const T d = det();
    if (std::abs(d) < kDetFloor)
      throw SingularError("2x2 inverse: determinant modulus below floor");
    return {e[3] / d, -e[1] / d, -e[2] / d, e[0] / d};
  }

  /// Largest entry modulus (used as the residual norm throughout).
  double max_abs() const {
    double m = 0;
    for (const auto& v : e) m = std::max(m, static_cast<double>(std::abs(v)));
    return m;
  }
};

/// Dense 4x4 complex matrix, row-major.
template <class T>
struct Mat4 {
  std::array<T, 16> e{};

  static Mat4 identity() {
    Mat4 m;
    for (int i = 0; i < 4; ++i) m(i, i) = T(1);
    return m;
  }

  T& operator()(int i, int j) { return e[4 * i + j]; }
  const T& operator()(int i, int j) const { return e[4 * i + j]; }

  Mat4& operator+=(const Mat4& o) {
    for (int i = 0; i < 16; ++i) e[i] += o.e[i];
    return *this;
  }
  Mat4& operator-=(const Mat4& o) {
    for (int i = 0; i < 16; ++i) e[i] -= o.e[i];
    return *this;
  }
  Mat4& operator*=(T s) {
    for (auto& v : e) v *= s;
    return *this;
  }

  friend Mat4 operator+(Mat4 a, const Mat4& b) { return a += b; }
  friend Mat4 operator-(Mat4 a, const Mat4& b) { return a -= b; }
  friend Mat4 operator*(T s, Mat4 a) { return a *= s; }

  friend Mat4 operator*(const Mat4& a, const Mat4& b) {
    Mat4 c;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) {
        const T aik = a(i, k);
        if (aik == T(0)) continue;
        for (int j = 0; j < 4; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  double max_abs() const {
    double m = 0;
    for (const auto& v : e) m = std::max(m, static_cast<double>(std::abs(v)));
    return m;
  }
};

using C2Matrix = Mat2<Cx>;
using C4Matrix = Mat4<Cx>;

/// Kronecker product: entry ((2m+p),(2n+q)) = A(m,n) * B(p,q).
template <class T>
Mat4<T> kron(const Mat2<T>& A, const Mat2<T>& B) {
  Mat4<T> K;
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) K(2 * m + p, 2 * n + q) = A(m, n) * B(p, q);
  return K;
}

template <class T>
Mat4<T> commutator(const Mat4<T>& a, const Mat4<T>& b) {
  return a * b - b * a;
}

inline C2Matrix sigma3() { return {Cx(1), Cx(0), Cx(0), Cx(-1)}; }

}  // namespace allax

#pragma once

#include <array>
#include <complex>
#include <cstddef>

namespace nlsync {

/// Dense real 3-vector with the handful of operations the solvers need.
struct Vec3 {
  std::array<double, 3> v{};

  constexpr double& operator[](std::size_t i) { return v[i]; }
  constexpr double operator[](std::size_t i) const { return v[i]; }

  constexpr Vec3& operator+=(const Vec3& o) {
    for (std::size_t i = 0; i < 3; ++i) v[i] += o.v[i];
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    for (std::size_t i = 0; i < 3; ++i) v[i] -= o.v[i];
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    for (auto& x : v) x *= s;
    return *this;
  }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator-(Vec3 a) { return a *= -1.0; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

double dot(const Vec3& a, const Vec3& b);
double norm2(const Vec3& a);
double norm_inf(const Vec3& a);
bool is_finite(const Vec3& a);

/// Dense real 3x3 matrix, row-major.
struct Matrix3 {
  std::array<double, 9> m{};

  static constexpr Matrix3 identity() { return diag(1.0, 1.0, 1.0); }
  static constexpr Matrix3 diag(double a, double b, double c) {
    return Matrix3{{a, 0.0, 0.0, 0.0, b, 0.0, 0.0, 0.0, c}};
  }
  static constexpr Matrix3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    return Matrix3{{c0[0], c1[0], c2[0], c0[1], c1[1], c2[1], c0[2], c1[2], c2[2]}};
  }

  constexpr double& operator()(std::size_t r, std::size_t c) { return m[3 * r + c]; }
  constexpr double operator()(std::size_t r, std::size_t c) const { return m[3 * r + c]; }

  Vec3 column(std::size_t c) const { return Vec3{{m[c], m[3 + c], m[6 + c]}}; }
  Matrix3 transpose() const;

  friend Matrix3 operator+(const Matrix3& a, const Matrix3& b);
  friend Matrix3 operator-(const Matrix3& a, const Matrix3& b);
  friend Matrix3 operator*(double s, const Matrix3& a);
  friend Matrix3 operator*(const Matrix3& a, const Matrix3& b);
  friend Vec3 operator*(const Matrix3& a, const Vec3& x);
  friend constexpr bool operator==(const Matrix3&, const Matrix3&) = default;
};

bool is_finite(const Matrix3& a);

/// Three complex roots, ordered by descending real part, then descending
/// imaginary part.
using Complex3 = std::array<std::complex<double>, 3>;

double det3(const Matrix3& a);
double trace3(const Matrix3& a);

/// Roots of the monic cubic x^3 + c2 x^2 + c1 x + c0.
///
/// Three distinct real roots use the trigonometric form, everything else
/// goes through Cardano with quadratic deflation. Each root gets one Newton
/// polish step on the original polynomial. Conjugate pairs are returned as
/// exact conjugates.
Complex3 cubic_roots(double c2, double c1, double c0);

/// Eigenvalues of `a` as the roots of det(a - x I).
Complex3 eigenvalues3(const Matrix3& a);

/// Second additive compound of a 3x3 matrix. Its spectrum is the set of
/// pairwise sums of the spectrum of `a`.
Matrix3 second_additive_compound(const Matrix3& a);

struct CertificateReport {
  double trace = 0.0;
  double det = 0.0;
  double compound_det = 0.0;
  /// trace, det and compound_det all strictly negative. For a real 3x3
  /// matrix this places every eigenvalue in the open left half-plane.
  bool stable = false;
};

CertificateReport hurwitz_certificate(const Matrix3& a);

}  // namespace nlsync

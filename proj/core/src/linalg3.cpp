#include "nlsync/linalg3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nlsync {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm2(const Vec3& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const Vec3& a) {
  return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
}

bool is_finite(const Vec3& a) {
  return std::isfinite(a[0]) && std::isfinite(a[1]) && std::isfinite(a[2]);
}

bool is_finite(const Matrix3& a) {
  return std::all_of(a.m.begin(), a.m.end(), [](double x) { return std::isfinite(x); });
}

Matrix3 Matrix3::transpose() const {
  Matrix3 t;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix3 operator+(const Matrix3& a, const Matrix3& b) {
  Matrix3 out;
  for (std::size_t i = 0; i < 9; ++i) out.m[i] = a.m[i] + b.m[i];
  return out;
}

Matrix3 operator-(const Matrix3& a, const Matrix3& b) {
  Matrix3 out;
  for (std::size_t i = 0; i < 9; ++i) out.m[i] = a.m[i] - b.m[i];
  return out;
}

Matrix3 operator*(double s, const Matrix3& a) {
  Matrix3 out;
  for (std::size_t i = 0; i < 9; ++i) out.m[i] = s * a.m[i];
  return out;
}

Matrix3 operator*(const Matrix3& a, const Matrix3& b) {
  Matrix3 out;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      out(r, c) = a(r, 0) * b(0, c) + a(r, 1) * b(1, c) + a(r, 2) * b(2, c);
  return out;
}

Vec3 operator*(const Matrix3& a, const Vec3& x) {
  return Vec3{{a(0, 0) * x[0] + a(0, 1) * x[1] + a(0, 2) * x[2],
               a(1, 0) * x[0] + a(1, 1) * x[1] + a(1, 2) * x[2],
               a(2, 0) * x[0] + a(2, 1) * x[1] + a(2, 2) * x[2]}};
}

double det3(const Matrix3& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

double trace3(const Matrix3& a) { return a(0, 0) + a(1, 1) + a(2, 2); }

namespace {

using cplx = std::complex<double>;

struct Cubic {
  double c2, c1, c0;

  template <typename T>
  T value(T z) const {
    return ((z + c2) * z + c1) * z + c0;
  }
  template <typename T>
  T slope(T z) const {
    return (3.0 * z + 2.0 * c2) * z + c1;
  }

  template <typename T>
  T polish(T z) const {
    const T d = slope(z);
    if (std::abs(d) == 0.0) return z;
    const T next = z - value(z) / d;
    if (!std::isfinite(std::abs(next))) return z;
    return std::abs(value(next)) <= std::abs(value(z)) ? next : z;
  }
};

bool root_order(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

}  // namespace

Complex3 cubic_roots(double c2, double c1, double c0) {
  const Cubic poly{c2, c1, c0};
  const double shift = c2 / 3.0;
  // Depressed cubic t^3 + p t + q with x = t - shift.
  const double p = c1 - c2 * c2 / 3.0;
  const double q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
  const double disc = 0.25 * q * q + p * p * p / 27.0;

  Complex3 roots;
  if (disc < 0.0) {
    // Three distinct real roots; disc < 0 forces p < 0.
    const double r = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(1.5 * q / p * std::sqrt(-3.0 / p), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      const double t = r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0);
      roots[k] = poly.polish(t - shift);
    }
  } else {
    const double w = -0.5 * q - std::copysign(std::sqrt(disc), q);
    const double u = std::cbrt(w);
    const double t = (u == 0.0) ? 0.0 : u - p / (3.0 * u);
    const double real_root = poly.polish(t - shift);
    roots[0] = real_root;

    // Deflate: x^3 + c2 x^2 + c1 x + c0 = (x - r)(x^2 + b x + c).
    const double b = c2 + real_root;
    const double c = c1 + real_root * b;
    const double qdisc = b * b - 4.0 * c;
    if (qdisc < 0.0) {
      const cplx z = poly.polish(cplx(-0.5 * b, 0.5 * std::sqrt(-qdisc)));
      roots[1] = z;
      roots[2] = std::conj(z);
    } else {
      const double s = -0.5 * (b + std::copysign(std::sqrt(qdisc), b));
      const double r1 = s;
      const double r2 = (s == 0.0) ? 0.0 : c / s;
      roots[1] = poly.polish(r1);
      roots[2] = poly.polish(r2);
    }
  }
  std::sort(roots.begin(), roots.end(), root_order);
  return roots;
}

Complex3 eigenvalues3(const Matrix3& a) {
  const double minors = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) +
                        a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0) +
                        a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  return cubic_roots(-trace3(a), minors, -det3(a));
}

Matrix3 second_additive_compound(const Matrix3& a) {
  return Matrix3{{a(0, 0) + a(1, 1), a(1, 2), -a(0, 2),
                  a(2, 1), a(0, 0) + a(2, 2), a(0, 1),
                  -a(2, 0), a(1, 0), a(1, 1) + a(2, 2)}};
}

CertificateReport hurwitz_certificate(const Matrix3& a) {
  CertificateReport report;
  report.trace = trace3(a);
  report.det = det3(a);
  report.compound_det = det3(second_additive_compound(a));
  report.stable = report.trace < 0.0 && report.det < 0.0 && report.compound_det < 0.0;
  return report;
}

}  // namespace nlsync

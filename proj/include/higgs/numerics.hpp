#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace higgs {

using complexd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Series-stabilized evaluators for the sinh/coth combinations that appear
// in the cone-metric family.  Both are even functions; the Taylor branch
// keeps them accurate through the cusp endpoint (argument -> 0) where the
// naive quotients lose all digits.

/// sinh(x)/x, with a 4-term series for |x| < 1e-4.
inline double sinch(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0));
  }
  return std::sinh(x) / x;
}

inline complexd sinch(complexd x) {
  if (std::abs(x) < 1e-4) {
    const complexd x2 = x * x;
    return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0));
  }
  return std::sinh(x) / x;
}

/// x*coth(x), with series 1 + x^2/3 - x^4/45 + 2x^6/945 for |x| < 1e-4.
inline double xcoth(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 + x2 / 3.0 - x2 * x2 / 45.0 + 2.0 * x2 * x2 * x2 / 945.0;
  }
  return x / std::tanh(x);
}

/// exp(a * log z) on the branch gamma in (-pi, pi); z = r e^{i gamma}.
inline complexd zpow(double r, double gamma, double a) {
  return std::exp(a * complexd(std::log(r), gamma));
}

inline complexd zpow(double r, double gamma, complexd a) {
  return std::exp(a * complexd(std::log(r), gamma));
}

// ---------------------------------------------------------------------------
// Small dense 2x2 complex matrices.  Everything in the local models is rank 2,
// so a hand-rolled value type beats dragging in a linear-algebra library.

struct Mat2 {
  complexd a{0.0}, b{0.0}, c{0.0}, d{0.0};  // [[a, b], [c, d]]

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 diag(complexd x, complexd y) { return {x, 0.0, 0.0, y}; }

  complexd det() const { return a * d - b * c; }
  complexd trace() const { return a + d; }

  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d,
            c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  friend Mat2 operator*(complexd s, const Mat2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }

  Mat2 inverse() const {
    const complexd dd = det();
    if (std::abs(dd) == 0.0) throw std::domain_error("Mat2::inverse: singular matrix");
    return {d / dd, -b / dd, -c / dd, a / dd};
  }
  Mat2 conj_transpose() const {
    return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
  }
  double frobenius() const {
    return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d));
  }
};

inline double frobenius_distance(const Mat2& x, const Mat2& y) { return (x - y).frobenius(); }

// ---------------------------------------------------------------------------
// Positive Hermitian 2x2 matrices (fibre metrics) and the GL(2)/U(2)
// geodesic distance  dist(h,k) = sqrt(sum_i log(lambda_i)^2),  lambda_i the
// eigenvalues of h^{-1} k.

struct Hermitian2 {
  double h11{1.0}, h22{1.0};
  complexd h12{0.0};

  static Hermitian2 diag(double x, double y) { return {x, y, 0.0}; }

  double det() const { return h11 * h22 - std::norm(h12); }
  bool positive_definite() const { return h11 > 0.0 && det() > 0.0; }

  Mat2 to_mat2() const { return {h11, h12, std::conj(h12), h22}; }
};

/// Eigenvalues of h^{-1} k for positive definite h, k (real and positive).
/// Roots of det(k - lambda h) = 0, clamped against round-off.
inline std::pair<double, double> relative_eigenvalues(const Hermitian2& h, const Hermitian2& k) {
  const double dh = h.det();
  const double dk = k.det();
  const double bb = h.h11 * k.h22 + h.h22 * k.h11 -
                    2.0 * (k.h12.real() * h.h12.real() + k.h12.imag() * h.h12.imag());
  double disc = bb * bb - 4.0 * dh * dk;
  if (disc < 0.0) disc = 0.0;  // Hermitian pencil: analytically >= 0
  const double root = std::sqrt(disc);
  double l1 = (bb + root) / (2.0 * dh);
  double l2 = (bb - root) / (2.0 * dh);
  const double tiny = std::numeric_limits<double>::min();
  if (l1 < tiny) l1 = tiny;
  if (l2 < tiny) l2 = tiny;
  return {l1, l2};
}

inline double symmetric_space_distance(const Hermitian2& h, const Hermitian2& k) {
  const auto [l1, l2] = relative_eigenvalues(h, k);
  const double a = std::log(l1), b = std::log(l2);
  return std::sqrt(a * a + b * b);
}

// Least-squares slope of y against x (used for growth-exponent fits).
inline double lsq_slope(const double* x, const double* y, std::size_t n) {
  if (n < 2) throw std::invalid_argument("lsq_slope: need at least 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace higgs

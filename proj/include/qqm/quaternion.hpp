#pragma once

// Quaternions in symplectic form q = z + zeta j, with z, zeta complex.
//
// Product rule (from ij = -ji, j^2 = -1, and j w = conj(w) j for complex w):
//   (z1 + zeta1 j)(z2 + zeta2 j) = (z1 z2 - zeta1 conj(zeta2))
//                                + (z1 zeta2 + zeta1 conj(z2)) j

#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>

namespace qqm {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

struct Quaternion {
  Complex z{};
  Complex zeta{};

  constexpr Quaternion() = default;
  constexpr Quaternion(Complex z_, Complex zeta_ = {}) : z{z_}, zeta{zeta_} {}
  constexpr Quaternion(double re) : z{re, 0.0} {}

  static constexpr Quaternion one() { return {Complex{1.0, 0.0}}; }
  static constexpr Quaternion i() { return {Complex{0.0, 1.0}}; }
  static constexpr Quaternion j() { return {Complex{}, Complex{1.0, 0.0}}; }
  static constexpr Quaternion k() { return {Complex{}, Complex{0.0, 1.0}}; }

  // Real 4-vector view (w, x, y, z) of w + x i + y j + z k.
  constexpr double w() const { return z.real(); }
  constexpr double x() const { return z.imag(); }
  constexpr double y() const { return zeta.real(); }
  constexpr double kz() const { return zeta.imag(); }

  constexpr Quaternion& operator+=(const Quaternion& o) {
    z += o.z;
    zeta += o.zeta;
    return *this;
  }
  constexpr Quaternion& operator-=(const Quaternion& o) {
    z -= o.z;
    zeta -= o.zeta;
    return *this;
  }
  constexpr Quaternion& operator*=(double s) {
    z *= s;
    zeta *= s;
    return *this;
  }

  friend constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
  friend constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
  friend constexpr Quaternion operator-(const Quaternion& a) { return {-a.z, -a.zeta}; }
  friend constexpr Quaternion operator*(Quaternion a, double s) { return a *= s; }
  friend constexpr Quaternion operator*(double s, Quaternion a) { return a *= s; }
  friend constexpr Quaternion operator/(Quaternion a, double s) { return a *= (1.0 / s); }

  friend constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return {a.z * b.z - a.zeta * std::conj(b.zeta), a.z * b.zeta + a.zeta * std::conj(b.z)};
  }

  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
    return os << "(" << q.z << " + " << q.zeta << " j)";
  }
};

inline constexpr Quaternion q_mul(const Quaternion& a, const Quaternion& b) { return a * b; }

inline constexpr Quaternion q_conj(const Quaternion& a) { return {std::conj(a.z), -a.zeta}; }

inline constexpr double norm2(const Quaternion& a) { return std::norm(a.z) + std::norm(a.zeta); }

inline double abs(const Quaternion& a) { return std::hypot(std::abs(a.z), std::abs(a.zeta)); }

// a * i. The j-part picks up a sign flip because j i = -i j.
inline constexpr Quaternion right_mul_i(const Quaternion& a) { return {kI * a.z, -kI * a.zeta}; }

// i * a.
inline constexpr Quaternion left_mul_i(const Quaternion& a) { return {kI * a.z, kI * a.zeta}; }

// Largest absolute component difference.
inline double max_component_diff(const Quaternion& a, const Quaternion& b) {
  const Quaternion d = a - b;
  return std::max({std::abs(d.z.real()), std::abs(d.z.imag()), std::abs(d.zeta.real()),
                   std::abs(d.zeta.imag())});
}

inline bool approx_equal(const Quaternion& a, const Quaternion& b, double tol = 1e-12) {
  return max_component_diff(a, b) <= tol;
}

/// rho (cos(theta) e^{i gamma} + sin(theta) e^{i omega} j).
///
/// Ranges after decomposition: theta in [0, pi/2], gamma and omega in (-pi, pi].
/// Phases with vanishing amplitude are set to zero.
struct PolarUnitQuaternion {
  double rho = 0.0;
  double theta = 0.0;
  double gamma = 0.0;
  double omega = 0.0;
};

inline Quaternion polar_compose(const PolarUnitQuaternion& p) {
  return {p.rho * std::cos(p.theta) * std::polar(1.0, p.gamma),
          p.rho * std::sin(p.theta) * std::polar(1.0, p.omega)};
}

namespace detail {
// std::arg returns values in [-pi, pi]; fold -pi onto +pi.
inline double principal_arg(Complex w) {
  const double a = std::arg(w);
  return a == -std::numbers::pi ? std::numbers::pi : a;
}
}  // namespace detail

inline PolarUnitQuaternion polar_decompose(const Quaternion& q) {
  PolarUnitQuaternion p;
  const double az = std::abs(q.z);
  const double azeta = std::abs(q.zeta);
  p.rho = std::hypot(az, azeta);
  if (p.rho == 0.0) return p;
  p.theta = std::atan2(azeta, az);
  p.gamma = az == 0.0 ? 0.0 : detail::principal_arg(q.z);
  p.omega = azeta == 0.0 ? 0.0 : detail::principal_arg(q.zeta);
  return p;
}

}  // namespace qqm

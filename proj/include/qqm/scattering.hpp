#pragma once

// Quaternionic particle on the scalar step V = 0 (x < 0), V0 (x >= 0).
//
// Region I holds the incident and reflected waves, region II the
// transmitted wave, each of the form
//   A [cos(Theta) e^{i (+-n x + g.x)} + sin(Theta) e^{i (-+n x + w.x)} j]
// with normal wave number n along x and transverse vectors g, w (|g| = |w|).
// Continuity of the value and of the gradient at the incidence point (the
// origin) with real R, T and collinear normal momenta gives
//   |q| = |k|,  |p|^2 / |k|^2 = |g_p|^2 / |g_k|^2 = 1 - V0 / E,
//   R = (k - p) / (k + p),  T = 2 k / (k + p),
//   sin^2 of the three mixing angles equal,
//   g_q = -g_k, w_q = -w_k,  g_p = (p/k) g_k, w_p = (p/k) w_k.

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "qqm/errors.hpp"
#include "qqm/grid.hpp"
#include "qqm/observables.hpp"
#include "qqm/quaternion.hpp"
#include "qqm/units.hpp"
#include "qqm/vec3.hpp"

namespace qqm {

struct StepScatteringSpec {
  double total_energy = 1.0;
  double v0 = 0.0;
  double theta_k = 0.0;
  /// Transverse phase vectors of the incident wave; must have zero x component.
  Vec3 gamma_k_perp{};
  Vec3 omega_k_perp{};
  Units units{};
};

struct StepScatteringResult {
  double k_mag = 0.0;
  double q_mag = 0.0;
  double p_mag = 0.0;
  double r_coeff = 0.0;
  double t_coeff = 0.0;
  /// R^2 and (p/k) T^2.
  double reflect_prob = 0.0;
  double transmit_prob = 0.0;
  double theta_q = 0.0;
  double theta_p = 0.0;
  Vec3 gamma_q_perp{};
  Vec3 gamma_p_perp{};
  Vec3 omega_q_perp{};
  Vec3 omega_p_perp{};
  /// Normal (x) current of each partial wave; reflected is negative.
  double current_incident = 0.0;
  double current_reflected = 0.0;
  double current_transmitted = 0.0;
};

inline constexpr double kStepRelativeTolerance = 1e-12;

inline void validate_step(const StepScatteringSpec& s) {
  if (!(s.units.hbar > 0.0) || !(s.units.mass > 0.0))
    throw ConstraintViolation("S5:units", "hbar and mass must be positive");
  if (!(s.v0 >= 0.0)) throw ConstraintViolation("S2:v0", "step height must be non-negative");
  if (!(s.total_energy > s.v0))
    throw EvanescentRegime("total energy " + std::to_string(s.total_energy) + " does not exceed V0 " +
                           std::to_string(s.v0));
  const double g2 = norm2(s.gamma_k_perp);
  const double w2 = norm2(s.omega_k_perp);
  if (std::abs(g2 - w2) > kStepRelativeTolerance * std::max(1.0, g2))
    throw ConstraintViolation("S6:norm", "|gamma_k_perp|^2 != |omega_k_perp|^2");
  if (s.gamma_k_perp[0] != 0.0 || s.omega_k_perp[0] != 0.0)
    throw ConstraintViolation("S4:transverse", "transverse vectors must be orthogonal to the step normal");
  if (!(s.units.wavenumber_sq_per_energy() * s.total_energy > g2))
    throw NoPropagation("transverse wave number leaves no normal momentum");
}

inline StepScatteringResult solve_step(const StepScatteringSpec& s) {
  validate_step(s);
  StepScatteringResult r;
  const double k2 = s.units.wavenumber_sq_per_energy() * s.total_energy - norm2(s.gamma_k_perp);
  const double ratio = 1.0 - s.v0 / s.total_energy;
  const double scale = std::sqrt(ratio);
  r.k_mag = std::sqrt(k2);
  r.q_mag = r.k_mag;
  r.p_mag = r.k_mag * scale;
  r.r_coeff = (r.k_mag - r.p_mag) / (r.k_mag + r.p_mag);
  r.t_coeff = 2.0 * r.k_mag / (r.k_mag + r.p_mag);
  r.reflect_prob = r.r_coeff * r.r_coeff;
  r.transmit_prob = r.p_mag / r.k_mag * r.t_coeff * r.t_coeff;
  r.theta_q = s.theta_k;
  r.theta_p = s.theta_k;
  r.gamma_q_perp = -s.gamma_k_perp;
  r.omega_q_perp = -s.omega_k_perp;
  r.gamma_p_perp = scale * s.gamma_k_perp;
  r.omega_p_perp = scale * s.omega_k_perp;
  const double hm = s.units.hbar / s.units.mass;
  r.current_incident = hm * r.k_mag;
  r.current_reflected = -hm * r.q_mag * r.reflect_prob;
  r.current_transmitted = hm * r.p_mag * r.t_coeff * r.t_coeff;
  return r;
}

/// amplitude * (cos(theta) e^{i kz.x} + sin(theta) e^{i kzeta.x} j).
struct PartialWave {
  double amplitude = 1.0;
  double theta = 0.0;
  Vec3 kz{};
  Vec3 kzeta{};

  Quaternion value(const Vec3& x) const {
    return {amplitude * std::cos(theta) * std::polar(1.0, dot(kz, x)),
            amplitude * std::sin(theta) * std::polar(1.0, dot(kzeta, x))};
  }

  Quaternion derivative(const Vec3& x, std::size_t axis) const {
    return {amplitude * std::cos(theta) * kI * kz[axis] * std::polar(1.0, dot(kz, x)),
            amplitude * std::sin(theta) * kI * kzeta[axis] * std::polar(1.0, dot(kzeta, x))};
  }
};

struct StepWaves {
  PartialWave incident;
  PartialWave reflected;
  PartialWave transmitted;
};

inline StepWaves step_waves(const StepScatteringSpec& s, const StepScatteringResult& r) {
  const Vec3 ex{1.0, 0.0, 0.0};
  return {{1.0, s.theta_k, r.k_mag * ex + s.gamma_k_perp, -r.k_mag * ex + s.omega_k_perp},
          {r.r_coeff, r.theta_q, -r.q_mag * ex + r.gamma_q_perp, r.q_mag * ex + r.omega_q_perp},
          {r.t_coeff, r.theta_p, r.p_mag * ex + r.gamma_p_perp, -r.p_mag * ex + r.omega_p_perp}};
}

inline Quaternion region1_value(const StepWaves& w, const Vec3& x) {
  return w.incident.value(x) + w.reflected.value(x);
}

inline Quaternion region2_value(const StepWaves& w, const Vec3& x) { return w.transmitted.value(x); }

/// The full piecewise wave function.
inline Quaternion step_value(const StepWaves& w, const Vec3& x) {
  return x[0] < 0.0 ? region1_value(w, x) : region2_value(w, x);
}

struct BoundaryResiduals {
  double value = 0.0;       ///< |Phi_I - Phi_II|
  double normal = 0.0;      ///< |d_x Phi_I - d_x Phi_II|
  double transverse = 0.0;  ///< max over y, z of |d_a Phi_I - d_a Phi_II|

  double linf() const { return std::max({value, normal, transverse}); }
};

/// Interface matching evaluated with analytic gradients at each probe point
/// (x component ignored, the interface is x = 0). With non-zero transverse
/// vectors the matching holds at the origin only.
inline BoundaryResiduals boundary_residuals(const StepScatteringSpec& s, const StepScatteringResult& r,
                                            std::span<const Vec3> probes) {
  const StepWaves w = step_waves(s, r);
  BoundaryResiduals b;
  for (Vec3 x : probes) {
    x[0] = 0.0;
    b.value = std::max(b.value, abs(region1_value(w, x) - region2_value(w, x)));
    auto jump = [&](std::size_t a) {
      return abs(w.incident.derivative(x, a) + w.reflected.derivative(x, a) - w.transmitted.derivative(x, a));
    };
    b.normal = std::max(b.normal, jump(0));
    b.transverse = std::max({b.transverse, jump(1), jump(2)});
  }
  return b;
}

inline BoundaryResiduals boundary_residuals(const StepScatteringSpec& s, const StepScatteringResult& r) {
  const std::array<Vec3, 1> origin{Vec3{}};
  return boundary_residuals(s, r, origin);
}

struct CurrentBalance {
  double incident = 0.0;
  double reflected = 0.0;
  double transmitted = 0.0;
  double region1 = 0.0;  ///< net normal current of incident + reflected
  double residual = 0.0; ///< |region1 - transmitted|
};

template <class WaveFn>
double sampled_normal_current(WaveFn&& wave, const Vec3& at, const Units& units, double h) {
  return current_at(std::forward<WaveFn>(wave), at, units, h)[0];
}

/// Normal currents measured by sampling the waves on small grids at
/// `probe_distance` either side of the interface.
inline CurrentBalance current_balance(const StepScatteringSpec& s, const StepScatteringResult& r,
                                      double probe_distance = 0.5, double h = 1e-3) {
  const StepWaves w = step_waves(s, r);
  const Vec3 left{-probe_distance, 0.3, -0.2};
  const Vec3 right{probe_distance, 0.3, -0.2};
  CurrentBalance cb;
  cb.incident = sampled_normal_current([&](const Vec3& x) { return w.incident.value(x); }, left, s.units, h);
  cb.reflected = sampled_normal_current([&](const Vec3& x) { return w.reflected.value(x); }, left, s.units, h);
  cb.region1 = sampled_normal_current([&](const Vec3& x) { return region1_value(w, x); }, left, s.units, h);
  cb.transmitted = sampled_normal_current([&](const Vec3& x) { return region2_value(w, x); }, right, s.units, h);
  cb.residual = std::abs(cb.region1 - cb.transmitted);
  return cb;
}

}  // namespace qqm

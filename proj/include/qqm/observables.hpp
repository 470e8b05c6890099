#pragma once

// Observables of the non-anti-hermitian formulation. Momentum acts as
// p Phi = -hbar (grad Phi) i with i on the right; currents and expectation
// values are symmetrized with their conjugates and therefore real:
//   j = (1/2m) [Phi* p Phi + (Phi* p Phi)*],
//   <O> = (1/2) integral [Psi* O Psi + (Psi* O Psi)*].

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qqm/grid.hpp"
#include "qqm/quaternion.hpp"
#include "qqm/residual.hpp"
#include "qqm/units.hpp"
#include "qqm/vec3.hpp"
#include "qqm/wavefunction.hpp"

namespace qqm {

struct CurrentField {
  Grid grid;
  std::vector<Vec3> vectors;

  explicit CurrentField(Grid g) : grid{std::move(g)}, vectors(grid.size(), Vec3{}) {}
};

using DensityField = RealField;

inline constexpr double kRealnessTolerance = 1e-12;

namespace detail {

/// q + q*, checked to be real within tolerance relative to `scale`.
inline double symmetrized_real(const Quaternion& q, double scale) {
  const Quaternion s = q + q_conj(q);
  const double stray = std::max(std::abs(s.z.imag()), std::abs(s.zeta));
  if (stray > kRealnessTolerance * std::max(1.0, scale))
    throw std::logic_error("symmetrized quaternion expression is not real");
  return s.z.real();
}

}  // namespace detail

/// One field per active axis: -hbar (d Phi / dx_a) i.
inline std::vector<QField> momentum_apply(const QField& f, const Units& units = {}) {
  std::vector<QField> out = gradient_fd(f);
  for (auto& comp : out)
    for (auto& v : comp.values) v = right_mul_i(v) * -units.hbar;
  return out;
}

inline DensityField probability_density(const QField& f) {
  return map(f, [](const Quaternion& q) { return norm2(q); });
}

inline CurrentField probability_current(const QField& f, const Units& units = {}) {
  const auto p = momentum_apply(f, units);
  CurrentField j(f.grid);
  const double inv2m = 0.5 / units.mass;
  for (std::size_t a = 0; a < p.size(); ++a) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Quaternion q = q_conj(f[i]) * p[a][i];
      j.vectors[i][a] = inv2m * detail::symmetrized_real(q, abs(q));
    }
  }
  return j;
}

/// Numeric current of a wave function at one point: probability_current at
/// the centre of 5^3 grids of spacing h and 2h, combined by Richardson
/// extrapolation (fourth order in h).
template <class WaveFn>
Vec3 current_at(WaveFn&& wave, const Vec3& x, const Units& units = {}, double h = 1e-3) {
  auto centre = [&](double s) {
    const Grid g(3, x - Vec3{2 * s, 2 * s, 2 * s}, {s, s, s}, {5, 5, 5});
    return probability_current(sample(g, wave), units).vectors[g.flatten({2, 2, 2})];
  };
  const Vec3 fine = centre(h);
  const Vec3 coarse = centre(2 * h);
  return (4.0 / 3.0) * fine - (1.0 / 3.0) * coarse;
}

/// Closed-form current of a single-branch free particle,
///   j = rho^2 cos(2 Theta) j0 + (hbar/m) rho^2 |phi|^2 (cos^2 Theta grad Gamma - sin^2 Theta grad Omega),
/// with j0 = (hbar/m) Im(conj(phi) grad phi). A complex Q1 only rescales it by |Q1|^2.
inline CurrentField current_closed_form(const FreeParticleSpec& spec, const Grid& grid) {
  if (!spec.single_branch())
    throw std::invalid_argument("closed-form current is only defined for a single branch (Q2 = Q3 = Q4 = 0)");
  if (spec.q_weights[0].zeta != Complex{})
    throw std::invalid_argument("closed-form current needs a complex Q1");
  require_valid(spec);
  const double weight = norm2(spec.q_weights[0]);
  const double hm = spec.units.hbar / spec.units.mass;
  const double r2 = spec.rho * spec.rho;
  CurrentField j(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3 x = grid.point(i);
    const Complex phi = spec.phi.value(x);
    const auto dphi = spec.phi.gradient(x);
    const double th = spec.mixing_angle(x);
    const double c2 = std::cos(th) * std::cos(th);
    const double s2 = std::sin(th) * std::sin(th);
    for (std::size_t a = 0; a < 3; ++a) {
      const double j0 = hm * (std::conj(phi) * dphi[a]).imag();
      j.vectors[i][a] = weight * r2 * ((c2 - s2) * j0 + hm * std::norm(phi) * (c2 * spec.gamma[a] - s2 * spec.omega[a]));
    }
  }
  return j;
}

inline RealField divergence_fd(const CurrentField& j) {
  RealField div(j.grid);
  for (std::size_t a = 0; a < j.grid.rank(); ++a) {
    RealField comp(j.grid);
    for (std::size_t i = 0; i < comp.size(); ++i) comp[i] = j.vectors[i][a];
    const RealField d = derivative_fd(comp, a);
    for (std::size_t i = 0; i < div.size(); ++i) div[i] += d[i];
  }
  return div;
}

/// |div j| divided by max |Phi|^2, over points two cells from the boundary
/// (the divergence of a one-sided boundary current is not centred). For
/// stationary states the density is constant in time, so this is the whole
/// continuity equation.
inline ResidualReport continuity_residual(const QField& f, const Units& units = {}) {
  const double dens = linf(f) * linf(f);
  if (dens == 0.0) throw std::invalid_argument("continuity residual of a zero field is undefined");
  const RealField div = divergence_fd(probability_current(f, units));
  ResidualAccumulator acc;
  for (std::size_t i = 0; i < div.size(); ++i)
    if (div.grid.is_interior(i, 2)) acc.add(std::abs(div[i]));
  return acc.report(dens);
}

/// Trapezoidal weight of a grid point relative to the cell volume.
inline double trapezoid_factor(const Grid& g, std::size_t idx) {
  const auto ijk = g.unflatten(idx);
  double w = 1.0;
  for (std::size_t a = 0; a < g.rank(); ++a)
    if (ijk[a] == 0 || ijk[a] + 1 == g.dims()[a]) w *= 0.5;
  return w;
}

/// (1/2) sum_x w(x) [Psi* (O Psi) + (Psi* (O Psi))*] with trapezoidal
/// weights scaled by `weight` (normally the cell volume).
inline double expectation_value(const QField& op_applied, const QField& f, double weight) {
  require_same_grid(op_applied.grid, f.grid);
  Quaternion sum{};
  double magnitude_sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Quaternion q = q_conj(f[i]) * op_applied[i] * (trapezoid_factor(f.grid, i) * weight);
    sum += q + q_conj(q);
    magnitude_sum += abs(q);
  }
  sum *= 0.5;
  const double stray = std::max(std::abs(sum.z.imag()), std::abs(sum.zeta));
  if (stray > kRealnessTolerance * std::max(magnitude_sum, 1e-300))
    throw std::logic_error("expectation value is not real");
  return sum.z.real();
}

inline double expectation_value(const QField& op_applied, const QField& f) {
  return expectation_value(op_applied, f, f.grid.cell_volume());
}

/// <O> / <1> over the grid, for non-normalizable states sampled over a box.
inline double box_normalized_expectation(const QField& op_applied, const QField& f) {
  return expectation_value(op_applied, f) / expectation_value(f, f);
}

}  // namespace qqm

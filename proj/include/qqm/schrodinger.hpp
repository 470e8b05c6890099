#pragma once

// Residual harness for the quaternionic Schrodinger equation
//   hbar (dPsi/dt) i = H Psi,   H = -(hbar^2 / 2m) Laplacian + V,
// with the imaginary unit acting from the right, and its stationary form
// H Phi = E Phi.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "qqm/grid.hpp"
#include "qqm/quaternion.hpp"
#include "qqm/residual.hpp"
#include "qqm/units.hpp"

namespace qqm {

/// Real scalar potential: zero, a step, or sampled values.
class Potential {
 public:
  struct Zero {};
  struct Step {
    double v0 = 0.0;
    std::size_t axis = 0;
    double offset = 0.0;
  };

  static Potential zero() { return Potential{Zero{}}; }

  /// 0 for x[axis] < offset, v0 for x[axis] >= offset.
  static Potential step(double v0, std::size_t axis = 0, double offset = 0.0) {
    if (axis > 2) throw std::invalid_argument("step axis must be 0, 1 or 2");
    return Potential{Step{v0, axis, offset}};
  }

  static Potential sampled(RealField values) { return Potential{std::move(values)}; }

  double at(const Grid& grid, std::size_t idx) const {
    if (std::holds_alternative<Zero>(kind_)) return 0.0;
    if (const auto* s = std::get_if<Step>(&kind_)) return grid.point(idx)[s->axis] >= s->offset ? s->v0 : 0.0;
    return std::get<RealField>(kind_)[idx];
  }

  void check_grid(const Grid& grid) const {
    if (const auto* f = std::get_if<RealField>(&kind_)) require_same_grid(f->grid, grid);
  }

 private:
  explicit Potential(std::variant<Zero, Step, RealField> k) : kind_{std::move(k)} {}
  std::variant<Zero, Step, RealField> kind_;
};

inline QField hamiltonian_apply(const QField& f, const Potential& v, const Units& units = {}) {
  v.check_grid(f.grid);
  QField out = laplacian_fd(f);
  const double kin = -units.kinetic();
  parallel_for(out.size(), [&](std::size_t i) { out[i] = out[i] * kin + f[i] * v.at(f.grid, i); });
  return out;
}

/// |H Phi - E Phi| over interior points, divided by max |Phi|.
inline ResidualReport stationary_residual(const QField& f, double energy, const Potential& v,
                                          const Units& units = {}, bool keep_field = false) {
  const double amp = linf(f);
  if (amp == 0.0) throw std::invalid_argument("stationary residual of a zero field is undefined");
  const QField hf = hamiltonian_apply(f, v, units);
  ResidualAccumulator acc;
  RealField field(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f.grid.is_interior(i)) continue;
    const double r = abs(hf[i] - f[i] * energy);
    acc.add(r);
    field[i] = r / amp;
  }
  ResidualReport rep = acc.report(amp);
  rep.masked_fraction = 0.0;
  if (keep_field) rep.field = std::move(field);
  return rep;
}

/// Which side the imaginary unit multiplies the time derivative from.
enum class UnitOrdering { right, left };

/// Residual of hbar (dPsi/dt) i - H Psi at every interior grid point and at
/// each requested time. dPsi/dt is a central difference with step dt.
/// Normalized by the largest |Psi| seen.
template <class Sampler>
ResidualReport time_dependent_residual(Sampler&& psi, const Potential& v, const Grid& grid,
                                       std::span<const double> t_samples, const Units& units = {},
                                       double dt = 1e-4, UnitOrdering ordering = UnitOrdering::right) {
  if (t_samples.size() < 3) throw std::invalid_argument("time dependent residual needs at least 3 time samples");
  v.check_grid(grid);
  ResidualAccumulator acc;
  double amp = 0.0;
  for (double t : t_samples) {
    const QField before = sample(grid, [&](const Vec3& x) { return psi(x, t - dt); });
    const QField now = sample(grid, [&](const Vec3& x) { return psi(x, t); });
    const QField after = sample(grid, [&](const Vec3& x) { return psi(x, t + dt); });
    const QField hpsi = hamiltonian_apply(now, v, units);
    amp = std::max(amp, linf(now));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!grid.is_interior(i)) continue;
      const std::array<Quaternion, 3> series{before[i], now[i], after[i]};
      const Quaternion d = time_derivative_fd(std::span<const Quaternion>(series), dt)[1] * units.hbar;
      const Quaternion lhs = ordering == UnitOrdering::right ? right_mul_i(d) : left_mul_i(d);
      acc.add(abs(lhs - hpsi[i]));
    }
  }
  if (amp == 0.0) throw std::invalid_argument("time dependent residual of a zero field is undefined");
  return acc.report(amp);
}

template <class Sampler>
ResidualReport time_dependent_residual(Sampler&& psi, const Potential& v, const Grid& grid,
                                       const std::vector<double>& t_samples, const Units& units = {},
                                       double dt = 1e-4, UnitOrdering ordering = UnitOrdering::right) {
  return time_dependent_residual(std::forward<Sampler>(psi), v, grid, std::span<const double>(t_samples),
                                 units, dt, ordering);
}

/// n equally spaced times covering one period 2 pi hbar / E, endpoints included.
inline std::vector<double> one_period_times(double energy, const Units& units = {}, std::size_t n = 9) {
  const double period = 2.0 * std::numbers::pi * units.hbar / energy;
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = period * static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

}  // namespace qqm

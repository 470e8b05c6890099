#pragma once

namespace qqm {

/// hbar and particle mass. Both default to 1.
struct Units {
  double hbar = 1.0;
  double mass = 1.0;

  /// hbar^2 / (2 m), the kinetic prefactor.
  constexpr double kinetic() const { return hbar * hbar / (2.0 * mass); }
  /// 2 m / hbar^2, converts energies to squared wave numbers.
  constexpr double wavenumber_sq_per_energy() const { return 2.0 * mass / (hbar * hbar); }
};

}  // namespace qqm

#pragma once

// Closed-form quaternionic wave functions and their validators:
//
//  * the unit-quaternion time phase
//      Lambda(t) = Lambda0 { cos(Xi) e^{-i E t / hbar} + sin(Xi) e^{i (E t / hbar + tau0)} j },
//    which satisfies Lambda' i Lambda* = E / hbar;
//  * free particles Phi = rho phi(x) sum_a K_a(x) Q_a built from a complex
//    plane wave phi and four sign branches of
//      K = cos(Theta) e^{+-i Gamma} + sin(Theta) e^{+-i Omega} j
//    with Gamma, Omega, Theta linear in x;
//  * the four real equations a product Phi = phi rho K must satisfy;
//  * the ODE check showing a non-harmonic Theta admits no solution.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qqm/errors.hpp"
#include "qqm/grid.hpp"
#include "qqm/quaternion.hpp"
#include "qqm/residual.hpp"
#include "qqm/units.hpp"
#include "qqm/vec3.hpp"

namespace qqm {

// ---------------------------------------------------------------------------
// Time phase

struct TimePhaseSpec {
  Quaternion lambda0 = Quaternion::one();
  double xi = 0.0;
  double energy = 1.0;
  double tau0 = 0.0;
  Units units{};
};

namespace detail {
inline void require_unit_lambda0(const TimePhaseSpec& spec) {
  const double n = abs(spec.lambda0);
  if (std::abs(n - 1.0) > 1e-12)
    throw ConstraintViolation("a10:unit", "time phase prefactor must be a unit quaternion, |lambda0| = " +
                                              std::to_string(n));
}
}  // namespace detail

inline Quaternion time_phase(const TimePhaseSpec& spec, double t) {
  detail::require_unit_lambda0(spec);
  const double w = spec.energy / spec.units.hbar;
  const Quaternion k{std::cos(spec.xi) * std::polar(1.0, -w * t),
                     std::sin(spec.xi) * std::polar(1.0, w * t + spec.tau0)};
  return spec.lambda0 * k;
}

/// Exact time derivative of time_phase.
inline Quaternion time_phase_derivative(const TimePhaseSpec& spec, double t) {
  detail::require_unit_lambda0(spec);
  const double w = spec.energy / spec.units.hbar;
  const Quaternion dk{-kI * w * std::cos(spec.xi) * std::polar(1.0, -w * t),
                      kI * w * std::sin(spec.xi) * std::polar(1.0, w * t + spec.tau0)};
  return spec.lambda0 * dk;
}

/// Lambda' i Lambda*, which must equal the real constant E / hbar.
inline Quaternion phase_law(const Quaternion& lambda, const Quaternion& dlambda) {
  return right_mul_i(dlambda) * q_conj(lambda);
}

/// Max over t of |FD(Lambda') i Lambda* - E / hbar| for an arbitrary phase
/// curve, the derivative taken by central differences with step dt.
template <class PhaseFn>
double phase_law_residual(PhaseFn&& lambda_of_t, double energy, const Units& units,
                          std::span<const double> t_samples, double dt) {
  if (t_samples.empty()) throw std::invalid_argument("no time samples");
  const Quaternion kappa{energy / units.hbar};
  double worst = 0.0;
  for (double t : t_samples) {
    const std::array<Quaternion, 3> series{lambda_of_t(t - dt), lambda_of_t(t), lambda_of_t(t + dt)};
    const Quaternion d = time_derivative_fd(std::span<const Quaternion>(series), dt)[1];
    worst = std::max(worst, abs(phase_law(series[1], d) - kappa));
  }
  return worst;
}

inline double time_phase_residual(const TimePhaseSpec& spec, std::span<const double> t_samples,
                                  double dt) {
  if (t_samples.size() < 3) throw std::invalid_argument("time phase residual needs at least 3 samples");
  return phase_law_residual([&](double t) { return time_phase(spec, t); }, spec.energy, spec.units,
                            t_samples, dt);
}

// ---------------------------------------------------------------------------
// Free particle

/// phi(x) = a1 e^{i k.x} + a2 e^{-i k.x}.
struct PlaneWaveSpec {
  Complex a1{1.0, 0.0};
  Complex a2{};
  Vec3 k{};

  double energy(const Units& u) const { return u.kinetic() * norm2(k); }

  Complex value(const Vec3& x) const {
    const double ph = dot(k, x);
    return a1 * std::polar(1.0, ph) + a2 * std::polar(1.0, -ph);
  }

  std::array<Complex, 3> gradient(const Vec3& x) const {
    const double ph = dot(k, x);
    const Complex c = kI * (a1 * std::polar(1.0, ph) - a2 * std::polar(1.0, -ph));
    return {c * k[0], c * k[1], c * k[2]};
  }
};

struct FreeParticleSpec {
  PlaneWaveSpec phi{};
  Vec3 gamma{};
  Vec3 omega{};
  Vec3 theta{};
  double gamma0 = 0.0;
  double omega0 = 0.0;
  double theta0 = 0.0;
  std::array<Quaternion, 4> q_weights{Quaternion::one(), Quaternion{}, Quaternion{}, Quaternion{}};
  double rho = 1.0;
  double total_energy = 0.0;
  Units units{};

  double complex_energy() const { return phi.energy(units); }

  double gamma_phase(const Vec3& x) const { return dot(gamma, x) + gamma0; }
  double omega_phase(const Vec3& x) const { return dot(omega, x) + omega0; }
  double mixing_angle(const Vec3& x) const { return dot(theta, x) + theta0; }

  bool single_branch() const {
    return q_weights[1] == Quaternion{} && q_weights[2] == Quaternion{} && q_weights[3] == Quaternion{};
  }
};

/// Sign pattern (Gamma, Omega) of the four superposed branches, in Q1..Q4 order.
inline constexpr std::array<std::array<int, 2>, 4> kBranchSigns{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

struct ConstraintCheck {
  std::string tag;
  double residual = 0.0;
  bool ok = true;
};

struct ConstraintReport {
  std::vector<ConstraintCheck> checks;

  bool valid() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.ok; });
  }

  const ConstraintCheck* first_failure() const {
    for (const auto& c : checks)
      if (!c.ok) return &c;
    return nullptr;
  }
};

inline constexpr double kConstraintTolerance = 1e-10;

/// Norm and orthogonality constraints on the phase vectors. Reports every
/// residual; never throws.
inline ConstraintReport validate_free_particle(const FreeParticleSpec& s) {
  const double g2 = norm2(s.gamma);
  const double w2 = norm2(s.omega);
  const double t2 = norm2(s.theta);
  const double budget = s.units.wavenumber_sq_per_energy() * (s.total_energy - s.complex_energy());
  const Vec3& k = s.phi.k;

  ConstraintReport rep;
  auto add = [&](std::string tag, double r) {
    const double a = std::abs(r);
    rep.checks.push_back({std::move(tag), a, a <= kConstraintTolerance});
  };
  add("L6:norm", g2 - w2);
  add("L6:energy", g2 + t2 - budget);
  add("L7:theta.gamma", dot(s.theta, s.gamma));
  add("L7:theta.omega", dot(s.theta, s.omega));
  add("L7:k.theta", dot(k, s.theta));
  add("L7:k.gamma", dot(k, s.gamma));
  add("L7:k.omega", dot(k, s.omega));
  return rep;
}

inline void require_valid(const FreeParticleSpec& spec) {
  const auto rep = validate_free_particle(spec);
  if (const auto* bad = rep.first_failure())
    throw ConstraintViolation(bad->tag, "free particle constraint violated, residual " +
                                            std::to_string(bad->residual));
  if (!(spec.rho > 0.0)) throw ConstraintViolation("A110:rho", "quaternionic radius must be positive");
}

/// Phi(x), no validation.
inline Quaternion free_particle_value(const FreeParticleSpec& s, const Vec3& x) {
  const Complex phi = s.phi.value(x);
  const double th = s.mixing_angle(x);
  const double g = s.gamma_phase(x);
  const double w = s.omega_phase(x);
  const double c = std::cos(th);
  const double sn = std::sin(th);
  Quaternion sum{};
  for (std::size_t a = 0; a < 4; ++a) {
    if (s.q_weights[a] == Quaternion{}) continue;
    const Quaternion branch{c * std::polar(1.0, kBranchSigns[a][0] * g),
                            sn * std::polar(1.0, kBranchSigns[a][1] * w)};
    sum += branch * s.q_weights[a];
  }
  return Quaternion{phi} * sum * s.rho;
}

inline QField sample_free_particle(const FreeParticleSpec& spec, const Grid& grid) {
  require_valid(spec);
  return sample(grid, [&](const Vec3& x) { return free_particle_value(spec, x); });
}

/// cos(Theta) e^{i k.x} + sin(Theta) e^{-i k.x} j: constant phase split
/// between the complex and j parts (phi = 1, gamma = k, omega = -k).
inline FreeParticleSpec split_phase_particle(const Vec3& k, double theta, const Units& units = {}) {
  FreeParticleSpec s;
  s.gamma = k;
  s.omega = -k;
  s.theta0 = theta;
  s.units = units;
  s.total_energy = units.kinetic() * norm2(k);
  return s;
}

/// e^{i k.x} (cos(Theta) + sin(Theta) j): a complex plane wave times a
/// constant unit quaternion.
inline FreeParticleSpec common_phase_particle(const Vec3& k, double theta, const Units& units = {}) {
  FreeParticleSpec s;
  s.phi.k = k;
  s.theta0 = theta;
  s.units = units;
  s.total_energy = units.kinetic() * norm2(k);
  return s;
}

// ---------------------------------------------------------------------------
// Separation residuals

/// phi (complex), rho, Theta, Gamma, Omega sampled on one grid, with
/// Phi = phi rho (cos(Theta) e^{i Gamma} + sin(Theta) e^{i Omega} j).
/// Phases are stored unwrapped.
struct SeparationFields {
  QField phi;
  RealField rho;
  RealField theta;
  RealField gamma;
  RealField omega;
};

/// Fields of a single-branch free particle with Q1 = 1, sampled from the
/// closed forms.
inline SeparationFields separation_fields(const FreeParticleSpec& spec, const Grid& grid) {
  if (!spec.single_branch() || !(spec.q_weights[0] == Quaternion::one()))
    throw std::invalid_argument("separation fields need Q1 = 1 and Q2 = Q3 = Q4 = 0");
  require_valid(spec);
  return {sample(grid, [&](const Vec3& x) { return Quaternion{spec.phi.value(x)}; }),
          sample(grid, [&](const Vec3&) { return spec.rho; }),
          sample(grid, [&](const Vec3& x) { return spec.mixing_angle(x); }),
          sample(grid, [&](const Vec3& x) { return spec.gamma_phase(x); }),
          sample(grid, [&](const Vec3& x) { return spec.omega_phase(x); })};
}

/// Rebuilds Phi from separated fields.
inline QField compose(const SeparationFields& sf) {
  QField out(sf.phi.grid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Quaternion k = polar_compose({sf.rho[i], sf.theta[i], sf.gamma[i], sf.omega[i]});
    out[i] = Quaternion{sf.phi[i].z} * k;
  }
  return out;
}

/// Residuals of the four real equations. Index 0..3 holds the real and
/// imaginary parts of the complex-part equation and of the j-part equation,
/// in that order: {Re complex, Re j, Im complex, Im j}.
struct SeparationReport {
  std::array<ResidualReport, 4> equations;
  static constexpr std::array<const char*, 4> kTags{"A16", "A17", "A18", "A19"};
};

/// Below this |cos(Theta)| (resp. |sin(Theta)|) the equations that divide by
/// it are not evaluated.
inline constexpr double kSingularThetaCutoff = 1e-3;

/// Pointwise residuals over interior points, reported in energy units
/// (each equation multiplied by hbar^2 / 2m) so they compare directly with
/// the stationary residual.
inline SeparationReport separation_residuals(const SeparationFields& sf, double complex_energy,
                                             double total_energy, const Units& units = {},
                                             bool keep_fields = false) {
  const Grid& g = sf.phi.grid;
  for (const Grid* other : {&sf.rho.grid, &sf.theta.grid, &sf.gamma.grid, &sf.omega.grid})
    require_same_grid(g, *other);

  Field<Complex> phi(g);
  double phi_max = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(sf.phi[i].zeta) != 0.0)
      throw std::invalid_argument("complex factor phi has a non-zero j part");
    phi[i] = sf.phi[i].z;
    phi_max = std::max(phi_max, std::abs(phi[i]));
  }

  const auto dphi = gradient_fd(phi);
  const auto drho = gradient_fd(sf.rho);
  const auto dth = gradient_fd(sf.theta);
  const auto dga = gradient_fd(sf.gamma);
  const auto dom = gradient_fd(sf.omega);
  const auto lrho = laplacian_fd(sf.rho);
  const auto lth = laplacian_fd(sf.theta);
  const auto lga = laplacian_fd(sf.gamma);
  const auto lom = laplacian_fd(sf.omega);

  const double rhs = units.wavenumber_sq_per_energy() * (complex_energy - total_energy);
  const double scale = units.kinetic();
  const std::size_t rank = g.rank();

  std::array<ResidualAccumulator, 4> acc;
  std::array<RealField, 4> fields{RealField(g), RealField(g), RealField(g), RealField(g)};

  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.is_interior(i)) continue;
    const Complex ph = phi[i];
    if (std::abs(ph) <= 1e-12 * phi_max)
      throw std::domain_error("complex factor phi vanishes at grid point " + std::to_string(i));
    const double rho = sf.rho[i];
    const double th = sf.theta[i];
    const double c = std::cos(th);
    const double s = std::sin(th);

    Complex grad_ln_phi_dot_grad_rho{};
    Complex g_dot_p{}, g_dot_q{};
    double grad_th2 = 0.0, grad_ga2 = 0.0, grad_om2 = 0.0, th_dot_ga = 0.0, th_dot_om = 0.0;
    for (std::size_t a = 0; a < rank; ++a) {
      const Complex gl_phi = dphi[a][i] / ph;
      const Complex gl = drho[a][i] / rho + gl_phi;  // grad(rho phi) / (rho phi)
      const Complex p = -s * dth[a][i] + kI * c * dga[a][i];
      const Complex q = c * dth[a][i] + kI * s * dom[a][i];
      grad_ln_phi_dot_grad_rho += gl_phi * drho[a][i];
      g_dot_p += gl * p;
      g_dot_q += gl * q;
      grad_th2 += dth[a][i] * dth[a][i];
      grad_ga2 += dga[a][i] * dga[a][i];
      grad_om2 += dom[a][i] * dom[a][i];
      th_dot_ga += dth[a][i] * dga[a][i];
      th_dot_om += dth[a][i] * dom[a][i];
    }
    const Complex z0 = (lrho[i] + 2.0 * grad_ln_phi_dot_grad_rho) / rho;

    if (std::abs(c) >= kSingularThetaCutoff) {
      const double tn = s / c;
      const Complex z1 = 2.0 * g_dot_p / c;
      const double r16 = (z0 + z1).real() - grad_ga2 - grad_th2 - tn * lth[i] - rhs;
      const double r18 = (z0 + z1).imag() + lga[i] - 2.0 * tn * th_dot_ga;
      acc[0].add(std::abs(r16) * scale);
      acc[2].add(std::abs(r18) * scale);
      fields[0][i] = r16 * scale;
      fields[2][i] = r18 * scale;
    } else {
      acc[0].skip();
      acc[2].skip();
    }
    if (std::abs(s) >= kSingularThetaCutoff) {
      const double ct = c / s;
      const Complex z2 = 2.0 * g_dot_q / s;
      const double r17 = (z0 + z2).real() - grad_om2 - grad_th2 + ct * lth[i] - rhs;
      const double r19 = (z0 + z2).imag() + lom[i] + 2.0 * ct * th_dot_om;
      acc[1].add(std::abs(r17) * scale);
      acc[3].add(std::abs(r19) * scale);
      fields[1][i] = r17 * scale;
      fields[3][i] = r19 * scale;
    } else {
      acc[1].skip();
      acc[3].skip();
    }
  }

  SeparationReport rep;
  for (std::size_t e = 0; e < 4; ++e) {
    rep.equations[e] = acc[e].report();
    if (keep_fields) rep.equations[e].field = std::move(fields[e]);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Non-harmonic mixing angle
//
// With Gamma, Omega linear and Theta free, the two conditions are
//   |grad Theta|^2 + |omega|^2 sin^2 Theta + |gamma|^2 cos^2 Theta = const
//   Theta'' = (|omega|^2 - |gamma|^2) sin Theta cos Theta.
// Integrating the second and evaluating the first along the trajectory
// shows they cannot hold together unless Theta is linear.

struct ThetaOdeReport {
  double mean = 0.0;
  double variance = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t steps = 0;
  /// The first equation's left side is not constant along the trajectory.
  bool inconsistent = false;
};

inline constexpr double kThetaVarianceFloor = 1e-10;

/// Integrates Theta'' = (|omega|^2 - |gamma|^2) sin cos with classical RK4 over
/// the extent of a 1D grid, then reports the spread of
/// Theta'^2 + |omega|^2 sin^2 + |gamma|^2 cos^2 at the grid points.
/// No preconditions on the parameters.
inline ThetaOdeReport theta_ode_profile(double gamma_norm, double omega_norm, double theta0,
                                        double theta0_prime, const Grid& domain) {
  if (domain.rank() != 1) throw std::invalid_argument("theta ODE domain must be a 1D grid");
  const double g2 = gamma_norm * gamma_norm;
  const double w2 = omega_norm * omega_norm;
  const double coupling = w2 - g2;
  const std::size_t n = domain.dims()[0];
  const double h = domain.spacing()[0];
  const double length = h * static_cast<double>(n - 1);
  const auto substeps = static_cast<std::size_t>(std::ceil(h / (1e-3 * length) - 1e-9));
  const double dx = h / static_cast<double>(substeps);

  auto rhs = [coupling](double th) { return coupling * std::sin(th) * std::cos(th); };
  auto lhs = [g2, w2](double th, double dth) {
    const double s = std::sin(th);
    const double c = std::cos(th);
    return dth * dth + w2 * s * s + g2 * c * c;
  };

  std::vector<double> values;
  values.reserve(n);
  double th = theta0;
  double v = theta0_prime;
  values.push_back(lhs(th, v));
  ThetaOdeReport rep;
  for (std::size_t cell = 1; cell < n; ++cell) {
    for (std::size_t s = 0; s < substeps; ++s) {
      const double k1t = v, k1v = rhs(th);
      const double k2t = v + 0.5 * dx * k1v, k2v = rhs(th + 0.5 * dx * k1t);
      const double k3t = v + 0.5 * dx * k2v, k3v = rhs(th + 0.5 * dx * k2t);
      const double k4t = v + dx * k3v, k4v = rhs(th + dx * k3t);
      th += dx / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t);
      v += dx / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      if (!std::isfinite(th) || !std::isfinite(v)) throw std::runtime_error("theta ODE step failure");
      ++rep.steps;
    }
    values.push_back(lhs(th, v));
  }

  const double count = static_cast<double>(values.size());
  rep.mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
  double ss = 0.0;
  for (double x : values) ss += (x - rep.mean) * (x - rep.mean);
  rep.variance = ss / count;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  rep.min = *lo;
  rep.max = *hi;
  rep.inconsistent = rep.variance > kThetaVarianceFloor;
  return rep;
}

/// theta_ode_profile restricted to the genuinely non-linear case.
inline ThetaOdeReport no_nontrivial_theta_check(double gamma_norm, double omega_norm, double theta0,
                                                double theta0_prime, const Grid& domain) {
  if (gamma_norm * gamma_norm == omega_norm * omega_norm)
    throw ConstraintViolation("L11:equal-norms", "|gamma|^2 = |omega|^2 makes Theta linear");
  if (theta0_prime == 0.0)
    throw ConstraintViolation("L11:static", "initial slope of Theta must be non-zero");
  return theta_ode_profile(gamma_norm, omega_norm, theta0, theta0_prime, domain);
}

}  // namespace qqm

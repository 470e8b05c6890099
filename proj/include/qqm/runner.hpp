#pragma once

// Runs a parsed scenario and produces summary rows, each tagged with the
// equation it checks, plus optional per-point CSV files.
//
// Exit codes: 0 all checks pass, 1 a threshold check failed, 2 the scenario
// could not be parsed or violates the schema, 3 the physical parameters
// violate a constraint (the message names it).

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qqm/csv.hpp"
#include "qqm/errors.hpp"
#include "qqm/grid.hpp"
#include "qqm/observables.hpp"
#include "qqm/scattering.hpp"
#include "qqm/scenario.hpp"
#include "qqm/schrodinger.hpp"
#include "qqm/wavefunction.hpp"

namespace qqm {

enum class RowStatus { pass, fail, info };

inline const char* to_string(RowStatus s) {
  switch (s) {
    case RowStatus::pass: return "pass";
    case RowStatus::fail: return "fail";
    case RowStatus::info: return "info";
  }
  return "?";
}

struct SummaryRow {
  std::string tag;
  std::string quantity;
  double value = 0.0;
  std::optional<double> threshold;
  RowStatus status = RowStatus::info;
  std::string note;
};

struct RunOptions {
  /// Overrides every discretization threshold.
  std::optional<double> tolerance;
  /// Number of additional refinement levels (each halves the spacing).
  std::size_t grid_refine = 0;
  /// Directory that relative output prefixes resolve against.
  std::filesystem::path out_dir = ".";
};

struct RunResult {
  int exit_code = 0;
  std::string message;
  std::vector<SummaryRow> rows;
  std::vector<std::filesystem::path> files;
};

inline constexpr double kDiscretizationTolerance = 5e-2;
inline constexpr double kClosedFormTolerance = 1e-12;
inline constexpr double kPointCurrentTolerance = 1e-10;
inline constexpr double kBalanceTolerance = 1e-8;
inline constexpr double kThetaVarianceThreshold = 1e-3;

namespace detail {

class Summary {
 public:
  explicit Summary(double discretization_tol) : disc_tol_{discretization_tol} {}

  double disc_tol() const { return disc_tol_; }

  void at_most(std::string tag, std::string quantity, double value, double threshold, std::string note = {}) {
    const bool ok = std::isfinite(value) && value <= threshold;
    rows_.push_back({std::move(tag), std::move(quantity), value, threshold, ok ? RowStatus::pass : RowStatus::fail,
                     std::move(note)});
  }

  void at_least(std::string tag, std::string quantity, double value, double threshold, std::string note = {}) {
    const bool ok = std::isfinite(value) && value >= threshold;
    rows_.push_back({std::move(tag), std::move(quantity), value, threshold, ok ? RowStatus::pass : RowStatus::fail,
                     std::move(note)});
  }

  void info(std::string tag, std::string quantity, double value, std::string note = {}) {
    rows_.push_back({std::move(tag), std::move(quantity), value, std::nullopt, RowStatus::info, std::move(note)});
  }

  std::vector<SummaryRow>& rows() { return rows_; }

 private:
  double disc_tol_;
  std::vector<SummaryRow> rows_;
};

inline Units read_units(const Scenario& sc) {
  Units u{sc.real_or("units", "hbar", 1.0), sc.real_or("units", "mass", 1.0)};
  if (!(u.hbar > 0.0) || !(u.mass > 0.0)) throw ScenarioError("[units] hbar and mass must be positive");
  return u;
}

inline Grid read_grid(const Scenario& sc, std::size_t default_rank, std::size_t default_points, double default_upper) {
  const std::size_t rank = sc.count_or("grid", "rank", default_rank);
  const std::size_t points = sc.count_or("grid", "points", default_points);
  const double lo = sc.real_or("grid", "lower", 0.0);
  const double hi = sc.real_or("grid", "upper", default_upper);
  if (!(hi > lo)) throw ScenarioError("[grid] upper must exceed lower");
  try {
    return Grid::cube(rank, lo, hi, points);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("[grid] ") + e.what());
  }
}

inline FreeParticleSpec read_free_particle(const Scenario& sc, const Units& units) {
  FreeParticleSpec s;
  s.units = units;
  s.phi.k = sc.vec3_or("params", "k", {});
  s.phi.a1 = sc.complex_or("params", "a1", {1.0, 0.0});
  s.phi.a2 = sc.complex_or("params", "a2", {});
  s.gamma = sc.vec3_or("params", "gamma", {});
  s.omega = sc.vec3_or("params", "omega", {});
  s.theta = sc.vec3_or("params", "theta", {});
  s.gamma0 = sc.real_or("params", "gamma0", 0.0);
  s.omega0 = sc.real_or("params", "omega0", 0.0);
  s.theta0 = sc.real_or("params", "theta0", 0.0);
  s.q_weights = {sc.quaternion_or("params", "q1", Quaternion::one()), sc.quaternion_or("params", "q2", {}),
                 sc.quaternion_or("params", "q3", {}), sc.quaternion_or("params", "q4", {})};
  s.rho = sc.real_or("params", "rho", 1.0);
  s.total_energy = sc.real("params", "total_energy");
  return s;
}

/// Records the L6 / L7 rows and throws on the first violated constraint.
inline void check_constraints(Summary& out, const FreeParticleSpec& spec) {
  const auto rep = validate_free_particle(spec);
  for (const auto& c : rep.checks) {
    const auto colon = c.tag.find(':');
    out.at_most(c.tag.substr(0, colon), c.tag.substr(colon + 1) + "_residual", c.residual, kConstraintTolerance);
  }
  require_valid(spec);
}

inline std::filesystem::path resolve(const RunOptions& opt, const std::string& prefix, const std::string& suffix) {
  std::filesystem::path p(prefix + suffix);
  if (p.is_relative()) p = opt.out_dir / p;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  return p;
}

inline void write_field_csv(const std::filesystem::path& path, const QField& f, const Units& units) {
  const CurrentField j = probability_current(f, units);
  std::ofstream os(path, std::ios::binary);
  csv::write_row(os, {"x", "y", "z", "z_re", "z_im", "zeta_re", "zeta_im", "density", "j_x", "j_y", "j_z"});
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Vec3 x = f.grid.point(i);
    const Quaternion& q = f[i];
    csv::write_row(os, {csv::format(x[0]), csv::format(x[1]), csv::format(x[2]), csv::format(q.z.real()),
                        csv::format(q.z.imag()), csv::format(q.zeta.real()), csv::format(q.zeta.imag()),
                        csv::format(norm2(q)), csv::format(j.vectors[i][0]), csv::format(j.vectors[i][1]),
                        csv::format(j.vectors[i][2])});
  }
}

inline double max_vector_diff(const CurrentField& a, const CurrentField& b, bool interior_only) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.vectors.size(); ++i) {
    if (interior_only && !a.grid.is_interior(i)) continue;
    m = std::max(m, norm(a.vectors[i] - b.vectors[i]));
  }
  return m;
}

// --- time_phase ------------------------------------------------------------

inline void run_time_phase(const Scenario& sc, Summary& out) {
  TimePhaseSpec spec;
  spec.units = read_units(sc);
  spec.lambda0 = sc.quaternion_or("params", "lambda0", Quaternion::one());
  spec.xi = sc.real_or("params", "xi", 0.0);
  spec.energy = sc.real("params", "energy");
  spec.tau0 = sc.real_or("params", "tau0", 0.0);
  const double dt = sc.real_or("params", "dt", 1e-4);
  const std::size_t n = sc.count_or("params", "samples", 9);
  if (n < 3) throw ScenarioError("[params] samples must be at least 3");
  if (!(spec.energy > 0.0)) throw ScenarioError("[params] energy must be positive");
  const auto times = one_period_times(spec.energy, spec.units, n);

  double norm_dev = 0.0, law = 0.0, complex_limit = 0.0;
  const Quaternion kappa{spec.energy / spec.units.hbar};
  for (double t : times) {
    const Quaternion l = time_phase(spec, t);
    norm_dev = std::max(norm_dev, std::abs(abs(l) - 1.0));
    law = std::max(law, abs(phase_law(l, time_phase_derivative(spec, t)) - kappa));
    const Quaternion cqm = spec.lambda0 * Quaternion{std::polar(1.0, -spec.energy * t / spec.units.hbar)};
    complex_limit = std::max(complex_limit, abs(l - cqm));
  }
  out.at_most("a10", "unit_norm_deviation", norm_dev, 1e-13);
  out.at_most("a10", "analytic_phase_law_residual", law, kClosedFormTolerance);
  out.at_most("a5", "fd_phase_law_residual", time_phase_residual(spec, times, dt), 1e-6,
              "central difference dt=" + csv::format(dt));
  if (spec.xi == 0.0)
    out.at_most("a8", "complex_limit_deviation", complex_limit, 1e-13);
  else
    out.info("a8", "complex_limit_deviation", complex_limit, "xi != 0");
}

// --- free_particle / separation ---------------------------------------------

inline void refinement_rows(Summary& out, const FreeParticleSpec& spec, const Grid& base, std::size_t levels) {
  double prev_a8 = 0.0, prev_p5 = 0.0;
  for (std::size_t l = 0; l <= levels; ++l) {
    const Grid g = base.refined(std::size_t{1} << l);
    const QField f = sample_free_particle(spec, g);
    const double a8 = stationary_residual(f, spec.total_energy, Potential::zero(), spec.units).linf;
    const double p5 = continuity_residual(f, spec.units).linf;
    const std::string lvl = "_level" + std::to_string(l);
    out.info("A8", "stationary_residual_linf" + lvl, a8, "points=" + std::to_string(g.dims()[0]));
    out.info("P5", "continuity_residual_linf" + lvl, p5, "points=" + std::to_string(g.dims()[0]));
    if (l > 0) {
      const auto note = [](double a, double b) { return std::max(a, b) < 1e-12 ? "round-off" : ""; };
      out.info("A8", "observed_order" + lvl, observed_order(prev_a8, a8), note(prev_a8, a8));
      out.info("P5", "observed_order" + lvl, observed_order(prev_p5, p5), note(prev_p5, p5));
    }
    prev_a8 = a8;
    prev_p5 = p5;
  }
}

inline void run_free_particle(const Scenario& sc, Summary& out, const RunOptions& opt, RunResult& res,
                              const std::string& prefix) {
  const Units units = read_units(sc);
  const FreeParticleSpec spec = read_free_particle(sc, units);
  const double xi = sc.real_or("params", "xi", 0.0);
  const double tau0 = sc.real_or("params", "tau0", 0.0);
  const Grid grid = read_grid(sc, 3, 21, 2.0 * std::numbers::pi);
  const bool field = sc.flag_or("scenario", "field", false);
  sc.reject_unknown_keys();

  check_constraints(out, spec);
  const double tol = out.disc_tol();
  const QField f = sample_free_particle(spec, grid);

  const auto st = stationary_residual(f, spec.total_energy, Potential::zero(), units);
  out.at_most("A8", "stationary_residual_linf", st.linf, tol);
  out.info("A8", "stationary_residual_l2", st.l2);

  const CurrentField j = probability_current(f, units);
  double jmax = 0.0;
  for (const auto& v : j.vectors) jmax = std::max(jmax, norm(v));
  out.info("P1", "current_max_magnitude", jmax);
  if (spec.single_branch() && spec.q_weights[0].zeta == Complex{}) {
    const double scale = linf(f) * linf(f);
    out.at_most("P200", "closed_form_vs_numeric_linf", max_vector_diff(current_closed_form(spec, grid), j, true) / scale,
                tol);
  }
  out.at_most("P5", "continuity_residual_linf", continuity_residual(f, units).linf, tol);

  TimePhaseSpec phase;
  phase.xi = xi;
  phase.tau0 = tau0;
  phase.energy = spec.total_energy;
  phase.units = units;
  if (spec.total_energy > 0.0) {
    auto psi = [&](const Vec3& x, double t) { return free_particle_value(spec, x) * time_phase(phase, t); };
    const auto times = one_period_times(spec.total_energy, units);
    const double right = time_dependent_residual(psi, Potential::zero(), grid, times, units).linf;
    const double left =
        time_dependent_residual(psi, Potential::zero(), grid, times, units, 1e-4, UnitOrdering::left).linf;
    out.at_most("a1", "time_dependent_residual_right_i", right, tol);
    out.info("a1", "time_dependent_residual_left_i", left, "ordering contrast");
  }

  if (opt.grid_refine > 0) refinement_rows(out, spec, grid, opt.grid_refine);
  if (field) {
    res.files.push_back(resolve(opt, prefix, "_field.csv"));
    write_field_csv(res.files.back(), f, units);
  }
}

inline void run_separation(const Scenario& sc, Summary& out, const RunOptions& opt, RunResult& res,
                           const std::string& prefix) {
  const Units units = read_units(sc);
  const FreeParticleSpec spec = read_free_particle(sc, units);
  const Grid grid = read_grid(sc, 3, 21, 2.0 * std::numbers::pi);
  const bool field = sc.flag_or("scenario", "field", false);
  const bool has_ode = sc.has("params", "ode_gamma_norm");
  double og = 0, ow = 0, ot = 0, otp = 0, olen = 0;
  std::size_t opts = 0;
  if (has_ode) {
    og = sc.real("params", "ode_gamma_norm");
    ow = sc.real("params", "ode_omega_norm");
    ot = sc.real("params", "ode_theta0");
    otp = sc.real("params", "ode_theta0_prime");
    olen = sc.real_or("params", "ode_length", 2.0 * std::numbers::pi);
    opts = sc.count_or("params", "ode_points", 201);
  }
  sc.reject_unknown_keys();

  check_constraints(out, spec);
  const double tol = out.disc_tol();
  const QField f = sample_free_particle(spec, grid);
  const double baseline = stationary_residual(f, spec.total_energy, Potential::zero(), units).linf;
  out.at_most("A8", "stationary_residual_linf", baseline, tol);

  const auto sf = separation_fields(spec, grid);
  const auto rep = separation_residuals(sf, spec.complex_energy(), spec.total_energy, units);
  for (std::size_t e = 0; e < 4; ++e) {
    const auto& eq = rep.equations[e];
    out.at_most(SeparationReport::kTags[e], "residual_linf", eq.linf, tol, "energy units");
    out.info(SeparationReport::kTags[e], "masked_fraction", eq.masked_fraction);
  }

  if (has_ode) {
    if (!(olen > 0.0)) throw ScenarioError("[params] ode_length must be positive");
    const Grid dom = Grid::line(0.0, olen / static_cast<double>(opts - 1), opts);
    const auto ode = no_nontrivial_theta_check(og, ow, ot, otp, dom);
    out.at_least("L11", "first_equation_variance", ode.variance, kThetaVarianceThreshold,
                 "non-linear Theta is inconsistent");
    out.info("L11", "first_equation_min", ode.min);
    out.info("L11", "first_equation_max", ode.max);
  }

  if (opt.grid_refine > 0) refinement_rows(out, spec, grid, opt.grid_refine);
  if (field) {
    res.files.push_back(resolve(opt, prefix, "_field.csv"));
    write_field_csv(res.files.back(), f, units);
  }
}

// --- step_scattering ---------------------------------------------------------

inline void run_step(const Scenario& sc, Summary& out) {
  StepScatteringSpec s;
  s.units = read_units(sc);
  s.total_energy = sc.real("params", "total_energy");
  s.v0 = sc.real("params", "v0");
  s.theta_k = sc.real_or("params", "theta_k", 0.0);
  s.gamma_k_perp = sc.vec3_or("params", "gamma_k_perp", {});
  s.omega_k_perp = sc.vec3_or("params", "omega_k_perp", {});
  sc.reject_unknown_keys();

  const StepScatteringResult r = solve_step(s);
  const double c = std::cos(s.theta_k);
  const double sn = std::sin(s.theta_k);
  const double sc2 = s.units.wavenumber_sq_per_energy();

  out.info("S5", "k_mag", r.k_mag);
  out.info("S5", "q_mag", r.q_mag);
  out.info("S5", "p_mag", r.p_mag);
  out.at_most("S5", "region1_dispersion_residual",
              std::abs(r.k_mag * r.k_mag + norm2(s.gamma_k_perp) - sc2 * s.total_energy) / (sc2 * s.total_energy),
              kClosedFormTolerance);
  out.at_most("S5", "region2_dispersion_residual",
              std::abs(r.p_mag * r.p_mag + norm2(r.gamma_p_perp) - sc2 * (s.total_energy - s.v0)) /
                  (sc2 * s.total_energy),
              kClosedFormTolerance);

  out.info("S9", "r_coeff", r.r_coeff);
  out.info("S9", "t_coeff", r.t_coeff);
  const double kq = r.k_mag + r.q_mag, pq = r.p_mag + r.q_mag;
  out.at_most("S9", "t_squared_residual", std::abs(r.t_coeff * r.t_coeff - kq * kq / (pq * pq)), kClosedFormTolerance);
  out.at_most("S9", "r_squared_residual",
              std::abs(r.r_coeff * r.r_coeff - (r.k_mag - r.p_mag) * (r.k_mag - r.p_mag) / (pq * pq)),
              kClosedFormTolerance);
  out.at_most("S9", "normal_matching_residual", std::abs(r.k_mag - r.q_mag * r.r_coeff - r.p_mag * r.t_coeff),
              kClosedFormTolerance);

  const double ratio = r.p_mag / r.k_mag;
  out.at_most("S13", "reflected_transverse_residual",
              norm(std::cos(r.theta_q) * r.gamma_q_perp + c * s.gamma_k_perp) +
                  norm(std::sin(r.theta_q) * r.omega_q_perp + sn * s.omega_k_perp),
              kClosedFormTolerance);
  out.at_most("S13", "transmitted_transverse_residual",
              norm(std::cos(r.theta_p) * r.gamma_p_perp - ratio * c * s.gamma_k_perp) +
                  norm(std::sin(r.theta_p) * r.omega_p_perp - ratio * sn * s.omega_k_perp),
              kClosedFormTolerance);

  const double s2 = sn * sn;
  out.at_most("S14", "sin_squared_spread",
              std::max(std::abs(std::pow(std::sin(r.theta_q), 2) - s2), std::abs(std::pow(std::sin(r.theta_p), 2) - s2)),
              1e-14);

  const double expected = 1.0 - s.v0 / s.total_energy;
  out.info("S15", "p2_over_k2", r.p_mag * r.p_mag / (r.k_mag * r.k_mag));
  out.at_most("S15", "momentum_ratio_residual", std::abs(r.p_mag * r.p_mag / (r.k_mag * r.k_mag) - expected),
              kClosedFormTolerance);
  if (norm2(s.gamma_k_perp) > 0.0)
    out.at_most("S15", "transverse_ratio_residual",
                std::abs(norm2(r.gamma_p_perp) / norm2(s.gamma_k_perp) - expected), kClosedFormTolerance);

  const BoundaryResiduals b = boundary_residuals(s, r);
  out.at_most("S7", "value_continuity_residual", b.value, kClosedFormTolerance, "incidence point");
  out.at_most("S8", "normal_gradient_residual", b.normal, kClosedFormTolerance, "incidence point");
  out.at_most("S121", "transverse_gradient_residual", b.transverse, kClosedFormTolerance, "incidence point");

  const CurrentBalance cb = current_balance(s, r);
  out.info("P1", "incident_current", cb.incident);
  out.info("P1", "reflected_current", cb.reflected);
  out.info("P1", "transmitted_current", cb.transmitted);
  out.at_most("P5", "current_balance_residual", cb.residual, kBalanceTolerance, "sampled currents");
  out.at_most("P5", "closed_form_balance_residual",
              std::abs(r.k_mag * (1.0 - r.r_coeff * r.r_coeff) - r.p_mag * r.t_coeff * r.t_coeff),
              kClosedFormTolerance);
  out.info("S9", "reflect_prob", r.reflect_prob);
  out.info("S9", "transmit_prob", r.transmit_prob);
}

// --- current_profile ---------------------------------------------------------

inline void run_current_profile(const Scenario& sc, Summary& out, const RunOptions& opt, RunResult& res,
                                const std::string& prefix) {
  const Units units = read_units(sc);
  const Vec3 k = sc.vec3_or("params", "k", {1.0, 0.0, 0.0});
  const std::string profile = sc.get_string("params", "profile").value_or("common_phase");
  const double th_min = sc.real_or("params", "theta_min", 0.0);
  const double th_max = sc.real_or("params", "theta_max", std::numbers::pi / 2.0);
  const std::size_t steps = sc.count_or("params", "steps", 33);
  const double th_ref = sc.real_or("params", "theta", 0.3);
  if (norm(k) == 0.0) throw ScenarioError("[params] k must be non-zero");
  if (k[1] != 0.0 || k[2] != 0.0) throw ScenarioError("[params] k must lie along x for a 1D profile");
  const Grid grid = read_grid(sc, 1, 201, 2.0 * std::numbers::pi / norm(k));
  sc.reject_unknown_keys();
  if (steps < 2) throw ScenarioError("[params] steps must be at least 2");
  if (profile != "common_phase" && profile != "split_phase")
    throw ScenarioError("[params] profile must be common_phase or split_phase");

  const double hm = units.hbar / units.mass;
  const Vec3 probe{0.37, 0.0, 0.0};
  auto make = [&](double th) {
    return profile == "common_phase" ? common_phase_particle(k, th, units) : split_phase_particle(k, th, units);
  };
  auto numeric_current = [&](const FreeParticleSpec& s) {
    return current_at([&](const Vec3& x) { return free_particle_value(s, x); }, probe, units);
  };

  // Sweep.
  const auto path = resolve(opt, prefix, "_profile.csv");
  res.files.push_back(path);
  std::ofstream os(path, std::ios::binary);
  csv::write_row(os, {"theta0", "j_x", "j_y", "j_z"});
  std::vector<double> thetas, jx;
  for (std::size_t i = 0; i < steps; ++i) {
    const double th = th_min + (th_max - th_min) * static_cast<double>(i) / static_cast<double>(steps - 1);
    const Vec3 j = numeric_current(make(th));
    csv::write_row(os, {csv::format(th), csv::format(j[0]), csv::format(j[1]), csv::format(j[2])});
    thetas.push_back(th);
    jx.push_back(j[0]);
  }

  // Reference values of both example particles.
  const Vec3 j1 = numeric_current(split_phase_particle(k, th_ref, units));
  const Vec3 j2 = numeric_current(common_phase_particle(k, th_ref, units));
  const Vec3 j1_expected = hm * k;
  const Vec3 j2_oracle = hm * std::cos(2.0 * th_ref) * k;
  const Vec3 j2_paper = 0.5 * hm * std::cos(2.0 * th_ref) * k;
  out.info("P7", "j1_numeric_x", j1[0]);
  out.at_most("P7", "j1_error", norm(j1 - j1_expected), kPointCurrentTolerance, "expected hbar k / m");
  out.info("P7", "j2_numeric_x", j2[0]);
  out.info("P7", "j2_oracle_x", j2_oracle[0], "(hbar/m) cos(2 theta) k");
  out.at_most("P7", "j2_error", norm(j2 - j2_oracle), kPointCurrentTolerance, "brute-force oracle");
  out.info("P7", "j2_paper_value_x", j2_paper[0], "paper-discrepancy: printed prefactor hbar/2m");
  out.info("P7", "j2_paper_deviation", norm(j2 - j2_paper), "paper-discrepancy");

  const Grid probe_grid = Grid::line(probe[0], 1.0, 5);
  const auto closed = [&](const FreeParticleSpec& s) { return current_closed_form(s, probe_grid).vectors[0]; };
  out.at_most("P200", "split_phase_closed_form_error", norm(closed(split_phase_particle(k, th_ref, units)) - j1),
              kPointCurrentTolerance);
  out.at_most("P200", "common_phase_closed_form_error", norm(closed(common_phase_particle(k, th_ref, units)) - j2),
              kPointCurrentTolerance);

  if (profile == "common_phase") {
    std::optional<double> crossing;
    for (std::size_t i = 0; i + 1 < jx.size() && !crossing; ++i) {
      if (jx[i] == 0.0) crossing = thetas[i];
      else if (jx[i] * jx[i + 1] < 0.0)
        crossing = thetas[i] + (thetas[i + 1] - thetas[i]) * jx[i] / (jx[i] - jx[i + 1]);
    }
    const double resolution = (th_max - th_min) / static_cast<double>(steps - 1);
    if (crossing) {
      out.info("P7", "j2_zero_crossing_theta", *crossing);
      out.at_most("P7", "j2_zero_crossing_offset", std::abs(*crossing - std::numbers::pi / 4.0), resolution,
                  "sweep resolution");
    } else {
      out.info("P7", "j2_zero_crossing_theta", std::nan(""), "no sign change in sweep");
    }
  }

  // Box-normalized momentum expectation over the grid.
  const FreeParticleSpec ref = make(th_ref);
  const QField f = sample_free_particle(ref, grid);
  const auto p = momentum_apply(f, units);
  const double px = box_normalized_expectation(p[0], f);
  const double px_expected = profile == "common_phase" ? units.hbar * std::cos(2.0 * th_ref) * k[0] : units.hbar * k[0];
  out.info("Eq1", "momentum_expectation_x", px);
  out.at_most("Eq1", "momentum_expectation_error", std::abs(px - px_expected), out.disc_tol(),
              profile == "common_phase" ? "expected hbar cos(2 theta) k" : "expected hbar k");
  out.at_most("Eq1", "norm_expectation_error", std::abs(box_normalized_expectation(f, f) - 1.0), 1e-14);
}

}  // namespace detail

inline void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows) {
  csv::write_row(os, {"tag", "quantity", "value", "threshold", "status", "note"});
  for (const auto& r : rows)
    csv::write_row(os, {r.tag, r.quantity, csv::format(r.value), r.threshold ? csv::format(*r.threshold) : "",
                        to_string(r.status), r.note});
}

inline RunResult run_scenario(const Scenario& sc, const RunOptions& opt = {}) {
  RunResult res;
  double tol = opt.tolerance.value_or(sc.real_or("scenario", "tolerance", kDiscretizationTolerance));
  detail::Summary out(tol);
  const std::string prefix = sc.require_string("scenario", "output");
  try {
    switch (sc.kind()) {
      case ScenarioKind::time_phase:
        detail::run_time_phase(sc, out);
        break;
      case ScenarioKind::free_particle:
        detail::run_free_particle(sc, out, opt, res, prefix);
        break;
      case ScenarioKind::separation:
        detail::run_separation(sc, out, opt, res, prefix);
        break;
      case ScenarioKind::step_scattering:
        detail::run_step(sc, out);
        break;
      case ScenarioKind::current_profile:
        detail::run_current_profile(sc, out, opt, res, prefix);
        break;
    }
    sc.reject_unknown_keys();
  } catch (const ConstraintViolation& e) {
    res.exit_code = 3;
    res.message = std::string("constraint violated: ") + e.what();
  }
  // Schema errors propagate to the caller (exit code 2) before any file is written.

  res.rows = std::move(out.rows());
  const auto summary = detail::resolve(opt, prefix, "_summary.csv");
  {
    std::ofstream os(summary, std::ios::binary);
    write_summary(os, res.rows);
  }
  res.files.insert(res.files.begin(), summary);
  if (res.exit_code == 0) {
    for (const auto& r : res.rows) {
      if (r.status == RowStatus::fail) {
        res.exit_code = 1;
        res.message = "threshold failure: " + r.tag + " " + r.quantity;
        break;
      }
    }
  }
  return res;
}

}  // namespace qqm

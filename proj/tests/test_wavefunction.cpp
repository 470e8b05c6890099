#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "qqm/qqm.hpp"

using qqm::Complex;
using qqm::Quaternion;
using qqm::Vec3;

namespace {

qqm::TimePhaseSpec random_phase(oracle::Rng& rng) {
  qqm::TimePhaseSpec s;
  s.lambda0 = rng.unit_quaternion();
  s.xi = rng.uniform(-std::numbers::pi, std::numbers::pi);
  s.energy = rng.uniform(0.2, 5.0);
  s.tau0 = rng.uniform(-3.0, 3.0);
  s.units = {rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};
  return s;
}

}  // namespace

TEST(TimePhase, ComplexLimit) {
  qqm::TimePhaseSpec s;
  s.energy = 1.5;
  EXPECT_EQ(qqm::time_phase(s, 0.0), Quaternion::one());
  for (double t : {0.1, 1.0, 3.7}) {
    const Quaternion l = qqm::time_phase(s, t);
    EXPECT_NEAR(qqm::abs(l - Quaternion{std::polar(1.0, -1.5 * t)}), 0.0, 1e-15);
  }
}

TEST(TimePhase, RejectsNonUnitLambda0) {
  qqm::TimePhaseSpec s;
  s.lambda0 = Quaternion{2.0};
  EXPECT_THROW(qqm::time_phase(s, 0.0), qqm::ConstraintViolation);
}

TEST(TimePhaseProperty, UnitNormAndAnalyticLaw) {
  oracle::Rng rng(31);
  for (int n = 0; n < 200; ++n) {
    const auto s = random_phase(rng);
    for (double t : qqm::one_period_times(s.energy, s.units)) {
      const Quaternion l = qqm::time_phase(s, t);
      EXPECT_NEAR(qqm::abs(l), 1.0, 1e-13);
      const Quaternion law = qqm::phase_law(l, qqm::time_phase_derivative(s, t));
      EXPECT_LT(qqm::abs(law - Quaternion{s.energy / s.units.hbar}), 1e-13);
    }
  }
}

TEST(TimePhaseProperty, ComplexLambda0WithZeroXiIsComplexPhase) {
  oracle::Rng rng(32);
  for (int n = 0; n < 50; ++n) {
    auto s = random_phase(rng);
    s.xi = 0.0;
    s.lambda0 = Quaternion{std::polar(1.0, rng.uniform(-3, 3))};
    const double t = rng.uniform(-5, 5);
    EXPECT_LT(qqm::abs(qqm::time_phase(s, t) - s.lambda0 * Quaternion{std::polar(1.0, -s.energy * t / s.units.hbar)}),
              1e-14);
  }
}

TEST(TimePhaseResidual, FiniteDifferenceExamples) {
  qqm::TimePhaseSpec c;
  c.energy = 1.0;
  EXPECT_LE(qqm::time_phase_residual(c, qqm::one_period_times(c.energy, c.units), 1e-4), 1e-6);
  qqm::TimePhaseSpec g;
  g.xi = 0.7;
  g.energy = 2.0;
  g.tau0 = 1.3;
  EXPECT_LE(qqm::time_phase_residual(g, qqm::one_period_times(g.energy, g.units), 1e-4), 1e-6);
  EXPECT_THROW(qqm::time_phase_residual(g, std::vector<double>{0.0, 1.0}, 1e-4), std::invalid_argument);
}

TEST(TimePhaseResidual, TamperedFrequencySignIsDetected) {
  qqm::TimePhaseSpec g;
  g.xi = 0.7;
  g.energy = 2.0;
  g.tau0 = 1.3;
  // j-part rotating the same way as the complex part.
  auto tampered = [&](double t) {
    const double w = g.energy / g.units.hbar;
    return Quaternion{std::cos(g.xi) * std::polar(1.0, -w * t), std::sin(g.xi) * std::polar(1.0, -w * t + g.tau0)};
  };
  const auto times = qqm::one_period_times(g.energy, g.units);
  EXPECT_GE(qqm::phase_law_residual(tampered, g.energy, g.units, times, 1e-4), 0.1 * g.energy / g.units.hbar);
}

TEST(FreeParticleValidation, Examples) {
  qqm::FreeParticleSpec s;
  s.phi.k = {1, 0, 0};
  s.gamma = {0, 2, 0};
  s.omega = {0, 2, 0};
  s.theta = {0, 0, 3};
  s.total_energy = s.complex_energy() + 0.5 * (4 + 9);
  EXPECT_TRUE(qqm::validate_free_particle(s).valid());

  auto bad = s;
  bad.omega = {0, 1, 0};
  const auto rep = qqm::validate_free_particle(bad);
  EXPECT_FALSE(rep.valid());
  ASSERT_TRUE(rep.first_failure());
  EXPECT_EQ(rep.first_failure()->tag, "L6:norm");
  EXPECT_NEAR(rep.first_failure()->residual, 3.0, 1e-15);
  try {
    qqm::require_valid(bad);
    FAIL();
  } catch (const qqm::ConstraintViolation& e) {
    EXPECT_EQ(e.tag(), "L6:norm");
  }

  auto parallel = s;
  parallel.theta = {1, 0, 0};
  parallel.total_energy = s.complex_energy() + 0.5 * (4 + 1);
  bool k_theta_failed = false;
  for (const auto& c : qqm::validate_free_particle(parallel).checks)
    if (c.tag == "L7:k.theta") k_theta_failed = !c.ok;
  EXPECT_TRUE(k_theta_failed);

  auto energy = s;
  energy.total_energy += 0.1;
  EXPECT_EQ(qqm::validate_free_particle(energy).first_failure()->tag, "L6:energy");
}

TEST(FreeParticle, ComplexLimitAndConstantModulus) {
  const qqm::Grid g = qqm::Grid::cube(3, 0.0, 1.0, 6);
  qqm::FreeParticleSpec c;
  c.phi.k = {0.3, -0.2, 1.0};
  c.total_energy = c.complex_energy();
  const auto f = qqm::sample_free_particle(c, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(f[i].zeta, Complex{});
    EXPECT_NEAR(std::abs(f[i].z - std::polar(1.0, qqm::dot(c.phi.k, g.point(i)))), 0.0, 1e-15);
  }

  qqm::FreeParticleSpec q;
  q.gamma = {0.5, 0, 0};
  q.omega = {0, 0.5, 0};
  q.theta = {0, 0, 0.7};
  q.rho = 1.3;
  q.total_energy = 0.5 * (0.25 + 0.49);
  const auto fq = qqm::sample_free_particle(q, g);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(qqm::abs(fq[i]), 1.3, 1e-14);
}

TEST(FreeParticleProperty, LinearInBranchWeights) {
  oracle::Rng rng(33);
  const qqm::Grid g = qqm::Grid::cube(3, 0.0, 2.0, 5);
  for (int n = 0; n < 20; ++n) {
    auto a = oracle::random_mixed_particle(rng);
    auto b = a;
    auto sum = a;
    for (std::size_t w = 0; w < 4; ++w) {
      b.q_weights[w] = rng.quaternion();
      sum.q_weights[w] = a.q_weights[w] + b.q_weights[w];
    }
    const auto fa = qqm::sample_free_particle(a, g), fb = qqm::sample_free_particle(b, g),
               fs = qqm::sample_free_particle(sum, g);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LT(qqm::abs(fs[i] - (fa[i] + fb[i])), 1e-13);
  }
}

TEST(FreeParticleProperty, StationaryResidualConvergesAtSecondOrder) {
  oracle::Rng rng(34);
  for (int n = 0; n < 6; ++n) {
    const auto s = n % 2 ? oracle::random_mixed_particle(rng) : oracle::random_free_particle(rng);
    const auto coarse = qqm::Grid::cube(3, 0.0, 2 * std::numbers::pi, 17);
    const double e1 = qqm::stationary_residual(qqm::sample_free_particle(s, coarse), s.total_energy,
                                               qqm::Potential::zero(), s.units).linf;
    const double e2 = qqm::stationary_residual(qqm::sample_free_particle(s, coarse.refined(2)), s.total_energy,
                                               qqm::Potential::zero(), s.units).linf;
    EXPECT_NEAR(e1 / e2, 4.0, 0.8);
  }
}

TEST(Separation, FieldsComposeBackToPhi) {
  oracle::Rng rng(35);
  const auto s = oracle::random_free_particle(rng, true);
  const auto g = qqm::Grid::cube(3, 0.0, 3.0, 7);
  const auto f = qqm::sample_free_particle(s, g);
  const auto back = qqm::compose(qqm::separation_fields(s, g));
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LT(qqm::abs(back[i] - f[i]), 1e-13);

  auto multi = s;
  multi.q_weights[1] = Quaternion{0.5};
  EXPECT_THROW(qqm::separation_fields(multi, g), std::invalid_argument);
}

TEST(Separation, ComplexLimitVanishes) {
  qqm::FreeParticleSpec s;
  s.phi.k = {0.8, 0.0, 0.0};
  s.theta0 = 0.4;
  s.total_energy = s.complex_energy();
  const auto g = qqm::Grid::cube(3, 0.0, 2.0, 9);
  const auto rep = qqm::separation_residuals(qqm::separation_fields(s, g), s.complex_energy(), s.total_energy);
  for (const auto& e : rep.equations) {
    EXPECT_LT(e.linf, 1e-12);
    EXPECT_EQ(e.masked_fraction, 0.0);
  }
}

TEST(SeparationProperty, ResidualsBelowStationaryBaseline) {
  oracle::Rng rng(36);
  for (int n = 0; n < 8; ++n) {
    const auto s = oracle::random_free_particle(rng, n % 2 == 1);
    const auto g = qqm::Grid::cube(3, 0.0, 2 * std::numbers::pi, 17);
    const double base =
        qqm::stationary_residual(qqm::sample_free_particle(s, g), s.total_energy, qqm::Potential::zero(), s.units)
            .linf;
    const auto rep = qqm::separation_residuals(qqm::separation_fields(s, g), s.complex_energy(), s.total_energy);
    for (const auto& e : rep.equations) {
      EXPECT_LE(e.linf, 10 * base);
      EXPECT_GE(e.masked_fraction, 0.0);
      EXPECT_LT(e.masked_fraction, 0.2);
    }
  }
}

TEST(Separation, PerturbedThetaInflatesResidual) {
  oracle::Rng rng(37);
  const auto s = oracle::random_free_particle(rng);
  const auto g = qqm::Grid::cube(3, 0.0, 2 * std::numbers::pi, 17);
  const double base =
      qqm::stationary_residual(qqm::sample_free_particle(s, g), s.total_energy, qqm::Potential::zero(), s.units)
          .linf;
  auto sf = qqm::separation_fields(s, g);
  for (std::size_t i = 0; i < g.size(); ++i) sf.theta[i] += 0.1 * std::sin(g.point(i)[0]);
  const auto rep = qqm::separation_residuals(sf, s.complex_energy(), s.total_energy);
  EXPECT_GE(rep.equations[0].linf, 10 * base);
}

TEST(Separation, Errors) {
  qqm::FreeParticleSpec s;
  s.phi.k = {1, 0, 0};
  s.theta0 = 0.5;
  s.total_energy = s.complex_energy();
  const auto g = qqm::Grid::cube(1, 0.0, 1.0, 9);
  auto sf = qqm::separation_fields(s, g);
  sf.phi[3] = Quaternion{Complex{1, 0}, Complex{0.1, 0}};
  EXPECT_THROW(qqm::separation_residuals(sf, 0.5, 0.5), std::invalid_argument);
  sf = qqm::separation_fields(s, g);
  sf.phi[4] = Quaternion{};
  EXPECT_THROW(qqm::separation_residuals(sf, 0.5, 0.5), std::domain_error);
}

TEST(Separation, SingularThetaIsMasked) {
  qqm::FreeParticleSpec s;
  s.theta0 = 0.0;
  s.total_energy = 0.0;
  s.phi.a1 = 1.0;
  const auto g = qqm::Grid::cube(1, 0.0, 1.0, 9);
  const auto rep = qqm::separation_residuals(qqm::separation_fields(s, g), 0.0, 0.0);
  EXPECT_EQ(rep.equations[0].masked_fraction, 0.0);
  EXPECT_EQ(rep.equations[1].masked_fraction, 1.0);
  EXPECT_EQ(rep.equations[3].masked_fraction, 1.0);
}

TEST(ThetaOde, NonLinearThetaIsInconsistent) {
  const auto dom = qqm::Grid::line(0.0, 2 * std::numbers::pi / 200, 201);
  const auto rep = qqm::no_nontrivial_theta_check(2.0, 1.0, 0.3, 1.0, dom);
  EXPECT_GT(rep.variance, 1e-3);
  EXPECT_TRUE(rep.inconsistent);
  EXPECT_GE(rep.steps, 1000u);
}

TEST(ThetaOde, Preconditions) {
  const auto dom = qqm::Grid::line(0.0, 0.01, 101);
  try {
    qqm::no_nontrivial_theta_check(1.5, 1.5, 0.3, 1.0, dom);
    FAIL();
  } catch (const qqm::ConstraintViolation& e) {
    EXPECT_EQ(e.tag(), "L11:equal-norms");
  }
  EXPECT_THROW(qqm::no_nontrivial_theta_check(1.0, 2.0, 0.3, 0.0, dom), qqm::ConstraintViolation);
}

TEST(ThetaOde, LinearControlIsConstant) {
  const auto dom = qqm::Grid::line(0.0, 0.05, 201);
  const auto rep = qqm::theta_ode_profile(1.5, 1.5, 0.3, 0.8, dom);
  EXPECT_LE(rep.variance, 1e-10);
  EXPECT_FALSE(rep.inconsistent);
  EXPECT_NEAR(rep.mean, 0.64 + 2.25, 1e-12);
}

TEST(ThetaOdeProperty, RandomUnequalNormsAreInconsistent) {
  oracle::Rng rng(38);
  const auto dom = qqm::Grid::line(0.0, 2 * std::numbers::pi / 200, 201);
  for (int n = 0; n < 10; ++n) {
    const double g = rng.uniform(0.2, 2.0);
    double w = rng.uniform(0.2, 2.0);
    while (std::abs(w * w - g * g) < 0.5) w = rng.uniform(0.2, 2.0);
    const auto rep = qqm::no_nontrivial_theta_check(g, w, rng.uniform(0.1, 1.4), rng.uniform(0.3, 1.5), dom);
    EXPECT_GT(rep.variance, 1e-3) << g << " " << w;
  }
}

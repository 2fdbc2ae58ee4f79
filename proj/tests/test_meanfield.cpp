#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "beckit/errors.hpp"
#include "beckit/meanfield.hpp"
#include "beckit/potential.hpp"
#include "doctest.h"
#include "oracles.hpp"

using beckit::CouplingParams;
using beckit::GapSpec;
using beckit::ThermoState;

TEST_CASE("condensation threshold") {
  // Gapless threshold is g*lambda times the critical density.
  const double rho_c = oracles::momentum_density(1.0, 0.0, 3);
  const double mu_c = beckit::mf_condensation_threshold(1.0, {1.0, 1.0}, {0.0, 0.0}, 3);
  CHECK(oracles::rel_err(mu_c, rho_c) < 1e-10);
  CHECK(std::fabs(mu_c - 0.0586434) < 5e-7);

  // Vanishing coupling leaves the free gapped threshold mu_c = -Delta.
  const double mu_free = beckit::mf_condensation_threshold(1.0, {1.0, 1e-14}, {1.0, 0.0}, 3);
  CHECK(std::fabs(mu_free + 1.0) < 1e-13);

  const double rho_gap = oracles::momentum_density(1.0, -1.0, 3);
  const double mu_g = beckit::mf_condensation_threshold(1.0, {1.0, 1.0}, {1.0, 0.0}, 3);
  CHECK(oracles::rel_err(mu_g, rho_gap - 1.0) < 1e-10);
  CHECK(std::fabs(mu_g + 0.990383) < 1e-6);  // quoted constant chains a rounded 0.009617

  CHECK_THROWS_AS(beckit::mf_condensation_threshold(1.0, {1.0, 1.0}, {0.0, 0.0}, 2),
                  beckit::DivergentSeries);
  CHECK_THROWS_AS(beckit::mf_condensation_threshold(1.0, {1.0, 1.0}, {0.0, 0.0}, 1),
                  beckit::DivergentSeries);
  CHECK_THROWS_AS(beckit::mf_condensation_threshold(-1.0, {1.0, 1.0}, {1.0, 0.0}, 3),
                  beckit::DomainError);
  CHECK_THROWS_AS(beckit::mf_condensation_threshold(1.0, {0.0, 1.0}, {1.0, 0.0}, 3),
                  beckit::DomainError);
  CHECK_THROWS_AS(beckit::mf_condensation_threshold(1.0, {1.0, -2.0}, {1.0, 0.0}, 3),
                  beckit::DomainError);
  CHECK_THROWS_AS(beckit::mf_condensation_threshold(1.0, {1.0, 1.0}, {-0.5, 0.0}, 3),
                  beckit::DomainError);
}

TEST_CASE("condensed phase closed forms") {
  const auto sol = beckit::mf_solve({1.0, 2.0, 3}, {1.0, 1.0}, {1.0, 0.0});
  CHECK(sol.condensed);
  CHECK(sol.rho_total == doctest::Approx(3.0).epsilon(1e-14));
  const double rho_gap = oracles::momentum_density(1.0, -1.0, 3);
  CHECK(std::fabs(sol.rho_condensate - (3.0 - rho_gap)) < 1e-10);
  CHECK(std::fabs(sol.rho_condensate - 2.990383) < 1e-6);
  CHECK(sol.mu_eff == -1.0);
  const double p_gap = oracles::momentum_pressure(1.0, -1.0, 3);
  CHECK(std::fabs(sol.pressure - (p_gap + 4.5)) < 1e-10);

  // Gapless model: condensate density mu/(g lambda) - rho_c.
  const double rho_c = oracles::momentum_density(1.0, 0.0, 3);
  const auto gapless = beckit::mf_solve({1.0, 0.2, 3}, {1.0, 1.0}, {0.0, 0.0});
  CHECK(gapless.condensed);
  CHECK(std::fabs(gapless.rho_condensate - (0.2 - rho_c)) < 1e-10);
}

TEST_CASE("normal phase self-consistency") {
  const std::vector<int> dims{1, 2, 3, 4};
  for (int dim : dims) {
    for (double mu : {-2.0, -0.75, -0.1}) {
      const ThermoState st{1.3, mu, dim};
      const auto sol = beckit::mf_solve(st, {1.0, 0.8}, {1.0, 0.0});
      if (sol.condensed) continue;  // low mu keeps most of these normal
      const double rhs =
          beckit::pbg_density({st.beta, st.mu - 0.8 * sol.rho_total, dim});
      CHECK(std::fabs(sol.rho_total - rhs) < 1e-10);
      CHECK(sol.rho_condensate == 0.0);
      CHECK(sol.mu_eff <= -1.0 + 1e-12);
    }
  }

  // Gapless gas in dimension <= 2 is normal at any chemical potential,
  // including positive ones.
  const auto low = beckit::mf_solve({1.0, 0.5, 2}, {1.0, 1.0}, {0.0, 0.0});
  CHECK(!low.condensed);
  CHECK(low.mu_eff < 0.0);
  const double rhs = beckit::pbg_density({1.0, 0.5 - low.rho_total, 2});
  CHECK(std::fabs(low.rho_total - rhs) < 1e-10);

  const auto one_d = beckit::mf_solve({1.0, 3.0, 1}, {1.0, 1.0}, {0.0, 0.0});
  CHECK(!one_d.condensed);
  CHECK(std::fabs(one_d.rho_total -
                  beckit::pbg_density({1.0, 3.0 - one_d.rho_total, 1})) < 1e-10);
}

TEST_CASE("threshold ties to the normal branch") {
  const double mu_c = beckit::mf_condensation_threshold(1.0, {1.0, 1.0}, {1.0, 0.0}, 3);
  const auto sol = beckit::mf_solve({1.0, mu_c, 3}, {1.0, 1.0}, {1.0, 0.0});
  CHECK(!sol.condensed);
  CHECK(sol.rho_condensate == 0.0);
  const double rho_ref = beckit::pbg_density({1.0, -1.0, 3});
  CHECK(std::fabs(sol.rho_total - rho_ref) < 1e-9);
  CHECK(std::fabs(sol.mu_eff + 1.0) < 1e-9);
}

TEST_CASE("continuity across the threshold") {
  struct Probe {
    double beta;
    double delta;
  };
  for (const auto& pr : {Probe{1.0, 1.0}, Probe{1.0, 0.0}, Probe{2.5, 0.3}}) {
    const double mu_c =
        beckit::mf_condensation_threshold(pr.beta, {1.0, 1.0}, {pr.delta, 0.0}, 3);
    const auto lo = beckit::mf_solve({pr.beta, mu_c - 1e-9, 3}, {1.0, 1.0}, {pr.delta, 0.0});
    const auto hi = beckit::mf_solve({pr.beta, mu_c + 1e-9, 3}, {1.0, 1.0}, {pr.delta, 0.0});
    CHECK(!lo.condensed);
    CHECK(hi.condensed);
    CHECK(std::fabs(hi.rho_total - lo.rho_total) < 1e-8);
    CHECK(std::fabs(hi.pressure - lo.pressure) < 1e-8);
    CHECK(hi.rho_condensate < 1e-7);
  }
}

TEST_CASE("pressure is nondecreasing and convex in the gap") {
  // mu = 0.02 crosses from normal into condensed as the gap grows; mu = 2
  // stays condensed throughout.
  for (double mu : {0.02, 2.0}) {
    std::vector<double> p;
    const double h = 0.05;
    for (int i = 0; i <= 40; ++i) {
      const auto sol = beckit::mf_solve({1.0, mu, 3}, {1.0, 1.0}, {i * h, 0.0});
      p.push_back(sol.pressure);
    }
    for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] >= p[i - 1] - 1e-12);
    for (std::size_t i = 1; i + 1 < p.size(); ++i)
      CHECK(p[i + 1] - 2.0 * p[i] + p[i - 1] >= -1e-10);
  }
}

TEST_CASE("pressure responds to the chemical potential like the density") {
  struct Probe {
    double mu;
    double delta;
    int dim;
  };
  for (const auto& pr :
       {Probe{2.0, 1.0, 3}, Probe{-0.5, 1.0, 3}, Probe{-0.3, 0.0, 2}, Probe{0.4, 0.0, 3}}) {
    const auto sol = beckit::mf_solve({1.0, pr.mu, pr.dim}, {1.0, 1.0}, {pr.delta, 0.0});
    const double deriv = oracles::central_diff(
        [&](double m) {
          return beckit::mf_solve({1.0, m, pr.dim}, {1.0, 1.0}, {pr.delta, 0.0}).pressure;
        },
        pr.mu, 1e-5);
    CHECK(oracles::rel_err(deriv, sol.rho_total) < 1e-6);
  }
}

TEST_CASE("gap derivative of the pressure recovers the condensate") {
  const ThermoState st{1.0, 2.0, 3};
  const CouplingParams cp{1.0, 1.0};

  CHECK(beckit::mf_pressure_delta_derivative_check(st, cp, {1.0, 0.0}, 1e-5) < 1e-6);

  // Deep normal phase: derivative and condensate both vanish.
  CHECK(beckit::mf_pressure_delta_derivative_check({1.0, -3.0, 3}, cp, {1.0, 0.0}, 1e-2) <
        1e-3);

  // Central differences should improve quadratically with the step.
  const double coarse = beckit::mf_pressure_delta_derivative_check(st, cp, {1.0, 0.0}, 3e-2);
  const double fine = beckit::mf_pressure_delta_derivative_check(st, cp, {1.0, 0.0}, 3e-3);
  CHECK(coarse / fine > 30.0);
  CHECK(coarse / fine < 300.0);

  // Stencil straddling the phase boundary is rejected.
  CHECK_THROWS_AS(
      beckit::mf_pressure_delta_derivative_check({1.0, 0.03, 3}, cp, {1.0, 0.0}, 0.999),
      beckit::DomainError);
  CHECK_THROWS_AS(beckit::mf_pressure_delta_derivative_check(st, cp, {0.5, 0.0}, 0.6),
                  beckit::DomainError);
  CHECK_THROWS_AS(beckit::mf_pressure_delta_derivative_check(st, cp, {1.0, 0.0}, 0.0),
                  beckit::DomainError);
}

TEST_CASE("condensate identity at the superstable coupling") {
  // With lambda set to the zero-momentum transform the condensed-phase
  // condensate is (mu + Delta)/(g vhat0) - rho^P(beta, -Delta) exactly.
  const beckit::PotentialModel pot = beckit::GaussianPotential{1.0, 1.0};
  const double vhat0 = beckit::vhat(pot, 0.0);
  const double g = 0.7;
  const auto sol = beckit::mf_solve({1.0, 30.0, 3}, {g, vhat0}, {0.8, 0.0});
  CHECK(sol.condensed);
  const double expected =
      (30.0 + 0.8) / (g * vhat0) - beckit::pbg_density({1.0, -0.8, 3});
  CHECK(std::fabs(sol.rho_condensate - expected) <= 1e-15 * std::fabs(expected));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(beckit::mf_solve({0.0, 1.0, 3}, {1.0, 1.0}, {0.0, 0.0}),
                  beckit::DomainError);
  CHECK_THROWS_AS(beckit::mf_solve({1.0, 1.0, 0}, {1.0, 1.0}, {0.0, 0.0}),
                  beckit::DomainError);
  CHECK_THROWS_AS(beckit::mf_solve({1.0, 1.0, 3}, {-1.0, 1.0}, {0.0, 0.0}),
                  beckit::DomainError);
  CHECK_THROWS_AS(beckit::mf_solve({1.0, 1.0, 3}, {1.0, 0.0}, {0.0, 0.0}),
                  beckit::DomainError);
  CHECK_THROWS_AS(beckit::mf_solve({1.0, 1.0, 3}, {1.0, 1.0}, {-1.0, 0.0}),
                  beckit::DomainError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(beckit::mf_solve({1.0, nan, 3}, {1.0, 1.0}, {0.0, 0.0}),
                  beckit::DomainError);
}

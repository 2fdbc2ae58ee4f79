#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "beckit/errors.hpp"
#include "beckit/finite_volume.hpp"
#include "beckit/ideal_gas.hpp"
#include "doctest.h"
#include "oracles.hpp"

using beckit::CouplingParams;
using beckit::Execution;
using beckit::FiniteVolumeSpec;
using beckit::OccupationSpectrum;
using beckit::ThermoState;

namespace {

const double kTwoPi = 6.283185307179586;

FiniteVolumeSpec seven_mode_box() {
  FiniteVolumeSpec spec;
  spec.box_side = kTwoPi;
  spec.energy_cutoff = 1.5;
  spec.n_max = 8;
  spec.dim = 3;
  spec.gap = {0.25, 0.0};
  spec.tail_bound = 1.0;  // truncate deliberately; comparisons truncate too
  return spec;
}

// Mode list with multiplicities unrolled, for the brute-force oracles.
std::vector<double> flatten(const OccupationSpectrum& sp) {
  std::vector<double> flat;
  for (std::size_t i = 0; i < sp.energies.size(); ++i)
    for (std::int64_t c = 0; c < sp.multiplicities[i]; ++c)
      flat.push_back(sp.energies[i]);
  return flat;
}

}  // namespace

TEST_CASE("mode enumeration groups lattice momenta by energy") {
  auto spec = seven_mode_box();
  const auto sp = beckit::enumerate_modes(spec);
  REQUIRE(sp.energies.size() == 2);
  CHECK(sp.energies[0] == -0.25);
  CHECK(sp.energies[1] == 1.0);
  CHECK(sp.multiplicities[0] == 1);
  CHECK(sp.multiplicities[1] == 6);
  CHECK(sp.mode_count() == 7);

  // One dimension: cutoff 4.5 keeps n in {-2..2}.
  FiniteVolumeSpec line = spec;
  line.dim = 1;
  line.energy_cutoff = 4.5;
  line.gap = {0.0, 0.0};
  const auto lp = beckit::enumerate_modes(line);
  REQUIRE(lp.energies.size() == 3);
  CHECK(lp.energies[0] == 0.0);
  CHECK(lp.energies[1] == 1.0);
  CHECK(lp.energies[2] == 4.0);
  CHECK(lp.multiplicities[1] == 2);
  CHECK(lp.multiplicities[2] == 2);

  // Cutoff below the first excited lattice energy leaves the zero mode alone.
  FiniteVolumeSpec zero = spec;
  zero.energy_cutoff = 0.5;
  const auto zp = beckit::enumerate_modes(zero);
  CHECK(zp.mode_count() == 1);
  CHECK(zp.energies[0] == -0.25);

  FiniteVolumeSpec tight = spec;
  tight.mode_capacity = 6;
  CHECK_THROWS_AS(beckit::enumerate_modes(tight), beckit::CapacityExceeded);

  // Large box at a thermal cutoff: rejected before the walk even starts.
  FiniteVolumeSpec huge = spec;
  huge.box_side = 1000.0;
  huge.energy_cutoff = 1000.0;
  CHECK_THROWS_AS(beckit::enumerate_modes(huge), beckit::CapacityExceeded);

  FiniteVolumeSpec bad = spec;
  bad.box_side = 0.0;
  CHECK_THROWS_AS(beckit::enumerate_modes(bad), beckit::DomainError);
  bad = spec;
  bad.energy_cutoff = -1.0;
  CHECK_THROWS_AS(beckit::enumerate_modes(bad), beckit::DomainError);
  bad = spec;
  bad.n_max = 0;
  CHECK_THROWS_AS(beckit::enumerate_modes(bad), beckit::DomainError);
  bad = spec;
  bad.dim = 0;
  CHECK_THROWS_AS(beckit::enumerate_modes(bad), beckit::DomainError);
  bad = spec;
  bad.gap.delta = -0.1;
  CHECK_THROWS_AS(beckit::enumerate_modes(bad), beckit::DomainError);
  bad = spec;
  bad.tail_bound = 0.0;
  CHECK_THROWS_AS(beckit::enumerate_modes(bad), beckit::DomainError);
}

TEST_CASE("canonical recursion on spectra small enough to do by hand") {
  // A single zero-energy mode has Z_N = 1 for every N.
  const OccupationSpectrum single{{0.0}, {1}};
  const auto lz = beckit::canonical_log_partition(single, 1.7, 6, Execution::serial);
  REQUIRE(lz.size() == 7);
  for (const double v : lz) CHECK(v == 0.0);

  // Two levels, two particles: both the occupation sum and the recursion
  // identity Z_2 = (Z_1(b)^2 + Z_1(2b))/2 are available in closed form.
  const double e0 = -0.3, e1 = 0.7, beta = 1.3;
  const OccupationSpectrum two{{e0, e1}, {1, 1}};
  const auto lz2 = beckit::canonical_log_partition(two, beta, 2);
  const double z1 = std::exp(-beta * e0) + std::exp(-beta * e1);
  const double z1d = std::exp(-2.0 * beta * e0) + std::exp(-2.0 * beta * e1);
  const double direct = std::exp(-2.0 * beta * e0) + std::exp(-beta * (e0 + e1)) +
                        std::exp(-2.0 * beta * e1);
  CHECK(oracles::rel_err(std::exp(lz2[1]), z1) < 1e-15);
  CHECK(oracles::rel_err(std::exp(lz2[2]), direct) < 1e-14);
  CHECK(oracles::rel_err(direct, 0.5 * (z1 * z1 + z1d)) < 1e-15);

  // beta = 0 turns Z_N into the number of N-multisets of M modes.
  const OccupationSpectrum six{{-0.5, 1.0, 2.0}, {1, 2, 3}};
  const auto lz0 = beckit::canonical_log_partition(six, 0.0, 6);
  for (int n = 1; n <= 6; ++n)
    CHECK(oracles::rel_err(std::exp(lz0[n]), oracles::binomial(5 + n, n)) < 1e-13);
  CHECK(oracles::rel_err(std::exp(lz0[3]), 56.0) < 1e-13);
  CHECK(oracles::rel_err(std::exp(lz0[6]), 462.0) < 1e-13);
}

TEST_CASE("canonical recursion matches brute-force occupation enumeration") {
  const std::vector<double> flat{-0.3, 0.2, 0.5, 0.9};
  const OccupationSpectrum sp{flat, {1, 1, 1, 1}};
  const double beta = 1.1;
  const auto lz = beckit::canonical_log_partition(sp, beta, 6);
  for (int n = 1; n <= 6; ++n) {
    const double zb = oracles::brute_force_canonical_z(flat, beta, n);
    CHECK(oracles::rel_err(std::exp(lz[n]), zb) < 1e-12);
    const double ob = oracles::brute_force_zero_mode(flat, beta, n);
    CHECK(oracles::rel_err(beckit::zero_mode_occupation(lz, beta, 0.3, n), ob) < 1e-12);
  }

  // Grouped multiplicities agree with the unrolled list.
  const OccupationSpectrum grouped{{-0.3, 0.5}, {1, 2}};
  const std::vector<double> unrolled{-0.3, 0.5, 0.5};
  const auto lzg = beckit::canonical_log_partition(grouped, beta, 5);
  for (int n = 1; n <= 5; ++n) {
    CHECK(oracles::rel_err(std::exp(lzg[n]),
                           oracles::brute_force_canonical_z(unrolled, beta, n)) < 1e-12);
    CHECK(oracles::rel_err(beckit::zero_mode_occupation(lzg, beta, 0.3, n),
                           oracles::brute_force_zero_mode(unrolled, beta, n)) < 1e-12);
  }

  CHECK(beckit::zero_mode_occupation(lz, beta, 0.3, 0) == 0.0);
  CHECK_THROWS_AS(beckit::zero_mode_occupation(lz, beta, 0.3, 7), beckit::DomainError);
  CHECK_THROWS_AS(beckit::zero_mode_occupation({}, beta, 0.3, 0), beckit::DomainError);
  CHECK_THROWS_AS(beckit::canonical_log_partition(sp, -1.0, 4), beckit::DomainError);
  CHECK_THROWS_AS(beckit::canonical_log_partition(sp, 1.0, 0), beckit::DomainError);
  const OccupationSpectrum unsorted{{0.5, -0.3}, {1, 1}};
  CHECK_THROWS_AS(beckit::canonical_log_partition(unsorted, 1.0, 2), beckit::DomainError);
  const OccupationSpectrum degenerate_zero{{-0.3, 0.5}, {2, 1}};
  CHECK_THROWS_AS(beckit::canonical_log_partition(degenerate_zero, 1.0, 2),
                  beckit::DomainError);
}

TEST_CASE("grand-canonical solve matches direct summation over N") {
  const auto spec = seven_mode_box();
  const ThermoState state{0.9, -0.5, 3};
  const CouplingParams coupling{1.0, 2.0};
  const double volume = std::pow(spec.box_side, 3);
  const auto flat = flatten(beckit::enumerate_modes(spec));
  REQUIRE(flat.size() == 7);

  double norm = 0.0, first = 0.0, zero = 0.0, wlast = 0.0;
  for (int n = 0; n <= spec.n_max; ++n) {
    const double zb = oracles::brute_force_canonical_z(flat, state.beta, n);
    const double w = std::exp(state.beta * state.mu * n -
                              state.beta * coupling.g * coupling.lambda * n * n /
                                  (2.0 * volume)) *
                     zb;
    norm += w;
    first += n * w;
    if (n > 0) zero += oracles::brute_force_zero_mode(flat, state.beta, n) * w;
    if (n == spec.n_max) wlast = w;
  }

  const auto res = beckit::grand_canonical_solve(spec, state, coupling, Execution::serial);
  CHECK(res.mode_count == 7);
  CHECK(oracles::rel_err(res.pressure, std::log(norm) / (state.beta * volume)) < 1e-12);
  CHECK(oracles::rel_err(res.density, first / (norm * volume)) < 1e-12);
  CHECK(oracles::rel_err(res.condensate, zero / (norm * volume)) < 1e-12);
  CHECK(oracles::rel_err(res.tail_weight, wlast / norm) < 1e-12);
}

TEST_CASE("single-mode box reduces to a three-term closed form") {
  FiniteVolumeSpec spec;
  spec.box_side = 2.0;
  spec.energy_cutoff = 0.5;  // below (2 pi / L)^2, so only the zero mode
  spec.n_max = 2;
  spec.dim = 3;
  spec.gap = {0.5, 0.0};
  spec.tail_bound = 1.0;
  const ThermoState state{1.0, -2.0, 3};
  const CouplingParams coupling{1.0, 1.0};

  // Per-number energy -mu n + g lambda n^2/(2V) - Delta n = 1.5 n + n^2/16.
  const double volume = 8.0;
  const auto energy = [](double n) { return 1.5 * n + n * n / 16.0; };
  const double z = 1.0 + std::exp(-energy(1)) + std::exp(-energy(2));
  const double dens = (std::exp(-energy(1)) + 2.0 * std::exp(-energy(2))) / (volume * z);

  const auto res = beckit::grand_canonical_solve(spec, state, coupling);
  CHECK(res.mode_count == 1);
  CHECK(oracles::rel_err(res.pressure, std::log(z) / volume) < 1e-14);
  CHECK(oracles::rel_err(res.density, dens) < 1e-14);
  CHECK(res.condensate == res.density);  // every particle sits in the one mode
  CHECK(oracles::rel_err(res.tail_weight, std::exp(-energy(2)) / z) < 1e-14);

  // A huge repulsion empties the box.
  const auto empty = beckit::grand_canonical_solve(spec, state, {1.0, 1e12});
  CHECK(empty.pressure == 0.0);
  CHECK(empty.density == 0.0);
  CHECK(empty.condensate == 0.0);
}

TEST_CASE("truncation guard and the self-sizing solve") {
  FiniteVolumeSpec spec;
  spec.box_side = 5.0;
  spec.energy_cutoff = 40.0;
  spec.n_max = 50;  // mean particle number is near 375, so this must trip
  spec.dim = 3;
  spec.gap = {1.0, 0.0};
  const ThermoState state{1.0, 2.0, 3};
  const CouplingParams coupling{1.0, 1.0};
  CHECK_THROWS_AS(beckit::grand_canonical_solve(spec, state, coupling),
                  beckit::TruncationError);

  const auto res = beckit::grand_canonical_solve_auto(spec, state, coupling);
  CHECK(res.tail_weight <= spec.tail_bound);
  CHECK(std::fabs(res.density - 3.0) < 0.1);

  // A punishing tail bound forces the doubling path; the answer barely moves.
  FiniteVolumeSpec small = spec;
  small.box_side = 2.0;
  const auto loose = beckit::grand_canonical_solve_auto(small, state, coupling);
  small.tail_bound = 1e-70;
  const auto strict = beckit::grand_canonical_solve_auto(small, state, coupling);
  CHECK(strict.tail_weight <= 1e-70);
  CHECK(oracles::rel_err(strict.density, loose.density) < 1e-6);
  CHECK(oracles::rel_err(strict.pressure, loose.pressure) < 1e-6);
}

TEST_CASE("growing boxes approach the closed-form gas") {
  const ThermoState state{1.0, 2.0, 3};
  const CouplingParams coupling{1.0, 1.0};
  const beckit::GapSpec gap{1.0, 0.0};
  const auto mf = beckit::mf_solve(state, coupling, gap);
  REQUIRE(mf.condensed);

  std::vector<double> cond, dens, pres;
  for (const double side : {4.0, 6.0, 8.0}) {
    FiniteVolumeSpec spec;
    spec.box_side = side;
    spec.energy_cutoff = 40.0;
    spec.dim = 3;
    spec.gap = gap;
    const auto res = beckit::grand_canonical_solve_auto(spec, state, coupling);
    cond.push_back(res.condensate);
    dens.push_back(res.density);
    pres.push_back(res.pressure);
  }
  // The number distribution is symmetric about rho V, so the density is
  // converged from the start; only the condensate carries a real 1/V tail.
  for (std::size_t i = 1; i < cond.size(); ++i) {
    CHECK(std::fabs(cond[i] - mf.rho_condensate) <
          std::fabs(cond[i - 1] - mf.rho_condensate));
    CHECK(std::fabs(dens[i] - mf.rho_total) <
          std::fabs(dens[i - 1] - mf.rho_total) + 1e-12);
  }
  CHECK(oracles::rel_err(cond.back(), mf.rho_condensate) < 0.01);
  CHECK(oracles::rel_err(dens.back(), mf.rho_total) < 1e-9);
  CHECK(oracles::rel_err(pres.back(), mf.pressure) < 0.01);
}

TEST_CASE("finite-volume pressure derivatives recover the densities") {
  FiniteVolumeSpec spec;
  spec.box_side = 5.0;
  spec.energy_cutoff = 40.0;
  spec.dim = 3;
  spec.gap = {1.0, 0.0};
  const CouplingParams coupling{1.0, 1.0};
  const double h = 1e-3;

  const auto pressure_at = [&](double mu, double delta) {
    FiniteVolumeSpec local = spec;
    local.gap.delta = delta;
    return beckit::grand_canonical_solve_auto(local, {1.0, mu, 3}, coupling).pressure;
  };

  for (const double mu : {2.0, -3.0}) {
    const auto base = [&] {
      FiniteVolumeSpec local = spec;
      return beckit::grand_canonical_solve_auto(local, {1.0, mu, 3}, coupling);
    }();
    const double dp_dmu = (pressure_at(mu + h, 1.0) - pressure_at(mu - h, 1.0)) / (2.0 * h);
    CHECK(oracles::rel_err(dp_dmu, base.density) < 1e-5);
    const double dp_dd = (pressure_at(mu, 1.0 + h) - pressure_at(mu, 1.0 - h)) / (2.0 * h);
    if (base.condensate > 1e-6) {
      CHECK(oracles::rel_err(dp_dd, base.condensate) < 1e-5);
    } else {
      CHECK(std::fabs(dp_dd - base.condensate) < 1e-8);
    }
  }
}

TEST_CASE("pressure sandwich between two couplings") {
  FiniteVolumeSpec spec;
  spec.box_side = 4.0;
  spec.energy_cutoff = 40.0;
  spec.n_max = 900;
  spec.dim = 3;
  spec.gap = {1.0, 0.0};
  const ThermoState state{1.0, 2.0, 3};

  double prev_dp = 0.0;
  for (const double lambda2 : {1.1, 1.5, 2.0}) {
    const auto m = beckit::verify_bogoliubov_pair(spec, state, 1.0, 1.0, lambda2);
    CHECK(m.pressure_difference > 0.0);
    CHECK(m.pressure_difference > prev_dp);
    CHECK(m.lower_margin >= -1e-12);
    CHECK(m.upper_margin >= -1e-12);
    prev_dp = m.pressure_difference;
  }

  const auto same = beckit::verify_bogoliubov_pair(spec, state, 1.0, 1.5, 1.5);
  CHECK(same.pressure_difference == 0.0);
  CHECK(same.lower_margin == 0.0);
  CHECK(same.upper_margin == 0.0);

  CHECK_THROWS_AS(beckit::verify_bogoliubov_pair(spec, state, 1.0, 2.0, 1.0),
                  beckit::DomainError);
  CHECK_THROWS_AS(beckit::verify_bogoliubov_pair(spec, state, -1.0, 1.0, 2.0),
                  beckit::DomainError);
  CHECK_THROWS_AS(beckit::verify_bogoliubov_pair(spec, {1.0, 2.0, 2}, 1.0, 1.0, 2.0),
                  beckit::DomainError);

  // Margins recomputed from scratch on a box small enough to enumerate.
  const auto tiny = seven_mode_box();
  const ThermoState ts{0.9, -0.5, 3};
  const double volume = std::pow(tiny.box_side, 3);
  const auto flat = flatten(beckit::enumerate_modes(tiny));
  const auto sums_at = [&](double lambda, double* second) {
    double norm = 0.0, sq = 0.0;
    for (int n = 0; n <= tiny.n_max; ++n) {
      const double w = std::exp(ts.beta * ts.mu * n -
                                ts.beta * lambda * n * n / (2.0 * volume)) *
                       oracles::brute_force_canonical_z(flat, ts.beta, n);
      norm += w;
      sq += n * n * w;
    }
    *second = sq / norm;
    return std::log(norm) / (ts.beta * volume);
  };
  double m2a = 0.0, m2b = 0.0;
  const double pa = sums_at(2.0, &m2a);
  const double pb = sums_at(3.0, &m2b);
  const auto lib = beckit::verify_bogoliubov_pair(tiny, ts, 1.0, 2.0, 3.0);
  const double scale = 1.0 / (2.0 * volume * volume);
  CHECK(oracles::rel_err(lib.pressure_difference, pa - pb) < 1e-10);
  CHECK(oracles::rel_err(lib.lower_margin, (pa - pb) - scale * m2b) < 1e-10);
  CHECK(oracles::rel_err(lib.upper_margin, scale * m2a - (pa - pb)) < 1e-10);
}

TEST_CASE("pressure is monotone and convex in the gap at fixed volume") {
  FiniteVolumeSpec spec;
  spec.box_side = 4.0;
  spec.energy_cutoff = 40.0;
  spec.n_max = 900;
  spec.dim = 3;
  const ThermoState state{1.0, 2.0, 3};
  const CouplingParams coupling{1.0, 1.0};

  const auto report =
      beckit::verify_delta_convexity(spec, state, coupling, {0.0, 0.5, 1.0, 2.0});
  REQUIRE(report.pressures.size() == 4);
  CHECK(report.pass);
  CHECK(report.min_monotone_margin > 0.0);
  CHECK(report.min_convexity_margin >= -1e-10);
  CHECK(report.min_quotient_margin >= -1e-10);
  for (std::size_t i = 1; i < report.pressures.size(); ++i)
    CHECK(report.pressures[i] > report.pressures[i - 1]);

  // At small gaps the difference quotient collapses onto the condensate.
  FiniteVolumeSpec fine = spec;
  fine.n_max = 400;
  const auto tight =
      beckit::verify_delta_convexity(fine, state, coupling, {0.0, 1e-4, 2e-4});
  CHECK(tight.pass);
  const double quotient = (tight.pressures[1] - tight.pressures[0]) / 1e-4;
  CHECK(oracles::rel_err(quotient, tight.condensates[1]) < 1e-2);

  // Deep in the normal phase the inequalities still hold, just barely above 0.
  FiniteVolumeSpec dilute = spec;
  dilute.n_max = 60;
  const auto normal =
      beckit::verify_delta_convexity(dilute, {1.0, -3.0, 3}, coupling, {0.0, 0.5, 1.0});
  CHECK(normal.pass);
  CHECK(normal.condensates.back() < 0.05);

  CHECK_THROWS_AS(beckit::verify_delta_convexity(spec, state, coupling, {0.0, 0.5}),
                  beckit::DomainError);
  CHECK_THROWS_AS(
      beckit::verify_delta_convexity(spec, state, coupling, {0.0, 0.5, 0.5}),
      beckit::DomainError);
  CHECK_THROWS_AS(
      beckit::verify_delta_convexity(spec, state, coupling, {-0.1, 0.5, 1.0}),
      beckit::DomainError);
}

TEST_CASE("serial and parallel runs agree to the last bit") {
  const OccupationSpectrum sp{{-0.3, 0.2, 0.5, 0.9}, {1, 1, 1, 1}};
  const auto ls = beckit::canonical_log_partition(sp, 1.1, 40, Execution::serial);
  const auto lp = beckit::canonical_log_partition(sp, 1.1, 40, Execution::parallel);
  REQUIRE(ls.size() == lp.size());
  for (std::size_t i = 0; i < ls.size(); ++i) CHECK(ls[i] == lp[i]);
  CHECK(beckit::zero_mode_occupation(ls, 1.1, 0.3, 40, Execution::serial) ==
        beckit::zero_mode_occupation(lp, 1.1, 0.3, 40, Execution::parallel));

  FiniteVolumeSpec spec;
  spec.box_side = 4.0;
  spec.energy_cutoff = 40.0;
  spec.n_max = 900;
  spec.dim = 3;
  spec.gap = {1.0, 0.0};
  const ThermoState state{1.0, 2.0, 3};
  const CouplingParams coupling{1.0, 1.0};
  const auto a = beckit::grand_canonical_solve(spec, state, coupling, Execution::serial);
  const auto b = beckit::grand_canonical_solve(spec, state, coupling, Execution::parallel);
  CHECK(a.pressure == b.pressure);
  CHECK(a.density == b.density);
  CHECK(a.condensate == b.condensate);
  CHECK(a.tail_weight == b.tail_weight);
  CHECK(a.mode_count == b.mode_count);

  const auto ms = beckit::verify_bogoliubov_pair(spec, state, 1.0, 1.0, 2.0,
                                                 Execution::serial);
  const auto mp = beckit::verify_bogoliubov_pair(spec, state, 1.0, 1.0, 2.0,
                                                 Execution::parallel);
  CHECK(ms.pressure_difference == mp.pressure_difference);
  CHECK(ms.lower_margin == mp.lower_margin);
  CHECK(ms.upper_margin == mp.upper_margin);
}

TEST_CASE("log-domain guards catch overflowing inputs") {
  const OccupationSpectrum hot{{-1e160}, {1}};
  CHECK_THROWS_AS(beckit::canonical_log_partition(hot, 1e160, 2),
                  beckit::OverflowGuard);

  FiniteVolumeSpec spec;
  spec.box_side = 2.0;
  spec.energy_cutoff = 0.5;
  spec.n_max = 2;
  spec.dim = 3;
  spec.tail_bound = 1.0;
  CHECK_THROWS_AS(beckit::grand_canonical_solve(spec, {1.0, 1e308, 3}, {1.0, 1.0}),
                  beckit::OverflowGuard);

  CHECK_THROWS_AS(beckit::grand_canonical_solve(spec, {0.0, -1.0, 3}, {1.0, 1.0}),
                  beckit::DomainError);
  CHECK_THROWS_AS(beckit::grand_canonical_solve(spec, {1.0, -1.0, 2}, {1.0, 1.0}),
                  beckit::DomainError);
  CHECK_THROWS_AS(beckit::grand_canonical_solve(spec, {1.0, -1.0, 3}, {0.0, 1.0}),
                  beckit::DomainError);
  CHECK_THROWS_AS(beckit::grand_canonical_solve(spec, {1.0, -1.0, 3}, {1.0, -1.0}),
                  beckit::DomainError);
}

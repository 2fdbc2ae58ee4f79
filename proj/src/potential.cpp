#include "beckit/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "beckit/errors.hpp"
#include "beckit/quadrature.hpp"

namespace beckit {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate_tabulated(const TabulatedPotential& tab) {
  if (tab.r.size() != tab.v.size()) throw DomainError("tabulated potential: r/v size mismatch");
  if (tab.r.size() < 2) throw DomainError("tabulated potential: need at least two samples");
  if (tab.r.front() != 0.0) throw DomainError("tabulated potential: first sample must sit at r = 0");
  for (std::size_t i = 0; i < tab.r.size(); ++i) {
    if (!std::isfinite(tab.r[i]) || !std::isfinite(tab.v[i])) {
      throw DomainError("tabulated potential: non-finite sample");
    }
    if (i > 0 && tab.r[i] <= tab.r[i - 1]) {
      throw DomainError("tabulated potential: radii must increase strictly");
    }
  }
}

void validate_analytic(double v0, double scale, const char* kind) {
  if (!std::isfinite(v0) || v0 <= 0.0) {
    throw DomainError(std::string(kind) + " potential: amplitude must be positive");
  }
  if (!std::isfinite(scale) || scale <= 0.0) {
    throw DomainError(std::string(kind) + " potential: length scale must be positive");
  }
}

double tabulated_value(const TabulatedPotential& tab, double r) {
  if (r >= tab.r.back()) return 0.0;
  const auto it = std::upper_bound(tab.r.begin(), tab.r.end(), r);
  const std::size_t hi = static_cast<std::size_t>(it - tab.r.begin());
  const std::size_t lo = hi - 1;
  const double t = (r - tab.r[lo]) / (tab.r[hi] - tab.r[lo]);
  return tab.v[lo] + t * (tab.v[hi] - tab.v[lo]);
}

// Integration window beyond which the analytic tails are below roundoff.
double radial_cutoff(const PotentialModel& pot) {
  struct Visitor {
    double operator()(const GaussianPotential& p) const { return 10.0 * p.sigma; }
    double operator()(const ExponentialPotential& p) const { return 45.0 / p.kappa; }
    double operator()(const TabulatedPotential& p) const { return p.r.back(); }
  };
  return std::visit(Visitor{}, pot);
}

double value_at(const PotentialModel& pot, double r) {
  struct Visitor {
    double r;
    double operator()(const GaussianPotential& p) const {
      return p.v0 * std::exp(-r * r / (2.0 * p.sigma * p.sigma));
    }
    double operator()(const ExponentialPotential& p) const { return p.v0 * std::exp(-p.kappa * r); }
    double operator()(const TabulatedPotential& p) const { return tabulated_value(p, r); }
  };
  return std::visit(Visitor{r}, pot);
}

void validate_model(const PotentialModel& pot) {
  if (const auto* g = std::get_if<GaussianPotential>(&pot)) {
    validate_analytic(g->v0, g->sigma, "gaussian");
  } else if (const auto* e = std::get_if<ExponentialPotential>(&pot)) {
    validate_analytic(e->v0, e->kappa, "exponential");
  } else {
    validate_tabulated(std::get<TabulatedPotential>(pot));
  }
}

// Integral over one piece with the kink structure known to the caller.
template <class F>
double integrate_piecewise(const F& integrand, const std::vector<double>& breaks, double abs_tol) {
  const double total_len = breaks.back() - breaks.front();
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double len = breaks[i + 1] - breaks[i];
    if (len <= 0.0) continue;
    sum += adaptive_simpson(integrand, breaks[i], breaks[i + 1], abs_tol * len / total_len);
  }
  return sum;
}

std::vector<double> integration_breaks(const PotentialModel& pot) {
  if (const auto* tab = std::get_if<TabulatedPotential>(&pot)) return tab->r;
  return {0.0, radial_cutoff(pot)};
}

// Panel boundaries aligned to the sin(qr) half-periods keep the adaptive
// integrator sharp on oscillatory transforms; merged with the kink structure.
std::vector<double> oscillation_breaks(std::vector<double> breaks, double q) {
  if (q <= 0.0) return breaks;
  const double r_max = breaks.back();
  const double step = kPi / q;
  for (double r = step; r < r_max; r += step) breaks.push_back(r);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return breaks;
}

}  // namespace

double v_at_origin(const PotentialModel& pot) {
  validate_model(pot);
  return value_at(pot, 0.0);
}

double vhat(const PotentialModel& pot, double q, int dim) {
  validate_model(pot);
  if (!std::isfinite(q) || q < 0.0) throw DomainError("vhat: wavenumber must be >= 0");
  if (dim < 1) throw DomainError("vhat: dim must be >= 1");
  if (const auto* g = std::get_if<GaussianPotential>(&pot)) {
    const double s2 = g->sigma * g->sigma;
    return g->v0 * std::pow(2.0 * kPi * s2, 0.5 * dim) * std::exp(-0.5 * s2 * q * q);
  }
  if (const auto* e = std::get_if<ExponentialPotential>(&pot)) {
    // D-dimensional transform of e^{-kappa r}:
    //   2^D pi^{(D-1)/2} Gamma((D+1)/2) kappa / (kappa^2 + q^2)^{(D+1)/2}
    const double k2q2 = e->kappa * e->kappa + q * q;
    return e->v0 * std::pow(2.0, dim) * std::pow(kPi, 0.5 * (dim - 1)) *
           std::tgamma(0.5 * (dim + 1)) * e->kappa / std::pow(k2q2, 0.5 * (dim + 1));
  }
  if (dim != 3) {
    throw DomainError("vhat: tabulated potentials carry a 3-D radial profile only");
  }
  return vhat_quadrature(pot, q);
}

double vhat_quadrature(const PotentialModel& pot, double q) {
  validate_model(pot);
  if (!std::isfinite(q) || q < 0.0) throw DomainError("vhat_quadrature: wavenumber must be >= 0");
  const auto breaks = integration_breaks(pot);

  // Crude magnitude scales for the tolerance targets.
  auto abs_r2 = [&](double r) { return r * r * std::fabs(value_at(pot, r)); };
  auto abs_r1 = [&](double r) { return r * std::fabs(value_at(pot, r)); };
  const double s0 = integrate_piecewise(abs_r2, breaks, 1e-6) + 1e-300;
  const double s1 = integrate_piecewise(abs_r1, breaks, 1e-6) + 1e-300;

  if (q == 0.0) {
    auto f = [&](double r) { return r * r * value_at(pot, r); };
    const double est = integrate_piecewise(f, breaks, 1e-5 * s0);
    const double tol = std::max(1e-10 * std::fabs(est), 1e-14 * s0);
    return 4.0 * kPi * integrate_piecewise(f, breaks, tol);
  }
  const auto osc = oscillation_breaks(breaks, q);
  auto f = [&](double r) { return r * value_at(pot, r) * std::sin(q * r); };
  const double est = integrate_piecewise(f, osc, 1e-5 * s1);
  const double tol = std::max(1e-10 * std::fabs(est), 1e-14 * s1);
  return 4.0 * kPi / q * integrate_piecewise(f, osc, tol);
}

namespace {

struct ScanResult {
  double min_vhat;
  double argmin_q;
  double max_excess;
  double argmax_q;
  bool pass;
};

ScanResult scan_grid(const PotentialModel& pot, double vhat0, double q_max, int n, Execution exec) {
  std::vector<double> values(static_cast<std::size_t>(n));
  for_index(n, exec, [&](std::int64_t i) {
    const double q = q_max * static_cast<double>(i) / static_cast<double>(n - 1);
    values[static_cast<std::size_t>(i)] = vhat(pot, q);
  });
  ScanResult r{values[0], 0.0, values[0] - vhat0, 0.0, false};
  for (int i = 1; i < n; ++i) {
    const double q = q_max * static_cast<double>(i) / static_cast<double>(n - 1);
    const double v = values[static_cast<std::size_t>(i)];
    if (v < r.min_vhat) {
      r.min_vhat = v;
      r.argmin_q = q;
    }
    if (v - vhat0 > r.max_excess) {
      r.max_excess = v - vhat0;
      r.argmax_q = q;
    }
  }
  const double tol_cert = 1e-9 * std::fabs(vhat0);
  r.pass = vhat0 > 0.0 && r.min_vhat >= -tol_cert && r.max_excess <= tol_cert;
  return r;
}

}  // namespace

PositivityReport positivity_check(const PotentialModel& pot, double q_max, int n_samples,
                                  Execution exec) {
  validate_model(pot);
  if (!(q_max > 0.0)) throw DomainError("positivity_check: q_max must be positive");
  if (n_samples < 2) throw DomainError("positivity_check: need at least two samples");

  const double vhat0 = vhat(pot, 0.0);
  const ScanResult coarse = scan_grid(pot, vhat0, q_max, n_samples, exec);
  // Refinement doubles the density while keeping every coarse point on-grid.
  const int n_fine = 2 * n_samples - 1;
  const ScanResult fine = scan_grid(pot, vhat0, q_max, n_fine, exec);

  PositivityReport report;
  report.vhat0 = vhat0;
  report.min_vhat = fine.min_vhat;
  report.argmin_q = fine.argmin_q;
  report.max_excess = fine.max_excess;
  report.argmax_q = fine.argmax_q;
  report.q_max = q_max;
  report.n_samples = n_fine;
  report.truncation_radius = std::holds_alternative<TabulatedPotential>(pot)
                                 ? std::get<TabulatedPotential>(pot).r.back()
                                 : std::numeric_limits<double>::quiet_NaN();
  report.verdict_stable = coarse.pass == fine.pass;
  report.sample_based = true;
  // An unstable verdict is never a pass.
  report.pass = fine.pass && report.verdict_stable;
  return report;
}

namespace {

SuperstabilityConstants make_constants(const PotentialModel& pot, double epsilon) {
  if (!std::isfinite(epsilon) || epsilon < 0.0 || epsilon >= 1.0) {
    throw DomainError("superstability_constants: epsilon must lie in [0, 1)");
  }
  return {vhat(pot, 0.0) * (1.0 - epsilon), 0.5 * v_at_origin(pot), epsilon};
}

}  // namespace

SuperstabilityConstants superstability_constants(const PotentialModel& pot, double epsilon) {
  validate_model(pot);
  if (std::holds_alternative<TabulatedPotential>(pot)) {
    throw NotPositiveType(
        "superstability_constants: tabulated potential lacks certification; "
        "run positivity_check and pass its report");
  }
  // Gaussian and exponential transforms are positive and maximal at q = 0 in
  // closed form; no sampling needed.
  return make_constants(pot, epsilon);
}

SuperstabilityConstants superstability_constants(const PotentialModel& pot, double epsilon,
                                                 const PositivityReport& report) {
  validate_model(pot);
  if (!report.pass) {
    throw NotPositiveType("superstability_constants: positivity certification failed");
  }
  return make_constants(pot, epsilon);
}

TabulatedPotential load_tabulated_potential(std::istream& in) {
  TabulatedPotential tab;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream row(line);
    double r = 0.0;
    double v = 0.0;
    if (!(row >> r)) continue;  // blank or comment-only line
    if (!(row >> v)) {
      throw DomainError("tabulated potential: line " + std::to_string(line_no) +
                        ": expected two numeric columns");
    }
    std::string extra;
    if (row >> extra) {
      throw DomainError("tabulated potential: line " + std::to_string(line_no) +
                        ": trailing content '" + extra + "'");
    }
    tab.r.push_back(r);
    tab.v.push_back(v);
  }
  validate_tabulated(tab);
  return tab;
}

TabulatedPotential load_tabulated_potential(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("tabulated potential: cannot open '" + path + "'");
  return load_tabulated_potential(in);
}

}  // namespace beckit

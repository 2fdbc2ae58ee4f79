#ifndef BECKIT_POTENTIAL_HPP
#define BECKIT_POTENTIAL_HPP

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "beckit/parallel.hpp"

namespace beckit {

// Radial pair potentials. Amplitudes are energies, lengths reduced units.
// Fourier convention is non-unitary, vhat(q) = Integral v(x) e^{-iqx} dx,
// so vhat(0) = Integral v is the bare interaction strength.

struct GaussianPotential {
  double v0;
  double sigma;
};

struct ExponentialPotential {
  double v0;
  double kappa;
};

// Piecewise-linear samples (r, v(r)); r strictly increasing from r = 0,
// v taken as 0 beyond the last sample.
struct TabulatedPotential {
  std::vector<double> r;
  std::vector<double> v;
};

using PotentialModel = std::variant<GaussianPotential, ExponentialPotential, TabulatedPotential>;

struct SuperstabilityConstants {
  double a_const;  // vhat(0) (1 - epsilon), energy x volume
  double b_const;  // v(0)/2, energy
  double epsilon;
};

struct PositivityReport {
  double vhat0;
  double min_vhat;
  double argmin_q;
  double max_excess;  // max over samples of vhat(q) - vhat(0)
  double argmax_q;
  double q_max;
  int n_samples;            // grid size of the fine pass
  double truncation_radius;  // last tabulated r; NaN for analytic kinds
  bool verdict_stable;       // coarse and refined grids agreed
  bool sample_based;         // always true: a grid scan, not a proof
  bool pass;
};

double v_at_origin(const PotentialModel& pot);

// Fourier transform at wavenumber q >= 0 in dimension dim. Analytic kinds use
// closed forms (any dim); tabulated potentials are integrated numerically and
// support dim = 3 only.
double vhat(const PotentialModel& pot, double q, int dim = 3);

// Numerical route to the same transform (dim = 3), available for every kind;
// the closed-form/quadrature agreement tests run through this.
double vhat_quadrature(const PotentialModel& pot, double q);

// Grid scan of vhat over [0, q_max] with one refinement pass (2n-1 points);
// pass requires min >= -tol, max excess <= tol, vhat(0) > 0, with
// tol = 1e-9 |vhat(0)|, and a verdict stable under refinement.
PositivityReport positivity_check(const PotentialModel& pot, double q_max, int n_samples,
                                  Execution exec = Execution::parallel);

// Optimal constants A = vhat(0)(1 - epsilon), B = v(0)/2. The two-argument
// form accepts analytic kinds on the strength of their closed-form transforms
// and rejects tabulated input (no certification); the three-argument form
// requires a passing report.
SuperstabilityConstants superstability_constants(const PotentialModel& pot, double epsilon);
SuperstabilityConstants superstability_constants(const PotentialModel& pot, double epsilon,
                                                 const PositivityReport& report);

// Two-column text (r, v(r)), '#' comments, whitespace-delimited.
TabulatedPotential load_tabulated_potential(std::istream& in);
TabulatedPotential load_tabulated_potential(const std::string& path);

}  // namespace beckit

#endif

// beckit: command-line front end.
//
// Subcommands:
//   potential-check   certify a pair potential and report its constants
//   bound eval        condensate lower bound at one parameter point
//   bound delta-min   smallest gap certifying a target condensate density
//   bound sweep       bound over a parameter grid, CSV
//   meanfield         closed-form gas solve, optionally swept over a grid
//   verify            finite-volume inequality and convergence suites
//
// Exit codes: 0 = success / all checks pass, 1 = operational error (bad
// input, file problems, numerical failure), 2 = a computed negative answer
// (certification failed, precondition violated, no qualifying gap).
//
// All quantities are in reduced units (hbar^2/2m = 1, kB = 1).  Reports are
// deterministic given the same flags; the metadata block is the only part
// that varies between runs and --no-meta removes it.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "beckit/bound.hpp"
#include "beckit/errors.hpp"
#include "beckit/finite_volume.hpp"
#include "beckit/ideal_gas.hpp"
#include "beckit/meanfield.hpp"
#include "beckit/parallel.hpp"
#include "beckit/potential.hpp"
#include "json.hpp"

using ordered_json = nlohmann::ordered_json;
using namespace beckit;

namespace {

constexpr const char* kUnits = "reduced: hbar^2/2m=1, kB=1";
constexpr const char* kVersion = "0.1.0";

// JSON payloads carry only finite numbers; the rest become string tokens.
ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

// Shortest round-trip decimal, '.' decimal point regardless of locale.
std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string error_name(const Error& e) {
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const DivergentSeries*>(&e)) return "DivergentSeries";
  if (dynamic_cast<const ConvergenceFailure*>(&e)) return "ConvergenceFailure";
  if (dynamic_cast<const QuadratureFailure*>(&e)) return "QuadratureFailure";
  if (dynamic_cast<const NotPositiveType*>(&e)) return "NotPositiveType";
  if (dynamic_cast<const PreconditionFailed*>(&e)) return "PreconditionFailed";
  if (dynamic_cast<const NotFound*>(&e)) return "NotFound";
  if (dynamic_cast<const EmptySearch*>(&e)) return "EmptySearch";
  if (dynamic_cast<const CapacityExceeded*>(&e)) return "CapacityExceeded";
  if (dynamic_cast<const TruncationError*>(&e)) return "TruncationError";
  if (dynamic_cast<const OverflowGuard*>(&e)) return "OverflowGuard";
  return "Error";
}

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

struct OutputOpts {
  std::string path = "-";
  std::string format;  // each command sets its own default
  bool no_meta = false;
};

void write_text(const OutputOpts& out, const std::string& text) {
  if (out.path == "-" || out.path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out.path);
  if (!f) throw DomainError("cannot open output file: " + out.path);
  f << text;
}

void emit_json(const OutputOpts& out, const std::string& command,
               ordered_json payload) {
  ordered_json doc;
  if (!out.no_meta)
    doc["meta"] = {{"tool", "beckit"},
                   {"version", kVersion},
                   {"command", command},
                   {"generated", timestamp_utc()}};
  for (auto& [k, v] : payload.items()) doc[k] = v;
  write_text(out, doc.dump(2) + "\n");
}

// ---- potential plumbing ----------------------------------------------------

struct PotentialArgs {
  std::string model = "gaussian";
  double v0 = 1.0;
  double sigma = 1.0;
  double kappa = 1.0;
  std::string table;
};

void add_potential_options(CLI::App* cmd, PotentialArgs& pa) {
  cmd->add_option("--model", pa.model, "Potential kind")
      ->check(CLI::IsMember({"gaussian", "exponential", "table"}))
      ->capture_default_str();
  cmd->add_option("--v0", pa.v0, "Amplitude v(0) of the analytic models")
      ->capture_default_str();
  cmd->add_option("--sigma", pa.sigma, "Gaussian width")->capture_default_str();
  cmd->add_option("--kappa", pa.kappa, "Exponential decay rate")
      ->capture_default_str();
  cmd->add_option("--table", pa.table, "Two-column (r, v) sample file");
}

PotentialModel make_potential(const PotentialArgs& pa) {
  if (pa.model == "gaussian") return GaussianPotential{pa.v0, pa.sigma};
  if (pa.model == "exponential") return ExponentialPotential{pa.v0, pa.kappa};
  if (pa.table.empty())
    throw DomainError("--model table needs --table <file>");
  return load_tabulated_potential(pa.table);
}

ordered_json potential_echo(const PotentialArgs& pa) {
  ordered_json j;
  j["model"] = pa.model;
  if (pa.model == "table") {
    j["table"] = pa.table;
  } else {
    j["v0"] = num(pa.v0);
    if (pa.model == "gaussian") j["sigma"] = num(pa.sigma);
    if (pa.model == "exponential") j["kappa"] = num(pa.kappa);
  }
  return j;
}

// ---- sweep grids -----------------------------------------------------------

struct SweepAxis {
  std::string key;
  std::vector<double> values;
};

// "key=a:b:n" -> n evenly spaced values from a to b inclusive.
SweepAxis parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  const auto c1 = text.find(':', eq + 1);
  const auto c2 = text.find(':', c1 + 1);
  if (eq == std::string::npos || c1 == std::string::npos || c2 == std::string::npos)
    throw DomainError("sweep syntax is key=start:stop:count (" + text + ")");
  SweepAxis axis;
  axis.key = text.substr(0, eq);
  double a = 0.0, b = 0.0;
  long n = 0;
  try {
    a = std::stod(text.substr(eq + 1, c1 - eq - 1));
    b = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    n = std::stol(text.substr(c2 + 1));
  } catch (const std::exception&) {
    throw DomainError("sweep syntax is key=start:stop:count (" + text + ")");
  }
  if (n < 1 || n > 10000000) throw DomainError("sweep count out of range");
  for (long i = 0; i < n; ++i)
    axis.values.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) /
                                            static_cast<double>(n - 1));
  return axis;
}

// ---- potential-check -------------------------------------------------------

int run_potential_check(const PotentialArgs& pa, double q_max, int samples,
                        double epsilon, const OutputOpts& out) {
  const PotentialModel pot = make_potential(pa);
  const PositivityReport rep = positivity_check(pot, q_max, samples);

  ordered_json j;
  j["units"] = kUnits;
  j["potential"] = potential_echo(pa);
  j["v0"] = num(v_at_origin(pot));
  j["vhat0"] = num(rep.vhat0);
  if (rep.pass) {
    const auto cons = std::holds_alternative<TabulatedPotential>(pot)
                          ? superstability_constants(pot, epsilon, rep)
                          : superstability_constants(pot, epsilon);
    j["A"] = num(cons.a_const);
    j["B"] = num(cons.b_const);
  } else {
    // No certificate, no stability constant.
    j["A"] = "nan";
    j["B"] = num(v_at_origin(pot) / 2.0);
  }
  j["epsilon"] = num(epsilon);
  j["pass"] = rep.pass;
  j["min_vhat"] = num(rep.min_vhat);
  j["argmin_q"] = num(rep.argmin_q);
  j["max_excess"] = num(rep.max_excess);
  j["argmax_q"] = num(rep.argmax_q);
  j["q_max"] = num(rep.q_max);
  j["n_samples"] = rep.n_samples;
  j["sample_based"] = rep.sample_based;
  emit_json(out, "potential-check", j);
  return rep.pass ? 0 : 2;
}

// ---- bound -----------------------------------------------------------------

struct BoundArgs {
  double beta = 1.0;
  double mu = 1.0;
  double g = 1.0;
  double delta = 1.0;
  double delta0 = 0.0;
  int dim = 3;
  std::string rho_gapless = "rigorous";
  double eta = 0.01;
  double delta_cap = 1000.0;
};

RhoGaplessMode parse_rho_gapless(const std::string& text) {
  if (text == "rigorous") return RhoGaplessMode::rigorous();
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    throw DomainError("--rho-gapless takes 'rigorous' or a number");
  return RhoGaplessMode::user(v);
}

BoundReport bound_at(const BoundArgs& ba, const PotentialModel& pot,
                     double beta, double mu, double g, double delta) {
  const ThermoState state{beta, mu, ba.dim};
  const GapSpec gap{delta, ba.delta0};
  const RhoGaplessMode rg = parse_rho_gapless(ba.rho_gapless);
  if (ba.delta0 > 0.0)
    return condensate_lower_bound_gapped_reference(state, g, gap, pot, rg);
  return condensate_lower_bound(state, g, gap, pot, rg);
}

ordered_json bound_report_json(const BoundArgs& ba, const PotentialArgs& pa,
                               const BoundReport& rep) {
  ordered_json j;
  j["units"] = kUnits;
  j["beta"] = num(ba.beta);
  j["mu"] = num(ba.mu);
  j["g"] = num(ba.g);
  j["delta"] = num(ba.delta);
  j["delta0"] = num(ba.delta0);
  j["dim"] = ba.dim;
  j["potential"] = potential_echo(pa);
  j["rho_gapless"] = ba.rho_gapless;
  j["lower_bound"] = num(rep.lower_bound);
  j["terms"] = {{"mu_term", num(rep.terms.mu_term)},
                {"quadratic_pbg_term", num(rep.terms.quadratic_pbg_term)},
                {"linear_pbg_term", num(rep.terms.linear_pbg_term)},
                {"v0_term", num(rep.terms.v0_term)},
                {"critical_term", num(rep.terms.critical_term)}};
  j["rho_gapless_used"] = num(rep.rho_gapless_used);
  j["valid"] = rep.valid;
  j["validity_reasons"] = rep.validity_reasons;
  return j;
}

int run_bound_eval(const BoundArgs& ba, const PotentialArgs& pa,
                   const OutputOpts& out) {
  const PotentialModel pot = make_potential(pa);
  const BoundReport rep = bound_at(ba, pot, ba.beta, ba.mu, ba.g, ba.delta);
  if (out.format == "csv") {
    std::string text = std::string("# ") + kUnits + "\n";
    if (!out.no_meta)
      text += "# beckit " + std::string(kVersion) + " bound eval " +
              timestamp_utc() + "\n";
    text += "beta,mu,g,delta,lower_bound,valid,rho_gapless_used\n";
    text += fmt(ba.beta) + "," + fmt(ba.mu) + "," + fmt(ba.g) + "," +
            fmt(ba.delta) + "," + fmt(rep.lower_bound) + "," +
            (rep.valid ? "true" : "false") + "," + fmt(rep.rho_gapless_used) +
            "\n";
    write_text(out, text);
  } else {
    emit_json(out, "bound eval", bound_report_json(ba, pa, rep));
  }
  return rep.valid ? 0 : 2;
}

int run_bound_delta_min(const BoundArgs& ba, const PotentialArgs& pa,
                        const OutputOpts& out) {
  const PotentialModel pot = make_potential(pa);
  const ThermoState state{ba.beta, ba.mu, ba.dim};
  const RhoGaplessMode rg = parse_rho_gapless(ba.rho_gapless);
  const double dmin = find_minimal_gap(state, ba.g, pot, ba.eta, rg, ba.delta_cap);
  BoundArgs at = ba;
  at.delta = dmin;
  const BoundReport rep = bound_at(at, pot, ba.beta, ba.mu, ba.g, dmin);

  ordered_json j;
  j["units"] = kUnits;
  j["beta"] = num(ba.beta);
  j["mu"] = num(ba.mu);
  j["g"] = num(ba.g);
  j["dim"] = ba.dim;
  j["potential"] = potential_echo(pa);
  j["eta"] = num(ba.eta);
  j["delta_cap"] = num(ba.delta_cap);
  j["rho_gapless"] = ba.rho_gapless;
  j["delta_min"] = num(dmin);
  j["bound_at_delta_min"] = num(rep.lower_bound);
  j["valid_at_delta_min"] = rep.valid;
  emit_json(out, "bound delta-min", j);
  return 0;
}

int run_bound_sweep(const BoundArgs& ba, const PotentialArgs& pa,
                    const std::vector<std::string>& sweep_specs,
                    const OutputOpts& out) {
  const PotentialModel pot = make_potential(pa);

  // Fixed nesting order regardless of flag order, so output is reproducible.
  std::vector<SweepAxis> axes{{"beta", {ba.beta}},
                              {"mu", {ba.mu}},
                              {"g", {ba.g}},
                              {"delta", {ba.delta}}};
  for (const auto& text : sweep_specs) {
    const SweepAxis parsed = parse_sweep(text);
    bool known = false;
    for (auto& axis : axes)
      if (axis.key == parsed.key) {
        axis.values = parsed.values;
        known = true;
      }
    if (!known)
      throw DomainError("bound sweep keys are beta, mu, g, delta (got " +
                        parsed.key + ")");
  }

  struct Row {
    double beta, mu, g, delta;
  };
  std::vector<Row> rows;
  for (const double beta : axes[0].values)
    for (const double mu : axes[1].values)
      for (const double g : axes[2].values)
        for (const double delta : axes[3].values)
          rows.push_back({beta, mu, g, delta});

  const std::int64_t n = static_cast<std::int64_t>(rows.size());
  std::vector<BoundReport> reports(n);
  std::vector<std::exception_ptr> errors(n);
  for_index(n, Execution::parallel, [&](std::int64_t i) {
    try {
      reports[i] = bound_at(ba, pot, rows[i].beta, rows[i].mu, rows[i].g,
                            rows[i].delta);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  if (out.format == "json") {
    ordered_json arr = ordered_json::array();
    for (std::int64_t i = 0; i < n; ++i) {
      ordered_json r;
      r["beta"] = num(rows[i].beta);
      r["mu"] = num(rows[i].mu);
      r["g"] = num(rows[i].g);
      r["delta"] = num(rows[i].delta);
      r["lower_bound"] = num(reports[i].lower_bound);
      r["valid"] = reports[i].valid;
      r["rho_gapless_used"] = num(reports[i].rho_gapless_used);
      arr.push_back(r);
    }
    ordered_json j;
    j["units"] = kUnits;
    j["rows"] = arr;
    emit_json(out, "bound sweep", j);
    return 0;
  }

  std::string text = std::string("# ") + kUnits + "\n";
  if (!out.no_meta)
    text += "# beckit " + std::string(kVersion) + " bound sweep " +
            timestamp_utc() + "\n";
  text += "beta,mu,g,delta,lower_bound,valid,rho_gapless_used\n";
  for (std::int64_t i = 0; i < n; ++i) {
    text += fmt(rows[i].beta) + "," + fmt(rows[i].mu) + "," + fmt(rows[i].g) +
            "," + fmt(rows[i].delta) + "," + fmt(reports[i].lower_bound) + "," +
            (reports[i].valid ? "true" : "false") + "," +
            fmt(reports[i].rho_gapless_used) + "\n";
  }
  write_text(out, text);
  return 0;
}

// ---- meanfield -------------------------------------------------------------

struct MeanFieldArgs {
  double beta = 1.0;
  double mu = 0.0;
  double g = 1.0;
  double lambda = 1.0;
  double delta = 0.0;
  int dim = 3;
};

int run_meanfield(const MeanFieldArgs& ma, const std::string& sweep_spec,
                  const OutputOpts& out) {
  const CouplingParams coupling{ma.g, ma.lambda};
  const GapSpec gap{ma.delta, 0.0};

  // A single point in CSV mode is a one-row sweep.
  std::string sweep = sweep_spec;
  if (sweep.empty() && out.format == "csv")
    sweep = "mu=" + fmt(ma.mu) + ":" + fmt(ma.mu) + ":1";

  if (sweep.empty()) {
    const auto sol = mf_solve({ma.beta, ma.mu, ma.dim}, coupling, gap);
    ordered_json j;
    j["units"] = kUnits;
    j["beta"] = num(ma.beta);
    j["mu"] = num(ma.mu);
    j["g"] = num(ma.g);
    j["lambda"] = num(ma.lambda);
    j["delta"] = num(ma.delta);
    j["dim"] = ma.dim;
    j["mu_critical"] =
        num(mf_condensation_threshold(ma.beta, coupling, gap, ma.dim));
    j["rho_total"] = num(sol.rho_total);
    j["rho_condensate"] = num(sol.rho_condensate);
    j["mu_eff"] = num(sol.mu_eff);
    j["pressure"] = num(sol.pressure);
    j["condensed"] = sol.condensed;
    emit_json(out, "meanfield", j);
    return 0;
  }

  const SweepAxis axis = parse_sweep(sweep);
  double MeanFieldArgs::*field = nullptr;
  if (axis.key == "beta") field = &MeanFieldArgs::beta;
  else if (axis.key == "mu") field = &MeanFieldArgs::mu;
  else if (axis.key == "g") field = &MeanFieldArgs::g;
  else if (axis.key == "lambda") field = &MeanFieldArgs::lambda;
  else if (axis.key == "delta") field = &MeanFieldArgs::delta;
  else
    throw DomainError("meanfield sweep keys are beta, mu, g, lambda, delta");

  const std::int64_t n = static_cast<std::int64_t>(axis.values.size());
  std::vector<MeanFieldSolution> sols(n);
  std::vector<MeanFieldArgs> pts(n);
  std::vector<std::exception_ptr> errors(n);
  for_index(n, Execution::parallel, [&](std::int64_t i) {
    try {
      MeanFieldArgs local = ma;
      local.*field = axis.values[i];
      pts[i] = local;
      sols[i] = mf_solve({local.beta, local.mu, local.dim},
                         {local.g, local.lambda}, {local.delta, 0.0});
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  if (out.format == "json") {
    ordered_json arr = ordered_json::array();
    for (std::int64_t i = 0; i < n; ++i) {
      ordered_json r;
      r["beta"] = num(pts[i].beta);
      r["mu"] = num(pts[i].mu);
      r["g"] = num(pts[i].g);
      r["lambda"] = num(pts[i].lambda);
      r["delta"] = num(pts[i].delta);
      r["rho_total"] = num(sols[i].rho_total);
      r["rho_condensate"] = num(sols[i].rho_condensate);
      r["mu_eff"] = num(sols[i].mu_eff);
      r["pressure"] = num(sols[i].pressure);
      r["condensed"] = sols[i].condensed;
      arr.push_back(r);
    }
    ordered_json j;
    j["units"] = kUnits;
    j["rows"] = arr;
    emit_json(out, "meanfield", j);
    return 0;
  }

  std::string text = std::string("# ") + kUnits + "\n";
  if (!out.no_meta)
    text += "# beckit " + std::string(kVersion) + " meanfield sweep " +
            timestamp_utc() + "\n";
  text += "beta,mu,g,lambda,delta,rho_total,rho_condensate,mu_eff,pressure,condensed\n";
  for (std::int64_t i = 0; i < n; ++i) {
    text += fmt(pts[i].beta) + "," + fmt(pts[i].mu) + "," + fmt(pts[i].g) +
            "," + fmt(pts[i].lambda) + "," + fmt(pts[i].delta) + "," +
            fmt(sols[i].rho_total) + "," + fmt(sols[i].rho_condensate) + "," +
            fmt(sols[i].mu_eff) + "," + fmt(sols[i].pressure) + "," +
            (sols[i].condensed ? "true" : "false") + "\n";
  }
  write_text(out, text);
  return 0;
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
  std::vector<double> sides{4.0, 6.0, 8.0};
  double beta = 1.0;
  double mu = 2.0;
  double g = 1.0;
  double lambda = 1.0;
  double delta = 1.0;
  double cutoff = 40.0;
  double tail_bound = 1e-8;
  std::int64_t capacity = 200000;
  std::vector<double> lambda2s{1.05, 1.1, 1.25, 1.5, 2.0};
  std::vector<double> convexity_grid{0.0, 0.5, 1.0, 2.0};
};

FiniteVolumeSpec verify_spec(const VerifyArgs& va, double side) {
  FiniteVolumeSpec spec;
  spec.box_side = side;
  spec.energy_cutoff = va.cutoff;
  spec.dim = 3;
  spec.gap = {va.delta, 0.0};
  spec.mode_capacity = va.capacity;
  spec.tail_bound = va.tail_bound;
  return spec;
}

int fixed_n_max(const VerifyArgs& va, double side, double lambda, double delta) {
  const auto mf = mf_solve({va.beta, va.mu, 3}, {va.g, lambda}, {delta, 0.0});
  const double volume = side * side * side;
  return static_cast<int>(std::max(8.0, std::ceil(3.0 * volume * mf.rho_total)));
}

int run_verify(const VerifyArgs& va, const OutputOpts& out) {
  const ThermoState state{va.beta, va.mu, 3};
  const CouplingParams coupling{va.g, va.lambda};
  const auto mf = mf_solve(state, coupling, {va.delta, 0.0});
  if (va.sides.size() < 2)
    throw DomainError("verify needs at least two box sides");

  ordered_json checks = ordered_json::array();
  bool all_pass = true;

  // Echo the box that tripped, so the caller can see what to enlarge.
  const auto echo_spec = [&](const FiniteVolumeSpec& spec, const Error& e) {
    return std::string(e.what()) + " [box_side=" + fmt(spec.box_side) +
           " cutoff=" + fmt(spec.energy_cutoff) +
           " n_max=" + std::to_string(spec.n_max) +
           " tail_bound=" + fmt(spec.tail_bound) + "]";
  };

  // Growing boxes against the closed-form gas.
  {
    ordered_json ladder = ordered_json::array();
    std::vector<double> cond_gap, dens_gap;
    for (const double side : va.sides) {
      const auto res = [&] {
        const FiniteVolumeSpec spec = verify_spec(va, side);
        try {
          return grand_canonical_solve_auto(spec, state, coupling);
        } catch (const TruncationError& e) {
          throw TruncationError(echo_spec(spec, e));
        }
      }();
      cond_gap.push_back(std::fabs(res.condensate - mf.rho_condensate));
      dens_gap.push_back(std::fabs(res.density - mf.rho_total));
      ladder.push_back({{"box_side", num(side)},
                        {"modes", res.mode_count},
                        {"condensate", num(res.condensate)},
                        {"density", num(res.density)},
                        {"pressure", num(res.pressure)}});
    }
    int violations = 0;
    for (std::size_t i = 1; i < cond_gap.size(); ++i)
      if (cond_gap[i] >= cond_gap[i - 1] + 1e-12) ++violations;
    const double scale_c = std::max(std::fabs(mf.rho_condensate), 1e-12);
    const double scale_d = std::max(std::fabs(mf.rho_total), 1e-12);
    const bool pass = violations <= 1 && cond_gap.back() / scale_c < 0.1 &&
                      dens_gap.back() / scale_d < 0.05;
    all_pass = all_pass && pass;
    checks.push_back({{"name", "closed_form_convergence"},
                      {"pass", pass},
                      {"target_condensate", num(mf.rho_condensate)},
                      {"target_density", num(mf.rho_total)},
                      {"final_condensate_gap", num(cond_gap.back())},
                      {"final_density_gap", num(dens_gap.back())},
                      {"trend_violations", violations},
                      {"ladder", ladder}});
  }

  // Two-coupling pressure sandwich.
  {
    FiniteVolumeSpec spec = verify_spec(va, va.sides.front());
    spec.n_max = fixed_n_max(va, va.sides.front(), va.lambda, va.delta);
    ordered_json pairs = ordered_json::array();
    double min_margin = std::numeric_limits<double>::infinity();
    for (const double lambda2 : va.lambda2s) {
      const auto m = [&] {
        try {
          return verify_bogoliubov_pair(spec, state, va.g, va.lambda, lambda2);
        } catch (const TruncationError& e) {
          throw TruncationError(echo_spec(spec, e));
        }
      }();
      min_margin = std::min({min_margin, m.lower_margin, m.upper_margin});
      pairs.push_back({{"lambda1", num(va.lambda)},
                       {"lambda2", num(lambda2)},
                       {"pressure_difference", num(m.pressure_difference)},
                       {"lower_margin", num(m.lower_margin)},
                       {"upper_margin", num(m.upper_margin)}});
    }
    const bool pass = min_margin >= -1e-12;
    all_pass = all_pass && pass;
    checks.push_back({{"name", "coupling_pressure_sandwich"},
                      {"pass", pass},
                      {"min_margin", num(min_margin)},
                      {"pairs", pairs}});
  }

  // Gap monotonicity, convexity, difference quotient.
  {
    FiniteVolumeSpec spec = verify_spec(va, va.sides.front());
    const double delta_top = va.convexity_grid.back();
    spec.n_max = fixed_n_max(va, va.sides.front(), va.lambda, delta_top);
    const auto rep = [&] {
      try {
        return verify_delta_convexity(spec, state, coupling, va.convexity_grid);
      } catch (const TruncationError& e) {
        throw TruncationError(echo_spec(spec, e));
      }
    }();
    all_pass = all_pass && rep.pass;
    ordered_json grid = ordered_json::array();
    for (const double d : va.convexity_grid) grid.push_back(num(d));
    ordered_json pressures = ordered_json::array();
    for (const double p : rep.pressures) pressures.push_back(num(p));
    ordered_json condensates = ordered_json::array();
    for (const double c : rep.condensates) condensates.push_back(num(c));
    checks.push_back({{"name", "gap_convexity"},
                      {"pass", rep.pass},
                      {"grid", grid},
                      {"pressures", pressures},
                      {"condensates", condensates},
                      {"min_monotone_margin", num(rep.min_monotone_margin)},
                      {"min_convexity_margin", num(rep.min_convexity_margin)},
                      {"min_quotient_margin", num(rep.min_quotient_margin)}});
  }

  ordered_json j;
  j["units"] = kUnits;
  j["state"] = {{"beta", num(va.beta)}, {"mu", num(va.mu)},
                {"g", num(va.g)},       {"lambda", num(va.lambda)},
                {"delta", num(va.delta)}, {"dim", 3}};
  j["checks"] = checks;
  j["pass"] = all_pass;
  emit_json(out, "verify", j);
  return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("beckit ") + kVersion +
               ": thermodynamics of the gapped mean-field Bose gas.\n"
               "All quantities in reduced units (hbar^2/2m = 1, kB = 1).\n"
               "Set BEC_KIT_THREADS to cap worker threads."};
  app.set_version_flag("--version", std::string("beckit ") + kVersion);
  app.set_config("--config", "", "Read flags from a key = value file");
  app.require_subcommand(1);

  OutputOpts out;
  app.add_option("--output", out.path, "Write the report here (- = stdout)")
      ->capture_default_str();
  app.add_flag("--no-meta", out.no_meta,
               "Omit the metadata block (timestamps) for byte-stable output");

  PotentialArgs pa;
  double q_max = 30.0;
  int samples = 512;
  double epsilon = 0.0;

  auto* pc = app.add_subcommand("potential-check",
                                "Certify a pair potential: nonnegative "
                                "transform, stability constants");
  pc->fallthrough();
  add_potential_options(pc, pa);
  pc->add_option("--q-max", q_max, "Scan the transform on [0, q_max]")
      ->capture_default_str();
  pc->add_option("--samples", samples, "Coarse scan size")->capture_default_str();
  pc->add_option("--epsilon", epsilon, "Margin in A = vhat(0)(1 - epsilon)")
      ->check(CLI::Range(0.0, 0.999999))
      ->capture_default_str();

  BoundArgs ba;
  std::vector<std::string> bound_sweeps;
  auto* bound = app.add_subcommand("bound", "Condensate lower bounds");
  bound->require_subcommand(1);
  bound->fallthrough();
  auto add_bound_common = [&](CLI::App* cmd) {
    cmd->fallthrough();
    cmd->add_option("--beta", ba.beta, "Inverse temperature")->capture_default_str();
    cmd->add_option("--mu", ba.mu, "Chemical potential")->capture_default_str();
    cmd->add_option("--g", ba.g, "Coupling strength")->capture_default_str();
    cmd->add_option("--dim", ba.dim, "Spatial dimension")->capture_default_str();
    cmd->add_option("--rho-gapless", ba.rho_gapless,
                    "'rigorous' or a number for the gapless reference density")
        ->capture_default_str();
    add_potential_options(cmd, pa);
  };
  auto* be = bound->add_subcommand("eval", "Bound at one parameter point");
  add_bound_common(be);
  be->add_option("--delta", ba.delta, "Spectral gap")->capture_default_str();
  be->add_option("--delta0", ba.delta0,
                 "Reference gap (> 0 switches to the general form)")
      ->capture_default_str();
  auto* bd = bound->add_subcommand(
      "delta-min", "Smallest gap whose bound stays above a target");
  add_bound_common(bd);
  bd->add_option("--eta", ba.eta, "Target condensate density")->capture_default_str();
  bd->add_option("--delta-cap", ba.delta_cap, "Upper end of the gap search")
      ->capture_default_str();
  auto* bs = bound->add_subcommand("sweep", "Bound on a parameter grid, CSV");
  add_bound_common(bs);
  bs->add_option("--delta", ba.delta, "Spectral gap")->capture_default_str();
  bs->add_option("--delta0", ba.delta0,
                 "Reference gap (> 0 switches to the general form)")
      ->capture_default_str();
  bs->add_option("--sweep", bound_sweeps,
                 "key=start:stop:count with key in beta, mu, g, delta; "
                 "repeatable, grid is the product");

  MeanFieldArgs ma;
  std::string mf_sweep;
  auto* mfc = app.add_subcommand("meanfield",
                                 "Closed-form solve of the self-consistent gas");
  mfc->fallthrough();
  mfc->add_option("--beta", ma.beta, "Inverse temperature")->capture_default_str();
  mfc->add_option("--mu", ma.mu, "Chemical potential")->capture_default_str();
  mfc->add_option("--g", ma.g, "Coupling strength")->capture_default_str();
  mfc->add_option("--lambda", ma.lambda, "Repulsion scale")->capture_default_str();
  mfc->add_option("--delta", ma.delta, "Spectral gap")->capture_default_str();
  mfc->add_option("--dim", ma.dim, "Spatial dimension")->capture_default_str();
  mfc->add_option("--sweep", mf_sweep,
                  "key=start:stop:count with key in beta, mu, g, lambda, delta");

  VerifyArgs va;
  auto* vf = app.add_subcommand(
      "verify", "Finite-volume convergence and inequality suites");
  vf->fallthrough();
  vf->add_option("--box-sides", va.sides, "Box sides for the convergence ladder")
      ->delimiter(',')
      ->capture_default_str();
  vf->add_option("--beta", va.beta, "Inverse temperature")->capture_default_str();
  vf->add_option("--mu", va.mu, "Chemical potential")->capture_default_str();
  vf->add_option("--g", va.g, "Coupling strength")->capture_default_str();
  vf->add_option("--lambda", va.lambda, "Repulsion scale")->capture_default_str();
  vf->add_option("--delta", va.delta, "Spectral gap")->capture_default_str();
  vf->add_option("--cutoff", va.cutoff, "One-particle energy cutoff")
      ->capture_default_str();
  vf->add_option("--tail-bound", va.tail_bound,
                 "Largest tolerated weight at the particle-number cap")
      ->capture_default_str();
  vf->add_option("--capacity", va.capacity, "Mode-count limit")
      ->capture_default_str();
  vf->add_option("--lambda2s", va.lambda2s,
                 "Second couplings for the pressure sandwich")
      ->delimiter(',')
      ->capture_default_str();
  vf->add_option("--convexity-grid", va.convexity_grid,
                 "Gap grid for the convexity check")
      ->delimiter(',')
      ->capture_default_str();

  std::string fmt_choice;
  app.add_option("--format", fmt_choice, "json or csv (sweeps default to csv)")
      ->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (pc->parsed()) {
      out.format = fmt_choice.empty() ? "json" : fmt_choice;
      return run_potential_check(pa, q_max, samples, epsilon, out);
    }
    if (bound->parsed()) {
      if (be->parsed()) {
        out.format = fmt_choice.empty() ? "json" : fmt_choice;
        return run_bound_eval(ba, pa, out);
      }
      if (bd->parsed()) {
        out.format = fmt_choice.empty() ? "json" : fmt_choice;
        return run_bound_delta_min(ba, pa, out);
      }
      out.format = fmt_choice.empty() ? "csv" : fmt_choice;
      return run_bound_sweep(ba, pa, bound_sweeps, out);
    }
    if (mfc->parsed()) {
      out.format = fmt_choice.empty()
                       ? (mf_sweep.empty() ? "json" : "csv")
                       : fmt_choice;
      return run_meanfield(ma, mf_sweep, out);
    }
    out.format = "json";
    return run_verify(va, out);
  } catch (const Error& e) {
    ordered_json err;
    err["error"] = {{"type", error_name(e)}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    const bool negative = dynamic_cast<const PreconditionFailed*>(&e) ||
                          dynamic_cast<const NotFound*>(&e);
    return negative ? 2 : 1;
  } catch (const std::exception& e) {
    ordered_json err;
    err["error"] = {{"type", "std::exception"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}

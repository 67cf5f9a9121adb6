#include "ocecal/calibrate.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ocecal/error.hpp"

namespace ocecal {
namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument(fmt::format("alpha must be a finite value >= 0, got {}", alpha));
  }
}

void require_examples(std::span<const ExampleProfile> set, const char* name) {
  if (set.empty()) throw InvalidArgument(fmt::format("{} split is empty", name));
}

double golden_section_minimize(const auto& f, double a, double b, double tolerance) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// t for one grid point; opt may be empty only in fixed mode.
double choose_t(const TSelection& sel, std::span<const ExampleProfile> opt, const OceCost& cost,
                LossKind loss, double lambda) {
  if (sel.mode == TSelection::Mode::fixed) return sel.fixed_value;
  return optimize_t(losses_at(opt, loss, lambda), cost, sel.solver);
}

void check_t_selection(const TSelection& sel, std::span<const ExampleProfile> opt) {
  if (sel.mode == TSelection::Mode::per_lambda) require_examples(opt, "optimization");
}

}  // namespace

void validate(const ReliabilitySpec& spec) {
  check_alpha(spec.alpha);
  if (!(spec.delta > 0.0 && spec.delta < 1.0)) {
    throw InvalidArgument(fmt::format("delta must lie in (0,1), got {}", spec.delta));
  }
}

LambdaGrid::LambdaGrid(std::size_t resolution) : resolution_(resolution) {
  if (resolution == 0) throw InvalidArgument("lambda grid resolution must be >= 1");
}

TSelection TSelection::fixed(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw InvalidArgument(fmt::format("fixed t must lie in [0,1], got {}", t));
  }
  return {Mode::fixed, TSolver::closed_form, t};
}

TSelection TSelection::parse(const std::string& text) {
  if (text == "closed-form") return per_lambda(TSolver::closed_form);
  if (text == "per-lambda") return per_lambda(TSolver::golden_section);
  if (text.rfind("fixed:", 0) == 0) {
    const std::string value = text.substr(6);
    std::size_t used = 0;
    double t = 0.0;
    try {
      t = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      throw InvalidArgument(fmt::format("cannot parse t-mode '{}'", text));
    }
    return fixed(t);
  }
  throw InvalidArgument(
      fmt::format("unknown t-mode '{}' (expected closed-form, per-lambda or fixed:<t>)", text));
}

std::string TSelection::to_string() const {
  if (mode == Mode::fixed) return fmt::format("fixed:{}", fixed_value);
  return solver == TSolver::closed_form ? "closed-form" : "per-lambda";
}

double optimize_t(std::span<const double> opt_losses, const OceCost& cost, TSolver mode,
                  double tolerance) {
  if (opt_losses.empty()) throw InvalidArgument("optimize_t: empty optimization losses");
  if (cost.kind() == OceCost::Kind::average) return 0.0;
  if (mode == TSolver::closed_form) return empirical_oce(opt_losses, cost).t_star;
  if (!(tolerance > 0.0)) throw InvalidArgument("optimize_t: tolerance must be positive");
  return golden_section_minimize(
      [&](double t) { return empirical_objective(opt_losses, cost, t); }, 0.0, 1.0, tolerance);
}

CalibrationOutcome select_oce_crc(std::span<const ExampleProfile> cal,
                                  std::span<const ExampleProfile> opt,
                                  const ReliabilitySpec& spec, const LambdaGrid& grid,
                                  const OceCost& cost, LossKind loss,
                                  const TSelection& t_selection) {
  require_examples(cal, "calibration");
  check_t_selection(t_selection, opt);
  check_alpha(spec.alpha);

  const double n = static_cast<double>(cal.size());
  CalibrationOutcome out;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double lambda = grid[k];
    const double t = choose_t(t_selection, opt, cost, loss, lambda);
    const double risk = empirical_objective(losses_at(cal, loss, lambda), cost, t);
    const double bound = n / (n + 1.0) * risk + bound_B(cost, t, loss_max(loss)) / (n + 1.0);
    const bool pass = bound <= spec.alpha;
    out.trace.push_back({lambda, t, bound, pass});
    if (pass) {
      out.lambda_hat = lambda;
      out.feasible = true;
      return out;
    }
  }
  out.lambda_hat = 1.0;
  out.feasible = false;
  return out;
}

CalibrationOutcome select_oce_rcps(std::span<const ExampleProfile> cal,
                                   std::span<const ExampleProfile> opt,
                                   const ReliabilitySpec& spec, const LambdaGrid& grid,
                                   const OceCost& cost, LossKind loss, const UcbOptions& ucb,
                                   const TSelection& t_selection) {
  require_examples(cal, "calibration");
  check_t_selection(t_selection, opt);
  validate(spec);

  CalibrationOutcome out;
  out.lambda_hat = 1.0;
  out.feasible = false;
  for (std::size_t k = grid.size(); k-- > 0;) {
    const double lambda = grid[k];
    const double t = choose_t(t_selection, opt, cost, loss, lambda);
    const double bound =
        oce_risk_ucb(losses_at(cal, loss, lambda), cost, t, spec.delta, ucb, loss_max(loss));
    const bool pass = bound <= spec.alpha;
    out.trace.push_back({lambda, t, bound, pass});
    if (!pass) break;
    out.lambda_hat = lambda;
    out.feasible = true;
  }
  return out;
}

CalibrationOutcome select_rcps(std::span<const ExampleProfile> cal, const ReliabilitySpec& spec,
                               const LambdaGrid& grid, LossKind loss, const UcbOptions& ucb) {
  return select_oce_rcps(cal, {}, spec, grid, OceCost::average(), loss, ucb,
                         TSelection::fixed(0.0));
}

CalibrationOutcome select_oce_crc(std::span<const ScoredExample> cal,
                                  std::span<const ScoredExample> opt,
                                  const ReliabilitySpec& spec, const LambdaGrid& grid,
                                  const OceCost& cost, LossKind loss,
                                  const TSelection& t_selection) {
  const auto cal_p = profile_examples(cal);
  const auto opt_p = profile_examples(opt);
  return select_oce_crc(cal_p, opt_p, spec, grid, cost, loss, t_selection);
}

CalibrationOutcome select_oce_rcps(std::span<const ScoredExample> cal,
                                   std::span<const ScoredExample> opt,
                                   const ReliabilitySpec& spec, const LambdaGrid& grid,
                                   const OceCost& cost, LossKind loss, const UcbOptions& ucb,
                                   const TSelection& t_selection) {
  const auto cal_p = profile_examples(cal);
  const auto opt_p = profile_examples(opt);
  return select_oce_rcps(cal_p, opt_p, spec, grid, cost, loss, ucb, t_selection);
}

CalibrationOutcome select_rcps(std::span<const ScoredExample> cal, const ReliabilitySpec& spec,
                               const LambdaGrid& grid, LossKind loss, const UcbOptions& ucb) {
  return select_rcps(profile_examples(cal), spec, grid, loss, ucb);
}

}  // namespace ocecal

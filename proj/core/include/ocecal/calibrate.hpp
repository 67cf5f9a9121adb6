#pragma once

// Threshold selection over a finite lambda grid.
//
//   select_oce_crc   smallest lambda whose conformal bound
//                    n/(n+1) R_cal(lambda, t) + B(t)/(n+1) is <= alpha
//   select_rcps      smallest lambda such that the UCB on the mean loss is
//                    <= alpha at every grid point >= lambda
//   select_oce_rcps  same suffix rule applied to the UCB on t + phi(l - t)
//
// t is chosen on a separate optimization split, independently of the
// calibration examples.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ocecal/bounds.hpp"
#include "ocecal/risk.hpp"

namespace ocecal {

struct ReliabilitySpec {
  double alpha = 0.2;
  double delta = 0.2;  ///< ignored by select_oce_crc
};

void validate(const ReliabilitySpec& spec);

/// lambda_k = k / G for k = 0..G.
class LambdaGrid {
 public:
  explicit LambdaGrid(std::size_t resolution = 1000);

  std::size_t resolution() const noexcept { return resolution_; }
  std::size_t size() const noexcept { return resolution_ + 1; }
  double operator[](std::size_t k) const noexcept {
    return static_cast<double>(k) / static_cast<double>(resolution_);
  }

 private:
  std::size_t resolution_;
};

enum class TSolver { closed_form, golden_section };

/// How t is picked for each grid lambda.
struct TSelection {
  enum class Mode { per_lambda, fixed };

  Mode mode = Mode::per_lambda;
  TSolver solver = TSolver::closed_form;
  double fixed_value = 0.0;

  static TSelection per_lambda(TSolver solver = TSolver::closed_form) {
    return {Mode::per_lambda, solver, 0.0};
  }
  static TSelection fixed(double t);

  /// "closed-form", "per-lambda" (golden-section search) or "fixed:<t>".
  static TSelection parse(const std::string& text);
  std::string to_string() const;
};

/// Minimizer of empirical_objective over t in [0,1]. The average cost returns
/// the canonical t = 0 in both modes; golden-section search stops once the
/// bracket is narrower than `tolerance`.
double optimize_t(std::span<const double> opt_losses, const OceCost& cost,
                  TSolver mode = TSolver::closed_form, double tolerance = 1e-6);

struct TraceEntry {
  double lambda = 0.0;
  double t = 0.0;
  double bound = 0.0;
  bool pass = false;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct CalibrationOutcome {
  double lambda_hat = 1.0;
  bool feasible = false;
  /// Every grid point the rule evaluated, in evaluation order (ascending for
  /// OCE-CRC, descending for the RCPS-style rules).
  std::vector<TraceEntry> trace;

  friend bool operator==(const CalibrationOutcome&, const CalibrationOutcome&) = default;
};

CalibrationOutcome select_oce_crc(std::span<const ExampleProfile> cal,
                                  std::span<const ExampleProfile> opt,
                                  const ReliabilitySpec& spec, const LambdaGrid& grid,
                                  const OceCost& cost, LossKind loss,
                                  const TSelection& t_selection = {});

CalibrationOutcome select_oce_rcps(std::span<const ExampleProfile> cal,
                                   std::span<const ExampleProfile> opt,
                                   const ReliabilitySpec& spec, const LambdaGrid& grid,
                                   const OceCost& cost, LossKind loss,
                                   const UcbOptions& ucb = {},
                                   const TSelection& t_selection = {});

/// The average-cost, t = 0 specialization of select_oce_rcps; consumes no
/// optimization split.
CalibrationOutcome select_rcps(std::span<const ExampleProfile> cal, const ReliabilitySpec& spec,
                               const LambdaGrid& grid, LossKind loss,
                               const UcbOptions& ucb = {});

// Convenience overloads on raw examples.
CalibrationOutcome select_oce_crc(std::span<const ScoredExample> cal,
                                  std::span<const ScoredExample> opt,
                                  const ReliabilitySpec& spec, const LambdaGrid& grid,
                                  const OceCost& cost, LossKind loss,
                                  const TSelection& t_selection = {});
CalibrationOutcome select_oce_rcps(std::span<const ScoredExample> cal,
                                   std::span<const ScoredExample> opt,
                                   const ReliabilitySpec& spec, const LambdaGrid& grid,
                                   const OceCost& cost, LossKind loss,
                                   const UcbOptions& ucb = {},
                                   const TSelection& t_selection = {});
CalibrationOutcome select_rcps(std::span<const ScoredExample> cal, const ReliabilitySpec& spec,
                               const LambdaGrid& grid, LossKind loss,
                               const UcbOptions& ucb = {});

}  // namespace ocecal

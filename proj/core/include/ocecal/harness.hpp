#pragma once

// Monte Carlo evaluation of the selection rules.
//
// Each trial draws a fresh opt/cal/test split of a fixed pool, selects
// lambda_hat, and scores it on the held-out examples: the empirical OCE risk
// of the test losses (compared against alpha for the satisfaction indicator)
// and the relative set size |Gamma| / |truth| of every test example.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ocecal/bounds.hpp"
#include "ocecal/calibrate.hpp"
#include "ocecal/error.hpp"
#include "ocecal/risk.hpp"
#include "ocecal/taskgen.hpp"

namespace ocecal {

enum class Method { oce_crc, rcps, oce_rcps };

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view text);

struct ExperimentConfig {
  Method method = Method::oce_rcps;
  OceCost cost = OceCost::cvar(0.9);
  LossKind loss = LossKind::fnr;
  ReliabilitySpec reliability{0.4, 0.2};
  std::size_t grid_resolution = 1000;
  UcbOptions ucb{};
  TSelection t_selection{};
  SplitSpec split{};
};

void validate(const ExperimentConfig& config);

/// Immutable trial input: the example pool, its sorted profiles and an
/// optional large evaluation set that replaces the test split when scoring
/// lambda_hat. Every example must have a nonempty truth set.
class TrialPool {
 public:
  explicit TrialPool(Dataset pool, std::optional<Dataset> fresh_eval = std::nullopt);

  const Dataset& data() const noexcept { return pool_; }
  std::span<const ExampleProfile> profiles() const noexcept { return profiles_; }
  bool has_fresh_eval() const noexcept { return !eval_profiles_.empty(); }
  std::span<const ExampleProfile> fresh_eval_profiles() const noexcept { return eval_profiles_; }

 private:
  Dataset pool_;
  std::vector<ExampleProfile> profiles_;
  std::vector<ExampleProfile> eval_profiles_;
};

struct TrialRecord {
  std::size_t trial_index = 0;
  std::uint64_t seed = 0;
  Method method = Method::oce_rcps;
  double lambda_hat = 1.0;
  bool feasible = false;
  double test_oce_risk = 0.0;
  bool satisfied = false;
  double mean_rel_size = 0.0;
  double median_rel_size = 0.0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Seed of trial `trial_index`: mix_seed(master_seed, trial_index).
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial_index) noexcept;

/// Runs the configured selector on the split drawn with trial_seed(...). An
/// infeasible calibration still produces a record (lambda_hat = 1).
TrialRecord run_trial(const TrialPool& pool, const ExperimentConfig& config,
                      std::uint64_t master_seed, std::size_t trial_index);

/// Evaluates one lambda on a set of examples.
struct Evaluation {
  double oce_risk = 0.0;
  double mean_loss = 0.0;
  double mean_rel_size = 0.0;
  double median_rel_size = 0.0;
};

Evaluation evaluate_lambda(std::span<const ExampleProfile> examples, double lambda,
                           const OceCost& cost, LossKind loss);

struct Quantiles {
  double q05 = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double q95 = 0.0;
};

Quantiles quantiles_of(std::span<const double> values);

struct ExperimentSummary {
  Method method = Method::oce_rcps;
  std::size_t trials = 0;
  std::size_t satisfied = 0;
  std::size_t infeasible = 0;
  double satisfaction_rate = 0.0;
  double mean_test_oce_risk = 0.0;
  Quantiles test_oce_risk;
  Quantiles median_rel_size;  ///< across trials, of each trial's median ratio
  Quantiles mean_rel_size;    ///< across trials, of each trial's mean ratio
};

/// Throws InvalidArgument on an empty input or records from different methods.
ExperimentSummary summarize(std::span<const TrialRecord> records);

struct TrialsResult {
  std::vector<TrialRecord> records;
  ExperimentSummary summary;
};

/// Trials 0..T-1 on `jobs` worker threads. Records come back ordered by trial
/// index and do not depend on `jobs`. A failing trial aborts the run with a
/// TrialFailure naming the lowest failing index.
TrialsResult run_trials(const TrialPool& pool, const ExperimentConfig& config, std::size_t trials,
                        std::uint64_t master_seed, std::size_t jobs = 1);

class TrialFailure : public Error {
 public:
  TrialFailure(std::size_t index, const std::string& what);
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace ocecal

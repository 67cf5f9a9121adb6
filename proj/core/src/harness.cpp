#include "ocecal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include <fmt/format.h>

#include "ocecal/random.hpp"
#include "ocecal/stats.hpp"

namespace ocecal {
namespace {

std::vector<ExampleProfile> gather(std::span<const ExampleProfile> all,
                                   std::span<const std::size_t> indices) {
  std::vector<ExampleProfile> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(all[i]);
  return out;
}

}  // namespace

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::oce_crc:
      return "oce-crc";
    case Method::rcps:
      return "rcps";
    case Method::oce_rcps:
      return "oce-rcps";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "oce-crc") return Method::oce_crc;
  if (text == "rcps") return Method::rcps;
  if (text == "oce-rcps") return Method::oce_rcps;
  throw InvalidArgument(
      fmt::format("unknown method '{}' (expected oce-crc, rcps or oce-rcps)", text));
}

void validate(const ExperimentConfig& config) {
  if (config.method == Method::oce_crc) {
    if (!(config.reliability.alpha >= 0.0)) throw InvalidArgument("alpha must be >= 0");
  } else {
    validate(config.reliability);
  }
  if (config.grid_resolution == 0) throw InvalidArgument("grid resolution must be >= 1");
  if (config.split.cal_size == 0) throw InvalidArgument("calibration split must be nonempty");
  if (config.split.test_size == 0) throw InvalidArgument("test split must be nonempty");
  const bool needs_opt = config.method != Method::rcps &&
                         config.t_selection.mode == TSelection::Mode::per_lambda;
  if (needs_opt && config.split.opt_size == 0) {
    throw InvalidArgument("optimization split must be nonempty when t is chosen per lambda");
  }
}

TrialPool::TrialPool(Dataset pool, std::optional<Dataset> fresh_eval) : pool_(std::move(pool)) {
  validate(pool_, /*require_truth=*/true);
  profiles_ = profile_examples(pool_.examples);
  if (fresh_eval) {
    validate(*fresh_eval, /*require_truth=*/true);
    if (fresh_eval->examples.empty()) throw InvalidArgument("fresh evaluation set is empty");
    eval_profiles_ = profile_examples(fresh_eval->examples);
  }
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial_index) noexcept {
  return mix_seed(master_seed, trial_index);
}

Evaluation evaluate_lambda(std::span<const ExampleProfile> examples, double lambda,
                           const OceCost& cost, LossKind loss) {
  if (examples.empty()) throw InvalidArgument("evaluation set is empty");
  const auto losses = losses_at(examples, loss, lambda);
  std::vector<double> ratios;
  ratios.reserve(examples.size());
  for (const auto& p : examples) ratios.push_back(p.relative_set_size(lambda));

  Evaluation e;
  e.oce_risk = empirical_oce(losses, cost).value;
  e.mean_loss = mean(losses);
  e.mean_rel_size = mean(ratios);
  e.median_rel_size = median(ratios);
  return e;
}

TrialRecord run_trial(const TrialPool& pool, const ExperimentConfig& config,
                      std::uint64_t master_seed, std::size_t trial_index) {
  validate(config);
  const std::uint64_t seed = trial_seed(master_seed, trial_index);
  const auto idx = split_indices(pool.data().size(), config.split, seed);
  const auto opt = gather(pool.profiles(), idx.opt);
  const auto cal = gather(pool.profiles(), idx.cal);

  const LambdaGrid grid(config.grid_resolution);
  CalibrationOutcome outcome;
  switch (config.method) {
    case Method::oce_crc:
      outcome = select_oce_crc(cal, opt, config.reliability, grid, config.cost, config.loss,
                               config.t_selection);
      break;
    case Method::rcps:
      outcome = select_rcps(cal, config.reliability, grid, config.loss, config.ucb);
      break;
    case Method::oce_rcps:
      outcome = select_oce_rcps(cal, opt, config.reliability, grid, config.cost, config.loss,
                                config.ucb, config.t_selection);
      break;
  }

  Evaluation eval;
  if (pool.has_fresh_eval()) {
    eval = evaluate_lambda(pool.fresh_eval_profiles(), outcome.lambda_hat, config.cost,
                           config.loss);
  } else {
    eval = evaluate_lambda(gather(pool.profiles(), idx.test), outcome.lambda_hat, config.cost,
                           config.loss);
  }

  TrialRecord r;
  r.trial_index = trial_index;
  r.seed = seed;
  r.method = config.method;
  r.lambda_hat = outcome.lambda_hat;
  r.feasible = outcome.feasible;
  r.test_oce_risk = eval.oce_risk;
  r.satisfied = eval.oce_risk <= config.reliability.alpha;
  r.mean_rel_size = eval.mean_rel_size;
  r.median_rel_size = eval.median_rel_size;
  return r;
}

Quantiles quantiles_of(std::span<const double> values) {
  return {quantile(values, 0.05), quantile(values, 0.25), quantile(values, 0.5),
          quantile(values, 0.75), quantile(values, 0.95)};
}

ExperimentSummary summarize(std::span<const TrialRecord> records) {
  if (records.empty()) throw InvalidArgument("summarize: no trial records");
  ExperimentSummary s;
  s.method = records.front().method;
  s.trials = records.size();

  std::vector<double> risk;
  std::vector<double> median_rel;
  std::vector<double> mean_rel;
  for (const auto& r : records) {
    if (r.method != s.method) {
      throw InvalidArgument("summarize: records mix different methods");
    }
    s.satisfied += r.satisfied ? 1 : 0;
    s.infeasible += r.feasible ? 0 : 1;
    risk.push_back(r.test_oce_risk);
    median_rel.push_back(r.median_rel_size);
    mean_rel.push_back(r.mean_rel_size);
  }
  s.satisfaction_rate = static_cast<double>(s.satisfied) / static_cast<double>(s.trials);
  s.mean_test_oce_risk = mean(risk);
  s.test_oce_risk = quantiles_of(risk);
  s.median_rel_size = quantiles_of(median_rel);
  s.mean_rel_size = quantiles_of(mean_rel);
  return s;
}

TrialFailure::TrialFailure(std::size_t index, const std::string& what)
    : Error(fmt::format("trial {} failed: {}", index, what)), index_(index) {}

TrialsResult run_trials(const TrialPool& pool, const ExperimentConfig& config, std::size_t trials,
                        std::uint64_t master_seed, std::size_t jobs) {
  if (trials == 0) throw InvalidArgument("run_trials: need at least one trial");
  validate(config);
  jobs = std::clamp<std::size_t>(jobs, 1, trials);

  std::vector<TrialRecord> records(trials);
  std::vector<std::exception_ptr> errors(trials);
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < trials; i = next.fetch_add(1)) {
      try {
        records[i] = run_trial(pool, config, master_seed, i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(jobs);
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(worker);
  }

  for (std::size_t i = 0; i < trials; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw TrialFailure(i, e.what());
    }
  }

  TrialsResult out;
  out.summary = summarize(records);
  out.records = std::move(records);
  return out;
}

}  // namespace ocecal

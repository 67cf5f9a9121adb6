#include "ocecal/report.hpp"

#include <ostream>

#include <fmt/format.h>

namespace ocecal {

using nlohmann::ordered_json;

std::string_view toolkit_version() noexcept { return OCECAL_VERSION_STRING; }

std::string format_real(double value) { return fmt::format("{}", value); }

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records) {
  out << "trial_index,seed,method,lambda_hat,feasible,test_oce_risk,satisfied,mean_rel_size,"
         "median_rel_size\n";
  for (const auto& r : records) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.trial_index, r.seed, to_string(r.method),
                       format_real(r.lambda_hat), r.feasible, format_real(r.test_oce_risk),
                       r.satisfied, format_real(r.mean_rel_size),
                       format_real(r.median_rel_size));
  }
}

void write_trace_csv(std::ostream& out, const CalibrationOutcome& outcome) {
  out << "lambda,t,bound,pass\n";
  for (const auto& e : outcome.trace) {
    out << fmt::format("{},{},{},{}\n", format_real(e.lambda), format_real(e.t),
                       format_real(e.bound), e.pass);
  }
}

void write_kde_csv(std::ostream& out, std::span<const DensityPoint> series) {
  out << "x,density\n";
  for (const auto& p : series) {
    out << fmt::format("{},{}\n", format_real(p.x), format_real(p.density));
  }
}

ordered_json to_json(const ExperimentConfig& c) {
  ordered_json schedule = {
      {"strategy", c.ucb.schedule.strategy == BettingSchedule::Strategy::fixed
                       ? "fixed"
                       : "predictable-plugin"},
      {"cap", c.ucb.schedule.cap}};
  if (c.ucb.schedule.strategy == BettingSchedule::Strategy::fixed) {
    schedule["eta"] = c.ucb.schedule.eta;
  }
  return {{"method", to_string(c.method)},
          {"risk", c.cost.to_string()},
          {"loss", to_string(c.loss)},
          {"alpha", c.reliability.alpha},
          {"delta", c.reliability.delta},
          {"grid", c.grid_resolution},
          {"bound", to_string(c.ucb.kind)},
          {"bisection_tolerance", c.ucb.tolerance},
          {"betting", schedule},
          {"t_mode", c.t_selection.to_string()},
          {"sizes",
           {{"opt", c.split.opt_size}, {"cal", c.split.cal_size}, {"test", c.split.test_size}}}};
}

ordered_json to_json(const Quantiles& q) {
  return {{"q05", q.q05}, {"q25", q.q25}, {"q50", q.q50}, {"q75", q.q75}, {"q95", q.q95}};
}

ordered_json to_json(const CalibrationOutcome& o) {
  ordered_json t_by_lambda = ordered_json::array();
  for (const auto& e : o.trace) t_by_lambda.push_back({{"lambda", e.lambda}, {"t", e.t}});
  ordered_json trace = ordered_json::array();
  for (const auto& e : o.trace) {
    trace.push_back({{"lambda", e.lambda}, {"t", e.t}, {"bound", e.bound}, {"pass", e.pass}});
  }
  return {{"lambda_hat", o.lambda_hat},
          {"feasible", o.feasible},
          {"t_by_lambda", t_by_lambda},
          {"trace", trace}};
}

ordered_json to_json(const Evaluation& e) {
  return {{"oce_risk", e.oce_risk},
          {"mean_loss", e.mean_loss},
          {"mean_rel_size", e.mean_rel_size},
          {"median_rel_size", e.median_rel_size}};
}

ordered_json summary_to_json(const ExperimentSummary& s, const ordered_json& config_echo,
                             const std::optional<std::string>& timestamp) {
  ordered_json j = {{"method", to_string(s.method)},
                    {"trials", s.trials},
                    {"satisfied", s.satisfied},
                    {"satisfaction_rate", s.satisfaction_rate},
                    {"infeasible", s.infeasible},
                    {"mean_test_oce_risk", s.mean_test_oce_risk},
                    {"median_test_oce_risk", s.test_oce_risk.q50},
                    {"median_rel_size", s.median_rel_size.q50},
                    {"test_oce_risk_quantiles", to_json(s.test_oce_risk)},
                    {"median_rel_size_quantiles", to_json(s.median_rel_size)},
                    {"mean_rel_size_quantiles", to_json(s.mean_rel_size)},
                    {"config", config_echo},
                    {"toolkit_version", toolkit_version()}};
  if (timestamp) j["generated_at"] = *timestamp;
  return j;
}

}  // namespace ocecal

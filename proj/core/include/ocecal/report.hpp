#pragma once

// Output formats.
//
//   trials CSV   trial_index,seed,method,lambda_hat,feasible,test_oce_risk,
//                satisfied,mean_rel_size,median_rel_size
//   trace CSV    lambda,t,bound,pass
//   KDE CSV      x,density
//
// Reals are printed in shortest round-trip form, so identical inputs give
// identical bytes.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ocecal/calibrate.hpp"
#include "ocecal/harness.hpp"
#include "ocecal/stats.hpp"

namespace ocecal {

std::string_view toolkit_version() noexcept;

std::string format_real(double value);

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records);
void write_trace_csv(std::ostream& out, const CalibrationOutcome& outcome);
void write_kde_csv(std::ostream& out, std::span<const DensityPoint> series);

nlohmann::ordered_json to_json(const ExperimentConfig& config);
nlohmann::ordered_json to_json(const Quantiles& q);
nlohmann::ordered_json to_json(const CalibrationOutcome& outcome);
nlohmann::ordered_json to_json(const Evaluation& evaluation);

/// Summary fields, the config echo and the toolkit version. `timestamp` is
/// emitted as "generated_at" when present.
nlohmann::ordered_json summary_to_json(const ExperimentSummary& summary,
                                       const nlohmann::ordered_json& config_echo,
                                       const std::optional<std::string>& timestamp);

}  // namespace ocecal

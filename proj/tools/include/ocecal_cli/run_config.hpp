#pragma once

// Settings shared by every subcommand. The JSON file form uses the keys below;
// unknown keys are rejected.
//
//   method, risk, loss, alpha, delta, grid, bound, t_mode,
//   sizes {opt, cal, test}, trials, seed, jobs, output, data, eval_data,
//   fresh_eval, pool_seed, generator {m, rho, difficulty_a, difficulty_b,
//   sharpness}, count, lambda, strict, timestamp, kde_points, vary, values

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ocecal/error.hpp"
#include "ocecal/harness.hpp"
#include "ocecal/taskgen.hpp"

namespace ocecal::cli {

/// Malformed command line or configuration file (exit code 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  ExperimentConfig experiment{};
  std::size_t trials = 500;
  std::uint64_t seed = 7;
  std::size_t jobs = 0;  ///< 0 picks the hardware thread count
  std::optional<std::filesystem::path> output;
  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> eval_data;
  std::size_t fresh_eval = 0;
  std::uint64_t pool_seed = 2024;
  GeneratorParams generator{};
  std::size_t count = 1781;
  std::optional<double> lambda;
  bool strict = false;
  bool timestamp = true;
  std::size_t kde_points = 512;
  std::string vary = "delta";
  std::vector<double> values;
};

nlohmann::ordered_json to_json(const RunConfig& config);

/// Overlays the keys present in `j` on `base`. Throws UsageError on unknown
/// keys or wrongly typed values.
RunConfig merge_json(RunConfig base, const nlohmann::json& j);

RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Range checks for every field; throws UsageError.
void validate(const RunConfig& config);

}  // namespace ocecal::cli

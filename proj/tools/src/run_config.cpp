#include "ocecal_cli/run_config.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

namespace ocecal::cli {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) {
      throw UsageError(fmt::format("unknown configuration key '{}{}'", where, key));
    }
  }
}

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
      if (!j.is_number_unsigned()) throw UsageError("expected a nonnegative integer");
    } else if constexpr (std::is_same_v<T, double>) {
      if (!j.is_number()) throw UsageError("expected a number");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!j.is_boolean()) throw UsageError("expected true or false");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!j.is_string()) throw UsageError("expected a string");
    }
    return j.get<T>();
  } catch (const std::exception& e) {
    throw UsageError(fmt::format("configuration key '{}': {}", key, e.what()));
  }
}

template <typename F>
auto parse_field(const std::string& key, F&& parse) {
  try {
    return parse();
  } catch (const InvalidArgument& e) {
    throw UsageError(fmt::format("configuration key '{}': {}", key, e.what()));
  }
}

ordered_json optional_path(const std::optional<std::filesystem::path>& p) {
  return p ? ordered_json(p->string()) : ordered_json(nullptr);
}

std::optional<std::filesystem::path> read_optional_path(const json& j, const std::string& key) {
  if (j.is_null()) return std::nullopt;
  return std::filesystem::path(get_as<std::string>(j, key));
}

}  // namespace

ordered_json to_json(const RunConfig& c) {
  const auto& e = c.experiment;
  return {
      {"method", to_string(e.method)},
      {"risk", e.cost.to_string()},
      {"loss", to_string(e.loss)},
      {"alpha", e.reliability.alpha},
      {"delta", e.reliability.delta},
      {"grid", e.grid_resolution},
      {"bound", to_string(e.ucb.kind)},
      {"t_mode", e.t_selection.to_string()},
      {"sizes", {{"opt", e.split.opt_size}, {"cal", e.split.cal_size}, {"test", e.split.test_size}}},
      {"trials", c.trials},
      {"seed", c.seed},
      {"jobs", c.jobs},
      {"output", optional_path(c.output)},
      {"data", optional_path(c.data)},
      {"eval_data", optional_path(c.eval_data)},
      {"fresh_eval", c.fresh_eval},
      {"pool_seed", c.pool_seed},
      {"generator",
       {{"m", c.generator.m},
        {"rho", c.generator.rho},
        {"difficulty_a", c.generator.difficulty_a},
        {"difficulty_b", c.generator.difficulty_b},
        {"sharpness", c.generator.sharpness}}},
      {"count", c.count},
      {"lambda", c.lambda ? ordered_json(*c.lambda) : ordered_json(nullptr)},
      {"strict", c.strict},
      {"timestamp", c.timestamp},
      {"kde_points", c.kde_points},
      {"vary", c.vary},
      {"values", c.values},
  };
}

RunConfig merge_json(RunConfig c, const json& j) {
  if (!j.is_object()) throw UsageError("configuration must be a JSON object");
  reject_unknown(j,
                 {"method", "risk", "loss", "alpha", "delta", "grid", "bound", "t_mode", "sizes",
                  "trials", "seed", "jobs", "output", "data", "eval_data", "fresh_eval",
                  "pool_seed", "generator", "count", "lambda", "strict", "timestamp",
                  "kde_points", "vary", "values"},
                 "");
  auto& e = c.experiment;
  for (const auto& [key, v] : j.items()) {
    if (key == "method") {
      e.method = parse_field(key, [&] { return parse_method(get_as<std::string>(v, key)); });
    } else if (key == "risk") {
      e.cost = parse_field(key, [&] { return OceCost::parse(get_as<std::string>(v, key)); });
    } else if (key == "loss") {
      e.loss = parse_field(key, [&] { return parse_loss_kind(get_as<std::string>(v, key)); });
    } else if (key == "alpha") {
      e.reliability.alpha = get_as<double>(v, key);
    } else if (key == "delta") {
      e.reliability.delta = get_as<double>(v, key);
    } else if (key == "grid") {
      e.grid_resolution = get_as<std::size_t>(v, key);
    } else if (key == "bound") {
      e.ucb.kind = parse_field(key, [&] { return parse_bound_kind(get_as<std::string>(v, key)); });
    } else if (key == "t_mode") {
      e.t_selection =
          parse_field(key, [&] { return TSelection::parse(get_as<std::string>(v, key)); });
    } else if (key == "sizes") {
      if (!v.is_object()) throw UsageError("configuration key 'sizes' must be an object");
      reject_unknown(v, {"opt", "cal", "test"}, "sizes.");
      if (v.contains("opt")) e.split.opt_size = get_as<std::size_t>(v["opt"], "sizes.opt");
      if (v.contains("cal")) e.split.cal_size = get_as<std::size_t>(v["cal"], "sizes.cal");
      if (v.contains("test")) e.split.test_size = get_as<std::size_t>(v["test"], "sizes.test");
    } else if (key == "trials") {
      c.trials = get_as<std::size_t>(v, key);
    } else if (key == "seed") {
      c.seed = get_as<std::uint64_t>(v, key);
    } else if (key == "jobs") {
      c.jobs = get_as<std::size_t>(v, key);
    } else if (key == "output") {
      c.output = read_optional_path(v, key);
    } else if (key == "data") {
      c.data = read_optional_path(v, key);
    } else if (key == "eval_data") {
      c.eval_data = read_optional_path(v, key);
    } else if (key == "fresh_eval") {
      c.fresh_eval = get_as<std::size_t>(v, key);
    } else if (key == "pool_seed") {
      c.pool_seed = get_as<std::uint64_t>(v, key);
    } else if (key == "generator") {
      if (!v.is_object()) throw UsageError("configuration key 'generator' must be an object");
      reject_unknown(v, {"m", "rho", "difficulty_a", "difficulty_b", "sharpness"}, "generator.");
      auto& g = c.generator;
      if (v.contains("m")) g.m = get_as<std::size_t>(v["m"], "generator.m");
      if (v.contains("rho")) g.rho = get_as<double>(v["rho"], "generator.rho");
      if (v.contains("difficulty_a")) {
        g.difficulty_a = get_as<double>(v["difficulty_a"], "generator.difficulty_a");
      }
      if (v.contains("difficulty_b")) {
        g.difficulty_b = get_as<double>(v["difficulty_b"], "generator.difficulty_b");
      }
      if (v.contains("sharpness")) {
        g.sharpness = get_as<double>(v["sharpness"], "generator.sharpness");
      }
    } else if (key == "count") {
      c.count = get_as<std::size_t>(v, key);
    } else if (key == "lambda") {
      c.lambda = v.is_null() ? std::nullopt : std::optional(get_as<double>(v, key));
    } else if (key == "strict") {
      c.strict = get_as<bool>(v, key);
    } else if (key == "timestamp") {
      c.timestamp = get_as<bool>(v, key);
    } else if (key == "kde_points") {
      c.kde_points = get_as<std::size_t>(v, key);
    } else if (key == "vary") {
      c.vary = get_as<std::string>(v, key);
    } else if (key == "values") {
      if (!v.is_array()) throw UsageError("configuration key 'values' must be an array");
      c.values.clear();
      for (const auto& x : v) c.values.push_back(get_as<double>(x, key));
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw DataError(0, fmt::format("cannot open configuration file '{}'", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(fmt::format("{}: malformed JSON: {}", path.string(), e.what()));
  }
  return merge_json(std::move(base), j);
}

void validate(const RunConfig& c) {
  try {
    validate(c.experiment);
    validate(c.generator);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  if (c.trials == 0) throw UsageError("trials must be >= 1");
  if (c.count == 0) throw UsageError("count must be >= 1");
  if (c.kde_points < 2) throw UsageError("kde_points must be >= 2");
  if (c.lambda && !(*c.lambda >= 0.0 && *c.lambda <= 1.0)) {
    throw UsageError(fmt::format("lambda must lie in [0,1], got {}", *c.lambda));
  }
  if (c.eval_data && c.fresh_eval > 0) {
    throw UsageError("eval_data and fresh_eval are mutually exclusive");
  }
  if (c.vary != "delta" && c.vary != "alpha") {
    throw UsageError(fmt::format("vary must be 'delta' or 'alpha', got '{}'", c.vary));
  }
}

}  // namespace ocecal::cli

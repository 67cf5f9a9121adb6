#include "ocecal_cli/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "ocecal/random.hpp"
#include "ocecal/report.hpp"
#include "ocecal/stats.hpp"
#include "ocecal_cli/run_config.hpp"

namespace ocecal::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

class InfeasibleCalibration : public Error {
 public:
  using Error::Error;
};

// Flag values; only the ones given on the command line override the config.
struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> method, risk, loss, bound, t_mode, output, data, eval_data, vary;
  std::optional<double> alpha, delta, lambda, rho, difficulty_a, difficulty_b, sharpness;
  std::optional<std::size_t> grid, opt_size, cal_size, test_size, trials, jobs, fresh_eval, count,
      kde_points, m;
  std::optional<std::uint64_t> seed, pool_seed;
  std::vector<double> values;
  CLI::Option* values_option = nullptr;
  bool strict = false;
  bool no_timestamp = false;
};

json flags_to_json(const Flags& f) {
  json j = json::object();
  auto put = [&](const char* key, const auto& value) {
    if (value) j[key] = *value;
  };
  put("method", f.method);
  put("risk", f.risk);
  put("loss", f.loss);
  put("bound", f.bound);
  put("t_mode", f.t_mode);
  put("output", f.output);
  put("data", f.data);
  put("eval_data", f.eval_data);
  put("vary", f.vary);
  put("alpha", f.alpha);
  put("delta", f.delta);
  put("lambda", f.lambda);
  put("grid", f.grid);
  put("trials", f.trials);
  put("jobs", f.jobs);
  put("fresh_eval", f.fresh_eval);
  put("count", f.count);
  put("kde_points", f.kde_points);
  put("seed", f.seed);
  put("pool_seed", f.pool_seed);
  json sizes = json::object();
  if (f.opt_size) sizes["opt"] = *f.opt_size;
  if (f.cal_size) sizes["cal"] = *f.cal_size;
  if (f.test_size) sizes["test"] = *f.test_size;
  if (!sizes.empty()) j["sizes"] = sizes;
  json gen = json::object();
  if (f.m) gen["m"] = *f.m;
  if (f.rho) gen["rho"] = *f.rho;
  if (f.difficulty_a) gen["difficulty_a"] = *f.difficulty_a;
  if (f.difficulty_b) gen["difficulty_b"] = *f.difficulty_b;
  if (f.sharpness) gen["sharpness"] = *f.sharpness;
  if (!gen.empty()) j["generator"] = gen;
  if (f.values_option && f.values_option->count() > 0) j["values"] = f.values;
  if (f.strict) j["strict"] = true;
  if (f.no_timestamp) j["timestamp"] = false;
  return j;
}

void add_config_option(CLI::App& cmd, Flags& f) {
  cmd.add_option("--config", f.config, "JSON configuration file; flags override it");
}

void add_experiment_options(CLI::App& cmd, Flags& f) {
  cmd.add_option("--method", f.method, "oce-rcps, oce-crc or rcps");
  cmd.add_option("--risk", f.risk, "average, entropic:<beta> or cvar:<beta>");
  cmd.add_option("--loss", f.loss, "fnr or miscoverage");
  cmd.add_option("--alpha", f.alpha, "Tolerated risk level");
  cmd.add_option("--delta", f.delta, "One minus the target satisfaction rate");
  cmd.add_option("--grid", f.grid, "Lambda grid resolution G (points k/G)");
  cmd.add_option("--bound", f.bound, "wsr or hoeffding");
  cmd.add_option("--t-mode", f.t_mode, "closed-form, per-lambda or fixed:<t>");
  cmd.add_option("--opt-size", f.opt_size, "Optimization split size");
  cmd.add_option("--cal-size", f.cal_size, "Calibration split size");
}

void add_generator_options(CLI::App& cmd, Flags& f) {
  cmd.add_option("--m", f.m, "Elements per example");
  cmd.add_option("--rho", f.rho, "Probability an element is positive");
  cmd.add_option("--difficulty-a", f.difficulty_a, "Beta shape a of the example difficulty");
  cmd.add_option("--difficulty-b", f.difficulty_b, "Beta shape b of the example difficulty");
  cmd.add_option("--sharpness", f.sharpness, "Score sharpness kappa");
}

void add_trial_options(CLI::App& cmd, Flags& f) {
  add_experiment_options(cmd, f);
  add_generator_options(cmd, f);
  cmd.add_option("--test-size", f.test_size, "Test split size");
  cmd.add_option("--trials", f.trials, "Number of Monte Carlo trials");
  cmd.add_option("--seed", f.seed, "Master seed of the trial splits");
  cmd.add_option("--jobs", f.jobs, "Worker threads (0 = all cores); never changes results");
  cmd.add_option("--data", f.data, "Pool dataset; generated from --pool-seed when absent");
  cmd.add_option("--pool-seed", f.pool_seed, "Seed of the generated pool");
  auto* eval = cmd.add_option("--eval-data", f.eval_data, "Evaluation set replacing the test split");
  auto* fresh = cmd.add_option("--fresh-eval", f.fresh_eval,
                               "Generate this many fresh evaluation examples");
  eval->excludes(fresh);
  cmd.add_option("-o,--output", f.output, "Output directory");
  cmd.add_flag("--no-timestamp", f.no_timestamp, "Omit generated_at from summary JSON");
  cmd.add_option("--kde-points", f.kde_points, "Grid points of each density estimate");
}

spdlog::level::level_enum log_level_from_env() {
  const char* raw = std::getenv("OCE_RCPS_LOG");
  const std::string value = raw ? raw : "info";
  if (value == "error") return spdlog::level::err;
  if (value == "info") return spdlog::level::info;
  if (value == "debug") return spdlog::level::debug;
  throw UsageError(fmt::format("OCE_RCPS_LOG must be error, info or debug, got '{}'", value));
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_st>(err, true);
  auto log = std::make_shared<spdlog::logger>("oce-rcps", sink);
  log->set_pattern("oce-rcps: %l: %v");
  log->set_level(spdlog::level::info);
  return log;
}

std::size_t resolve_jobs(std::size_t jobs) {
  if (jobs > 0) return jobs;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(0, fmt::format("cannot write '{}'", path.string()));
  return out;
}

void write_json(const fs::path& path, const ordered_json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

std::string utc_timestamp() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}",
                     std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

ordered_json config_echo(const RunConfig& c) {
  auto j = to_json(c);
  j.erase("jobs");
  j.erase("output");
  return j;
}

fs::path output_dir(const RunConfig& c) { return c.output.value_or("results"); }

Dataset load_data(const fs::path& path, bool require_truth) {
  return read_dataset(path, ReadOptions{require_truth});
}

struct Context {
  RunConfig config;
  std::ostream& out;
  spdlog::logger& log;
};

int cmd_generate(Context& ctx) {
  const auto& c = ctx.config;
  const auto data = generate_dataset(c.generator, c.count, c.seed);
  if (!c.output || c.output->string() == "-") {
    write_dataset(ctx.out, data);
  } else {
    if (c.output->has_parent_path()) fs::create_directories(c.output->parent_path());
    write_dataset(*c.output, data);
    ctx.log.info("wrote {} examples to {}", data.size(), c.output->string());
  }
  return kExitOk;
}

int cmd_calibrate(Context& ctx) {
  const auto& c = ctx.config;
  const auto& e = c.experiment;
  if (!c.data) throw UsageError("calibrate needs --data");
  const auto data = load_data(*c.data, e.loss == LossKind::fnr);
  const SplitSpec split{e.split.opt_size, e.split.cal_size, 0};
  if (data.size() < split.total()) {
    throw DataError(0, fmt::format("{} holds {} examples but the opt and cal splits need {}",
                                   c.data->string(), data.size(), split.total()));
  }
  const auto idx = split_indices(data.size(), split, c.seed);
  const auto profiles = profile_examples(data.examples);
  auto gather = [&](const std::vector<std::size_t>& ids) {
    std::vector<ExampleProfile> v;
    v.reserve(ids.size());
    for (auto i : ids) v.push_back(profiles[i]);
    return v;
  };
  const auto opt = gather(idx.opt);
  const auto cal = gather(idx.cal);
  const LambdaGrid grid(e.grid_resolution);
  CalibrationOutcome outcome;
  switch (e.method) {
    case Method::oce_crc:
      outcome = select_oce_crc(cal, opt, e.reliability, grid, e.cost, e.loss, e.t_selection);
      break;
    case Method::rcps:
      outcome = select_rcps(cal, e.reliability, grid, e.loss, e.ucb);
      break;
    case Method::oce_rcps:
      outcome =
          select_oce_rcps(cal, opt, e.reliability, grid, e.cost, e.loss, e.ucb, e.t_selection);
      break;
  }
  const auto dir = output_dir(c);
  ordered_json j = {{"method", to_string(e.method)}};
  const auto body = to_json(outcome);
  for (const auto& [k, v] : body.items()) j[k] = v;
  j["config"] = config_echo(c);
  write_json(dir / "outcome.json", j);
  {
    auto trace = open_output(dir / "trace.csv");
    write_trace_csv(trace, outcome);
  }
  ctx.log.info("lambda_hat = {} (feasible: {})", outcome.lambda_hat, outcome.feasible);
  if (!outcome.feasible && c.strict) {
    throw InfeasibleCalibration(
        fmt::format("no lambda on the grid meets alpha = {}", e.reliability.alpha));
  }
  return kExitOk;
}

int cmd_evaluate(Context& ctx) {
  const auto& c = ctx.config;
  if (!c.data) throw UsageError("evaluate needs --data");
  if (!c.lambda) throw UsageError("evaluate needs --lambda");
  const auto data = load_data(*c.data, true);
  if (data.examples.empty()) throw DataError(0, fmt::format("{} has no examples", c.data->string()));
  const auto profiles = profile_examples(data.examples);
  const auto eval = evaluate_lambda(profiles, *c.lambda, c.experiment.cost, c.experiment.loss);
  ordered_json j = {{"lambda", *c.lambda},
                    {"risk", c.experiment.cost.to_string()},
                    {"loss", to_string(c.experiment.loss)},
                    {"examples", data.size()}};
  const auto metrics = to_json(eval);
  for (const auto& [k, v] : metrics.items()) j[k] = v;
  write_json(output_dir(c) / "evaluation.json", j);
  ctx.log.info("oce risk {} at lambda {}", eval.oce_risk, *c.lambda);
  return kExitOk;
}

TrialPool build_pool(const RunConfig& c, spdlog::logger& log) {
  const auto& split = c.experiment.split;
  Dataset pool;
  if (c.data) {
    pool = load_data(*c.data, true);
  } else {
    pool = generate_dataset(c.generator, split.total(), c.pool_seed);
    log.debug("generated a pool of {} examples from seed {}", pool.size(), c.pool_seed);
  }
  if (pool.size() < split.total()) {
    throw DataError(0, fmt::format("pool holds {} examples but the splits need {}", pool.size(),
                                   split.total()));
  }
  std::optional<Dataset> fresh;
  if (c.eval_data) {
    fresh = load_data(*c.eval_data, true);
  } else if (c.fresh_eval > 0) {
    fresh = generate_dataset(c.generator, c.fresh_eval, mix_seed(c.pool_seed, 1));
  }
  return TrialPool(std::move(pool), std::move(fresh));
}

void write_density(const fs::path& dir, const std::string& name, const std::vector<double>& values,
                   std::size_t points, spdlog::logger& log) {
  try {
    const auto series = kde_density(values, points);
    auto out = open_output(dir / fmt::format("kde_{}.csv", name));
    write_kde_csv(out, series);
  } catch (const InvalidArgument& e) {
    log.info("{}: {}; writing raw values instead", name, e.what());
    auto out = open_output(dir / fmt::format("values_{}.csv", name));
    out << "value\n";
    for (double v : values) out << format_real(v) << '\n';
  }
}

ExperimentSummary run_and_write(const RunConfig& c, const TrialPool& pool, const fs::path& dir,
                                spdlog::logger& log) {
  log.info("{} trials of {} at alpha {} delta {}", c.trials, to_string(c.experiment.method),
           c.experiment.reliability.alpha, c.experiment.reliability.delta);
  const auto result = run_trials(pool, c.experiment, c.trials, c.seed, resolve_jobs(c.jobs));
  {
    auto out = open_output(dir / "trials.csv");
    write_trials_csv(out, result.records);
  }
  const std::optional<std::string> stamp =
      c.timestamp ? std::optional(utc_timestamp()) : std::nullopt;
  write_json(dir / "summary.json", summary_to_json(result.summary, config_echo(c), stamp));
  std::vector<double> risk, median_size, mean_size;
  for (const auto& r : result.records) {
    risk.push_back(r.test_oce_risk);
    median_size.push_back(r.median_rel_size);
    mean_size.push_back(r.mean_rel_size);
  }
  write_density(dir, "test_oce_risk", risk, c.kde_points, log);
  write_density(dir, "median_rel_size", median_size, c.kde_points, log);
  write_density(dir, "mean_rel_size", mean_size, c.kde_points, log);
  log.info("satisfaction rate {} ({} of {})", result.summary.satisfaction_rate,
           result.summary.satisfied, result.summary.trials);
  return result.summary;
}

int cmd_trials(Context& ctx) {
  const auto pool = build_pool(ctx.config, ctx.log);
  run_and_write(ctx.config, pool, output_dir(ctx.config), ctx.log);
  return kExitOk;
}

int cmd_sweep(Context& ctx) {
  const auto& base = ctx.config;
  if (base.values.empty()) throw UsageError("sweep needs --values");
  const auto pool = build_pool(base, ctx.log);
  const auto dir = output_dir(base);
  std::vector<std::string> rows;
  for (double value : base.values) {
    RunConfig point = base;
    (base.vary == "delta" ? point.experiment.reliability.delta
                          : point.experiment.reliability.alpha) = value;
    validate(point);
    const auto sub = dir / fmt::format("{}_{}", base.vary, format_real(value));
    const auto s = run_and_write(point, pool, sub, ctx.log);
    rows.push_back(fmt::format(
        "{},{},{},{},{},{},{},{},{},{},{}", base.vary, format_real(value), to_string(s.method),
        format_real(point.experiment.reliability.alpha),
        format_real(point.experiment.reliability.delta), s.trials, s.satisfied, s.infeasible,
        format_real(s.satisfaction_rate), format_real(s.mean_test_oce_risk),
        format_real(s.median_rel_size.q50)));
  }
  auto out = open_output(dir / "sweep.csv");
  out << "vary,value,method,alpha,delta,trials,satisfied,infeasible,satisfaction_rate,"
         "mean_test_oce_risk,median_rel_size\n";
  for (const auto& row : rows) out << row << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto log = make_logger(err);
  try {
    log->set_level(log_level_from_env());
  } catch (const UsageError& e) {
    log->error("{}", e.what());
    return kExitUsage;
  }

  CLI::App app{"Risk-controlling prediction-set calibration with OCE risks", "oce-rcps"};
  app.set_version_flag("--version", std::string(toolkit_version()));
  app.require_subcommand(1);
  Flags flags;

  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset (JSONL)");
  add_config_option(*generate, flags);
  add_generator_options(*generate, flags);
  generate->add_option("--count", flags.count, "Number of examples");
  generate->add_option("--seed", flags.seed, "Generator seed");
  generate->add_option("-o,--output", flags.output, "Output file ('-' for stdout)");

  auto* calibrate = app.add_subcommand("calibrate", "Select lambda_hat on one dataset");
  add_config_option(*calibrate, flags);
  add_experiment_options(*calibrate, flags);
  calibrate->add_option("--data", flags.data, "Dataset to split into opt and cal");
  calibrate->add_option("--seed", flags.seed, "Split seed");
  calibrate->add_option("-o,--output", flags.output, "Output directory");
  calibrate->add_flag("--strict", flags.strict, "Exit with status 1 when infeasible");

  auto* evaluate = app.add_subcommand("evaluate", "Score one lambda on a dataset");
  add_config_option(*evaluate, flags);
  evaluate->add_option("--data", flags.data, "Evaluation dataset");
  evaluate->add_option("--lambda", flags.lambda, "Threshold parameter in [0,1]");
  evaluate->add_option("--risk", flags.risk, "average, entropic:<beta> or cvar:<beta>");
  evaluate->add_option("--loss", flags.loss, "fnr or miscoverage");
  evaluate->add_option("-o,--output", flags.output, "Output directory");

  auto* trials = app.add_subcommand("trials", "Monte Carlo trials over random splits");
  add_config_option(*trials, flags);
  add_trial_options(*trials, flags);

  auto* sweep = app.add_subcommand("sweep", "Trials over a grid of delta or alpha values");
  add_config_option(*sweep, flags);
  add_trial_options(*sweep, flags);
  sweep->add_option("--vary", flags.vary, "delta or alpha");
  flags.values_option =
      sweep->add_option("--values", flags.values, "Comma-separated grid values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    log->error("{}", e.what());
    return kExitUsage;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    RunConfig config;
    if (flags.config) config = load_config(*flags.config);
    config = merge_json(std::move(config), flags_to_json(flags));
    validate(config);
    Context ctx{std::move(config), out, *log};
    const std::string name = cmd->get_name();
    if (name == "generate") return cmd_generate(ctx);
    if (name == "calibrate") return cmd_calibrate(ctx);
    if (name == "evaluate") return cmd_evaluate(ctx);
    if (name == "trials") return cmd_trials(ctx);
    return cmd_sweep(ctx);
  } catch (const InfeasibleCalibration& e) {
    log->error("{}", e.what());
    return kExitInfeasible;
  } catch (const UsageError& e) {
    log->error("{}", e.what());
    return kExitUsage;
  } catch (const InvalidExample& e) {
    log->error("{}", e.what());
    return kExitData;
  } catch (const InvalidArgument& e) {
    log->error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    log->error("{}", e.what());
    return kExitData;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"oce-rcps"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ocecal::cli

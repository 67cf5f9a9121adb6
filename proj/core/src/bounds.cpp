#include "ocecal/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "ocecal/error.hpp"

namespace ocecal {
namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument(fmt::format("delta must lie in (0,1), got {}", delta));
  }
}

void check_unit_samples(std::span<const double> z) {
  if (z.empty()) throw InvalidArgument("bound requested on an empty sample");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(z[i] >= 0.0 && z[i] <= 1.0)) {
      throw InvalidArgument(fmt::format("sample {} = {} is outside [0,1]", i, z[i]));
    }
  }
}

// One evaluation of the running product. With `threshold` set, stops as soon
// as the capital exceeds it; the factor arithmetic matches capital_process.
struct CapitalScan {
  std::span<const double> z;
  std::span<const double> eta;

  double max_capital(double R) const {
    double capital = 1.0;
    double best = 1.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      capital *= 1.0 + eta[j] * (R - z[j]);
      best = std::max(best, capital);
      if (capital == 0.0) break;
    }
    return best;
  }

  bool rejects(double R, double threshold) const {
    double capital = 1.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      capital *= 1.0 + eta[j] * (R - z[j]);
      if (capital > threshold) return true;
      if (capital == 0.0) return false;
    }
    return false;
  }
};

}  // namespace

BettingSchedule BettingSchedule::predictable_plugin(double cap) {
  if (!(cap > 0.0 && cap <= 1.0)) {
    throw InvalidArgument(fmt::format("betting cap must lie in (0,1], got {}", cap));
  }
  return {Strategy::predictable_plugin, 1.0, cap};
}

BettingSchedule BettingSchedule::fixed(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw InvalidArgument(fmt::format("fixed betting fraction must lie in (0,1], got {}", eta));
  }
  return {Strategy::fixed, eta, 1.0};
}

void validate(const BoundRequest& request) {
  check_unit_samples(request.samples);
  check_delta(request.delta);
  if (!(request.tolerance > 0.0)) {
    throw InvalidArgument("bisection tolerance must be positive");
  }
}

std::vector<double> betting_fractions(std::span<const double> z, double delta,
                                      const BettingSchedule& schedule) {
  check_delta(delta);
  std::vector<double> eta(z.size());
  if (schedule.strategy == BettingSchedule::Strategy::fixed) {
    std::fill(eta.begin(), eta.end(), std::min(schedule.eta, schedule.cap));
    return eta;
  }
  const double n = static_cast<double>(z.size());
  const double log_inv_delta = std::log(1.0 / delta);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double count = static_cast<double>(j + 1);
    const double sigma2_prev = (0.25 + sum_sq) / count;
    eta[j] = std::min(schedule.cap, std::sqrt(2.0 * log_inv_delta / (n * sigma2_prev)));
    sum += z[j];
    const double mu = (0.5 + sum) / (count + 1.0);
    sum_sq += (z[j] - mu) * (z[j] - mu);
  }
  return eta;
}

double capital_process(std::span<const double> z, double R, const BettingSchedule& schedule,
                       double delta) {
  check_unit_samples(z);
  if (!(R >= 0.0 && R <= 1.0)) {
    throw InvalidArgument(fmt::format("candidate mean must lie in [0,1], got {}", R));
  }
  const auto eta = betting_fractions(z, delta, schedule);
  return CapitalScan{z, eta}.max_capital(R);
}

double wsr_ucb(const BoundRequest& request, const BettingSchedule& schedule) {
  validate(request);
  const auto eta = betting_fractions(request.samples, request.delta, schedule);
  const CapitalScan scan{request.samples, eta};
  const double threshold = 1.0 / request.delta;

  if (!scan.rejects(1.0, threshold)) return 1.0;
  double lo = 0.0;  // never rejected: every factor is <= 1 at R = 0
  double hi = 1.0;
  while (hi - lo > request.tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (scan.rejects(mid, threshold)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double hoeffding_ucb(const BoundRequest& request) {
  validate(request);
  const auto& z = request.samples;
  const double n = static_cast<double>(z.size());
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / n;
  return std::min(1.0, mean + std::sqrt(std::log(1.0 / request.delta) / (2.0 * n)));
}

std::string_view to_string(BoundKind kind) noexcept {
  return kind == BoundKind::wsr ? "wsr" : "hoeffding";
}

BoundKind parse_bound_kind(std::string_view text) {
  if (text == "wsr") return BoundKind::wsr;
  if (text == "hoeffding") return BoundKind::hoeffding;
  throw InvalidArgument(fmt::format("unknown bound '{}' (expected wsr or hoeffding)", text));
}

double oce_risk_ucb(std::span<const double> losses, const OceCost& cost, double t,
                    double delta, const UcbOptions& options, double loss_max) {
  if (losses.empty()) throw InvalidArgument("oce_risk_ucb: empty loss vector");
  if (!(t >= 0.0 && t <= loss_max)) {
    throw InvalidArgument(fmt::format("t must lie in [0, {}], got {}", loss_max, t));
  }
  const double lo = transformed_loss(cost, t, 0.0);
  const double hi = bound_B(cost, t, loss_max);
  if (!(hi > lo)) return lo;

  const double range = hi - lo;
  std::vector<double> z;
  z.reserve(losses.size());
  for (double l : losses) {
    if (!(l >= 0.0 && l <= loss_max)) {
      throw InvalidArgument(fmt::format("loss {} is outside [0, {}]", l, loss_max));
    }
    z.push_back(std::clamp((transformed_loss(cost, t, l) - lo) / range, 0.0, 1.0));
  }

  const BoundRequest request{z, delta, options.tolerance};
  const double u = options.kind == BoundKind::wsr ? wsr_ucb(request, options.schedule)
                                                  : hoeffding_ucb(request);
  return std::min(hi, lo + range * u);
}

}  // namespace ocecal

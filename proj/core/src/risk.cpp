#include "ocecal/risk.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "ocecal/error.hpp"

namespace ocecal {
namespace {

// Inclusion test shared by the reference and the sorted fast path.
double inclusion_threshold(double lambda) { return 1.0 - lambda; }

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidArgument(fmt::format("lambda must lie in [0,1], got {}", lambda));
  }
}

double fnr_from_counts(std::size_t covered, std::size_t truth) {
  return 1.0 - static_cast<double>(covered) / static_cast<double>(truth);
}

void require_nonempty(std::span<const double> losses, const char* what) {
  if (losses.empty()) {
    throw InvalidArgument(fmt::format("{}: empty loss vector", what));
  }
}

double parse_real(std::string_view text, std::string_view context) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw InvalidArgument(fmt::format("cannot parse '{}' as a number in '{}'", text, context));
  }
  return value;
}

}  // namespace

void validate(const ScoredExample& example, bool require_truth) {
  const std::size_t m = example.scores.size();
  if (m == 0) {
    throw InvalidExample("example has no elements");
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double s = example.scores[i];
    if (!(s >= 0.0 && s <= 1.0)) {
      throw InvalidExample(fmt::format("score {} at element {} is outside [0,1]", s, i));
    }
  }
  for (std::size_t k = 0; k < example.truth.size(); ++k) {
    if (example.truth[k] >= m) {
      throw InvalidExample(
          fmt::format("truth index {} out of range for m = {}", example.truth[k], m));
    }
    if (k > 0 && example.truth[k] <= example.truth[k - 1]) {
      throw InvalidExample("truth indices must be strictly ascending");
    }
  }
  if (require_truth && example.truth.empty()) {
    throw InvalidExample("empty truth set (the FNR loss needs at least one positive)");
  }
}

PredictionSet build_prediction_set(const ScoredExample& example, double lambda) {
  check_lambda(lambda);
  const double threshold = inclusion_threshold(lambda);
  PredictionSet set;
  set.lambda = lambda;
  for (std::size_t i = 0; i < example.scores.size(); ++i) {
    if (example.scores[i] >= threshold) {
      set.members.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return set;
}

std::string_view to_string(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::miscoverage:
      return "miscoverage";
    case LossKind::fnr:
      return "fnr";
  }
  return "?";
}

LossKind parse_loss_kind(std::string_view text) {
  if (text == "fnr") return LossKind::fnr;
  if (text == "miscoverage") return LossKind::miscoverage;
  throw InvalidArgument(fmt::format("unknown loss '{}' (expected fnr or miscoverage)", text));
}

double compute_loss(LossKind kind, const ScoredExample& example, const PredictionSet& set) {
  // Both member lists are ascending, so a merge counts the intersection.
  std::size_t covered = 0;
  auto m = set.members.begin();
  for (auto y : example.truth) {
    while (m != set.members.end() && *m < y) ++m;
    if (m != set.members.end() && *m == y) ++covered;
  }
  switch (kind) {
    case LossKind::fnr:
      if (example.truth.empty()) {
        throw InvalidExample("FNR is undefined for an empty truth set");
      }
      return fnr_from_counts(covered, example.truth.size());
    case LossKind::miscoverage:
      return covered == example.truth.size() ? 0.0 : 1.0;
  }
  return 0.0;
}

OceCost OceCost::entropic(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument(fmt::format("entropic beta must be > 0, got {}", beta));
  }
  return OceCost(Kind::entropic, beta);
}

OceCost OceCost::cvar(double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw InvalidArgument(fmt::format("cvar beta must lie in [0,1), got {}", beta));
  }
  return OceCost(Kind::cvar, beta);
}

OceCost OceCost::parse(std::string_view text) {
  const auto colon = text.find(':');
  const auto name = text.substr(0, colon);
  if (name == "average") {
    if (colon != std::string_view::npos) {
      throw InvalidArgument("risk 'average' takes no parameter");
    }
    return average();
  }
  if (colon == std::string_view::npos) {
    throw InvalidArgument(
        fmt::format("risk '{}' needs a parameter, e.g. cvar:0.9 or entropic:3", text));
  }
  const double beta = parse_real(text.substr(colon + 1), text);
  if (name == "entropic") return entropic(beta);
  if (name == "cvar") return cvar(beta);
  throw InvalidArgument(
      fmt::format("unknown risk '{}' (expected average, entropic:b or cvar:b)", name));
}

std::string OceCost::to_string() const {
  switch (kind_) {
    case Kind::average:
      return "average";
    case Kind::entropic:
      return fmt::format("entropic:{}", beta_);
    case Kind::cvar:
      return fmt::format("cvar:{}", beta_);
  }
  return "?";
}

double OceCost::phi(double u) const {
  if (!std::isfinite(u)) {
    throw InvalidArgument("phi argument must be finite");
  }
  switch (kind_) {
    case Kind::average:
      return u;
    case Kind::entropic: {
      const double exponent = beta_ * u;
      if (exponent > kMaxExponent) {
        throw NumericOverflow(fmt::format(
            "entropic cost overflows: beta*u = {} exceeds {}", exponent, kMaxExponent));
      }
      return std::expm1(exponent) / beta_;
    }
    case Kind::cvar:
      return std::max(u, 0.0) / (1.0 - beta_);
  }
  return u;
}

double transformed_loss(const OceCost& cost, double t, double loss) {
  return t + cost.phi(loss - t);
}

double bound_B(const OceCost& cost, double t, double loss_max) {
  if (!(loss_max >= 0.0)) {
    throw InvalidArgument("loss_max must be nonnegative");
  }
  return t + cost.phi(loss_max - t);
}

double empirical_objective(std::span<const double> losses, const OceCost& cost, double t) {
  require_nonempty(losses, "empirical_objective");
  if (cost.kind() == OceCost::Kind::average) {
    return std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(losses.size());
  }
  double sum = 0.0;
  for (double l : losses) sum += cost.phi(l - t);
  return t + sum / static_cast<double>(losses.size());
}

OceValue empirical_oce(std::span<const double> losses, const OceCost& cost) {
  require_nonempty(losses, "empirical_oce");
  const double n = static_cast<double>(losses.size());
  const auto [lo_it, hi_it] = std::minmax_element(losses.begin(), losses.end());
  const double lo = *lo_it;
  const double hi = *hi_it;

  switch (cost.kind()) {
    case OceCost::Kind::average: {
      const double mean = std::accumulate(losses.begin(), losses.end(), 0.0) / n;
      return {mean, 0.0};
    }
    case OceCost::Kind::entropic: {
      const double beta = cost.beta();
      double sum = 0.0;
      for (double l : losses) sum += std::exp(beta * (l - hi));
      const double value = std::clamp(hi + std::log(sum / n) / beta, lo, hi);
      return {value, value};
    }
    case OceCost::Kind::cvar: {
      // Slack for products such as 0.7 * 10 = 7.000000000000001.
      const auto k = static_cast<std::size_t>(
          std::clamp(std::ceil(cost.beta() * n - 1e-9), 1.0, n));
      std::vector<double> sorted(losses.begin(), losses.end());
      std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1),
                       sorted.end());
      const double t = sorted[k - 1];
      double tail = 0.0;
      for (double l : losses) tail += std::max(l - t, 0.0);
      const double value = std::clamp(t + tail / (n * (1.0 - cost.beta())), lo, hi);
      return {value, t};
    }
  }
  return {0.0, 0.0};
}

ExampleProfile::ExampleProfile(const ScoredExample& example)
    : sorted_scores_(example.scores) {
  std::sort(sorted_scores_.begin(), sorted_scores_.end());
  sorted_truth_scores_.reserve(example.truth.size());
  for (auto y : example.truth) sorted_truth_scores_.push_back(example.scores.at(y));
  std::sort(sorted_truth_scores_.begin(), sorted_truth_scores_.end());
}

namespace {
std::size_t count_at_least(const std::vector<double>& ascending, double threshold) {
  const auto it = std::lower_bound(ascending.begin(), ascending.end(), threshold);
  return static_cast<std::size_t>(ascending.end() - it);
}
}  // namespace

std::size_t ExampleProfile::set_size(double lambda) const {
  return count_at_least(sorted_scores_, inclusion_threshold(lambda));
}

std::size_t ExampleProfile::covered(double lambda) const {
  return count_at_least(sorted_truth_scores_, inclusion_threshold(lambda));
}

double ExampleProfile::loss(LossKind kind, double lambda) const {
  const std::size_t c = covered(lambda);
  switch (kind) {
    case LossKind::fnr:
      if (sorted_truth_scores_.empty()) {
        throw InvalidExample("FNR is undefined for an empty truth set");
      }
      return fnr_from_counts(c, sorted_truth_scores_.size());
    case LossKind::miscoverage:
      return c == sorted_truth_scores_.size() ? 0.0 : 1.0;
  }
  return 0.0;
}

double ExampleProfile::relative_set_size(double lambda) const {
  if (sorted_truth_scores_.empty()) {
    throw InvalidExample("relative set size needs a nonempty truth set");
  }
  return static_cast<double>(set_size(lambda)) /
         static_cast<double>(sorted_truth_scores_.size());
}

std::vector<ExampleProfile> profile_examples(std::span<const ScoredExample> examples) {
  std::vector<ExampleProfile> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.emplace_back(ex);
  return out;
}

std::vector<double> losses_at(std::span<const ExampleProfile> profiles, LossKind kind,
                              double lambda) {
  std::vector<double> out;
  out.reserve(profiles.size());
  for (const auto& p : profiles) out.push_back(p.loss(kind, lambda));
  return out;
}

}  // namespace ocecal

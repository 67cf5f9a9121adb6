#pragma once

// Prediction sets, monotone losses and the optimized-certainty-equivalent
// (OCE) cost family.
//
// An OCE risk of a loss L is inf_t { t + E[phi(L - t)] } for a nondecreasing
// convex cost phi with phi(0) = 0. The three shipped costs are
//
//   average    phi(u) = u                          -> E[L]
//   entropic   phi(u) = (exp(beta u) - 1) / beta   -> (1/beta) log E[exp(beta L)]
//   cvar       phi(u) = max(u, 0) / (1 - beta)     -> mean of the worst (1-beta) tail

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ocecal {

/// Per-element scores in [0,1] together with the set of truly positive
/// elements. `truth` is kept sorted ascending without duplicates.
struct ScoredExample {
  std::vector<double> scores;
  std::vector<std::uint32_t> truth;

  std::size_t size() const noexcept { return scores.size(); }

  friend bool operator==(const ScoredExample&, const ScoredExample&) = default;
};

/// Throws InvalidExample unless m >= 1, every score is a finite value in
/// [0,1], and `truth` is strictly ascending with indices < m. With
/// `require_truth` an empty truth set is rejected as well.
void validate(const ScoredExample& example, bool require_truth = false);

/// Elements whose score reaches 1 - lambda.
struct PredictionSet {
  std::vector<std::uint32_t> members;
  double lambda = 0.0;
};

PredictionSet build_prediction_set(const ScoredExample& example, double lambda);

enum class LossKind { miscoverage, fnr };

/// Both shipped losses are bounded by one for every lambda.
constexpr double loss_max(LossKind) noexcept { return 1.0; }

std::string_view to_string(LossKind kind) noexcept;
LossKind parse_loss_kind(std::string_view text);

/// fnr: 1 - |truth ∩ members| / |truth|.
/// miscoverage: 1 when some truth element is missing from `set`, else 0.
double compute_loss(LossKind kind, const ScoredExample& example, const PredictionSet& set);

class OceCost {
 public:
  enum class Kind { average, entropic, cvar };

  static OceCost average() noexcept { return OceCost(Kind::average, 0.0); }
  /// beta > 0
  static OceCost entropic(double beta);
  /// beta in [0, 1)
  static OceCost cvar(double beta);

  /// "average", "entropic:<beta>" or "cvar:<beta>".
  static OceCost parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  double beta() const noexcept { return beta_; }
  std::string to_string() const;

  /// phi(u). The entropic cost throws NumericOverflow once beta*u passes
  /// kMaxExponent instead of returning an infinity.
  double phi(double u) const;

  friend bool operator==(const OceCost&, const OceCost&) = default;

  static constexpr double kMaxExponent = 700.0;

 private:
  OceCost(Kind kind, double beta) noexcept : kind_(kind), beta_(beta) {}

  Kind kind_;
  double beta_;
};

inline double phi_eval(const OceCost& cost, double u) { return cost.phi(u); }

/// t + phi(loss - t)
double transformed_loss(const OceCost& cost, double t, double loss);

/// B(t) = t + phi(loss_max - t): the largest value transformed_loss can take.
double bound_B(const OceCost& cost, double t, double loss_max);

/// t + mean_i phi(loss_i - t). Convex in t; the average cost returns the plain
/// mean, so its value does not depend on t at all.
double empirical_objective(std::span<const double> losses, const OceCost& cost, double t);

struct OceValue {
  double value;
  double t_star;
};

/// Closed-form minimum of empirical_objective over t.
///   average  -> (mean, 0)
///   entropic -> log-mean-exp (computed max-shifted); t_star equals the value
///   cvar     -> t_star is the ceil(beta n)-th smallest loss (lowest minimizer)
OceValue empirical_oce(std::span<const double> losses, const OceCost& cost);

/// Sorted view of one example used to evaluate losses and set sizes at any
/// lambda in O(log m). Results agree exactly with build_prediction_set +
/// compute_loss; both compare `score >= 1 - lambda`.
class ExampleProfile {
 public:
  explicit ExampleProfile(const ScoredExample& example);

  std::size_t element_count() const noexcept { return sorted_scores_.size(); }
  std::size_t truth_size() const noexcept { return sorted_truth_scores_.size(); }

  std::size_t set_size(double lambda) const;
  std::size_t covered(double lambda) const;
  double loss(LossKind kind, double lambda) const;
  /// |Gamma_lambda| / |truth|; requires a nonempty truth set.
  double relative_set_size(double lambda) const;

 private:
  std::vector<double> sorted_scores_;
  std::vector<double> sorted_truth_scores_;
};

std::vector<ExampleProfile> profile_examples(std::span<const ScoredExample> examples);

/// Losses of every profile at one lambda, in input order.
std::vector<double> losses_at(std::span<const ExampleProfile> profiles, LossKind kind,
                              double lambda);

}  // namespace ocecal

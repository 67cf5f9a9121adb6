#pragma once

// Upper confidence bounds on the mean of [0,1]-valued i.i.d. samples.
//
// The WSR (Waudby-Smith & Ramdas) bound bets against each candidate mean R
// with the capital process
//
//   K_i(R) = prod_{j <= i} (1 + eta_j (R - z_j)),
//
// and rejects R once max_i K_i(R) exceeds 1/delta (Ville's inequality). The
// factors grow with R, so the rejected set is an up-set and its infimum is a
// valid upper bound. eta_j may only depend on z_1..z_{j-1}.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ocecal/risk.hpp"

namespace ocecal {

struct BettingSchedule {
  enum class Strategy { predictable_plugin, fixed };

  Strategy strategy = Strategy::predictable_plugin;
  double eta = 1.0;  ///< used by Strategy::fixed
  double cap = 1.0;  ///< every eta_j is clipped to (0, cap]

  /// eta_j = min(cap, sqrt(2 log(1/delta) / (n sigma2_{j-1}))) with the
  /// regularized running variance
  ///   mu_j     = (1/2 + sum_{i<=j} z_i) / (j + 1)
  ///   sigma2_j = (1/4 + sum_{i<=j} (z_i - mu_i)^2) / (j + 1).
  static BettingSchedule predictable_plugin(double cap = 1.0);
  static BettingSchedule fixed(double eta);
};

struct BoundRequest {
  std::span<const double> samples;
  double delta = 0.1;
  double tolerance = 1e-6;
};

/// Throws InvalidArgument for empty samples, samples outside [0,1],
/// delta outside (0,1) or a nonpositive tolerance.
void validate(const BoundRequest& request);

/// eta_1..eta_n for the given samples.
std::vector<double> betting_fractions(std::span<const double> z, double delta,
                                      const BettingSchedule& schedule);

/// max over prefixes i = 0..n of K_i(R); the empty prefix contributes 1.
double capital_process(std::span<const double> z, double R, const BettingSchedule& schedule,
                       double delta);

/// inf{R in [0,1] : capital_process(z, R) > 1/delta}, bracketed by bisection
/// to `tolerance` and reported as the upper end of the final bracket.
/// Returns 1 when no R in [0,1] is rejected.
double wsr_ucb(const BoundRequest& request,
               const BettingSchedule& schedule = BettingSchedule::predictable_plugin());

/// mean + sqrt(log(1/delta) / (2n)), capped at 1.
double hoeffding_ucb(const BoundRequest& request);

enum class BoundKind { wsr, hoeffding };

std::string_view to_string(BoundKind kind) noexcept;
BoundKind parse_bound_kind(std::string_view text);

struct UcbOptions {
  BoundKind kind = BoundKind::wsr;
  BettingSchedule schedule = BettingSchedule::predictable_plugin();
  double tolerance = 1e-6;
};

/// Upper bound on t + E[phi(L - t)], hence on the OCE risk of L.
///
/// Transformed losses t + phi(l - t) live in [t + phi(-t), B(t)]; they are
/// mapped affinely onto [0,1], bounded there, and mapped back. When that
/// range collapses to a point the point itself is returned. Requires
/// t in [0, loss_max] and losses in [0, loss_max].
double oce_risk_ucb(std::span<const double> losses, const OceCost& cost, double t,
                    double delta, const UcbOptions& options = {}, double loss_max = 1.0);

}  // namespace ocecal

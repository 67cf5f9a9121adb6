#include "ocecal/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ocecal/error.hpp"
#include "oracles.hpp"

namespace {

using ocecal::ExampleProfile;
using ocecal::LambdaGrid;
using ocecal::LossKind;
using ocecal::OceCost;
using ocecal::ReliabilitySpec;
using ocecal::ScoredExample;
using ocecal::TSelection;

ScoredExample single(double score) { return {{score}, {0}}; }

std::vector<ScoredExample> random_examples(std::mt19937_64& gen, std::size_t n, std::size_t m,
                                           double noise) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ScoredExample> out;
  for (std::size_t k = 0; k < n; ++k) {
    ScoredExample ex;
    for (std::size_t i = 0; i < m; ++i) {
      const bool positive = u(gen) < 0.3;
      const double s = positive ? 1.0 - noise * u(gen) : noise * u(gen);
      ex.scores.push_back(std::clamp(s, 0.0, 1.0));
      if (positive) ex.truth.push_back(static_cast<std::uint32_t>(i));
    }
    if (ex.truth.empty()) {
      ex.truth.push_back(0);
    }
    out.push_back(std::move(ex));
  }
  return out;
}

// Smallest lambda whose bound passes at it and at every larger grid point.
double reference_suffix(const std::vector<ExampleProfile>& cal, const LambdaGrid& grid,
                        LossKind loss, double alpha, double delta) {
  double best = 1.0;
  for (std::size_t k = grid.size(); k-- > 0;) {
    const auto l = ocecal::losses_at(cal, loss, grid[k]);
    if (ocecal::wsr_ucb({l, delta}) > alpha) break;
    best = grid[k];
  }
  return best;
}

TEST(Reliability, Validate) {
  EXPECT_NO_THROW(ocecal::validate(ReliabilitySpec{0.1, 0.1}));
  EXPECT_THROW(ocecal::validate(ReliabilitySpec{-0.1, 0.1}), ocecal::InvalidArgument);
  EXPECT_THROW(ocecal::validate(ReliabilitySpec{0.1, 0.0}), ocecal::InvalidArgument);
  EXPECT_THROW(ocecal::validate(ReliabilitySpec{0.1, 1.0}), ocecal::InvalidArgument);
  EXPECT_THROW(LambdaGrid(0), ocecal::InvalidArgument);
}

TEST(LambdaGrid, Points) {
  const LambdaGrid g(4);
  EXPECT_EQ(g.size(), 5u);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 0.25);
  EXPECT_EQ(g[4], 1.0);
}

TEST(TSelection, ParseAndPrint) {
  const auto closed = TSelection::parse("closed-form");
  EXPECT_EQ(closed.mode, TSelection::Mode::per_lambda);
  EXPECT_EQ(closed.solver, ocecal::TSolver::closed_form);
  EXPECT_EQ(closed.to_string(), "closed-form");
  const auto golden = TSelection::parse("per-lambda");
  EXPECT_EQ(golden.solver, ocecal::TSolver::golden_section);
  EXPECT_EQ(golden.to_string(), "per-lambda");
  const auto fixed = TSelection::parse("fixed:0.25");
  EXPECT_EQ(fixed.mode, TSelection::Mode::fixed);
  EXPECT_EQ(fixed.fixed_value, 0.25);
  EXPECT_EQ(TSelection::parse(fixed.to_string()).fixed_value, 0.25);
  EXPECT_THROW(TSelection::parse("fixed:1.5"), ocecal::InvalidArgument);
  EXPECT_THROW(TSelection::parse("fixed:"), ocecal::InvalidArgument);
  EXPECT_THROW(TSelection::parse("best"), ocecal::InvalidArgument);
}

TEST(OptimizeT, Examples) {
  const std::vector<double> four{0.1, 0.2, 0.3, 0.4};
  const double t = ocecal::optimize_t(four, OceCost::cvar(0.5));
  EXPECT_EQ(t, 0.2);
  EXPECT_NEAR(ocecal::empirical_objective(four, OceCost::cvar(0.5), t), 0.35, 1e-12);
  EXPECT_EQ(ocecal::optimize_t(four, OceCost::average()), 0.0);
  EXPECT_EQ(ocecal::optimize_t(four, OceCost::average(), ocecal::TSolver::golden_section), 0.0);
  const std::vector<double> zero_one{0.0, 1.0};
  EXPECT_NEAR(ocecal::optimize_t(zero_one, OceCost::entropic(3)), 0.7851467236712656, 1e-12);
  EXPECT_THROW(ocecal::optimize_t({}, OceCost::cvar(0.5)), ocecal::InvalidArgument);
}

TEST(OptimizeT, GoldenSectionReachesClosedFormObjective) {
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> l(20 + rep);
    for (auto& x : l) x = u(gen) * u(gen);
    for (const auto& cost : {OceCost::cvar(0.9), OceCost::cvar(0.5), OceCost::entropic(3.0)}) {
      const double closed = ocecal::optimize_t(l, cost);
      const double golden = ocecal::optimize_t(l, cost, ocecal::TSolver::golden_section);
      EXPECT_NEAR(ocecal::empirical_objective(l, cost, golden),
                  ocecal::empirical_objective(l, cost, closed), 1e-5);
    }
  }
}

TEST(OceCrc, WorkedInstance) {
  const std::vector<ScoredExample> cal{single(0.6), single(0.8)};
  const LambdaGrid grid(10);
  const auto out = ocecal::select_oce_crc(cal, cal, {0.35, 0.2}, grid, OceCost::average(),
                                          LossKind::miscoverage);
  EXPECT_TRUE(out.feasible);
  EXPECT_DOUBLE_EQ(out.lambda_hat, 0.4);
  ASSERT_FALSE(out.trace.empty());
  EXPECT_NEAR(out.trace.back().bound, 1.0 / 3.0, 1e-15);
  EXPECT_TRUE(out.trace.back().pass);
  EXPECT_EQ(out.trace.size(), 5u);
  for (std::size_t k = 0; k + 1 < out.trace.size(); ++k) EXPECT_FALSE(out.trace[k].pass);
}

TEST(OceCrc, InfeasibleReturnsOne) {
  const std::vector<ScoredExample> cal{single(0.6), single(0.8)};
  const auto out = ocecal::select_oce_crc(cal, cal, {0.0, 0.2}, LambdaGrid(10),
                                          OceCost::average(), LossKind::miscoverage);
  EXPECT_FALSE(out.feasible);
  EXPECT_EQ(out.lambda_hat, 1.0);
  EXPECT_EQ(out.trace.size(), 11u);
}

TEST(OceCrc, IndependentOfDelta) {
  std::mt19937_64 gen(42);
  const auto cal = ocecal::profile_examples(random_examples(gen, 300, 20, 0.7));
  const auto opt = ocecal::profile_examples(random_examples(gen, 100, 20, 0.7));
  const auto cost = OceCost::cvar(0.8);
  const auto a = ocecal::select_oce_crc(cal, opt, {0.4, 0.05}, LambdaGrid(200), cost,
                                        LossKind::fnr);
  const auto b = ocecal::select_oce_crc(cal, opt, {0.4, 0.9}, LambdaGrid(200), cost,
                                        LossKind::fnr);
  EXPECT_EQ(a, b);
}

TEST(OceCrc, MatchesReferenceScan) {
  std::mt19937_64 gen(43);
  for (int rep = 0; rep < 10; ++rep) {
    const auto cal = ocecal::profile_examples(random_examples(gen, 200, 15, 0.8));
    const auto opt = ocecal::profile_examples(random_examples(gen, 50, 15, 0.8));
    const auto cost = OceCost::entropic(2.0);
    const LambdaGrid grid(100);
    const double alpha = 0.3;
    double want = 1.0;
    bool feasible = false;
    const double n = static_cast<double>(cal.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double t = ocecal::optimize_t(ocecal::losses_at(opt, LossKind::fnr, grid[k]), cost);
      const auto l = ocecal::losses_at(cal, LossKind::fnr, grid[k]);
      const double bound = n / (n + 1) * ocecal::empirical_objective(l, cost, t) +
                           ocecal::bound_B(cost, t, 1.0) / (n + 1);
      if (bound <= alpha) {
        want = grid[k];
        feasible = true;
        break;
      }
    }
    const auto got = ocecal::select_oce_crc(cal, opt, {alpha, 0.2}, grid, cost, LossKind::fnr);
    EXPECT_EQ(got.feasible, feasible);
    EXPECT_EQ(got.lambda_hat, want);
  }
}

TEST(Rcps, MatchesReferenceSuffixRule) {
  std::mt19937_64 gen(44);
  for (int rep = 0; rep < 10; ++rep) {
    const auto cal = ocecal::profile_examples(random_examples(gen, 400, 15, 0.9));
    const LambdaGrid grid(100);
    const double alpha = 0.15 + 0.02 * rep;
    const auto got = ocecal::select_rcps(cal, {alpha, 0.1}, grid, LossKind::fnr);
    EXPECT_EQ(got.lambda_hat, reference_suffix(cal, grid, LossKind::fnr, alpha, 0.1));
    for (const auto& e : got.trace) EXPECT_EQ(e.t, 0.0);
  }
}

TEST(Rcps, SuffixPropertyOfTrace) {
  std::mt19937_64 gen(45);
  const auto cal = ocecal::profile_examples(random_examples(gen, 400, 15, 0.9));
  const auto out = ocecal::select_rcps(cal, {0.2, 0.1}, LambdaGrid(200), LossKind::fnr);
  ASSERT_TRUE(out.feasible);
  // descending order; every entry but possibly the last passes
  for (std::size_t k = 0; k < out.trace.size(); ++k) {
    if (k + 1 < out.trace.size()) EXPECT_TRUE(out.trace[k].pass);
    if (k > 0) EXPECT_LT(out.trace[k].lambda, out.trace[k - 1].lambda);
    if (out.trace[k].pass) EXPECT_GE(out.trace[k].lambda, out.lambda_hat);
  }
  EXPECT_EQ(out.trace.front().lambda, 1.0);
}

TEST(Rcps, InfeasibleAtTopOfGrid) {
  // Two samples cannot certify a small risk.
  const std::vector<ScoredExample> cal{single(0.9), single(0.5)};
  const auto out = ocecal::select_rcps(cal, {0.01, 0.01}, LambdaGrid(10), LossKind::miscoverage);
  EXPECT_FALSE(out.feasible);
  EXPECT_EQ(out.lambda_hat, 1.0);
  EXPECT_EQ(out.trace.size(), 1u);
}

TEST(OceRcps, AverageCostReproducesRcpsExactly) {
  std::mt19937_64 gen(46);
  for (int rep = 0; rep < 5; ++rep) {
    const auto cal = ocecal::profile_examples(random_examples(gen, 300, 20, 0.8));
    const auto opt = ocecal::profile_examples(random_examples(gen, 80, 20, 0.8));
    const ReliabilitySpec spec{0.2, 0.1};
    const LambdaGrid grid(250);
    const auto a = ocecal::select_rcps(cal, spec, grid, LossKind::fnr);
    const auto b = ocecal::select_oce_rcps(cal, opt, spec, grid, OceCost::average(), LossKind::fnr);
    EXPECT_EQ(a, b);
  }
}

TEST(OceRcps, ValidBoundsAndTsFromOptSplit) {
  std::mt19937_64 gen(47);
  const auto cal = ocecal::profile_examples(random_examples(gen, 300, 20, 0.8));
  const auto opt = ocecal::profile_examples(random_examples(gen, 80, 20, 0.8));
  const auto cost = OceCost::cvar(0.9);
  const auto out = ocecal::select_oce_rcps(cal, opt, {0.5, 0.2}, LambdaGrid(50), cost,
                                           LossKind::fnr);
  for (const auto& e : out.trace) {
    EXPECT_EQ(e.t, ocecal::optimize_t(ocecal::losses_at(opt, LossKind::fnr, e.lambda), cost));
    const auto l = ocecal::losses_at(cal, LossKind::fnr, e.lambda);
    EXPECT_EQ(e.bound, ocecal::oce_risk_ucb(l, cost, e.t, 0.2));
    EXPECT_EQ(e.pass, e.bound <= 0.5);
    EXPECT_LE(e.bound, ocecal::bound_B(cost, e.t, 1.0));
  }
}

TEST(OceRcps, FixedTIgnoresOptSplit) {
  std::mt19937_64 gen(48);
  const auto cal = ocecal::profile_examples(random_examples(gen, 200, 10, 0.8));
  const auto out = ocecal::select_oce_rcps(cal, {}, {0.5, 0.2}, LambdaGrid(20),
                                           OceCost::cvar(0.5), LossKind::fnr, {},
                                           TSelection::fixed(0.1));
  for (const auto& e : out.trace) EXPECT_EQ(e.t, 0.1);
  EXPECT_THROW(ocecal::select_oce_rcps(cal, {}, {0.5, 0.2}, LambdaGrid(20), OceCost::cvar(0.5),
                                       LossKind::fnr),
               ocecal::InvalidArgument);
}

TEST(OceRcps, LambdaHatNonincreasingInDelta) {
  std::mt19937_64 gen(49);
  for (int rep = 0; rep < 5; ++rep) {
    const auto cal = ocecal::profile_examples(random_examples(gen, 400, 20, 0.85));
    const auto opt = ocecal::profile_examples(random_examples(gen, 100, 20, 0.85));
    double prev = 0.0;
    for (double delta : {0.4, 0.3, 0.2, 0.1, 0.05}) {
      const auto out = ocecal::select_oce_rcps(cal, opt, {0.4, delta}, LambdaGrid(200),
                                               OceCost::cvar(0.8), LossKind::fnr);
      EXPECT_GE(out.lambda_hat, prev) << "delta=" << delta;
      prev = out.lambda_hat;
    }
  }
}

TEST(Selectors, RejectEmptyCalibration) {
  EXPECT_THROW(ocecal::select_rcps(std::span<const ExampleProfile>{}, {0.2, 0.1}, LambdaGrid(10),
                                   LossKind::fnr),
               ocecal::InvalidArgument);
}

}  // namespace

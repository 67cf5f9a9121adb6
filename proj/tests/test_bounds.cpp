#include "ocecal/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ocecal/error.hpp"
#include "oracles.hpp"

namespace {

using ocecal::BettingSchedule;
using ocecal::BoundRequest;
using ocecal::OceCost;

std::vector<double> bernoulli(std::mt19937_64& gen, std::size_t n, double p) {
  std::bernoulli_distribution b(p);
  std::vector<double> z(n);
  for (auto& x : z) x = b(gen) ? 1.0 : 0.0;
  return z;
}

std::vector<double> uniform_sample(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> z(n);
  for (auto& x : z) x = u(gen) * u(gen);
  return z;
}

TEST(CapitalProcess, Examples) {
  const std::vector<double> zero{0.0};
  EXPECT_EQ(ocecal::capital_process(zero, 0.0, BettingSchedule::predictable_plugin(), 0.1), 1.0);
  EXPECT_EQ(ocecal::capital_process(zero, 0.0, BettingSchedule::fixed(0.4), 0.1), 1.0);
  EXPECT_EQ(ocecal::capital_process(zero, 1.0, BettingSchedule::fixed(1.0), 0.1), 2.0);
  const std::vector<double> ones{1.0, 1.0};
  EXPECT_EQ(ocecal::capital_process(ones, 0.0, BettingSchedule::fixed(1.0), 0.1), 1.0);
}

TEST(CapitalProcess, MatchesBruteForce) {
  std::mt19937_64 gen(21);
  for (int rep = 0; rep < 50; ++rep) {
    const auto z = uniform_sample(gen, 1 + rep * 3);
    const double delta = 0.05 + 0.01 * rep;
    const auto eta = oracle::plugin_etas(z, delta);
    for (double R : {0.0, 0.1, 0.35, 0.6, 1.0}) {
      const double got =
          ocecal::capital_process(z, R, BettingSchedule::predictable_plugin(), delta);
      const double want = oracle::max_capital(z, eta, R);
      EXPECT_NEAR(got, want, 1e-9 * std::max(1.0, want));
    }
  }
}

TEST(CapitalProcess, NondecreasingInR) {
  std::mt19937_64 gen(22);
  for (int rep = 0; rep < 100; ++rep) {
    const auto z = uniform_sample(gen, 5 + rep);
    double prev = 0.0;
    for (int k = 0; k <= 100; ++k) {
      const double c =
          ocecal::capital_process(z, k / 100.0, BettingSchedule::predictable_plugin(), 0.1);
      EXPECT_GE(c, prev);
      EXPECT_GE(c, 1.0);
      prev = c;
    }
  }
}

TEST(BettingFractions, PredictableAndBounded) {
  std::mt19937_64 gen(23);
  for (int rep = 0; rep < 50; ++rep) {
    auto z = uniform_sample(gen, 40);
    const auto eta = ocecal::betting_fractions(z, 0.1, BettingSchedule::predictable_plugin(0.7));
    for (double e : eta) {
      EXPECT_GT(e, 0.0);
      EXPECT_LE(e, 0.7);
    }
    const std::size_t j = static_cast<std::size_t>(rep % 39);
    std::shuffle(z.begin() + static_cast<std::ptrdiff_t>(j), z.end(), gen);
    const auto permuted =
        ocecal::betting_fractions(z, 0.1, BettingSchedule::predictable_plugin(0.7));
    // eta_{j+1} (0-based index j) depends on z_1..z_j only.
    for (std::size_t i = 0; i <= j; ++i) EXPECT_EQ(eta[i], permuted[i]);
  }
}

TEST(BettingFractions, MatchesRecomputedStatistics) {
  std::mt19937_64 gen(24);
  const auto z = uniform_sample(gen, 60);
  const auto got = ocecal::betting_fractions(z, 0.2, BettingSchedule::predictable_plugin());
  const auto want = oracle::plugin_etas(z, 0.2);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
}

TEST(WsrUcb, AllZeros) {
  const std::vector<double> zeros(100, 0.0);
  const double ucb = ocecal::wsr_ucb({zeros, 0.1});
  EXPECT_LE(ucb, 0.05);
  EXPECT_GT(ucb, 0.0);
  const double grid = oracle::grid_wsr(zeros, 0.1, 1e-5);
  EXPECT_NEAR(ucb, grid, 1e-5 + 1e-6);
}

TEST(WsrUcb, SingleSampleNeverRejects) {
  const std::vector<double> zero{0.0};
  EXPECT_EQ(ocecal::wsr_ucb({zero, 0.5}), 1.0);
}

TEST(WsrUcb, MatchesGridScan) {
  std::mt19937_64 gen(25);
  for (int rep = 0; rep < 20; ++rep) {
    const auto z = rep % 2 ? bernoulli(gen, 50 + 10 * rep, 0.3) : uniform_sample(gen, 50 + 10 * rep);
    const double delta = 0.1 + 0.02 * rep;
    EXPECT_NEAR(ocecal::wsr_ucb({z, delta}), oracle::grid_wsr(z, delta, 1e-5), 1e-5 + 1e-6);
  }
}

TEST(WsrUcb, RangeAndMeanDominance) {
  std::mt19937_64 gen(26);
  for (int rep = 0; rep < 100; ++rep) {
    const auto z = uniform_sample(gen, 1 + rep * 5);
    const double delta = 0.05 + 0.009 * rep;
    const double ucb = ocecal::wsr_ucb({z, delta});
    EXPECT_GE(ucb, 0.0);
    EXPECT_LE(ucb, 1.0);
    const double mean = oracle::mean(z);
    if (ocecal::capital_process(z, mean, BettingSchedule::predictable_plugin(), delta) <=
        1.0 / delta) {
      EXPECT_GE(ucb + 1e-6, mean);
    }
  }
}

TEST(WsrUcb, NonincreasingInDelta) {
  std::mt19937_64 gen(27);
  for (int rep = 0; rep < 100; ++rep) {
    const auto z = rep % 2 ? bernoulli(gen, 200, 0.2) : uniform_sample(gen, 200);
    double prev = 1.0;
    for (double delta : {0.01, 0.05, 0.1, 0.2, 0.3, 0.5, 0.8}) {
      const double ucb = ocecal::wsr_ucb({z, delta});
      EXPECT_LE(ucb, prev) << "delta=" << delta;
      prev = ucb;
    }
  }
}

TEST(WsrUcb, TighterToleranceNeverDropsByMoreThanOldTolerance) {
  std::mt19937_64 gen(28);
  for (int rep = 0; rep < 50; ++rep) {
    const auto z = uniform_sample(gen, 100);
    const double coarse = ocecal::wsr_ucb({z, 0.1, 1e-3});
    const double fine = ocecal::wsr_ucb({z, 0.1, 1e-6});
    EXPECT_GE(fine, coarse - 1e-3);
    EXPECT_LE(fine, coarse);
  }
}

TEST(WsrUcb, RejectsInvalidRequests) {
  const std::vector<double> ok{0.2, 0.4};
  const std::vector<double> bad{0.2, 1.4};
  EXPECT_THROW(ocecal::wsr_ucb({{}, 0.1}), ocecal::InvalidArgument);
  EXPECT_THROW(ocecal::wsr_ucb({bad, 0.1}), ocecal::InvalidArgument);
  EXPECT_THROW(ocecal::wsr_ucb({ok, 0.0}), ocecal::InvalidArgument);
  EXPECT_THROW(ocecal::wsr_ucb({ok, 1.0}), ocecal::InvalidArgument);
  EXPECT_THROW(ocecal::wsr_ucb({ok, 0.1, 0.0}), ocecal::InvalidArgument);
  EXPECT_THROW(BettingSchedule::fixed(1.5), ocecal::InvalidArgument);
  EXPECT_THROW(BettingSchedule::predictable_plugin(0.0), ocecal::InvalidArgument);
}

TEST(HoeffdingUcb, Examples) {
  std::vector<double> z(800, 0.0);
  std::fill(z.begin(), z.begin() + 240, 1.0);
  EXPECT_NEAR(ocecal::hoeffding_ucb({z, 0.2}), 0.331715906029488, 1e-12);
  const std::vector<double> ones(10, 1.0);
  EXPECT_EQ(ocecal::hoeffding_ucb({ones, 0.2}), 1.0);
  const std::vector<double> zeros(4, 0.0);
  EXPECT_NEAR(ocecal::hoeffding_ucb({zeros, 0.999}), 0.01118313648749548, 1e-12);
  EXPECT_THROW(ocecal::hoeffding_ucb({{}, 0.2}), ocecal::InvalidArgument);
}

TEST(OceRiskUcb, AverageCostIsRawWsr) {
  std::mt19937_64 gen(29);
  for (int rep = 0; rep < 20; ++rep) {
    const auto losses = uniform_sample(gen, 100 + rep);
    EXPECT_EQ(ocecal::oce_risk_ucb(losses, OceCost::average(), 0.0, 0.1),
              ocecal::wsr_ucb({losses, 0.1}));
  }
}

TEST(OceRiskUcb, ConstantLossesStayAtTheirTransformedValue) {
  // Constant samples map to z = 0, which the bound still inflates; the result
  // sits just above the constant, inside the zero-sample bound.
  const std::vector<double> losses(100, 0.4);
  const auto cost = OceCost::cvar(0.5);
  const double v = ocecal::oce_risk_ucb(losses, cost, 0.4, 0.1);
  const double lo = ocecal::transformed_loss(cost, 0.4, 0.0);
  const double hi = ocecal::bound_B(cost, 0.4, 1.0);
  EXPECT_EQ(lo, 0.4);
  EXPECT_GE(v, 0.4);
  const std::vector<double> zeros(100, 0.0);
  EXPECT_NEAR(v, lo + (hi - lo) * ocecal::wsr_ucb({zeros, 0.1}), 1e-12);
}

TEST(OceRiskUcb, DegenerateRangeShortCircuits) {
  // cvar with t = loss_max: every transformed loss equals t.
  const std::vector<double> losses{0.1, 0.5, 0.9};
  EXPECT_EQ(ocecal::oce_risk_ucb(losses, OceCost::cvar(0.5), 1.0, 0.1), 1.0);
}

TEST(OceRiskUcb, EntropicZerosWithinZeroSampleBound) {
  const auto cost = OceCost::entropic(3);
  const std::vector<double> zeros(100, 0.0);
  const double v = ocecal::oce_risk_ucb(zeros, cost, 0.5, 0.1);
  const double lo = 0.5 + cost.phi(-0.5);
  const double hi = 0.5 + cost.phi(0.5);
  EXPECT_GE(v, lo);
  EXPECT_LE(v, lo + 0.05 * (hi - lo));
}

TEST(OceRiskUcb, StaysBetweenTransformedExtremes) {
  std::mt19937_64 gen(30);
  for (int rep = 0; rep < 30; ++rep) {
    const auto losses = uniform_sample(gen, 200);
    for (const auto& cost : {OceCost::cvar(0.8), OceCost::entropic(2.0), OceCost::average()}) {
      const double t = ocecal::empirical_oce(losses, cost).t_star;
      const double ucb = ocecal::oce_risk_ucb(losses, cost, t, 0.2);
      EXPECT_GE(ucb, ocecal::transformed_loss(cost, t, 0.0));
      EXPECT_LE(ucb, ocecal::bound_B(cost, t, 1.0));
    }
  }
}

TEST(WsrUcb, CoversTrueMeanAtNominalRate) {
  std::mt19937_64 gen(31);
  for (double p : {0.1, 0.3, 0.6}) {
    int misses = 0;
    const int reps = 1000;
    for (int rep = 0; rep < reps; ++rep) {
      const auto z = bernoulli(gen, 100, p);
      if (ocecal::wsr_ucb({z, 0.2}) < p) ++misses;
    }
    EXPECT_LE(misses, 230) << "p=" << p;
  }
}

TEST(OceRiskUcb, HoeffdingOption) {
  std::vector<double> losses(800, 0.0);
  std::fill(losses.begin(), losses.begin() + 240, 1.0);
  ocecal::UcbOptions opts;
  opts.kind = ocecal::BoundKind::hoeffding;
  EXPECT_NEAR(ocecal::oce_risk_ucb(losses, OceCost::average(), 0.0, 0.2, opts),
              0.331715906029488, 1e-12);
}

TEST(OceRiskUcb, RejectsOutOfRangeInputs) {
  const std::vector<double> ok{0.1, 0.2};
  const std::vector<double> bad{0.1, 1.2};
  EXPECT_THROW(ocecal::oce_risk_ucb({}, OceCost::average(), 0.0, 0.1), ocecal::InvalidArgument);
  EXPECT_THROW(ocecal::oce_risk_ucb(bad, OceCost::average(), 0.0, 0.1), ocecal::InvalidArgument);
  EXPECT_THROW(ocecal::oce_risk_ucb(ok, OceCost::cvar(0.5), 1.5, 0.1), ocecal::InvalidArgument);
  EXPECT_THROW(ocecal::oce_risk_ucb(ok, OceCost::cvar(0.5), -0.1, 0.1), ocecal::InvalidArgument);
}

TEST(BoundKind, Parse) {
  EXPECT_EQ(ocecal::parse_bound_kind("wsr"), ocecal::BoundKind::wsr);
  EXPECT_EQ(ocecal::parse_bound_kind("hoeffding"), ocecal::BoundKind::hoeffding);
  EXPECT_THROW(ocecal::parse_bound_kind("clt"), ocecal::InvalidArgument);
}

}  // namespace

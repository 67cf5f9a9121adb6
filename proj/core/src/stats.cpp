#include "ocecal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "ocecal/error.hpp"

namespace ocecal {

double mean(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw InvalidArgument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(fmt::format("quantile level {} outside [0,1]", p));
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) throw InvalidArgument("standard deviation needs at least two values");
  const double mu = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double kde_bandwidth(std::span<const double> values) {
  if (values.size() < 2) throw InvalidArgument("KDE needs at least two values");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double spread = *hi - *lo;
  if (!(spread > 0.0)) throw InvalidArgument("KDE needs values with nonzero spread");

  const double sd = sample_stddev(values);
  const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
  double scale = sd;
  if (iqr > 0.0) scale = std::min(sd, iqr / 1.34);
  const double h = 0.9 * scale * std::pow(static_cast<double>(values.size()), -0.2);
  return std::max(h, 1e-6 * spread);
}

std::vector<DensityPoint> kde_density(std::span<const double> values, std::size_t grid_points) {
  if (grid_points < 2) throw InvalidArgument("KDE needs at least two grid points");
  const double h = kde_bandwidth(values);
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it - 3.0 * h;
  const double hi = *hi_it + 3.0 * h;
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  const double norm = 1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * std::numbers::pi));

  std::vector<DensityPoint> out(grid_points);
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double x = g + 1 == grid_points ? hi : lo + step * static_cast<double>(g);
    double sum = 0.0;
    for (double v : values) {
      const double z = (x - v) / h;
      sum += std::exp(-0.5 * z * z);
    }
    out[g] = {x, sum * norm};
  }

  const double area = trapezoid_integral(out);
  if (area > 0.0) {
    for (auto& p : out) p.density /= area;
  }
  return out;
}

double trapezoid_integral(std::span<const DensityPoint> series) {
  double area = 0.0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    area += 0.5 * (series[i].density + series[i - 1].density) * (series[i].x - series[i - 1].x);
  }
  return area;
}

}  // namespace ocecal

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ocecal {

double mean(std::span<const double> values);

/// Linear interpolation between order statistics (Hyndman-Fan type 7).
double quantile(std::span<const double> values, double p);

inline double median(std::span<const double> values) { return quantile(values, 0.5); }

/// Sample standard deviation (n - 1 denominator).
double sample_stddev(std::span<const double> values);

struct DensityPoint {
  double x;
  double density;
};

/// Gaussian kernel density estimate on `grid_points` evenly spaced points.
///
/// Bandwidth h = 0.9 min(sd, IQR / 1.34) n^(-1/5) (Silverman), floored at
/// 1e-6 (max - min); the grid spans [min - 3h, max + 3h]. The estimate is
/// rescaled so the trapezoid integral over the emitted grid is exactly one.
///
/// Throws InvalidArgument for fewer than two values, zero spread, or fewer
/// than two grid points.
std::vector<DensityPoint> kde_density(std::span<const double> values, std::size_t grid_points);

double kde_bandwidth(std::span<const double> values);

/// Trapezoid integral of a density series.
double trapezoid_integral(std::span<const DensityPoint> series);

}  // namespace ocecal

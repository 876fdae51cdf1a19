#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rmup::stats {

// Inverse standard-normal CDF, Wichura's AS 241 (PPND16), ~1e-15 accurate.
double normal_quantile(double p);

// Standard-normal CDF.
double normal_cdf(double x);

double mean(std::span<const double> x);
// Sample variance, divisor n-1.
double variance(std::span<const double> x);
double stddev(std::span<const double> x);
// Standardised third moment (population form m3 / m2^1.5).
double skewness(std::span<const double> x);
// m4 / m2^2 - 3.
double excess_kurtosis(std::span<const double> x);

double pearson(std::span<const double> x, std::span<const double> y);

// Midranks (1-based, ties averaged).
std::vector<double> midranks(std::span<const double> x);
// Spearman rank correlation with midrank tie handling.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace rmup::stats

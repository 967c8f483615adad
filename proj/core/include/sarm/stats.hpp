#pragma once

#include <span>

namespace sarm {

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

/// Two-sided Welch t-test. Throws std::invalid_argument (naming the sample)
/// when a sample has fewer than two points or zero variance.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);

}  // namespace sarm

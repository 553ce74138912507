#pragma once

#include <cstddef>
#include <span>
#include <utility>

namespace freqbench {

/// n, mean and unbiased (n-1) variance of a sample. Variance is 0 for n == 1.
struct SampleStats {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;
};

/// Throws InsufficientSample for an empty sample.
SampleStats summarize(std::span<const double> sample);

struct MeansTestResult {
    double t_statistic = 0.0;
    double degrees_of_freedom = 0.0;
    double p_value = 1.0;
    double alpha = 0.05;
    bool reject_null = false;
};

/// 100 * (baseline - optimized) / baseline. Negative means a slowdown.
/// Throws NonPositiveBaseline when baseline <= 0.
double improvement_pct(double t_baseline, double t_optimized);

/// Arithmetic mean of improvement_pct over (baseline, optimized) pairs.
/// Throws EmptyInput or NonPositiveBaseline.
double mean_improvement(std::span<const std::pair<double, double>> trials);

/// Welch's unequal-variance two-sample t-test, two-sided.
///
/// t = (mean_a - mean_b) / sqrt(var_a/n_a + var_b/n_b), with
/// Welch-Satterthwaite degrees of freedom. When both samples have zero
/// variance the statistic is undefined: equal means report t = 0, p = 1;
/// different means report t = +/-inf, p = 0. Degenerate cases use
/// df = n_a + n_b - 2.
///
/// Throws InsufficientSample when either sample has fewer than two values
/// and InvalidSpec when alpha is outside (0, 1).
MeansTestResult welch_t_test(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

/// CDF of Student's t distribution with `df` > 0 degrees of freedom.
double student_t_cdf(double t, double df);

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

} // namespace freqbench

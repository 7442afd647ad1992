#pragma once

#include "uncertain_eval/feedback.hpp"

#include <cstddef>
#include <span>

namespace uncertain_eval {

struct GaussianDistribution {
    double mean = 0.0;
    double variance = 0.0;

    double stddev() const;
};

/// Law of the magic barrier of RMSE over a dataset of uncertain feedback:
///
///   mean     = sqrt(sum(sigma^2) / N)
///   variance = sum(sigma^4) / (2 N sum(sigma^2))   (0 when every sigma is 0)
///
/// The Gaussian form is a large-N approximation of the distribution of
/// sqrt(mean(eps^2)) with eps ~ N(0, sigma^2).
struct BarrierDistribution {
    GaussianDistribution gaussian;
    std::size_t n = 0;
    double sum_sigma2 = 0.0;
    double sum_sigma4 = 0.0;
};

BarrierDistribution barrier_distribution(const FeedbackDataset& data);
BarrierDistribution barrier_distribution(std::span<const double> sigmas);

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// Two-sided standard-normal quantile: level 0.95 gives 1.959964.
double two_sided_z(double level);

Interval confidence_interval(const GaussianDistribution& g, double level = 0.95);

/// Shifted-barrier test of whether two scores can be told apart.
struct DistinguishabilityResult {
    double s1 = 0.0;
    double s2 = 0.0;
    double barrier_mean = 0.0;
    double barrier_variance = 0.0;
    double shift_mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    bool distinguishable = false;
    // |s1 - s2| / (2 std); +inf for a degenerate barrier with s1 != s2.
    double z_gap = 0.0;
};

/// Centres the barrier at (s1 + s2) / 2 and asks whether both scores fall
/// inside its 95% interval. The verdict is |s1 - s2| > 2 z std; the interval
/// bounds are reported alongside.
DistinguishabilityResult distinguishability_test(double s1, double s2,
                                                 const BarrierDistribution& barrier);

/// Smallest barrier std at which s1 and s2 become indistinguishable.
double indistinguishable_std_threshold(double s1, double s2);

struct RelationResult {
    double p_opposite = 0.5; // P(S1 >= S2)
    bool holds = false;      // S1 < S2 accepted
};

/// P(S1 >= S2) for independent Gaussian scores; S1 < S2 holds when that
/// probability is below alpha.
RelationResult relation_test(const GaussianDistribution& s1, const GaussianDistribution& s2,
                             double alpha = 0.05);

double normal_cdf(double x);

} // namespace uncertain_eval

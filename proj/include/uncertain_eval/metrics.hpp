#pragma once

#include "uncertain_eval/feedback.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace uncertain_eval {

inline constexpr std::size_t kMonteCarloChunk = 1024;
inline constexpr std::size_t kMinMonteCarloSamples = 100;

struct McConfig {
    std::size_t sample_count = 10000;
    std::uint64_t seed = 0;
    // Std of the Gaussian noise attached to every prediction; absent = none.
    std::optional<double> predictor_tau;
    // Worker cap; 0 defers to UNCERTAIN_EVAL_THREADS. Never affects results.
    std::size_t threads = 0;

    void validate() const;
};

/// RMSE as a random variable, represented by its Monte Carlo samples.
struct MetricScoreDistribution {
    std::vector<double> samples;
    double mean = 0.0;
    double variance = 0.0; // n-1 denominator
    std::size_t sample_count = 0;
    std::uint64_t seed = 0;
};

double rmse(const PredictionSet& predictions, const std::map<FeedbackKey, double>& ratings);

/// RMSE of every individual observation against its pair's prediction.
double rmse(const PredictionSet& predictions, const ObservationSet& obs);

/// Draws x ~ N(mu, sigma^2) for every pair (and p ~ N(pi, tau^2) when a
/// predictor tau is set) and records the RMSE of x - p, once per sample.
/// Samples are generated in chunks of kMonteCarloChunk with per-chunk child
/// seeds, so results do not depend on the thread count. Draws are not
/// clamped to the rating scale.
MetricScoreDistribution rmse_distribution(const FeedbackDataset& data,
                                          const PredictionSet& predictions, const McConfig& cfg);

/// |Var_MC - Var_MB| / Var_MB for perfect predictions (pi = mu).
double variance_match_check(const FeedbackDataset& data, const McConfig& cfg);

} // namespace uncertain_eval

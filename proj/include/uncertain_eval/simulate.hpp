#pragma once

#include "uncertain_eval/feedback.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace uncertain_eval {

/// Synthetic population: mu ~ U[scale.min, scale.max], sigma ~ U[sigma_lo, sigma_hi]
/// for a random subset of density * n_users * n_items pairs. Predictions are
/// mu + bias with bias ~ N(0, bias_sd^2).
struct PopulationSpec {
    std::size_t n_users = 1;
    std::size_t n_items = 1;
    RatingScale scale;
    double sigma_lo = 0.5;
    double sigma_hi = 1.0;
    double density = 1.0;
    double bias_sd = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t pair_count() const;
};

struct GroundTruth {
    FeedbackDataset dataset;
    std::optional<PredictionSet> predictions;
};

GroundTruth generate_population(const PopulationSpec& spec);

/// k trials per pair, x ~ N(mu, sigma^2). With discretise the values are
/// rounded to the scale step and clamped to the scale, which biases sigma
/// near the edges. Output is sorted by (user_id, item_id, trial).
ObservationSet draw_trials(const GroundTruth& truth, std::size_t k, bool discretise,
                           std::uint64_t seed);

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
};

/// Bins of the given width starting at the smallest value; bins are
/// half-open [lo, hi) and the last bin holds the largest value.
std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width);

/// Generates, draws k continuous trials, fits, and returns the largest
/// relative sigma error over pairs with sigma_true >= 0.1 (0 if none).
double fit_roundtrip_check(const PopulationSpec& spec, std::size_t k, std::uint64_t trial_seed);

} // namespace uncertain_eval

#pragma once

#include "uncertain_eval/barrier.hpp"
#include "uncertain_eval/feedback.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace uncertain_eval {

// ---------------------------------------------------------------------------
// Re-rating de-noising
// ---------------------------------------------------------------------------

enum class Resampler { redraw_from_model, replace_with_median };

struct DenoiseConfig {
    // Largest allowed distance between any two ratings of one pair.
    double threshold = 1.0;
    std::size_t max_iterations = 100;
    Resampler resampler = Resampler::replace_with_median;
    // Parent seed for redraws; group g uses child_seed(seed, g).
    std::uint64_t seed = 0;

    void validate() const;
};

struct DenoiseResult {
    ObservationSet observations;
    // Groups still wider than the threshold after max_iterations passes.
    std::vector<FeedbackKey> unconverged;
    // Groups where a redraw exhausted its attempts and fell back to the median.
    std::vector<FeedbackKey> redraw_fallbacks;
    std::size_t replacements = 0;
};

/// Per group, while the spread (max pairwise distance) exceeds the
/// threshold, replaces the rating farthest from the group median (ties go
/// to the lowest trial index). Group sizes, keys and trial indices are
/// never changed. Redraws need the generating model in `truth`.
DenoiseResult denoise_preprocess(const ObservationSet& obs, const FeedbackDataset* truth,
                                 const DenoiseConfig& cfg);

double max_pairwise_distance(std::span<const double> values);
double median(std::vector<double> values);

// ---------------------------------------------------------------------------
// Predictor noise
// ---------------------------------------------------------------------------

/// Law of X - P with X ~ N(mu, sigma^2) and P ~ N(prediction, tau^2)
/// independent: N(mu - prediction, sigma^2 + tau^2).
GaussianDistribution predictor_noise_deviation(const UncertainFeedback& fb, double prediction,
                                               double tau);

/// Monte Carlo draws of X - P, for checking the closed form.
std::vector<double> sample_predictor_noise_deviation(const UncertainFeedback& fb,
                                                     double prediction, double tau,
                                                     std::size_t count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Deviation omission
// ---------------------------------------------------------------------------

struct OmissionConfig {
    double alpha = 0.05;

    void validate() const;
};

struct OmissionResult {
    std::vector<FeedbackKey> retained;
    // Absent when nothing was retained.
    std::optional<double> filtered_rmse;
    double retained_fraction = 0.0;
    std::size_t tested = 0;
};

/// Keeps only the deviations d = rating - prediction that sigma cannot
/// explain under a two-sided z-test at level alpha. A pair with sigma = 0
/// is kept whenever d != 0.
OmissionResult omit_insignificant(const FeedbackDataset& data, const PredictionSet& predictions,
                                  const std::map<FeedbackKey, double>& point_ratings,
                                  const OmissionConfig& cfg);

// ---------------------------------------------------------------------------
// Comparison report
// ---------------------------------------------------------------------------

struct StrategyReport {
    std::string strategy;
    double score_before = 0.0;
    std::optional<double> score_after;
    std::optional<double> retained_fraction;
    // Mean per-pair variance of the rating-prediction deviation (predictor noise).
    std::optional<double> deviation_variance;
    std::optional<DistinguishabilityResult> verdict;
};

struct StrategyInputs {
    // Model used for the barrier, the z-tests and the predictor-noise laws.
    FeedbackDataset data;
    PredictionSet predictions;
    // Repeated trials; required for de-noising.
    std::optional<ObservationSet> observations;
    // One rating per pair for omission. Defaults to the first trial of each
    // pair when observations exist, else to mu.
    std::optional<std::map<FeedbackKey, double>> point_ratings;
};

struct StrategySelection {
    std::optional<DenoiseConfig> denoise;
    std::optional<double> predictor_tau;
    std::optional<OmissionConfig> omission;
};

/// Before/after scores for each selected strategy and the shifted-barrier
/// verdict on that pair under the barrier of `inputs.data`.
std::vector<StrategyReport> run_strategy_comparison(const StrategyInputs& inputs,
                                                    const StrategySelection& selection);

} // namespace uncertain_eval

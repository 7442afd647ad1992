#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uncertain_eval {

/// Bounded rating axis. A missing step means the scale is continuous.
struct RatingScale {
    double min = 1.0;
    double max = 5.0;
    std::optional<double> step;

    void validate() const;
    bool contains(double value) const { return value >= min && value <= max; }
    // Round to the nearest step (if any) and clamp to [min, max].
    double discretise(double value) const;
};

/// The index of a user-item pair.
struct FeedbackKey {
    std::string user_id;
    std::string item_id;

    auto operator<=>(const FeedbackKey&) const = default;
    bool operator==(const FeedbackKey&) const = default;
};

std::string to_string(const FeedbackKey& key);

struct RatingObservation {
    FeedbackKey key;
    std::uint64_t trial = 0;
    double value = 0.0;
};

/// Raw repeated-trial ratings.
struct ObservationSet {
    RatingScale scale;
    std::vector<RatingObservation> observations;

    /// Throws InputError on off-scale or non-finite values and on duplicate
    /// (key, trial) pairs.
    void validate() const;

    /// Observations grouped per key, each group sorted by trial index.
    std::map<FeedbackKey, std::vector<RatingObservation>> grouped() const;

    /// Sorts observations by (user_id, item_id, trial).
    void canonicalise();
};

/// X ~ N(mu, sigma^2) for one user-item pair.
struct UncertainFeedback {
    FeedbackKey key;
    double mu = 0.0;
    double sigma = 0.0;
    // Number of trials sigma was estimated from; 0 when sigma was supplied
    // directly (ground truth or a feedback file).
    std::size_t trial_count = 0;
};

struct FeedbackDataset {
    RatingScale scale;
    std::vector<UncertainFeedback> entries;

    std::size_t size() const { return entries.size(); }
    void validate() const;
};

struct PredictionSet {
    std::map<FeedbackKey, double> entries;

    /// Throws InputError naming the key when it is missing.
    double at(const FeedbackKey& key) const;
};

/// How pairs observed only once receive a sigma.
struct SigmaFallback {
    enum class Kind { zero, pooled, fixed };

    Kind kind = Kind::pooled;
    double value = 0.0;

    static SigmaFallback zero() { return {Kind::zero, 0.0}; }
    static SigmaFallback pooled() { return {Kind::pooled, 0.0}; }
    static SigmaFallback fixed(double sigma) { return {Kind::fixed, sigma}; }

    /// Parses "zero", "pooled" or "fixed:V".
    static SigmaFallback parse(const std::string& text);
};

/// Per-pair sample mean and Bessel-corrected sample standard deviation.
FeedbackDataset fit_uncertainty(const ObservationSet& obs,
                                SigmaFallback fallback = SigmaFallback::pooled());

/// sqrt(mean(sigma^2)) over entries fitted from at least two trials.
/// Throws UnavailableError when there are none.
double pooled_sigma(const FeedbackDataset& data);

/// Mean and sample std (n-1) of a set of values; sigma is 0 for one value.
struct SampleMoments {
    double mean = 0.0;
    double stddev = 0.0;
};
SampleMoments sample_moments(std::span<const double> values);

} // namespace uncertain_eval

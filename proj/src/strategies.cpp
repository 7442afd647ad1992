#include "uncertain_eval/strategies.hpp"

#include "uncertain_eval/error.hpp"
#include "uncertain_eval/metrics.hpp"
#include "uncertain_eval/parallel.hpp"
#include "uncertain_eval/random.hpp"

#include <algorithm>
#include <cmath>

namespace uncertain_eval {

void DenoiseConfig::validate() const {
    if (!(threshold > 0.0)) throw InputError("de-noising threshold must be > 0");
    if (max_iterations < 1) throw InputError("de-noising max_iterations must be >= 1");
}

double max_pairwise_distance(std::span<const double> values) {
    if (values.empty()) return 0.0;
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return *hi - *lo;
}

double median(std::vector<double> values) {
    if (values.empty()) throw InputError("median of an empty set");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                     values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(),
                                           values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

namespace {

struct GroupOutcome {
    bool converged = true;
    bool redraw_fallback = false;
    std::size_t replacements = 0;
};

GroupOutcome denoise_group(std::vector<double>& values, const UncertainFeedback* model,
                           const RatingScale& scale, const DenoiseConfig& cfg,
                           std::uint64_t seed) {
    GroupOutcome out;
    Engine engine(seed);
    std::normal_distribution<double> normal;
    for (std::size_t pass = 0;
         pass < cfg.max_iterations && max_pairwise_distance(values) > cfg.threshold; ++pass) {
        const double centre = median(values);
        std::size_t target = 0;
        for (std::size_t i = 1; i < values.size(); ++i)
            if (std::abs(values[i] - centre) > std::abs(values[target] - centre)) target = i;

        double replacement = centre;
        if (cfg.resampler == Resampler::redraw_from_model) {
            bool accepted = false;
            for (std::size_t attempt = 0; attempt < cfg.max_iterations && !accepted; ++attempt) {
                double draw = model->mu + model->sigma * normal(engine);
                if (scale.step) draw = scale.discretise(draw);
                accepted = true;
                for (std::size_t i = 0; i < values.size() && accepted; ++i)
                    if (i != target && std::abs(values[i] - draw) > cfg.threshold) accepted = false;
                if (accepted) replacement = draw;
            }
            if (!accepted) out.redraw_fallback = true;
        }
        values[target] = replacement;
        ++out.replacements;
    }
    out.converged = max_pairwise_distance(values) <= cfg.threshold;
    return out;
}

} // namespace

DenoiseResult denoise_preprocess(const ObservationSet& obs, const FeedbackDataset* truth,
                                 const DenoiseConfig& cfg) {
    cfg.validate();
    obs.validate();
    const bool redraw = cfg.resampler == Resampler::redraw_from_model;
    if (redraw && truth == nullptr)
        throw InputError("redraw-from-model de-noising needs the generating model");

    std::map<FeedbackKey, const UncertainFeedback*> models;
    if (truth)
        for (const auto& e : truth->entries) models.emplace(e.key, &e);

    auto groups_map = obs.grouped();
    std::vector<std::pair<FeedbackKey, std::vector<RatingObservation>>> groups(
        std::make_move_iterator(groups_map.begin()), std::make_move_iterator(groups_map.end()));
    std::vector<const UncertainFeedback*> group_models(groups.size(), nullptr);
    if (redraw) {
        for (std::size_t g = 0; g < groups.size(); ++g) {
            auto it = models.find(groups[g].first);
            if (it == models.end())
                throw InputError("no generating model for " + to_string(groups[g].first));
            group_models[g] = it->second;
        }
    }

    std::vector<GroupOutcome> outcomes(groups.size());
    parallel_for(groups.size(), 0, [&](std::size_t g) {
        auto& group = groups[g].second;
        std::vector<double> values;
        values.reserve(group.size());
        for (const auto& o : group) values.push_back(o.value);
        outcomes[g] = denoise_group(values, group_models[g], obs.scale, cfg, child_seed(cfg.seed, g));
        for (std::size_t i = 0; i < group.size(); ++i) group[i].value = values[i];
    });

    DenoiseResult result;
    result.observations.scale = obs.scale;
    result.observations.observations.reserve(obs.observations.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (auto& o : groups[g].second) result.observations.observations.push_back(std::move(o));
        if (!outcomes[g].converged) result.unconverged.push_back(groups[g].first);
        if (outcomes[g].redraw_fallback) result.redraw_fallbacks.push_back(groups[g].first);
        result.replacements += outcomes[g].replacements;
    }
    return result;
}

GaussianDistribution predictor_noise_deviation(const UncertainFeedback& fb, double prediction,
                                               double tau) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw InputError("tau must be finite and >= 0");
    if (!(fb.sigma >= 0.0) || !std::isfinite(fb.mu) || !std::isfinite(prediction))
        throw InputError("invalid feedback or prediction for " + to_string(fb.key));
    return {fb.mu - prediction, fb.sigma * fb.sigma + tau * tau};
}

std::vector<double> sample_predictor_noise_deviation(const UncertainFeedback& fb,
                                                     double prediction, double tau,
                                                     std::size_t count, std::uint64_t seed) {
    predictor_noise_deviation(fb, prediction, tau);
    Engine engine(seed);
    std::normal_distribution<double> normal;
    std::vector<double> out(count);
    for (auto& d : out) {
        const double x = fb.mu + fb.sigma * normal(engine);
        const double p = prediction + tau * normal(engine);
        d = x - p;
    }
    return out;
}

void OmissionConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("omission alpha must lie in (0, 1)");
}

OmissionResult omit_insignificant(const FeedbackDataset& data, const PredictionSet& predictions,
                                  const std::map<FeedbackKey, double>& point_ratings,
                                  const OmissionConfig& cfg) {
    cfg.validate();
    std::map<FeedbackKey, double> sigmas;
    for (const auto& e : data.entries) sigmas.emplace(e.key, e.sigma);

    const double critical = two_sided_z(1.0 - cfg.alpha);
    OmissionResult r;
    std::map<FeedbackKey, double> kept;
    for (const auto& [key, rating] : point_ratings) {
        auto it = sigmas.find(key);
        if (it == sigmas.end()) throw InputError("no uncertainty model for " + to_string(key));
        const double d = rating - predictions.at(key);
        const double sigma = it->second;
        const bool significant = sigma > 0.0 ? std::abs(d) / sigma > critical : d != 0.0;
        ++r.tested;
        if (significant) {
            r.retained.push_back(key);
            kept.emplace(key, rating);
        }
    }
    if (r.tested == 0) throw InputError("no point ratings to test");
    r.retained_fraction = static_cast<double>(r.retained.size()) / static_cast<double>(r.tested);
    if (!kept.empty()) r.filtered_rmse = rmse(predictions, kept);
    return r;
}

namespace {

std::map<FeedbackKey, double> default_point_ratings(const StrategyInputs& in) {
    std::map<FeedbackKey, double> ratings;
    if (in.observations) {
        for (const auto& [key, group] : in.observations->grouped())
            ratings.emplace(key, group.front().value);
    } else {
        for (const auto& e : in.data.entries) ratings.emplace(e.key, e.mu);
    }
    return ratings;
}

} // namespace

std::vector<StrategyReport> run_strategy_comparison(const StrategyInputs& inputs,
                                                    const StrategySelection& selection) {
    inputs.data.validate();
    const auto barrier = barrier_distribution(inputs.data);
    std::vector<StrategyReport> reports;

    if (selection.denoise) {
        if (!inputs.observations)
            throw InputError("de-noising needs repeated-trial observations");
        auto original = *inputs.observations;
        original.canonicalise();
        const auto denoised = denoise_preprocess(original, &inputs.data, *selection.denoise);
        StrategyReport r{"denoise", rmse(inputs.predictions, original), {}, {}, {}, {}};
        r.score_after = rmse(inputs.predictions, denoised.observations);
        r.verdict = distinguishability_test(r.score_before, *r.score_after, barrier);
        reports.push_back(std::move(r));
    }

    if (selection.predictor_tau) {
        const double tau = *selection.predictor_tau;
        double second_moment_before = 0.0;
        double second_moment_after = 0.0;
        double variance = 0.0;
        for (const auto& e : inputs.data.entries) {
            const auto plain = predictor_noise_deviation(e, inputs.predictions.at(e.key), 0.0);
            const auto noisy = predictor_noise_deviation(e, inputs.predictions.at(e.key), tau);
            second_moment_before += plain.mean * plain.mean + plain.variance;
            second_moment_after += noisy.mean * noisy.mean + noisy.variance;
            variance += noisy.variance;
        }
        const double n = static_cast<double>(inputs.data.size());
        StrategyReport r{"predictor_noise", std::sqrt(second_moment_before / n), {}, {}, {}, {}};
        r.score_after = std::sqrt(second_moment_after / n);
        r.deviation_variance = variance / n;
        r.verdict = distinguishability_test(r.score_before, *r.score_after, barrier);
        reports.push_back(std::move(r));
    }

    if (selection.omission) {
        const auto ratings = inputs.point_ratings ? *inputs.point_ratings
                                                  : default_point_ratings(inputs);
        const auto omitted =
            omit_insignificant(inputs.data, inputs.predictions, ratings, *selection.omission);
        StrategyReport r{"omission", rmse(inputs.predictions, ratings), {}, {}, {}, {}};
        r.score_after = omitted.filtered_rmse;
        r.retained_fraction = omitted.retained_fraction;
        if (r.score_after)
            r.verdict = distinguishability_test(r.score_before, *r.score_after, barrier);
        reports.push_back(std::move(r));
    }
    return reports;
}

} // namespace uncertain_eval

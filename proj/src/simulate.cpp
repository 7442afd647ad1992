#include "uncertain_eval/simulate.hpp"

#include "uncertain_eval/error.hpp"
#include "uncertain_eval/parallel.hpp"
#include "uncertain_eval/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uncertain_eval {
namespace {

std::string padded_id(char prefix, std::size_t index, std::size_t count) {
    const std::size_t width = std::to_string(count == 0 ? 0 : count - 1).size();
    std::string digits = std::to_string(index);
    return std::string(1, prefix) + std::string(width - digits.size(), '0') + digits;
}

constexpr std::uint64_t kPairStream = 0x70616972;     // "pair"
constexpr std::uint64_t kSelectStream = 0x73656c65;   // "sele"

} // namespace

void PopulationSpec::validate() const {
    if (n_users < 1) throw InputError("n_users must be >= 1");
    if (n_items < 1) throw InputError("n_items must be >= 1");
    scale.validate();
    if (!(density > 0.0 && density <= 1.0)) throw InputError("density must lie in (0, 1]");
    if (!(sigma_lo >= 0.0) || !(sigma_lo <= sigma_hi) || !std::isfinite(sigma_hi))
        throw InputError("sigma prior requires 0 <= sigma_lo <= sigma_hi");
    if (!(bias_sd >= 0.0) || !std::isfinite(bias_sd)) throw InputError("bias_sd must be >= 0");
}

std::size_t PopulationSpec::pair_count() const {
    const double total = static_cast<double>(n_users) * static_cast<double>(n_items);
    // Guard against 0.1 * 100 = 10.000000000000002 rounding up.
    auto pairs = static_cast<std::size_t>(std::ceil(density * total - 1e-9));
    return std::min(pairs, n_users * n_items);
}

GroundTruth generate_population(const PopulationSpec& spec) {
    spec.validate();
    const std::size_t total = spec.n_users * spec.n_items;
    const std::size_t count = spec.pair_count();
    if (count == 0) throw InputError("population has zero pairs");

    // Partial Fisher-Yates over pair indices, then canonical order.
    std::vector<std::size_t> chosen(total);
    std::iota(chosen.begin(), chosen.end(), std::size_t{0});
    if (count < total) {
        Engine engine(child_seed(spec.seed, kSelectStream));
        for (std::size_t i = 0; i < count; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, total - 1);
            std::swap(chosen[i], chosen[pick(engine)]);
        }
        chosen.resize(count);
        std::sort(chosen.begin(), chosen.end());
    }

    GroundTruth truth;
    truth.dataset.scale = spec.scale;
    truth.dataset.entries.resize(count);
    PredictionSet predictions;
    const std::uint64_t pair_seed = child_seed(spec.seed, kPairStream);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t index = chosen[i];
        Engine engine(child_seed(pair_seed, index));
        std::uniform_real_distribution<double> mu_prior(spec.scale.min, spec.scale.max);
        std::uniform_real_distribution<double> sigma_prior(spec.sigma_lo, spec.sigma_hi);
        std::normal_distribution<double> bias(0.0, 1.0);

        auto& e = truth.dataset.entries[i];
        e.key = {padded_id('u', index / spec.n_items, spec.n_users),
                 padded_id('i', index % spec.n_items, spec.n_items)};
        e.mu = mu_prior(engine);
        e.sigma = spec.sigma_lo == spec.sigma_hi ? spec.sigma_lo : sigma_prior(engine);
        predictions.entries.emplace(e.key, e.mu + spec.bias_sd * bias(engine));
    }
    truth.predictions = std::move(predictions);
    return truth;
}

ObservationSet draw_trials(const GroundTruth& truth, std::size_t k, bool discretise,
                           std::uint64_t seed) {
    if (k < 1) throw InputError("trials per pair must be >= 1");
    truth.dataset.validate();
    const auto& entries = truth.dataset.entries;

    ObservationSet obs;
    obs.scale = truth.dataset.scale;
    obs.observations.resize(entries.size() * k);
    parallel_for(entries.size(), 0, [&](std::size_t i) {
        const auto& e = entries[i];
        Engine engine(child_seed(seed, i));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t t = 0; t < k; ++t) {
            double value = e.mu + e.sigma * normal(engine);
            if (discretise) value = obs.scale.discretise(value);
            obs.observations[i * k + t] = {e.key, t, value};
        }
    });
    if (!discretise) {
        // Continuous draws are unbounded; widen the scale to cover them.
        for (const auto& o : obs.observations) {
            obs.scale.min = std::min(obs.scale.min, o.value);
            obs.scale.max = std::max(obs.scale.max, o.value);
        }
        obs.scale.step.reset();
    }
    obs.canonicalise();
    return obs;
}

std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width) {
    if (!(bin_width > 0.0) || !std::isfinite(bin_width))
        throw InputError("histogram bin width must be positive");
    if (values.empty()) throw InputError("histogram of an empty set of observations");
    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const auto bins_needed = static_cast<std::size_t>(std::floor((*hi_it - lo) / bin_width)) + 1;

    std::vector<HistogramBin> bins(bins_needed);
    for (std::size_t b = 0; b < bins_needed; ++b)
        bins[b] = {lo + static_cast<double>(b) * bin_width,
                   lo + static_cast<double>(b + 1) * bin_width, 0};
    for (double v : values) {
        auto b = static_cast<std::size_t>(std::floor((v - lo) / bin_width));
        bins[std::min(b, bins_needed - 1)].count++;
    }
    return bins;
}

double fit_roundtrip_check(const PopulationSpec& spec, std::size_t k, std::uint64_t trial_seed) {
    if (k < 2) throw InputError("roundtrip check needs at least two trials per pair");
    const auto truth = generate_population(spec);
    const auto obs = draw_trials(truth, k, false, trial_seed);
    const auto fitted = fit_uncertainty(obs, SigmaFallback::zero());

    std::map<FeedbackKey, double> fitted_sigma;
    for (const auto& e : fitted.entries) fitted_sigma.emplace(e.key, e.sigma);
    double worst = 0.0;
    for (const auto& e : truth.dataset.entries) {
        if (e.sigma < 0.1) continue;
        worst = std::max(worst, std::abs(fitted_sigma.at(e.key) - e.sigma) / e.sigma);
    }
    return worst;
}

} // namespace uncertain_eval

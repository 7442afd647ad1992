#include "uncertain_eval/metrics.hpp"

#include "uncertain_eval/barrier.hpp"
#include "uncertain_eval/error.hpp"
#include "uncertain_eval/parallel.hpp"
#include "uncertain_eval/random.hpp"

#include <cmath>

namespace uncertain_eval {

void McConfig::validate() const {
    if (sample_count < kMinMonteCarloSamples)
        throw InputError("Monte Carlo sample count must be at least " +
                         std::to_string(kMinMonteCarloSamples));
    if (predictor_tau && (!(*predictor_tau >= 0.0) || !std::isfinite(*predictor_tau)))
        throw InputError("predictor tau must be finite and >= 0");
}

double rmse(const PredictionSet& predictions, const std::map<FeedbackKey, double>& ratings) {
    if (ratings.empty()) throw InputError("RMSE over an empty set of ratings");
    double sum = 0.0;
    for (const auto& [key, value] : ratings) {
        const double d = value - predictions.at(key);
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(ratings.size()));
}

double rmse(const PredictionSet& predictions, const ObservationSet& obs) {
    if (obs.observations.empty()) throw InputError("RMSE over an empty observation set");
    double sum = 0.0;
    for (const auto& o : obs.observations) {
        const double d = o.value - predictions.at(o.key);
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(obs.observations.size()));
}

MetricScoreDistribution rmse_distribution(const FeedbackDataset& data,
                                          const PredictionSet& predictions, const McConfig& cfg) {
    cfg.validate();
    data.validate();

    struct Pair {
        double mu, sigma, prediction;
    };
    std::vector<Pair> pairs;
    pairs.reserve(data.size());
    for (const auto& e : data.entries) pairs.push_back({e.mu, e.sigma, predictions.at(e.key)});
    const double tau = cfg.predictor_tau.value_or(0.0);
    const bool noisy_prediction = cfg.predictor_tau.has_value();
    const double n = static_cast<double>(pairs.size());

    MetricScoreDistribution out;
    out.sample_count = cfg.sample_count;
    out.seed = cfg.seed;
    out.samples.resize(cfg.sample_count);

    const std::size_t chunks = (cfg.sample_count + kMonteCarloChunk - 1) / kMonteCarloChunk;
    std::vector<double> chunk_sums(chunks, 0.0);
    parallel_for(chunks, cfg.threads, [&](std::size_t chunk) {
        Engine engine(child_seed(cfg.seed, chunk));
        std::normal_distribution<double> normal;
        const std::size_t begin = chunk * kMonteCarloChunk;
        const std::size_t end = std::min(begin + kMonteCarloChunk, cfg.sample_count);
        double chunk_sum = 0.0;
        for (std::size_t s = begin; s < end; ++s) {
            double sum_sq = 0.0;
            for (const auto& p : pairs) {
                const double x = p.mu + p.sigma * normal(engine);
                const double pred = noisy_prediction ? p.prediction + tau * normal(engine)
                                                     : p.prediction;
                const double d = x - pred;
                sum_sq += d * d;
            }
            out.samples[s] = std::sqrt(sum_sq / n);
            chunk_sum += out.samples[s];
        }
        chunk_sums[chunk] = chunk_sum;
    });

    double total = 0.0;
    for (double s : chunk_sums) total += s;
    out.mean = total / static_cast<double>(cfg.sample_count);
    double ss = 0.0;
    for (double s : out.samples) ss += (s - out.mean) * (s - out.mean);
    out.variance = ss / static_cast<double>(cfg.sample_count - 1);
    return out;
}

double variance_match_check(const FeedbackDataset& data, const McConfig& cfg) {
    const auto barrier = barrier_distribution(data);
    if (!(barrier.gaussian.variance > 0.0))
        throw InputError("barrier variance is zero; relative deviation undefined");
    PredictionSet perfect;
    for (const auto& e : data.entries) perfect.entries.emplace(e.key, e.mu);
    McConfig plain = cfg;
    plain.predictor_tau.reset();
    const auto mc = rmse_distribution(data, perfect, plain);
    return std::abs(mc.variance - barrier.gaussian.variance) / barrier.gaussian.variance;
}

} // namespace uncertain_eval

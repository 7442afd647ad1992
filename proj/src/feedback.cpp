#include "uncertain_eval/feedback.hpp"

#include "uncertain_eval/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace uncertain_eval {

void RatingScale::validate() const {
    if (!std::isfinite(min) || !std::isfinite(max) || !(min < max))
        throw InputError("rating scale requires finite min < max");
    if (step) {
        if (!(*step > 0.0) || !std::isfinite(*step))
            throw InputError("rating scale step must be positive");
        const double steps = (max - min) / *step;
        if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
            throw InputError("rating scale range must be an integer multiple of the step");
    }
}

double RatingScale::discretise(double value) const {
    if (step) value = min + std::round((value - min) / *step) * *step;
    return std::clamp(value, min, max);
}

std::string to_string(const FeedbackKey& key) {
    return "(" + key.user_id + ", " + key.item_id + ")";
}

void ObservationSet::validate() const {
    scale.validate();
    std::map<FeedbackKey, std::set<std::uint64_t>> seen;
    for (const auto& o : observations) {
        if (!std::isfinite(o.value))
            throw InputError("non-finite rating for " + to_string(o.key));
        if (!scale.contains(o.value))
            throw InputError("rating " + std::to_string(o.value) + " for " + to_string(o.key) +
                             " lies outside the rating scale");
        if (!seen[o.key].insert(o.trial).second)
            throw InputError("duplicate trial " + std::to_string(o.trial) + " for " +
                             to_string(o.key));
    }
}

std::map<FeedbackKey, std::vector<RatingObservation>> ObservationSet::grouped() const {
    std::map<FeedbackKey, std::vector<RatingObservation>> groups;
    for (const auto& o : observations) groups[o.key].push_back(o);
    for (auto& [key, group] : groups)
        std::sort(group.begin(), group.end(),
                  [](const auto& a, const auto& b) { return a.trial < b.trial; });
    return groups;
}

void ObservationSet::canonicalise() {
    std::sort(observations.begin(), observations.end(), [](const auto& a, const auto& b) {
        if (a.key != b.key) return a.key < b.key;
        return a.trial < b.trial;
    });
}

void FeedbackDataset::validate() const {
    if (entries.empty()) throw InputError("feedback dataset is empty");
    std::set<FeedbackKey> keys;
    for (const auto& e : entries) {
        if (!std::isfinite(e.mu)) throw InputError("non-finite mu for " + to_string(e.key));
        if (!(e.sigma >= 0.0) || !std::isfinite(e.sigma))
            throw InputError("sigma must be finite and >= 0 for " + to_string(e.key));
        if (!keys.insert(e.key).second)
            throw InputError("duplicate feedback key " + to_string(e.key));
    }
}

double PredictionSet::at(const FeedbackKey& key) const {
    auto it = entries.find(key);
    if (it == entries.end()) throw InputError("missing prediction for " + to_string(key));
    return it->second;
}

SigmaFallback SigmaFallback::parse(const std::string& text) {
    if (text == "zero") return zero();
    if (text == "pooled") return pooled();
    constexpr std::string_view prefix = "fixed:";
    if (text.starts_with(prefix)) {
        const std::string number = text.substr(prefix.size());
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
        if (ec == std::errc() && ptr == number.data() + number.size() && std::isfinite(value) &&
            value >= 0.0)
            return fixed(value);
    }
    throw InputError("invalid sigma fallback '" + text + "' (expected zero, pooled or fixed:V)");
}

SampleMoments sample_moments(std::span<const double> values) {
    if (values.empty()) throw InputError("sample moments of an empty set");
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

FeedbackDataset fit_uncertainty(const ObservationSet& obs, SigmaFallback fallback) {
    if (obs.observations.empty()) throw InputError("observation set is empty");
    obs.validate();

    FeedbackDataset data{obs.scale, {}};
    std::vector<std::size_t> single_trial;
    std::vector<double> values;
    for (const auto& [key, group] : obs.grouped()) {
        values.clear();
        for (const auto& o : group) values.push_back(o.value);
        const auto m = sample_moments(values);
        if (values.size() == 1) single_trial.push_back(data.entries.size());
        data.entries.push_back({key, m.mean, m.stddev, values.size()});
    }

    if (!single_trial.empty()) {
        double sigma = 0.0;
        switch (fallback.kind) {
        case SigmaFallback::Kind::zero: break;
        case SigmaFallback::Kind::fixed: sigma = fallback.value; break;
        case SigmaFallback::Kind::pooled: sigma = pooled_sigma(data); break;
        }
        for (auto i : single_trial) data.entries[i].sigma = sigma;
    }
    return data;
}

double pooled_sigma(const FeedbackDataset& data) {
    double sum_sq = 0.0;
    std::size_t n = 0;
    for (const auto& e : data.entries) {
        if (e.trial_count < 2) continue;
        sum_sq += e.sigma * e.sigma;
        ++n;
    }
    if (n == 0) throw UnavailableError("pooled sigma needs at least one pair with two or more trials");
    return std::sqrt(sum_sq / static_cast<double>(n));
}

} // namespace uncertain_eval

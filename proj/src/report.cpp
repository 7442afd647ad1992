#include "uncertain_eval/report.hpp"

#include <cmath>

namespace uncertain_eval {
namespace {

nlohmann::ordered_json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

template <typename T>
nlohmann::ordered_json nullable(const std::optional<T>& v) {
    if (!v) return nullptr;
    return number(*v);
}

} // namespace

nlohmann::ordered_json to_json(const DistinguishabilityResult& r) {
    nlohmann::ordered_json j;
    j["s1"] = number(r.s1);
    j["s2"] = number(r.s2);
    j["barrier_mean"] = number(r.barrier_mean);
    j["barrier_variance"] = number(r.barrier_variance);
    j["shift_mean"] = number(r.shift_mean);
    j["ci_low"] = number(r.ci_low);
    j["ci_high"] = number(r.ci_high);
    j["distinguishable"] = r.distinguishable;
    j["z_gap"] = number(r.z_gap);
    return j;
}

nlohmann::ordered_json to_json(const StrategyReport& r) {
    nlohmann::ordered_json j;
    j["strategy"] = r.strategy;
    j["score_before"] = number(r.score_before);
    j["score_after"] = nullable(r.score_after);
    j["retained_fraction"] = nullable(r.retained_fraction);
    j["deviation_variance"] = nullable(r.deviation_variance);
    if (r.verdict) {
        j["distinguishable"] = r.verdict->distinguishable;
        j["z_gap"] = number(r.verdict->z_gap);
    } else {
        j["distinguishable"] = nullptr;
        j["z_gap"] = nullptr;
    }
    return j;
}

nlohmann::ordered_json summary_json(const MetricScoreDistribution& d) {
    nlohmann::ordered_json j;
    j["mean"] = number(d.mean);
    j["variance"] = number(d.variance);
    j["sample_count"] = d.sample_count;
    j["seed"] = d.seed;
    return j;
}

} // namespace uncertain_eval

#pragma once

#include "uncertain_eval/barrier.hpp"
#include "uncertain_eval/metrics.hpp"
#include "uncertain_eval/strategies.hpp"

#include <json.hpp>

namespace uncertain_eval {

// Doubles are written shortest-round-trip; non-finite values become null.
nlohmann::ordered_json to_json(const DistinguishabilityResult& r);
nlohmann::ordered_json to_json(const StrategyReport& r);
nlohmann::ordered_json summary_json(const MetricScoreDistribution& d);

} // namespace uncertain_eval

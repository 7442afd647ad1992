#include "uncertain_eval/barrier.hpp"

#include "uncertain_eval/error.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace uncertain_eval {

double GaussianDistribution::stddev() const { return std::sqrt(variance); }

BarrierDistribution barrier_distribution(std::span<const double> sigmas) {
    if (sigmas.empty()) throw InputError("barrier distribution of an empty dataset");
    BarrierDistribution b;
    b.n = sigmas.size();
    for (double s : sigmas) {
        if (!(s >= 0.0) || !std::isfinite(s)) throw InputError("sigma must be finite and >= 0");
        const double s2 = s * s;
        b.sum_sigma2 += s2;
        b.sum_sigma4 += s2 * s2;
    }
    const double n = static_cast<double>(b.n);
    b.gaussian.mean = std::sqrt(b.sum_sigma2 / n);
    b.gaussian.variance = b.sum_sigma2 > 0.0 ? b.sum_sigma4 / b.sum_sigma2 / (2.0 * n) : 0.0;
    return b;
}

BarrierDistribution barrier_distribution(const FeedbackDataset& data) {
    std::vector<double> sigmas;
    sigmas.reserve(data.size());
    for (const auto& e : data.entries) sigmas.push_back(e.sigma);
    return barrier_distribution(sigmas);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double two_sided_z(double level) {
    if (!(level > 0.0 && level < 1.0)) throw InputError("confidence level must lie in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + level / 2.0);
}

Interval confidence_interval(const GaussianDistribution& g, double level) {
    const double z = two_sided_z(level);
    if (!(g.variance >= 0.0)) throw InputError("variance must be >= 0");
    const double half = z * g.stddev();
    return {g.mean - half, g.mean + half};
}

DistinguishabilityResult distinguishability_test(double s1, double s2,
                                                 const BarrierDistribution& barrier) {
    if (!std::isfinite(s1) || !std::isfinite(s2)) throw InputError("scores must be finite");
    const double z = two_sided_z(0.95);
    const double sd = barrier.gaussian.stddev();
    const double gap = std::abs(s1 - s2);

    DistinguishabilityResult r;
    r.s1 = s1;
    r.s2 = s2;
    r.barrier_mean = barrier.gaussian.mean;
    r.barrier_variance = barrier.gaussian.variance;
    r.shift_mean = 0.5 * (s1 + s2);
    r.ci_low = r.shift_mean - z * sd;
    r.ci_high = r.shift_mean + z * sd;
    r.distinguishable = gap > 2.0 * z * sd;
    if (sd > 0.0)
        r.z_gap = gap / (2.0 * sd);
    else
        r.z_gap = gap > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return r;
}

double indistinguishable_std_threshold(double s1, double s2) {
    return std::abs(s1 - s2) / (2.0 * two_sided_z(0.95));
}

RelationResult relation_test(const GaussianDistribution& s1, const GaussianDistribution& s2,
                             double alpha) {
    if (!(s1.variance >= 0.0) || !(s2.variance >= 0.0))
        throw InputError("variances must be >= 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    const double spread = std::sqrt(s1.variance + s2.variance);
    RelationResult r;
    if (spread > 0.0)
        r.p_opposite = normal_cdf((s1.mean - s2.mean) / spread);
    else if (s1.mean == s2.mean)
        r.p_opposite = 0.5;
    else
        r.p_opposite = s1.mean > s2.mean ? 1.0 : 0.0;
    r.holds = r.p_opposite < alpha;
    return r;
}

} // namespace uncertain_eval

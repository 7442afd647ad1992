#include "oracles.hpp"

#include "uncertain_eval/barrier.hpp"
#include "uncertain_eval/error.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace uncertain_eval;

namespace {

BarrierDistribution barrier_with_variance(double variance) {
    BarrierDistribution b;
    b.gaussian = {1.0, variance};
    b.n = 1;
    return b;
}

} // namespace

TEST_CASE("barrier_distribution closed form") {
    SUBCASE("uniform sigma") {
        std::vector<double> sigmas(2000, 1.0);
        auto b = barrier_distribution(sigmas);
        CHECK(b.gaussian.mean == 1.0);
        CHECK(b.gaussian.variance == doctest::Approx(0.00025).epsilon(1e-12));
        CHECK(b.n == 2000);
        CHECK(b.sum_sigma2 == 2000.0);
    }
    SUBCASE("all zero") {
        std::vector<double> sigmas(10, 0.0);
        auto b = barrier_distribution(sigmas);
        CHECK(b.gaussian.mean == 0.0);
        CHECK(b.gaussian.variance == 0.0);
    }
    SUBCASE("two sigmas") {
        std::vector<double> sigmas{0.5, 1.5};
        auto b = barrier_distribution(sigmas);
        CHECK(b.gaussian.mean == doctest::Approx(1.118034).epsilon(1e-6));
        CHECK(b.gaussian.variance == doctest::Approx(0.5125).epsilon(1e-12));
    }
    SUBCASE("from a dataset") {
        FeedbackDataset d;
        d.entries = {{{"a", "x"}, 3.0, 0.5, 5}, {{"b", "x"}, 2.0, 1.5, 5}};
        CHECK(barrier_distribution(d).gaussian.variance == doctest::Approx(0.5125));
    }
    CHECK_THROWS_AS(barrier_distribution(std::vector<double>{}), InputError);
    CHECK_THROWS_AS(barrier_distribution(std::vector<double>{-0.1}), InputError);
}

TEST_CASE("barrier mean squared times N recovers the sum of sigma^2") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> sigma(0.0, 2.0);
    std::uniform_int_distribution<int> size(1, 400);
    for (int round = 0; round < 300; ++round) {
        std::vector<double> s(static_cast<std::size_t>(size(rng)));
        double sum2 = 0.0;
        for (auto& x : s) {
            x = sigma(rng);
            sum2 += x * x;
        }
        auto b = barrier_distribution(s);
        CHECK(b.gaussian.mean * b.gaussian.mean * static_cast<double>(s.size()) ==
              doctest::Approx(sum2).epsilon(1e-12));
    }
}

TEST_CASE("barrier matches a Monte Carlo oracle at moderate N") {
    std::vector<double> sigmas(1000);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.3, 1.2);
    for (auto& s : sigmas) s = u(rng);
    const auto b = barrier_distribution(sigmas);
    const auto m = oracle::moments(oracle::barrier_samples(sigmas, 20000, 99));
    CHECK(std::abs(m.mean - b.gaussian.mean) / b.gaussian.mean < 0.01);
    CHECK(std::abs(std::sqrt(m.variance) - b.gaussian.stddev()) / b.gaussian.stddev() < 0.05);
}

TEST_CASE("two-sided z matches a bisection oracle") {
    CHECK(two_sided_z(0.95) == doctest::Approx(oracle::z_two_sided(0.95)).epsilon(1e-12));
    CHECK(two_sided_z(0.95) == doctest::Approx(1.959964).epsilon(1e-6));
    for (double level : {0.5, 0.8, 0.9, 0.99, 0.999})
        CHECK(two_sided_z(level) == doctest::Approx(oracle::z_two_sided(level)).epsilon(1e-10));
    CHECK_THROWS_AS(two_sided_z(0.0), InputError);
    CHECK_THROWS_AS(two_sided_z(1.0), InputError);
}

TEST_CASE("confidence_interval") {
    auto unit = confidence_interval({0.0, 1.0}, 0.95);
    CHECK(unit.low == doctest::Approx(-1.959964).epsilon(1e-6));
    CHECK(unit.high == doctest::Approx(1.959964).epsilon(1e-6));

    for (double level : {0.5, 0.95, 0.999}) {
        auto point = confidence_interval({5.0, 0.0}, level);
        CHECK(point.low == 5.0);
        CHECK(point.high == 5.0);
    }

    auto barrier = confidence_interval({1.0, 0.00025}, 0.95);
    CHECK(barrier.low == doctest::Approx(0.969009).epsilon(1e-6));
    CHECK(barrier.high == doctest::Approx(1.030991).epsilon(1e-6));

    CHECK_THROWS_AS(confidence_interval({0.0, 1.0}, 1.5), InputError);
    CHECK_THROWS_AS(confidence_interval({0.0, 1.0}, 0.0), InputError);
}

TEST_CASE("distinguishability_test examples") {
    const auto b = barrier_with_variance(0.00025);

    auto same = distinguishability_test(0.87, 0.87, b);
    CHECK_FALSE(same.distinguishable);
    CHECK(same.z_gap == 0.0);

    auto close = distinguishability_test(0.86, 0.90, b);
    CHECK_FALSE(close.distinguishable);
    CHECK(close.shift_mean == doctest::Approx(0.88));
    CHECK(close.ci_low <= close.s1);
    CHECK(close.ci_high >= close.s2);

    auto far = distinguishability_test(0.80, 0.90, b);
    CHECK(far.distinguishable);
    CHECK(far.ci_low > far.s1);
    CHECK(far.z_gap == doctest::Approx(0.1 / (2.0 * std::sqrt(0.00025))));
}

TEST_CASE("published kNN vs SVD scores against the derived threshold") {
    const double threshold = indistinguishable_std_threshold(0.8647, 0.8800);
    CHECK(threshold == doctest::Approx(0.0153 / 3.919928).epsilon(1e-6));
    for (double sd : {threshold, 0.004, 0.005, 0.01, 0.1})
        CHECK_FALSE(distinguishability_test(0.8647, 0.8800, barrier_with_variance(sd * sd))
                        .distinguishable);
    for (double sd : {0.0, 0.001, 0.0039})
        CHECK(distinguishability_test(0.8647, 0.8800, barrier_with_variance(sd * sd))
                  .distinguishable);
}

TEST_CASE("degenerate barrier means point comparison") {
    const auto b = barrier_with_variance(0.0);
    auto diff = distinguishability_test(0.8, 0.9, b);
    CHECK(diff.distinguishable);
    CHECK(std::isinf(diff.z_gap));
    auto same = distinguishability_test(0.8, 0.8, b);
    CHECK_FALSE(same.distinguishable);
    CHECK(same.z_gap == 0.0);
    CHECK_THROWS_AS(distinguishability_test(NAN, 0.8, b), InputError);
}

TEST_CASE("distinguishability invariants") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> score(0.5, 1.5);
    std::uniform_real_distribution<double> log_sd(-5.0, -1.0);
    std::uniform_real_distribution<double> shift(-3.0, 3.0);
    const double z = oracle::z_two_sided(0.95);

    for (int round = 0; round < 2000; ++round) {
        const double s1 = score(rng), s2 = score(rng);
        const double sd = std::pow(10.0, log_sd(rng));
        const auto b = barrier_with_variance(sd * sd);
        const auto r = distinguishability_test(s1, s2, b);
        CAPTURE(s1);
        CAPTURE(s2);
        CAPTURE(sd);

        CHECK(r.ci_low <= r.shift_mean);
        CHECK(r.shift_mean <= r.ci_high);
        CHECK(r.distinguishable == (std::abs(s1 - s2) > 2.0 * z * sd));
        CHECK(distinguishability_test(s2, s1, b).distinguishable == r.distinguishable);

        // translation keeps the verdict away from the exact boundary
        if (std::abs(r.z_gap - z) > 1e-9) {
            const double c = shift(rng);
            CHECK(distinguishability_test(s1 + c, s2 + c, b).distinguishable == r.distinguishable);
        }

        // more barrier variance never makes scores distinguishable
        if (!r.distinguishable)
            CHECK_FALSE(distinguishability_test(s1, s2, barrier_with_variance(4.0 * sd * sd))
                            .distinguishable);
    }
}

TEST_CASE("relation_test") {
    auto same = relation_test({0.87, 0.00025}, {0.87, 0.00025});
    CHECK(same.p_opposite == doctest::Approx(0.5));
    CHECK_FALSE(same.holds);

    auto better = relation_test({0.86, 0.00025}, {0.90, 0.00025});
    CHECK(better.p_opposite == doctest::Approx(oracle::phi(-1.788854)).epsilon(1e-6));
    CHECK(better.p_opposite == doctest::Approx(0.036819).epsilon(1e-5));
    CHECK(better.holds);

    auto worse = relation_test({0.90, 0.00025}, {0.86, 0.00025});
    CHECK(worse.p_opposite == doctest::Approx(0.963181).epsilon(1e-6));
    CHECK_FALSE(worse.holds);

    auto points = relation_test({0.5, 0.0}, {0.5, 0.0});
    CHECK(points.p_opposite == 0.5);
    CHECK_FALSE(points.holds);
    CHECK(relation_test({0.4, 0.0}, {0.5, 0.0}).holds);
    CHECK_FALSE(relation_test({0.6, 0.0}, {0.5, 0.0}).holds);

    CHECK_THROWS_AS(relation_test({0.0, -1.0}, {0.0, 1.0}), InputError);
}

TEST_CASE("barrier test is stricter than the relation test") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> score(0.7, 1.0);
    std::uniform_real_distribution<double> log_sd(-4.0, -1.5);
    for (int round = 0; round < 2000; ++round) {
        const double a = score(rng), b = score(rng);
        const double sd = std::pow(10.0, log_sd(rng));
        const auto verdict = distinguishability_test(a, b, barrier_with_variance(sd * sd));
        if (!verdict.distinguishable) continue;
        const double lower = std::min(a, b), upper = std::max(a, b);
        CHECK(relation_test({lower, sd * sd}, {upper, sd * sd}).holds);
    }
}

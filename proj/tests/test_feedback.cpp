#include "uncertain_eval/error.hpp"
#include "uncertain_eval/feedback.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace uncertain_eval;

namespace {

ObservationSet group(const std::vector<double>& values, RatingScale scale = {0.0, 10.0, {}}) {
    ObservationSet obs{scale, {}};
    for (std::size_t t = 0; t < values.size(); ++t)
        obs.observations.push_back({{"u1", "i1"}, t, values[t]});
    return obs;
}

UncertainFeedback fit_one(const std::vector<double>& values) {
    auto data = fit_uncertainty(group(values), SigmaFallback::zero());
    REQUIRE(data.size() == 1);
    return data.entries.front();
}

} // namespace

TEST_CASE("fit_uncertainty per-group mean and Bessel-corrected std") {
    SUBCASE("zero spread") {
        auto e = fit_one({3, 3, 3, 3, 3});
        CHECK(e.mu == 3.0);
        CHECK(e.sigma == 0.0);
    }
    SUBCASE("two trials") {
        auto e = fit_one({2, 4});
        CHECK(e.mu == doctest::Approx(3.0));
        CHECK(e.sigma == doctest::Approx(1.414214).epsilon(1e-6));
    }
    SUBCASE("five trials") {
        auto e = fit_one({4, 5, 4, 3, 4});
        CHECK(e.mu == doctest::Approx(4.0));
        CHECK(e.sigma == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
        CHECK(e.trial_count == 5);
    }
}

TEST_CASE("fit_uncertainty groups by key and keeps one entry per pair") {
    ObservationSet obs{{1, 5, 1.0}, {}};
    for (std::uint64_t t = 0; t < 5; ++t) {
        obs.observations.push_back({{"alice", "trailer"}, t, 3.0 + (t % 2)});
        obs.observations.push_back({{"bob", "trailer"}, t, 2.0});
    }
    auto data = fit_uncertainty(obs);
    REQUIRE(data.size() == 2);
    CHECK(data.entries[0].key.user_id == "alice");
    CHECK(data.entries[1].sigma == 0.0);
}

TEST_CASE("fit_uncertainty errors") {
    CHECK_THROWS_AS(fit_uncertainty(ObservationSet{{1, 5, {}}, {}}), InputError);
    CHECK_THROWS_AS(fit_uncertainty(group({1.0, NAN})), InputError);
    CHECK_THROWS_AS(fit_uncertainty(group({1.0, 12.0})), InputError); // off scale
    auto dup = group({1.0, 2.0});
    dup.observations[1].trial = 0;
    CHECK_THROWS_AS(fit_uncertainty(dup), InputError);
}

TEST_CASE("single-trial fallback policies") {
    ObservationSet obs{{0, 10, {}}, {}};
    obs.observations = {{{"a", "x"}, 0, 2.0}, {{"a", "x"}, 1, 4.0},   // sigma sqrt(2)
                        {{"b", "x"}, 0, 1.0}, {{"b", "x"}, 1, 1.0},   // sigma 0
                        {{"c", "x"}, 0, 7.0}};                          // single trial
    auto sigma_of_c = [&](SigmaFallback f) { return fit_uncertainty(obs, f).entries[2].sigma; };
    CHECK(sigma_of_c(SigmaFallback::zero()) == 0.0);
    CHECK(sigma_of_c(SigmaFallback::fixed(0.7)) == 0.7);
    // pooled over a and b: sqrt((2 + 0) / 2) = 1
    CHECK(sigma_of_c(SigmaFallback::pooled()) == doctest::Approx(1.0));

    ObservationSet singles{{0, 10, {}}, {{{"a", "x"}, 0, 2.0}, {{"b", "x"}, 0, 3.0}}};
    CHECK_THROWS_AS(fit_uncertainty(singles, SigmaFallback::pooled()), UnavailableError);
    CHECK(fit_uncertainty(singles, SigmaFallback::zero()).entries[1].sigma == 0.0);
}

TEST_CASE("pooled_sigma") {
    auto dataset = [](std::vector<double> sigmas) {
        FeedbackDataset d;
        for (std::size_t i = 0; i < sigmas.size(); ++i)
            d.entries.push_back({{"u", std::to_string(i)}, 3.0, sigmas[i], 5});
        return d;
    };
    CHECK(pooled_sigma(dataset({0, 0, 0})) == 0.0);
    CHECK(pooled_sigma(dataset({1, 1})) == doctest::Approx(1.0));
    CHECK(pooled_sigma(dataset({0.5, 1.5})) == doctest::Approx(1.118034).epsilon(1e-6));

    auto single = dataset({0.4});
    single.entries[0].trial_count = 1;
    CHECK_THROWS_AS(pooled_sigma(single), UnavailableError);
}

TEST_CASE("SigmaFallback parsing") {
    CHECK(SigmaFallback::parse("zero").kind == SigmaFallback::Kind::zero);
    CHECK(SigmaFallback::parse("pooled").kind == SigmaFallback::Kind::pooled);
    auto f = SigmaFallback::parse("fixed:0.25");
    CHECK(f.kind == SigmaFallback::Kind::fixed);
    CHECK(f.value == 0.25);
    CHECK_THROWS_AS(SigmaFallback::parse("fixed:"), InputError);
    CHECK_THROWS_AS(SigmaFallback::parse("fixed:-1"), InputError);
    CHECK_THROWS_AS(SigmaFallback::parse("median"), InputError);
}

TEST_CASE("RatingScale validation and discretisation") {
    CHECK_NOTHROW(RatingScale{1, 5, 1.0}.validate());
    CHECK_NOTHROW(RatingScale{0, 1, {}}.validate());
    CHECK_THROWS_AS((RatingScale{5, 1, {}}.validate()), InputError);
    CHECK_THROWS_AS((RatingScale{1, 5, 0.0}.validate()), InputError);
    CHECK_THROWS_AS((RatingScale{1, 5, 1.5}.validate()), InputError);

    RatingScale stars{1, 5, 0.5};
    CHECK(stars.discretise(3.3) == 3.5);
    CHECK(stars.discretise(7.0) == 5.0);
    CHECK(stars.discretise(-2.0) == 1.0);
    CHECK(RatingScale{1, 5, {}}.discretise(3.3) == 3.3);
}

// Property-style checks over random groups.
TEST_CASE("fit_uncertainty invariants") {
    std::mt19937_64 rng(20241019);
    std::uniform_real_distribution<double> value(0.0, 10.0);
    std::uniform_int_distribution<int> size(1, 12);
    std::uniform_real_distribution<double> shift(-50.0, 50.0);

    for (int round = 0; round < 500; ++round) {
        std::vector<double> v(static_cast<std::size_t>(size(rng)));
        for (auto& x : v) x = value(rng);
        const auto base = fit_one(v);
        CAPTURE(round);

        // mu within the observed range
        auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        CHECK(base.mu >= *lo - 1e-12);
        CHECK(base.mu <= *hi + 1e-12);

        // permutation invariance
        auto shuffled = v;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto perm = fit_one(shuffled);
        CHECK(perm.mu == doctest::Approx(base.mu).epsilon(1e-12));
        CHECK(perm.sigma == doctest::Approx(base.sigma).epsilon(1e-12));

        // translation: mu shifts, sigma unchanged
        const double c = shift(rng);
        auto moved = v;
        for (auto& x : moved) x += c;
        ObservationSet wide = group(moved, {-100.0, 100.0, {}});
        const auto t = fit_uncertainty(wide, SigmaFallback::zero()).entries[0];
        CHECK(t.mu == doctest::Approx(base.mu + c).epsilon(1e-10));
        CHECK(t.sigma == doctest::Approx(base.sigma).epsilon(1e-9));

        // identical copies of a group fit identically
        if (v.size() >= 2) {
            ObservationSet copies{{0.0, 10.0, {}}, {}};
            for (int k = 0; k < 3; ++k)
                for (std::size_t i = 0; i < v.size(); ++i)
                    copies.observations.push_back({{"u", "i" + std::to_string(k)}, i, v[i]});
            for (const auto& e : fit_uncertainty(copies, SigmaFallback::zero()).entries) {
                CHECK(e.mu == base.mu);
                CHECK(e.sigma == base.sigma);
            }
        }
    }
}

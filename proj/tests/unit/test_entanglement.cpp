#include <doctest.h>

#include <cmath>

#include "trapoptics/entanglement.hpp"
#include "trapoptics/microcavity.hpp"

using namespace trapoptics;

TEST_CASE("capture improvement factor") {
    CHECK(improvement_factor(0.004, 0.8) == 40000.0);
    CHECK(improvement_factor(0.004, capture_fraction(2.0)) == doctest::Approx(4e4).epsilon(1e-14));
    CHECK(improvement_factor(0.5, 0.5) == 1.0);
    CHECK_THROWS_AS(improvement_factor(0.0, 0.5), DomainError);
    CHECK_THROWS_AS(improvement_factor(0.5, 1.5), DomainError);
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double f = improvement_factor(0.01, i / 100.0);
        CHECK(f > prev);
        prev = f;
    }
}

TEST_CASE("scaled success probability") {
    const auto s = scaled_success(1e-8, 0.004, 0.8);
    CHECK(s.p == doctest::Approx(4e-4).epsilon(1e-14));
    CHECK_FALSE(s.saturated);
    const auto sat = scaled_success(1e-3, 0.004, 0.8);
    CHECK(sat.p == 1.0);
    CHECK(sat.saturated);
    CHECK(sat.factor == 40000.0);
    CHECK_THROWS_AS(scaled_success(-0.1, 0.004, 0.8), DomainError);
}

TEST_CASE("baseline from the observed wait") {
    const auto b = EntanglementBaseline::from_wait(1e-8, 8.5 * 60.0);
    CHECK(b.event_rate == doctest::Approx(1.0 / 510.0));
    CHECK(b.event_rate > 1.9e-3);
    CHECK(b.event_rate < 2.0e-3);
    CHECK(b.implied_attempt_rate == doctest::Approx(196078.4).epsilon(1e-6));
    CHECK(mean_wait(b.p_success, b.implied_attempt_rate) == doctest::Approx(510.0));

    // Same attempt rate with the improved capture fraction.
    const auto s = scaled_success(b.p_success, 0.004, 0.8);
    CHECK(mean_wait(s.p, b.implied_attempt_rate) == doctest::Approx(510.0 / 4e4));
    CHECK_THROWS_AS(EntanglementBaseline::from_wait(0.0, 510.0), DomainError);
    CHECK_THROWS_AS(EntanglementBaseline::from_wait(1e-8, 0.0), DomainError);
}

TEST_CASE("rates and waits") {
    CHECK(event_rate(0.25, 400.0) == 100.0);
    CHECK(std::isinf(mean_wait(0.0, 1e6)));
    CHECK(std::isinf(mean_wait(0.5, 0.0)));
    CHECK(rate_from_mean_wait(4.0) == 0.25);
    for (double p : {1e-9, 1e-6, 0.3, 1.0}) {
        for (double r : {1.0, 1e3, 1e6}) CHECK(mean_wait(p, r) * event_rate(p, r) == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(event_rate(0.5, -1.0), DomainError);
    CHECK_THROWS_AS(event_rate(1.5, 1.0), DomainError);
}

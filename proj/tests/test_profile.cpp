#include <doctest.h>

#include "pdw/errors.hpp"
#include "pdw/profile.hpp"

#include <cmath>
#include <numbers>

using namespace pdw;

TEST_SUITE("profile") {

TEST_CASE("constant profile") {
    auto p = DissipationProfile::constant(2.0);
    CHECK(p.eval_b(0.3) == doctest::Approx(2.0));
    CHECK(p.mean_beta() == doctest::Approx(2.0));
    CHECK(p.lambda(1.0) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
    CHECK(p.b_prime(0.7) == doctest::Approx(0.0));
    CHECK_FALSE(p.has_jumps());
}

TEST_CASE("sinusoid values and mean") {
    auto p = DissipationProfile::sinusoid(1.0, 0.5, 0.0);
    CHECK(p.eval_b(0.0) == doctest::Approx(1.0));
    CHECK(p.eval_b(0.25) == doctest::Approx(1.5));
    CHECK(p.eval_b(0.75) == doctest::Approx(0.5));
    CHECK(p.mean_beta() == doctest::Approx(1.0).epsilon(1e-14));
    // Closed-form running integral vs midpoint-rule check.
    double t = 0.37;
    int n = 20000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += p.eval_b((i + 0.5) * t / n) * (t / n);
    CHECK(p.integral_b(t) == doctest::Approx(acc).epsilon(1e-9));
}

TEST_CASE("sinusoid derivative against finite differences") {
    auto p = DissipationProfile::sinusoid(1.0, 0.5, 0.3);
    double h = 1e-5;
    for (double t : {0.1, 0.42, 0.9}) {
        double fd = (p.eval_b(t + h) - p.eval_b(t - h)) / (2 * h);
        CHECK(p.b_prime(t) == doctest::Approx(fd).epsilon(1e-8));
    }
}

TEST_CASE("square wave structure") {
    auto p = DissipationProfile::square_wave(0.5, 1.5, 0.5);
    CHECK(p.eval_b(0.0) == doctest::Approx(0.5));
    CHECK(p.eval_b(0.49) == doctest::Approx(0.5));
    CHECK(p.eval_b(0.5) == doctest::Approx(1.5));   // right continuous
    CHECK(p.eval_b(0.99) == doctest::Approx(1.5));
    CHECK(p.eval_b(1.0) == doctest::Approx(0.5));
    CHECK(p.mean_beta() == doctest::Approx(1.0));
    CHECK(p.has_jumps());
    auto js = p.jump_times_between(0.0, 2.0);
    REQUIRE(js.size() == 3);
    CHECK(js[0] == doctest::Approx(0.5));
    CHECK(js[1] == doctest::Approx(1.0));
    CHECK(js[2] == doctest::Approx(1.5));
    // Stable evaluation pins the branch by the segment midpoint.
    CHECK(p.eval_b_stable(0.5, 0.25) == doctest::Approx(0.5));
    CHECK(p.eval_b_stable(0.5, 0.75) == doctest::Approx(1.5));
}

TEST_CASE("square wave running integral") {
    auto p = DissipationProfile::square_wave(0.5, 1.5, 0.5);
    CHECK(p.integral_b(0.5) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(p.integral_b(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.integral_b(2.25) == doctest::Approx(2.0 + 0.125).epsilon(1e-14));
}

TEST_CASE("fourier profile") {
    auto p = DissipationProfile::fourier(1.0, {0.2, 0.1}, {0.3});
    double w = 2.0 * std::numbers::pi;
    double t = 0.41;
    double expect = 1.0 + 0.2 * std::cos(w * t) + 0.1 * std::cos(2 * w * t) +
                    0.3 * std::sin(w * t);
    CHECK(p.eval_b(t) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(p.mean_beta() == doctest::Approx(1.0).epsilon(1e-12));
    // Periodicity of b and additivity of the running integral over a period.
    CHECK(p.eval_b(t + 1.0) == doctest::Approx(p.eval_b(t)).epsilon(1e-13));
    CHECK(p.integral_b(t + 1.0) ==
          doctest::Approx(p.integral_b(t) + p.mean_beta()).epsilon(1e-12));
}

TEST_CASE("log lambda cocycle") {
    auto p = DissipationProfile::sinusoid(1.0, 0.5, 0.0);
    double a = 0.3, b = 1.7;
    CHECK(p.log_lambda(b) - p.log_lambda(a) ==
          doctest::Approx(p.integral_b(b) - p.integral_b(a)).epsilon(1e-13));
    CHECK(p.lambda(0.0) == doctest::Approx(1.0));
}

TEST_CASE("hill potential closed forms") {
    // freq^2 - b^2 - b'.
    auto c = DissipationProfile::constant(1.0);
    CHECK(c.hill_potential(0.0, 2.0) == doctest::Approx(3.0).epsilon(1e-14));
    auto s = DissipationProfile::sinusoid(1.0, 0.5, 0.0);
    // At t = 0: b = 1, b' = 0.5 * 2 pi, so V = -1 - pi at freq 0.
    CHECK(s.hill_potential(0.0, 0.0) ==
          doctest::Approx(-(1.0 + std::numbers::pi)).epsilon(1e-13));
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(DissipationProfile::constant(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(DissipationProfile::constant(0.0), std::invalid_argument);
    CHECK_THROWS_AS(DissipationProfile::sinusoid(1.0, 1.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(DissipationProfile::square_wave(-0.1, 1.0, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(DissipationProfile::square_wave(0.5, 1.5, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(DissipationProfile::square_wave(0.0, 0.0, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(DissipationProfile::fourier(0.1, {1.0}, {}), std::invalid_argument);
    CHECK_THROWS_AS(DissipationProfile::constant(1.0, 0.0), std::invalid_argument);
    auto sq = DissipationProfile::square_wave(0.5, 1.5, 0.5);
    CHECK_THROWS_AS(sq.b_prime(0.2), UnsupportedFamily);
    CHECK_THROWS_AS(sq.hill_potential(0.2, 1.0), UnsupportedFamily);
}

TEST_CASE("describe mentions the family") {
    auto p = DissipationProfile::sinusoid(1.0, 0.5, 0.0);
    CHECK(p.describe().find("Sinusoid") != std::string::npos);
}

TEST_CASE("non-unit period scaling") {
    auto p = DissipationProfile::sinusoid(1.0, 0.5, 0.0, 2.0);
    CHECK(p.period() == doctest::Approx(2.0));
    CHECK(p.eval_b(0.5) == doctest::Approx(1.5));  // quarter of the period
    CHECK(p.mean_beta() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(p.integral_b(2.0) == doctest::Approx(2.0).epsilon(1e-13));
}

}

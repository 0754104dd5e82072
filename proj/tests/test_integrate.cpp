#include <doctest.h>

#include "pdw/errors.hpp"
#include "pdw/integrate.hpp"

#include <array>
#include <cmath>

using namespace pdw;

TEST_SUITE("integrate") {

TEST_CASE("exponential decay") {
    IntegratorOptions opts;
    std::array<double, 1> y{1.0};
    rk45_smooth<1>([](double, const std::array<double, 1>& v,
                      std::array<double, 1>& dv) { dv[0] = -v[0]; },
                   0.0, 3.0, y, opts, 0.5);
    CHECK(y[0] == doctest::Approx(std::exp(-3.0)).epsilon(1e-9));
}

TEST_CASE("harmonic oscillator preserves energy") {
    IntegratorOptions opts;
    opts.rtol = 1e-11;
    opts.atol = 1e-13;
    std::array<double, 2> y{1.0, 0.0};
    rk45_smooth<2>([](double, const std::array<double, 2>& v,
                      std::array<double, 2>& dv) {
                       dv[0] = v[1];
                       dv[1] = -v[0];
                   },
                   0.0, 20.0, y, opts, 0.5);
    CHECK(y[0] == doctest::Approx(std::cos(20.0)).epsilon(1e-8));
    CHECK(y[1] == doctest::Approx(-std::sin(20.0)).epsilon(1e-8));
    CHECK(y[0] * y[0] + y[1] * y[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("reversed interval is rejected") {
    // The stepper only runs forward; callers invert the propagator instead.
    IntegratorOptions opts;
    std::array<double, 1> y{1.0};
    auto rhs = [](double, const std::array<double, 1>& v, std::array<double, 1>& dv) {
        dv[0] = -v[0];
    };
    CHECK_THROWS_AS(rk45_smooth<1>(rhs, 2.0, 0.0, y, opts, 0.5), std::invalid_argument);
    rk45_smooth<1>(rhs, 2.0, 2.0, y, opts, 0.5);  // empty interval is a no-op
    CHECK(y[0] == doctest::Approx(1.0));
}

TEST_CASE("segmented integration hits interior breakpoints") {
    // RHS with a coefficient jump at t = 1; the factory freezes the branch by
    // the segment midpoint, so stage evaluations cannot leak across.
    IntegratorOptions opts;
    std::array<double, 1> y{1.0};
    auto factory = [](double mid) {
        double c = mid < 1.0 ? -1.0 : -2.0;
        return [c](double, const std::array<double, 1>& v, std::array<double, 1>& dv) {
            dv[0] = c * v[0];
        };
    };
    rk45_segmented<1>(factory, 0.0, 2.0, y, opts, 0.5, {1.0});
    CHECK(y[0] == doctest::Approx(std::exp(-3.0)).epsilon(1e-9));
}

TEST_CASE("integrator failure surfaces as an exception") {
    IntegratorOptions opts;
    opts.rtol = 1e-13;
    opts.atol = 1e-300;
    std::array<double, 1> y{1.0};
    // 1/(1-t) blows up at t = 1; the step size collapses and must throw.
    CHECK_THROWS_AS(
        rk45_smooth<1>([](double t, const std::array<double, 1>& v,
                          std::array<double, 1>& dv) { dv[0] = v[0] / (1.0 - t); },
                       0.0, 1.0, y, opts, 0.1),
        IntegratorFailure);
}

TEST_CASE("options validation") {
    IntegratorOptions bad;
    bad.rtol = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    IntegratorOptions opts;
    CHECK(opts.effective_max_step(1.0) == doctest::Approx(1.0 / 50.0));
    opts.max_step = 0.01;
    CHECK(opts.effective_max_step(1.0) == doctest::Approx(0.01));
}

TEST_CASE("adaptive simpson") {
    double v = quad_simpson([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
    CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    double w = quad_simpson([](double x) { return std::sin(x); }, 0.0, std::acos(-1.0),
                            1e-12);
    CHECK(w == doctest::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("adaptive quadrature with splits") {
    // |x - 0.5| has a kink; split there and the halves are exact.
    double v = quad_adaptive([](double x) { return std::abs(x - 0.5); }, 0.0, 1.0, 1e-12,
                             {0.5});
    CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("gauss panels integrate high-degree polynomials") {
    auto rule8 = gauss_panel(0.0, 2.0, 8);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule8.nodes.size(); ++i)
        acc += rule8.weights[i] * std::pow(rule8.nodes[i], 14);  // degree 14 < 16
    CHECK(acc == doctest::Approx(std::pow(2.0, 15) / 15.0).epsilon(1e-13));

    auto rule16 = gauss_panel(-1.0, 3.0, 16);
    acc = 0.0;
    for (std::size_t i = 0; i < rule16.nodes.size(); ++i)
        acc += rule16.weights[i] * std::pow(rule16.nodes[i], 30);
    double expect = (std::pow(3.0, 31) - std::pow(-1.0, 31)) / 31.0;
    CHECK(acc == doctest::Approx(expect).epsilon(1e-12));

    CHECK_THROWS_AS(gauss_panel(0.0, 1.0, 5), std::invalid_argument);
}

}

#pragma once

#include "pdw/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace pdw {

// Options shared by every ODE solve. max_step = 0 means "let the caller pick",
// which in practice becomes period/50 so that no step can hop over a feature
// of the coefficient.
struct IntegratorOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = 0.0;

    void validate() const {
        if (!(rtol > 0.0) || !(atol > 0.0))
            throw std::invalid_argument("integrator: tolerances must be positive");
        if (max_step < 0.0)
            throw std::invalid_argument("integrator: max_step must be nonnegative");
    }

    double effective_max_step(double period) const {
        return max_step > 0.0 ? max_step : period / 50.0;
    }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
constexpr double dp_c2 = 1.0 / 5.0, dp_c3 = 3.0 / 10.0, dp_c4 = 4.0 / 5.0,
                 dp_c5 = 8.0 / 9.0;
constexpr double dp_a21 = 1.0 / 5.0;
constexpr double dp_a31 = 3.0 / 40.0, dp_a32 = 9.0 / 40.0;
constexpr double dp_a41 = 44.0 / 45.0, dp_a42 = -56.0 / 15.0, dp_a43 = 32.0 / 9.0;
constexpr double dp_a51 = 19372.0 / 6561.0, dp_a52 = -25360.0 / 2187.0,
                 dp_a53 = 64448.0 / 6561.0, dp_a54 = -212.0 / 729.0;
constexpr double dp_a61 = 9017.0 / 3168.0, dp_a62 = -355.0 / 33.0,
                 dp_a63 = 46732.0 / 5247.0, dp_a64 = 49.0 / 176.0,
                 dp_a65 = -5103.0 / 18656.0;
constexpr double dp_a71 = 35.0 / 384.0, dp_a73 = 500.0 / 1113.0, dp_a74 = 125.0 / 192.0,
                 dp_a75 = -2187.0 / 6784.0, dp_a76 = 11.0 / 84.0;
constexpr double dp_e1 = 71.0 / 57600.0, dp_e3 = -71.0 / 16695.0, dp_e4 = 71.0 / 1920.0,
                 dp_e5 = -17253.0 / 339200.0, dp_e6 = 22.0 / 525.0, dp_e7 = -1.0 / 40.0;

} // namespace detail

// Adaptive Dormand-Prince 5(4) over a single smooth interval [a, b], a < b.
// RHS signature: f(t, y, dydt). FSAL is exploited; the error estimate uses the
// usual mixed absolute/relative scaling.
template <std::size_t N, class RHS>
void rk45_smooth(RHS&& f, double a, double b, std::array<double, N>& y,
                 const IntegratorOptions& opts, double max_step) {
    using detail::dp_a21;
    if (!(b > a)) {
        if (b == a) return;
        throw std::invalid_argument("rk45: interval must be ordered");
    }
    const double span = b - a;
    std::array<double, N> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
    double t = a;
    f(t, y, k1);
    double h = std::min(max_step, span);
    const double hmin = std::max(1e-14 * span, 16.0 * 2.220446049250313e-16 * std::abs(b));
    int rejected_in_a_row = 0;
    while (t < b) {
        h = std::min(h, b - t);
        if (h < hmin)
            throw IntegratorFailure("rk45: step size underflow");

        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * dp_a21 * k1[i];
        f(t + detail::dp_c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (detail::dp_a31 * k1[i] + detail::dp_a32 * k2[i]);
        f(t + detail::dp_c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (detail::dp_a41 * k1[i] + detail::dp_a42 * k2[i] +
                                  detail::dp_a43 * k3[i]);
        f(t + detail::dp_c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (detail::dp_a51 * k1[i] + detail::dp_a52 * k2[i] +
                                  detail::dp_a53 * k3[i] + detail::dp_a54 * k4[i]);
        f(t + detail::dp_c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (detail::dp_a61 * k1[i] + detail::dp_a62 * k2[i] +
                                  detail::dp_a63 * k3[i] + detail::dp_a64 * k4[i] +
                                  detail::dp_a65 * k5[i]);
        f(t + h, ytmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (detail::dp_a71 * k1[i] + detail::dp_a73 * k3[i] +
                                  detail::dp_a74 * k4[i] + detail::dp_a75 * k5[i] +
                                  detail::dp_a76 * k6[i]);
        f(t + h, ynew, k7);

        double err2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double e = h * (detail::dp_e1 * k1[i] + detail::dp_e3 * k3[i] +
                            detail::dp_e4 * k4[i] + detail::dp_e5 * k5[i] +
                            detail::dp_e6 * k6[i] + detail::dp_e7 * k7[i]);
            double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err2 += (e / sc) * (e / sc);
        }
        double err = std::sqrt(err2 / double(N));

        if (err <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;
            rejected_in_a_row = 0;
            double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h = std::min(h * std::clamp(fac, 0.2, 5.0), max_step);
        } else {
            if (++rejected_in_a_row > 60)
                throw IntegratorFailure("rk45: repeated step rejection");
            double fac = 0.9 * std::pow(err, -0.2);
            h *= std::clamp(fac, 0.1, 0.9);
        }
    }
}

// Integrate over [t0, t1] split at the given interior points (sorted). The RHS
// factory is called once per smooth segment with the segment midpoint, so
// coefficient families with jumps can freeze the correct branch.
template <std::size_t N, class RHSFactory>
void rk45_segmented(RHSFactory&& make_rhs, double t0, double t1, std::array<double, N>& y,
                    const IntegratorOptions& opts, double max_step,
                    const std::vector<double>& splits) {
    double a = t0;
    for (std::size_t s = 0; s <= splits.size(); ++s) {
        double b = s < splits.size() ? splits[s] : t1;
        if (b <= a) continue;
        auto rhs = make_rhs(0.5 * (a + b));
        rk45_smooth<N>(rhs, a, b, y, opts, max_step);
        a = b;
    }
}

// ===== quadrature =====

// Adaptive Simpson with absolute tolerance on one smooth interval.
double quad_simpson(const std::function<double(double)>& f, double a, double b,
                    double abs_tol);

// Same, with the interval split at the given interior points first.
double quad_adaptive(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, const std::vector<double>& splits = {});

// Gauss-Legendre abscissas/weights mapped onto [a, b]; order 8 or 16.
struct PanelRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
PanelRule gauss_panel(double a, double b, int order);

} // namespace pdw

#include "pdw/spectral.hpp"
#include "pdw/errors.hpp"
#include "pdw/parallel.hpp"
#include "pdw/propagator.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace pdw {

namespace {

constexpr double disc_eps = 1e-10;

// Hermite interpolation of (values, derivatives) on a uniform grid.
cplx hermite_eval(const std::vector<double>& ts, const std::vector<cplx>& v,
                  const std::vector<cplx>& d, double t, bool derivative) {
    std::size_t n = ts.size();
    double h = ts[1] - ts[0];
    double pos = (t - ts[0]) / h;
    std::size_t j = pos <= 0.0 ? 0 : std::min(std::size_t(pos), n - 2);
    double s = (t - ts[j]) / h;
    double s2 = s * s, s3 = s2 * s;
    if (!derivative) {
        double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
        double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
        return h00 * v[j] + h * h10 * d[j] + h01 * v[j + 1] + h * h11 * d[j + 1];
    }
    double g00 = (6 * s2 - 6 * s) / h, g10 = 3 * s2 - 4 * s + 1;
    double g01 = (-6 * s2 + 6 * s) / h, g11 = 3 * s2 - 2 * s;
    return g00 * v[j] + g10 * d[j] + g01 * v[j + 1] + g11 * d[j + 1];
}

// Dense NxN linear solve, partial pivoting. Small enough to keep local.
template <std::size_t N>
std::array<double, N> solve_dense(std::array<std::array<double, N>, N> a,
                                  std::array<double, N> b) {
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < N; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        if (a[col][col] == 0.0) throw NumericalError("fit: singular normal equations");
        for (std::size_t r = col + 1; r < N; ++r) {
            double m = a[r][col] / a[col][col];
            for (std::size_t c2 = col; c2 < N; ++c2) a[r][c2] -= m * a[col][c2];
            b[r] -= m * b[col];
        }
    }
    std::array<double, N> x{};
    for (std::size_t r = N; r-- > 0;) {
        double s = b[r];
        for (std::size_t c2 = r + 1; c2 < N; ++c2) s -= a[r][c2] * x[c2];
        x[r] = s / a[r][r];
    }
    return x;
}

IntegratorOptions tightened(const IntegratorOptions& opts) {
    IntegratorOptions t = opts;
    t.rtol = std::min(opts.rtol, 1e-12);
    t.atol = std::min(opts.atol, 1e-14);
    return t;
}

} // namespace

MonodromySpectrum spectrum(const Mat2& m, double period, double beta) {
    double det_exact = std::exp(-2.0 * beta * period);
    if (std::abs(m.det() - det_exact) > 1e-6)
        throw DeterminantMismatch("spectrum: determinant drifted from its exact value");
    double tau = m.trace().real();
    double disc = tau * tau - 4.0 * det_exact;

    MonodromySpectrum sp;
    sp.discriminant = disc;
    if (disc > disc_eps) {
        sp.kind = SpectrumClass::RealPair;
        double root = std::sqrt(disc);
        double k1 = 0.5 * (tau + std::copysign(root, tau));
        sp.kappa1 = k1;
        sp.kappa2 = det_exact / k1;
    } else if (disc < -disc_eps) {
        sp.kind = SpectrumClass::ComplexPair;
        double root = std::sqrt(-disc);
        sp.kappa1 = cplx{0.5 * tau, 0.5 * root};
        sp.kappa2 = std::conj(sp.kappa1);
    } else {
        sp.kind = SpectrumClass::Degenerate;
        sp.kappa1 = sp.kappa2 = 0.5 * tau;
    }
    if (std::abs(sp.kappa2) > std::abs(sp.kappa1)) std::swap(sp.kappa1, sp.kappa2);
    sp.nu_plus = -std::log(sp.kappa1) / period;
    sp.nu_minus = -std::log(sp.kappa2) / period;
    sp.rho = std::abs(sp.kappa1);
    return sp;
}

StabilityIntervals classify_stability_intervals(const DissipationProfile& prof,
                                                double freq_max, int scan_points,
                                                const IntegratorOptions& opts,
                                                int threads) {
    opts.validate();
    if (!(freq_max > 0.0) || scan_points < 16)
        throw std::invalid_argument("classify: need freq_max > 0 and a reasonable grid");
    double T = prof.period();
    double beta = prof.mean_beta();

    auto disc_at = [&](double k) {
        Mat2 m = monodromy(prof, 0.0, k, opts);
        return spectrum(m, T, beta).discriminant;
    };

    std::size_t n_scan{std::size_t(scan_points)};
    std::vector<double> ks(n_scan);
    std::vector<double> disc(n_scan);
    for (int i = 0; i < scan_points; ++i)
        ks[std::size_t(i)] = freq_max * double(i + 1) / double(scan_points);
    parallel_for(std::size_t(scan_points), threads,
                 [&](std::size_t i) { disc[i] = disc_at(ks[i]); });

    if (disc[0] <= 0.0)
        throw NumericalError("classify: scan does not start inside the low real interval");

    // Bisect every sign change to 1e-8 in frequency.
    std::vector<double> crossings;
    for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
        if ((disc[i] > 0.0) == (disc[i + 1] > 0.0)) continue;
        double lo = ks[i], hi = ks[i + 1];
        double flo = disc[i];
        while (hi - lo > 1e-8) {
            double mid = 0.5 * (lo + hi);
            double fm = disc_at(mid);
            if ((fm > 0.0) == (flo > 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        crossings.push_back(0.5 * (lo + hi));
    }

    StabilityIntervals out;
    out.freq_max = freq_max;
    out.scan_points = scan_points;
    if (crossings.empty())
        throw NumericalError("classify: no transition found below freq_max");
    out.tau0 = crossings[0];

    // After tau0 the discriminant is negative; each later (up, down) pair of
    // crossings bounds a real-pair window. A window still open at the top of
    // the scan is clipped there.
    std::size_t i = 1;
    while (i < crossings.size()) {
        double lo = crossings[i];
        double hi = i + 1 < crossings.size() ? crossings[i + 1] : freq_max;
        if (hi - lo >= 1e-6) out.bands.push_back({lo, hi});
        i += 2;
    }
    return out;
}

std::vector<std::pair<cplx, cplx>> mode_path(const DissipationProfile& prof, double freq,
                                             cplx u0, cplx up0, const std::vector<double>& ts,
                                             const IntegratorOptions& opts) {
    opts.validate();
    std::vector<std::pair<cplx, cplx>> out;
    out.reserve(ts.size());
    std::array<double, 4> y{u0.real(), u0.imag(), up0.real(), up0.imag()};
    double k2 = freq * freq;
    double cur = 0.0;
    for (double t : ts) {
        if (t < cur) throw std::invalid_argument("mode_path: times must ascend from zero");
        if (t > cur) {
            auto splits = prof.jump_times_between(cur, t);
            auto factory = [&](double mid) {
                return [&prof, k2, mid](double tt, const std::array<double, 4>& yy,
                                        std::array<double, 4>& dy) {
                    double b = prof.eval_b_stable(tt, mid);
                    dy[0] = yy[2];
                    dy[1] = yy[3];
                    dy[2] = -k2 * yy[0] - 2.0 * b * yy[2];
                    dy[3] = -k2 * yy[1] - 2.0 * b * yy[3];
                };
            };
            rk45_segmented<4>(factory, cur, t, y, opts,
                              opts.effective_max_step(prof.period()), splits);
            cur = t;
        }
        out.emplace_back(cplx{y[0], y[1]}, cplx{y[2], y[3]});
    }
    return out;
}

// ===== Floquet solutions =====

cplx FloquetSolution::eval_f(double tau) const { return hermite_eval(times, f, fprime, tau, false); }

cplx FloquetSolution::eval_fprime(double tau) const {
    return hermite_eval(times, f, fprime, tau, true);
}

cplx FloquetSolution::eval_u(double t) const {
    double ell = std::floor(t / period);
    double tau = t - ell * period;
    return std::exp(-nu * t) * eval_f(tau);
}

cplx FloquetSolution::eval_uprime(double t) const {
    double ell = std::floor(t / period);
    double tau = t - ell * period;
    return std::exp(-nu * t) * (eval_fprime(tau) - nu * eval_f(tau));
}

std::pair<FloquetSolution, FloquetSolution> floquet_solutions(const DissipationProfile& prof,
                                                              double freq,
                                                              const IntegratorOptions& opts,
                                                              int samples_per_period) {
    opts.validate();
    double T = prof.period();
    if (freq == 0.0)
        throw EigenvectorDegenerate(
            "floquet: fast branch eigenvector has no displacement part at frequency zero");

    Mat2 m = monodromy(prof, 0.0, freq, opts);
    MonodromySpectrum sp = spectrum(m, T, prof.mean_beta());
    if (sp.kind == SpectrumClass::Degenerate)
        throw DegenerateMonodromy("floquet: coincident eigenvalues at a band edge");

    auto build = [&](cplx kappa, cplx nu) {
        // Eigenvector from the better conditioned column of (m - kappa I).
        cplx v1a = m.b, v2a = kappa - m.a;
        cplx v1b = kappa - m.d, v2b = m.c;
        double na = std::sqrt(std::norm(v1a) + std::norm(v2a));
        double nb = std::sqrt(std::norm(v1b) + std::norm(v2b));
        cplx v1 = na >= nb ? v1a : v1b;
        cplx v2 = na >= nb ? v2a : v2b;
        double nv = std::max(na, nb);
        if (nv == 0.0 || std::abs(v1) < 1e-12 * nv)
            throw EigenvectorDegenerate("floquet: eigenvector has no displacement part");

        FloquetSolution fs;
        fs.nu = nu;
        fs.kappa = kappa;
        fs.period = T;
        cplx up0 = cplx{0.0, 1.0} * freq * v2 / v1;
        fs.dtf0 = nu + up0;
        int n = samples_per_period;
        std::vector<double> ts(std::size_t(n) + 1);
        for (int j = 0; j <= n; ++j) ts[std::size_t(j)] = T * double(j) / double(n);
        auto path = mode_path(prof, freq, 1.0, up0, ts, opts);
        fs.times = ts;
        fs.f.resize(ts.size());
        fs.fprime.resize(ts.size());
        for (std::size_t j = 0; j < ts.size(); ++j) {
            cplx growth = std::exp(nu * ts[j]);
            fs.f[j] = growth * path[j].first;
            fs.fprime[j] = growth * (nu * path[j].first + path[j].second);
        }
        fs.periodicity_defect = std::abs(fs.f.back() - fs.f.front());
        return fs;
    };

    return {build(sp.kappa1, sp.nu_plus), build(sp.kappa2, sp.nu_minus)};
}

FloquetSolution floquet_slow(const DissipationProfile& prof, double freq,
                             const IntegratorOptions& opts, int samples_per_period) {
    if (freq != 0.0) return floquet_solutions(prof, freq, opts, samples_per_period).first;
    // With no restoring force the constant is an exact solution; it carries
    // the unit eigenvalue of the period map.
    double T = prof.period();
    FloquetSolution fs;
    fs.nu = 0.0;
    fs.kappa = 1.0;
    fs.dtf0 = 0.0;
    fs.period = T;
    int n = samples_per_period;
    fs.times.resize(std::size_t(n) + 1);
    fs.f.assign(std::size_t(n) + 1, 1.0);
    fs.fprime.assign(std::size_t(n) + 1, 0.0);
    for (int j = 0; j <= n; ++j) fs.times[std::size_t(j)] = T * double(j) / double(n);
    fs.periodicity_defect = 0.0;
    return fs;
}

std::pair<cplx, cplx> phi_basis(const DissipationProfile& prof, double freq, double t,
                                const IntegratorOptions& opts) {
    opts.validate();
    if (t < 0.0) throw std::invalid_argument("phi_basis: time must be nonnegative");

    // Direct path.
    std::vector<double> ts{t};
    auto p1 = mode_path(prof, freq, 1.0, 0.0, ts, opts);
    auto p2 = mode_path(prof, freq, 0.0, 1.0, ts, opts);
    cplx phi1 = p1[0].first, phi2 = p2[0].first;

    // Floquet path. At frequency zero the fast chart is singular; the direct
    // values stand alone there.
    if (freq != 0.0) {
        auto [fp, fm] = floquet_solutions(prof, freq, opts);
        cplx gp = fp.dtf0 - fp.nu;
        cplx gm = fm.dtf0 - fm.nu;
        cplx den = gp - gm;
        if (std::abs(den) < 1e-8)
            throw DenominatorSmall("phi_basis: branch derivatives nearly coincide");
        cplx up = fp.eval_u(t), um = fm.eval_u(t);
        cplx phi2_f = (up - um) / den;
        cplx phi1_f = (-gm * up + gp * um) / den;
        if (std::abs(phi1_f - phi1) > 1e-7 * std::max(1.0, std::abs(phi1)) ||
            std::abs(phi2_f - phi2) > 1e-7 * std::max(1.0, std::abs(phi2)))
            throw NumericalError("phi_basis: direct and Floquet paths disagree");
    }
    return {phi1, phi2};
}

// ===== low frequency expansion =====

double alpha2_integral(const DissipationProfile& prof, double quad_tol) {
    double T = prof.period();
    double beta = prof.mean_beta();
    double log_lam_T = prof.log_lambda(T);
    auto jumps_T = prof.jump_times_between(0.0, T);

    auto outer = [&](double tau) {
        double l_tau = prof.log_lambda(tau);
        std::vector<double> inner_splits;
        for (double s : jumps_T)
            if (s < tau) inner_splits.push_back(s);
        auto inner = [&](double th) {
            double l_th = prof.log_lambda(th);
            return std::exp(2.0 * (l_th - l_tau)) +
                   std::exp(2.0 * (l_tau - log_lam_T - l_th));
        };
        return quad_adaptive(inner, 0.0, tau, quad_tol * 0.05, inner_splits);
    };
    double val = quad_adaptive(outer, 0.0, T, quad_tol, jumps_T);
    return val / (T * (1.0 - std::exp(-2.0 * beta * T)));
}

namespace {

// Trace of the period map at anchor 0; tight tolerances so that fourth order
// Richardson differences stay above the noise floor.
double trace_at(const DissipationProfile& prof, double k, const IntegratorOptions& opts) {
    return monodromy(prof, 0.0, k, tightened(opts)).trace().real();
}

} // namespace

double alpha2_trace_fd(const DissipationProfile& prof, const IntegratorOptions& opts) {
    opts.validate();
    double T = prof.period();
    double beta = prof.mean_beta();
    double g0 = trace_at(prof, 0.0, opts);
    double h1 = 1e-2, h2 = 5e-3, h3 = 2.5e-3;
    double d1 = 2.0 * (trace_at(prof, h1, opts) - g0) / (h1 * h1);
    double d2 = 2.0 * (trace_at(prof, h2, opts) - g0) / (h2 * h2);
    double d3 = 2.0 * (trace_at(prof, h3, opts) - g0) / (h3 * h3);
    // The step sequence halves, so successive differences must contract by
    // about four; if they do not, roundoff is already dominating.
    double delta_12 = std::abs(d2 - d1);
    double delta_23 = std::abs(d3 - d2);
    if (delta_23 > 0.5 * delta_12 + 1e-9 * (1.0 + std::abs(d3)))
        throw NoiseDominated("alpha2: finite difference sequence stopped contracting");
    double r1 = (4.0 * d2 - d1) / 3.0;
    double r2 = (4.0 * d3 - d2) / 3.0;
    double second = (16.0 * r2 - r1) / 15.0;
    // The trace has a maximum at frequency zero: the quadratic coefficient of
    // the slow exponent carries the opposite sign of the trace curvature.
    return -second / (2.0 * T * (1.0 - std::exp(-2.0 * beta * T)));
}

double alpha1_trace_residual(const DissipationProfile& prof, const IntegratorOptions& opts) {
    opts.validate();
    double g0 = trace_at(prof, 0.0, opts);
    auto one_sided = [&](double h) {
        double g1 = trace_at(prof, h, opts);
        double g2 = trace_at(prof, 2.0 * h, opts);
        return (4.0 * g1 - 3.0 * g0 - g2) / (2.0 * h);
    };
    double da = one_sided(2.5e-3);
    double db = one_sided(5e-3);
    return std::abs((4.0 * da - db) / 3.0);
}

std::pair<double, double> alpha2_exponent_fit(const DissipationProfile& prof,
                                              const IntegratorOptions& opts) {
    opts.validate();
    double T = prof.period();
    double beta = prof.mean_beta();
    const int n = 12;
    const double kmax = 0.1;
    // Divide the decay exponent by k^2 and fit the quotient with a quartic in
    // x = k / kmax. The constant term is the quadratic coefficient itself, so
    // the fit carries contributions through k^6 instead of aliasing them.
    constexpr std::size_t deg = 5;
    std::array<std::array<double, deg>, deg> ata{};
    std::array<double, deg> atb{};
    for (int i = 0; i < n; ++i) {
        double k = kmax * double(i + 1) / double(n);
        Mat2 m = monodromy(prof, 0.0, k, tightened(opts));
        MonodromySpectrum sp = spectrum(m, T, beta);
        if (sp.kind != SpectrumClass::RealPair)
            throw SamplesOutsideI0("alpha2 fit: sample frequency has left the real interval");
        double y = sp.nu_plus.real() / (k * k);
        double x = k / kmax;
        std::array<double, deg> row{};
        row[0] = 1.0;
        for (std::size_t j = 1; j < deg; ++j) row[j] = row[j - 1] * x;
        for (std::size_t r = 0; r < deg; ++r) {
            for (std::size_t c = 0; c < deg; ++c) ata[r][c] += row[r] * row[c];
            atb[r] += row[r] * y;
        }
    }
    auto coef = solve_dense(ata, atb);
    return {coef[0], std::abs(coef[1] / kmax)};
}

double gamma_coefficient(const DissipationProfile& prof, double quad_tol) {
    double T = prof.period();
    double beta = prof.mean_beta();
    auto f = [&](double tau) { return std::exp(-2.0 * prof.log_lambda(tau)); };
    double integral = quad_adaptive(f, 0.0, T, quad_tol, prof.jump_times_between(0.0, T));
    return 2.0 * beta - (1.0 - std::exp(-2.0 * beta * T)) / integral;
}

double gamma_floquet_extrapolated(const DissipationProfile& prof,
                                  const IntegratorOptions& opts) {
    opts.validate();
    auto sample = [&](double k) {
        auto [fp, fm] = floquet_solutions(prof, k, tightened(opts));
        (void)fp;
        return fm.dtf0.real();
    };
    double g1 = sample(0.05);
    double g2 = sample(0.025);
    return (4.0 * g2 - g1) / 3.0;
}

SmallFreqExpansion small_freq_expansion(const DissipationProfile& prof,
                                        const IntegratorOptions& opts) {
    SmallFreqExpansion e;
    e.alpha2_integral = alpha2_integral(prof);
    e.alpha2_trace = alpha2_trace_fd(prof, opts);
    auto [a2, a3] = alpha2_exponent_fit(prof, opts);
    e.alpha2_fit = a2;
    e.alpha3_magnitude = a3;
    e.alpha1_residual = alpha1_trace_residual(prof, opts);
    e.gamma = gamma_coefficient(prof);
    e.gamma_floquet = gamma_floquet_extrapolated(prof, opts);
    return e;
}

} // namespace pdw

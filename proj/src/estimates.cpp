#include "pdw/estimates.hpp"
#include "pdw/errors.hpp"
#include "pdw/parallel.hpp"
#include "pdw/propagator.hpp"
#include "pdw/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pdw {

namespace {

constexpr cplx iu{0.0, 1.0};

// Anchor decomposition t = ell * T + s with s in [0, T), plus the merged
// observation list {s} union {s + T} shared by all requested times.
struct TimeDecomp {
    std::vector<double> obs;
    std::vector<std::size_t> idx_s, idx_sT;
    std::vector<std::uint64_t> ell;
};

TimeDecomp decompose_times(const std::vector<double>& times, double T) {
    TimeDecomp d;
    d.idx_s.resize(times.size());
    d.idx_sT.resize(times.size());
    d.ell.resize(times.size());
    std::vector<double> ss(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        double t = times[i];
        if (t < 0.0) throw std::invalid_argument("trace: times must be nonnegative");
        double ell = std::floor(t / T);
        double s = t - ell * T;
        if (s >= T) {  // guard the floating point boundary
            s -= T;
            ell += 1.0;
        }
        ss[i] = s;
        d.ell[i] = std::uint64_t(ell);
    }
    d.obs = ss;
    for (double s : ss) d.obs.push_back(s + T);
    std::sort(d.obs.begin(), d.obs.end());
    d.obs.erase(std::unique(d.obs.begin(), d.obs.end()), d.obs.end());
    auto locate = [&](double x) {
        return std::size_t(std::lower_bound(d.obs.begin(), d.obs.end(), x) - d.obs.begin());
    };
    for (std::size_t i = 0; i < times.size(); ++i) {
        d.idx_s[i] = locate(ss[i]);
        d.idx_sT[i] = locate(ss[i] + T);
    }
    return d;
}

// V(t_i) = M(s_i)^{ell_i} E(s_i, 0) V0 for every requested time, one forward
// solve over [0, 2T] per frequency.
std::vector<std::pair<cplx, cplx>> evolve_states(const DissipationProfile& prof, double k,
                                                 cplx v0_1, cplx v0_2, const TimeDecomp& d,
                                                 const IntegratorOptions& opts) {
    auto path = fundamental_path(prof, 0.0, d.obs, k, opts);
    std::vector<std::pair<cplx, cplx>> out(d.ell.size());
    for (std::size_t i = 0; i < d.ell.size(); ++i) {
        const Mat2& e_s = path[d.idx_s[i]];
        const Mat2& e_sT = path[d.idx_sT[i]];
        Mat2 w = matrix_power(e_sT * e_s.inverse(), d.ell[i]) * e_s;
        out[i] = {mat2_apply_row1(w, v0_1, v0_2), mat2_apply_row2(w, v0_1, v0_2)};
    }
    return out;
}

double integral_inv_lambda_sq(const DissipationProfile& prof, double t) {
    // lambda^{-2} decays like exp(-2 beta t); periods beyond the point where
    // it underflows against the accumulated value contribute nothing.
    double T = prof.period();
    double beta = prof.mean_beta();
    double t_eff = std::min(t, (350.0 / (2.0 * beta * T) + 1.0) * T);
    double total = 0.0;
    double lo = 0.0;
    while (lo < t_eff) {
        double hi = std::min(lo + T, t_eff);
        auto f = [&](double s) { return std::exp(-2.0 * prof.log_lambda(s)); };
        total += quad_adaptive(f, lo, hi, 1e-13, prof.jump_times_between(lo, hi));
        lo = hi;
    }
    return total;
}

} // namespace

double RadialProfile::eval(double k) const {
    if (amplitude == 0.0) return 0.0;
    double p = power == 0.0 ? 1.0 : std::pow(k, power);
    return amplitude * p * std::exp(-0.5 * k * k);
}

FreqGrid FreqGrid::build(double k_min, double k_max, int panels, int order) {
    if (!(k_min > 0.0) || !(k_max > k_min))
        throw std::invalid_argument("grid: need 0 < k_min < k_max");
    if (panels < 1) throw std::invalid_argument("grid: need at least one panel");
    FreqGrid g;
    g.k_min = k_min;
    g.k_max = k_max;
    g.panels = panels;
    g.order = order;
    double ratio = k_max / k_min;
    for (int p = 0; p < panels; ++p) {
        double a = k_min * std::pow(ratio, double(p) / double(panels));
        double b = k_min * std::pow(ratio, double(p + 1) / double(panels));
        PanelRule r = gauss_panel(a, b, order);
        g.nodes.insert(g.nodes.end(), r.nodes.begin(), r.nodes.end());
        g.weights.insert(g.weights.end(), r.weights.begin(), r.weights.end());
    }
    return g;
}

double sphere_area(int n) {
    if (n < 1) throw std::invalid_argument("sphere_area: dimension must be positive");
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

std::pair<cplx, cplx> evolve_mode(const DissipationProfile& prof, double freq, cplx u1,
                                  cplx u2, double t, const IntegratorOptions& opts,
                                  EvolvePath path) {
    opts.validate();
    if (t < 0.0) throw std::invalid_argument("evolve_mode: time must be nonnegative");
    double T = prof.period();

    if (freq == 0.0) {
        // u'' + 2 b u' = 0: u = u1 + u2 int_0^t lambda^{-2}.
        cplx u = u1 + u2 * integral_inv_lambda_sq(prof, t);
        cplx up = u2 * std::exp(-2.0 * prof.log_lambda(t));
        return {u, up};
    }

    if (path == EvolvePath::Auto) path = t < 20.0 * T ? EvolvePath::Direct : EvolvePath::PowerStep;

    switch (path) {
        case EvolvePath::Direct: {
            auto r = mode_path(prof, freq, u1, u2, {t}, opts);
            return r[0];
        }
        case EvolvePath::PowerStep: {
            TimeDecomp d = decompose_times({t}, T);
            cplx v0_1 = freq * u1;
            cplx v0_2 = -iu * u2;
            auto states = evolve_states(prof, freq, v0_1, v0_2, d, opts);
            return {states[0].first / freq, iu * states[0].second};
        }
        case EvolvePath::Floquet: {
            auto [fp, fm] = floquet_solutions(prof, freq, opts);
            cplx gp = fp.dtf0 - fp.nu;
            cplx gm = fm.dtf0 - fm.nu;
            cplx den = gp - gm;
            if (std::abs(den) < 1e-8)
                throw DenominatorSmall("evolve_mode: branch derivatives nearly coincide");
            cplx cp = (u2 - gm * u1) / den;
            cplx cm = u1 - cp;
            cplx u = cp * fp.eval_u(t) + cm * fm.eval_u(t);
            cplx up = cp * fp.eval_uprime(t) + cm * fm.eval_uprime(t);
            return {u, up};
        }
        default:
            throw std::invalid_argument("evolve_mode: unknown path");
    }
}

// ===== norm traces =====

EnergyTraces energy_trace(const DissipationProfile& prof, const RadialData& data,
                          const std::vector<double>& times, const FreqGrid& grid,
                          const IntegratorOptions& opts, int threads) {
    opts.validate();
    TimeDecomp d = decompose_times(times, prof.period());
    std::size_t nn = grid.nodes.size(), nt = times.size();
    // Per-node contributions, reduced serially afterwards so the summation
    // order never depends on the thread count.
    std::vector<double> cu(nn * nt), cg(nn * nt), cd(nn * nt);
    parallel_for(nn, threads, [&](std::size_t j) {
        double k = grid.nodes[j];
        double w = grid.weights[j];
        double u1 = data.u1.eval(k), u2 = data.u2.eval(k);
        double meas = w * std::pow(k, double(data.dimension - 1));
        auto states = evolve_states(prof, k, k * u1, -iu * u2, d, opts);
        for (std::size_t i = 0; i < nt; ++i) {
            double v1 = std::norm(states[i].first);
            double v2 = std::norm(states[i].second);
            cu[j * nt + i] = meas * v1 / (k * k);
            cg[j * nt + i] = meas * v1;
            cd[j * nt + i] = meas * v2;
        }
    });
    double area = sphere_area(data.dimension);
    EnergyTraces out;
    out.u_l2.times = out.grad_l2.times = out.dt_l2.times = times;
    out.u_l2.values.resize(nt);
    out.grad_l2.values.resize(nt);
    out.dt_l2.values.resize(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        double su = 0.0, sg = 0.0, sd = 0.0;
        for (std::size_t j = 0; j < nn; ++j) {
            su += cu[j * nt + i];
            sg += cg[j * nt + i];
            sd += cd[j * nt + i];
        }
        out.u_l2.values[i] = std::sqrt(area * su);
        out.grad_l2.values[i] = std::sqrt(area * sg);
        out.dt_l2.values[i] = std::sqrt(area * sd);
    }
    return out;
}

EnergyNorms energy_norms(const DissipationProfile& prof, const RadialData& data, double t,
                         const FreqGrid& grid, const IntegratorOptions& opts, int threads) {
    auto tr = energy_trace(prof, data, {t}, grid, opts, threads);
    FreqGrid fine = FreqGrid::build(grid.k_min, grid.k_max, grid.panels, 16);
    auto tr2 = energy_trace(prof, data, {t}, fine, opts, threads);
    auto rel = [](double a, double b) {
        return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
    };
    if (rel(tr.u_l2.values[0], tr2.u_l2.values[0]) > 1e-6 ||
        rel(tr.grad_l2.values[0], tr2.grad_l2.values[0]) > 1e-6 ||
        rel(tr.dt_l2.values[0], tr2.dt_l2.values[0]) > 1e-6)
        throw QuadratureNotConverged("energy_norms: doubling the Gauss order moved the result");
    return {tr.u_l2.values[0], tr.grad_l2.values[0], tr.dt_l2.values[0]};
}

namespace {

SlopeFit fit_against(const NormTrace& trace, double t_lo, double t_hi,
                     bool log_abscissa) {
    SlopeFit fit;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        double t = trace.times[i], v = trace.values[i];
        if (t < t_lo || t > t_hi || !(v > 0.0)) continue;
        xs.push_back(log_abscissa ? std::log1p(t) : t);
        ys.push_back(std::log(v));
    }
    fit.count = int(xs.size());
    if (xs.size() < 8)
        throw InsufficientSamples("slope fit: fewer than 8 usable samples in the window");
    double n = double(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw InsufficientSamples("slope fit: window has no abscissa spread");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < xs.size(); ++i)
        fit.max_residual =
            std::max(fit.max_residual, std::abs(ys[i] - fit.intercept - fit.slope * xs[i]));
    return fit;
}

} // namespace

SlopeFit decay_slope(const NormTrace& trace, double t_lo, double t_hi) {
    return fit_against(trace, t_lo, t_hi, true);
}

SlopeFit exponential_rate(const NormTrace& trace, double t_lo, double t_hi) {
    return fit_against(trace, t_lo, t_hi, false);
}

// ===== multiplier norms =====

NormTrace multiplier_lr_trace(const DissipationProfile& prof, double cutoff,
                              const std::vector<double>& times, double r, int dimension,
                              MultiplierWeight weight, int panels,
                              const IntegratorOptions& opts, int threads) {
    opts.validate();
    if (!(cutoff > 0.0)) throw std::invalid_argument("multiplier: cutoff must be positive");
    if (!(r >= 1.0)) throw std::invalid_argument("multiplier: exponent must be >= 1");
    double T = prof.period();
    FreqGrid grid = FreqGrid::build(1e-6, cutoff, panels, 8);
    std::size_t nn = grid.nodes.size(), nt = times.size();

    // Slow-branch tables per node.
    std::vector<FloquetSolution> table(nn);
    parallel_for(nn, threads,
                 [&](std::size_t j) { table[j] = floquet_slow(prof, grid.nodes[j], opts); });

    bool use_sup = std::isinf(r);
    std::vector<double> contrib(nn * nt);
    parallel_for(nn, threads, [&](std::size_t j) {
        double k = grid.nodes[j];
        double meas = grid.weights[j] * std::pow(k, double(dimension - 1));
        const FloquetSolution& fs = table[j];
        double re_nu = fs.nu.real();
        double abs_nu = std::abs(fs.nu);
        for (std::size_t i = 0; i < nt; ++i) {
            double t = times[i];
            double tau = t - T * std::floor(t / T);
            double decay = std::exp(-re_nu * t);
            double m = 0.0;
            switch (weight) {
                case MultiplierWeight::Solution:
                    m = decay * std::abs(fs.eval_f(tau));
                    break;
                case MultiplierWeight::Gradient:
                    m = k * decay * std::abs(fs.eval_f(tau));
                    break;
                case MultiplierWeight::TimeDerivative:
                    m = decay * (abs_nu * std::abs(fs.eval_f(tau)) +
                                 std::abs(fs.eval_fprime(tau)));
                    break;
            }
            contrib[j * nt + i] = use_sup ? m : meas * std::pow(m, r);
        }
    });

    NormTrace out;
    out.times = times;
    out.values.resize(nt);
    double area = sphere_area(dimension);
    for (std::size_t i = 0; i < nt; ++i) {
        if (use_sup) {
            double mx = 0.0;
            for (std::size_t j = 0; j < nn; ++j) mx = std::max(mx, contrib[j * nt + i]);
            out.values[i] = mx;
        } else {
            double s = 0.0;
            for (std::size_t j = 0; j < nn; ++j) s += contrib[j * nt + i];
            out.values[i] = std::pow(area * s, 1.0 / r);
        }
    }
    return out;
}

// ===== tail and diffusion =====

NormTrace exponential_tail(const DissipationProfile& prof, const RadialData& data,
                           double cutoff, const std::vector<double>& times,
                           const FreqGrid& grid, const IntegratorOptions& opts,
                           int threads) {
    opts.validate();
    if (!(cutoff > 0.0)) throw std::invalid_argument("tail: cutoff must be positive");
    TimeDecomp d = decompose_times(times, prof.period());
    std::size_t nn = grid.nodes.size(), nt = times.size();
    std::vector<double> cu(nn * nt, 0.0), cg(nn * nt, 0.0), cd(nn * nt, 0.0);
    parallel_for(nn, threads, [&](std::size_t j) {
        double k = grid.nodes[j];
        double chi;
        if (k <= cutoff) {
            chi = 0.0;
        } else if (k >= 2.0 * cutoff) {
            chi = 1.0;
        } else {
            double x = (k - cutoff) / cutoff;
            chi = x * x * (3.0 - 2.0 * x);
        }
        if (chi == 0.0) return;
        double u1 = data.u1.eval(k), u2 = data.u2.eval(k);
        double meas = chi * chi * grid.weights[j] * std::pow(k, double(data.dimension - 1));
        auto states = evolve_states(prof, k, k * u1, -iu * u2, d, opts);
        for (std::size_t i = 0; i < nt; ++i) {
            double v1 = std::norm(states[i].first);
            double v2 = std::norm(states[i].second);
            cu[j * nt + i] = meas * v1 / (k * k);
            cg[j * nt + i] = meas * v1;
            cd[j * nt + i] = meas * v2;
        }
    });
    double area = sphere_area(data.dimension);
    NormTrace out;
    out.times = times;
    out.values.resize(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        double su = 0.0, sg = 0.0, sd = 0.0;
        for (std::size_t j = 0; j < nn; ++j) {
            su += cu[j * nt + i];
            sg += cg[j * nt + i];
            sd += cd[j * nt + i];
        }
        out.values[i] =
            std::sqrt(area * su) + std::sqrt(area * sg) + std::sqrt(area * sd);
    }
    return out;
}

cplx w0_from_data(cplx u1, cplx u2, double beta, double gamma) {
    double den = 2.0 * beta - gamma;
    if (std::abs(den) < 1e-12)
        throw DegenerateDenominator("w0: 2 beta - gamma vanishes");
    return u1 + u2 / den;
}

cplx heat_mode(double alpha2, double freq, cplx w0, double t) {
    return w0 * std::exp(-alpha2 * freq * freq * t);
}

DiffusionTraces diffusion_difference(const DissipationProfile& prof, const RadialData& data,
                                     const std::vector<double>& times, const FreqGrid& grid,
                                     const IntegratorOptions& opts, int threads) {
    opts.validate();
    DiffusionTraces out;
    out.alpha2 = alpha2_integral(prof);
    out.gamma = gamma_coefficient(prof);
    double beta = prof.mean_beta();

    TimeDecomp d = decompose_times(times, prof.period());
    std::size_t nn = grid.nodes.size(), nt = times.size();
    std::vector<double> cdiff(nn * nt), cctrl(nn * nt);
    parallel_for(nn, threads, [&](std::size_t j) {
        double k = grid.nodes[j];
        double meas = grid.weights[j] * std::pow(k, double(data.dimension - 1));
        cplx u1 = data.u1.eval(k), u2 = data.u2.eval(k);
        cplx w0 = w0_from_data(u1, u2, beta, out.gamma);
        auto states = evolve_states(prof, k, k * u1, -iu * u2, d, opts);
        for (std::size_t i = 0; i < nt; ++i) {
            cplx u = states[i].first / k;
            cplx heat = heat_mode(out.alpha2, k, w0, times[i]);
            cplx heat_off = heat_mode(out.alpha2, k, 1.1 * w0, times[i]);
            cdiff[j * nt + i] = meas * std::norm(u - heat);
            cctrl[j * nt + i] = meas * std::norm(u - heat_off);
        }
    });
    double area = sphere_area(data.dimension);
    out.difference.times = out.control.times = times;
    out.difference.values.resize(nt);
    out.control.values.resize(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        double sd = 0.0, sc = 0.0;
        for (std::size_t j = 0; j < nn; ++j) {
            sd += cdiff[j * nt + i];
            sc += cctrl[j * nt + i];
        }
        out.difference.values[i] = std::sqrt(area * sd);
        out.control.values[i] = std::sqrt(area * sc);
    }
    return out;
}

} // namespace pdw

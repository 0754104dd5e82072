// End-to-end acceptance checks for the whole pipeline. Each numbered check
// prints exactly one "ACCEPTANCE <n> pass|FAIL <detail>" line; tolerances are
// pinned here and nowhere else.

#include <doctest.h>

#include "pdw/config.hpp"
#include "pdw/errors.hpp"
#include "pdw/estimates.hpp"
#include "pdw/parallel.hpp"
#include "pdw/propagator.hpp"
#include "pdw/spectral.hpp"
#include "pdw/zones.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <sys/wait.h>

using namespace pdw;

namespace {

int worker_threads() {
    unsigned hc = std::thread::hardware_concurrency();
    return int(std::clamp(hc, 1u, 8u));
}

std::vector<DissipationProfile> example_profiles() {
    return {DissipationProfile::constant(1.0),
            DissipationProfile::sinusoid(1.0, 0.5, 0.0),
            DissipationProfile::square_wave(0.5, 1.5, 0.5)};
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[std::size_t(i)] = lo * std::pow(hi / lo, double(i) / double(n - 1));
    return v;
}

std::vector<double> anchor_grid(double period, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[std::size_t(i)] = period * double(i) / double(n);
    return v;
}

void report(int id, bool ok, const std::string& detail) {
    std::printf("ACCEPTANCE %d %s %s\n", id, ok ? "pass" : "FAIL", detail.c_str());
    std::fflush(stdout);
    CHECK_MESSAGE(ok, "acceptance check ", id, ": ", detail);
}

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

} // namespace

TEST_SUITE("acceptance") {

TEST_CASE("1 determinant invariant over the parameter grid") {
    Stopwatch sw;
    double worst = 0.0;
    for (const auto& prof : example_profiles()) {
        double T = prof.period();
        double bT = prof.mean_beta() * T;
        auto tg = anchor_grid(T, 64);
        auto kg = log_grid(1e-3, 40.0, 256);
        std::vector<double> worst_k(kg.size(), 0.0);
        parallel_for(kg.size(), worker_threads(), [&](std::size_t j) {
            auto ms = monodromy_sweep(prof, tg, kg[j]);
            double w = 0.0;
            for (const auto& m : ms)
                w = std::max(w, std::abs(m.det() * std::exp(2.0 * bT) - 1.0));
            worst_k[j] = w;
        });
        for (double w : worst_k) worst = std::max(worst, w);
    }
    double secs = sw.seconds();
    bool ok = worst < 1e-7 && secs < 30.0;
    report(1, ok,
           "max |det M * exp(2 beta T) - 1| = " + fmt(worst) + " (tol 1e-7), " +
               fmt(secs) + " s (limit 30)");
}

TEST_CASE("2 eigenvalue dichotomy below the contraction threshold") {
    double worst_mod = 0.0, worst_prod = 0.0, worst_rho = 0.0;
    for (const auto& prof : example_profiles()) {
        double T = prof.period();
        double beta = prof.mean_beta();
        double n_start = find_high_zone(prof, 32).freq_start;
        auto tg = anchor_grid(T, 64);
        auto kg = log_grid(1e-3, n_start, 256);
        std::vector<double> wm(kg.size(), 0.0), wp(kg.size(), 0.0), wr(kg.size(), 0.0);
        parallel_for(kg.size(), worker_threads(), [&](std::size_t j) {
            auto ms = monodromy_sweep(prof, tg, kg[j]);
            double m_mod = 0.0, m_prod = 0.0, m_rho = 0.0;
            for (const auto& m : ms) {
                auto s = spectrum(m, T, beta);
                double e2 = std::exp(-2.0 * beta * T);
                if (s.kind == SpectrumClass::ComplexPair)
                    m_mod = std::max(m_mod,
                                     std::abs(std::abs(s.kappa1) - std::exp(-beta * T)));
                m_prod = std::max(m_prod, std::abs(s.kappa1 * s.kappa2 - e2));
                m_rho = std::max(m_rho, s.rho);
            }
            wm[j] = m_mod;
            wp[j] = m_prod;
            wr[j] = m_rho;
        });
        for (std::size_t j = 0; j < kg.size(); ++j) {
            worst_mod = std::max(worst_mod, wm[j]);
            worst_prod = std::max(worst_prod, wp[j]);
            worst_rho = std::max(worst_rho, wr[j]);
        }
    }
    bool ok = worst_mod < 1e-7 && worst_prod < 1e-8 && worst_rho < 1.0;
    report(2, ok,
           "complex-pair modulus defect " + fmt(worst_mod) + " (tol 1e-7), product defect " +
               fmt(worst_prod) + " (tol 1e-8), max spectral radius " + fmt(worst_rho) +
               " (< 1)");
}

TEST_CASE("3 quadratic decay coefficient by three routes") {
    Stopwatch sw;
    double worst_rel = 0.0, worst_const = 0.0, worst_lin = 0.0;
    auto rel = [](double a, double b) {
        return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
    };
    for (const auto& prof : example_profiles()) {
        double ai = alpha2_integral(prof);
        double at = alpha2_trace_fd(prof);
        double af = alpha2_exponent_fit(prof).first;
        worst_rel = std::max({worst_rel, rel(ai, at), rel(ai, af), rel(at, af)});
        worst_lin = std::max(worst_lin, alpha1_trace_residual(prof));
    }
    for (double b0 : {0.5, 1.0, 2.0}) {
        auto prof = DissipationProfile::constant(b0);
        double target = 1.0 / (2.0 * b0);
        worst_const = std::max({worst_const, std::abs(alpha2_integral(prof) - target),
                                std::abs(alpha2_trace_fd(prof) - target),
                                std::abs(alpha2_exponent_fit(prof).first - target)});
    }
    double secs = sw.seconds();
    bool ok = worst_rel < 1e-5 && worst_const < 1e-5 && worst_lin < 1e-6 && secs < 60.0;
    report(3, ok,
           "pairwise spread " + fmt(worst_rel) + " (tol 1e-5), constant-case defect " +
               fmt(worst_const) + " (tol 1e-5), linear residual " + fmt(worst_lin) +
               " (tol 1e-6), " + fmt(secs) + " s (limit 60)");
}

TEST_CASE("4 slow-branch derivative coefficient consistency") {
    double worst_diff = 0.0, worst_const = 0.0;
    for (const auto& prof : example_profiles()) {
        double gq = gamma_coefficient(prof);
        double gf = gamma_floquet_extrapolated(prof);
        worst_diff = std::max(worst_diff, std::abs(gq - gf));
    }
    for (double b0 : {0.5, 1.0, 2.0})
        worst_const = std::max(
            worst_const, std::abs(gamma_coefficient(DissipationProfile::constant(b0))));
    bool ok = worst_diff < 1e-4 && worst_const < 1e-10;
    report(4, ok,
           "quadrature vs extrapolated defect " + fmt(worst_diff) +
               " (tol 1e-4), constant-case magnitude " + fmt(worst_const) + " (tol 1e-10)");
}

TEST_CASE("5 contraction certificate with random probes") {
    std::mt19937_64 rng(7071);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    bool ok = true;
    std::string detail;
    for (const auto& prof : example_profiles()) {
        auto cert = zone_certificate(prof, {}, worker_threads(), 64, 256, 5.0, 1000);
        double T = prof.period();
        double worst_high = 0.0, worst_band = 0.0;
        for (int i = 0; i < 50; ++i) {
            double t = T * unit(rng);
            double k = cert.high_freq_start * std::pow(10.0, unit(rng));
            worst_high = std::max(worst_high, operator_norm(monodromy(prof, t, k)));
        }
        for (int i = 0; i < 50; ++i) {
            double t = T * unit(rng);
            double k = cert.low_freq_cutoff *
                       std::pow(cert.high_freq_start / cert.low_freq_cutoff, unit(rng));
            Mat2 m = monodromy(prof, t, k);
            worst_band =
                std::max(worst_band, operator_norm(monodromy_power(m, cert.band_power)));
        }
        double worst_rec = 0.0;
        for (double mult : {1.0, 2.0}) {
            auto frame = build_frame(prof, cert.high_freq_start * mult);
            for (double t : {0.0, 0.4 * T}) {
                Mat2 direct = monodromy(prof, t, cert.high_freq_start * mult);
                Mat2 rebuilt = reconstruct_monodromy(prof, frame, t);
                worst_rec = std::max(worst_rec, max_abs_entry_diff(rebuilt, direct));
            }
        }
        bool this_ok = worst_high < 1.0 && worst_band < 1.0 && worst_rec < 1e-6;
        ok = ok && this_ok;
        detail += "[N=" + fmt(cert.high_freq_start) + " p=" +
                  std::to_string((unsigned long long)cert.band_power) + " high " +
                  fmt(worst_high) + " band " + fmt(worst_band) + " rebuild " +
                  fmt(worst_rec) + "] ";
    }
    report(5, ok, detail + "(norms < 1, rebuild tol 1e-6, 50 probes per zone)");
}

TEST_CASE("6 energy norm decay rates") {
    Stopwatch sw;
    auto prof = DissipationProfile::sinusoid(1.0, 0.5, 0.0);
    RadialData data;
    data.dimension = 3;
    data.u1 = {1.0, -1.5};
    data.u2 = {0.0, 0.0};
    auto grid = FreqGrid::build(1e-6, 12.0, 256, 8);
    RunConfig defaults;
    auto times = defaults.slope_times();
    auto tr = energy_trace(prof, data, times, grid, {}, worker_threads());
    double s_dt = decay_slope(tr.dt_l2, 1e2, 1e4).slope;
    double s_grad = decay_slope(tr.grad_l2, 1e2, 1e4).slope;
    double s_u = decay_slope(tr.u_l2, 1e2, 1e4).slope;
    double predicted_u = -(data.dimension + 2.0 * data.u1.power) / 4.0;

    auto cert = zone_certificate(prof, {}, worker_threads(), 64, 256, 5.0, 800);
    auto tail = exponential_tail(prof, data, cert.low_freq_cutoff, defaults.tail_times(),
                                 grid, {}, worker_threads());
    double tail_rate = -exponential_rate(tail, 0.0, 48.0).slope;

    double secs = sw.seconds();
    bool ok = std::abs(s_dt + 1.0) < 0.1 && std::abs(s_grad + 0.5) < 0.05 &&
              std::abs(s_u - predicted_u) < 0.05 && tail_rate >= 0.95 * cert.delta_band &&
              secs < 300.0;
    report(6, ok,
           "slopes dt " + fmt(s_dt) + " (-1 +- 0.1), grad " + fmt(s_grad) +
               " (-0.5 +- 0.05), u " + fmt(s_u) + " (predicted " + fmt(predicted_u) +
               " +- 0.05), tail rate " + fmt(tail_rate) + " >= 0.95 * " +
               fmt(cert.delta_band) + ", " + fmt(secs) + " s (limit 300)");
}

TEST_CASE("7 weighted multiplier norm rates") {
    auto prof = DissipationProfile::sinusoid(1.0, 0.5, 0.0);
    auto times = log_grid(1e2, 1e4, 12);
    bool ok = true;
    std::string detail;
    struct Case {
        double r;
        int n;
    };
    for (Case c : {Case{2.0, 3}, Case{1.0, 3}, Case{2.0, 1}}) {
        double base = -double(c.n) / (2.0 * c.r);
        struct W {
            MultiplierWeight w;
            double target;
        };
        for (W w : {W{MultiplierWeight::Solution, base},
                    W{MultiplierWeight::Gradient, -0.5 + base},
                    W{MultiplierWeight::TimeDerivative, -1.0 + base}}) {
            auto tr = multiplier_lr_trace(prof, 0.5, times, c.r, c.n, w.w, 64, {},
                                          worker_threads());
            double slope = decay_slope(tr, 1e2, 1e4).slope;
            bool this_ok = std::abs(slope - w.target) < 0.05;
            ok = ok && this_ok;
            detail += fmt(slope) + "/" + fmt(w.target) + " ";
        }
    }
    report(7, ok, "slope/target: " + detail + "(tol 0.05)");
}

TEST_CASE("8 parabolic approximation of the low frequency part") {
    bool ok = true;
    std::string detail;
    for (auto prof : {DissipationProfile::constant(1.0),
                      DissipationProfile::sinusoid(1.0, 0.5, 0.0)}) {
        RadialData data;
        data.dimension = 3;
        data.u1 = {1.0, -1.5};
        data.u2 = {0.5, 0.5};
        auto grid = FreqGrid::build(1e-6, 4.0, 192, 8);
        auto times = log_grid(1.0, 1e4, 30);
        auto d = diffusion_difference(prof, data, times, grid, {}, worker_threads());
        double slope = decay_slope(d.difference, 1e2, 1e4).slope;
        double ratio =
            d.control.values.back() / std::max(d.difference.values.back(), 1e-300);
        bool this_ok = std::abs(slope + 1.0) < 0.1 && ratio >= 2.0;
        ok = ok && this_ok;
        detail += "[slope " + fmt(slope) + " (-1 +- 0.1), control ratio " + fmt(ratio) +
                  " (>= 2)] ";
    }
    report(8, ok, detail);
}

TEST_CASE("9 interval structure of the frequency axis") {
    auto sin_prof = DissipationProfile::sinusoid(1.0, 0.5, 0.0);
    auto si_sin = classify_stability_intervals(sin_prof, 30.0, 4000, {}, worker_threads());
    auto const_prof = DissipationProfile::constant(1.0);
    auto si_const =
        classify_stability_intervals(const_prof, 30.0, 4000, {}, worker_threads());
    bool ok = si_sin.tau0 > 0.0 && !si_sin.bands.empty() &&
              std::abs(si_const.tau0 - 1.0) < 1e-6 && si_const.bands.empty();
    std::string detail = "periodic case tau0 " + fmt(si_sin.tau0) + " with " +
                         std::to_string(si_sin.bands.size()) +
                         " higher window(s); constant case tau0 " + fmt(si_const.tau0) +
                         " (1 +- 1e-6) with " + std::to_string(si_const.bands.size()) +
                         " higher window(s)";
    report(9, ok, detail);
}

TEST_CASE("10 byte-identical reruns") {
    namespace fs = std::filesystem;
    fs::path root = fs::current_path() / "acceptance_scratch";
    fs::remove_all(root);
    fs::create_directories(root);
    std::ofstream cfg(root / "cfg.toml");
    cfg << "family = \"constant\"\n"
           "b0 = 1.0\n"
           "freq_max = 2.0\n"
           "scan_points = 200\n"
           "t_points = 8\n"
           "xi_points = 16\n"
           "spec_k_count = 50\n"
           "threads = 4\n"
           "seed = 4242\n";
    cfg.close();

    auto run = [&](const std::string& out) {
        for (const char* sub : {"spectrum", "bands", "zones", "alpha2"}) {
            std::string cmd = std::string(PDW_CLI_PATH) + " --config " +
                              (root / "cfg.toml").string() + " --out " +
                              (root / out).string() + " " + sub + " > /dev/null 2>&1";
            int rc = std::system(cmd.c_str());
            if (rc == -1 || !WIFEXITED(rc) || WEXITSTATUS(rc) != 0) return false;
        }
        return true;
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };

    bool ran = run("a") && run("b");
    bool identical = ran;
    std::string detail = ran ? "" : "CLI run failed; ";
    if (ran) {
        for (const char* f : {"spectrum.csv", "bands.json", "zones.json", "alpha2.json"}) {
            bool same = slurp(root / "a" / f) == slurp(root / "b" / f);
            identical = identical && same;
            if (!same) detail += std::string(f) + " differs; ";
        }
    }
    if (identical) detail = "spectrum.csv, bands.json, zones.json, alpha2.json identical";
    report(10, ran && identical, detail);
}

}

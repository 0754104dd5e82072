// Command line front end: runs the certified computations described by a flat
// key = value config file and writes deterministic CSV/JSON artifacts.
//
// Exit codes: 0 success, 1 configuration problem, 2 numerical failure,
// 3 a report check failed.

#include "pdw/config.hpp"
#include "pdw/errors.hpp"
#include "pdw/estimates.hpp"
#include "pdw/parallel.hpp"
#include "pdw/propagator.hpp"
#include "pdw/spectral.hpp"
#include "pdw/zones.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;
using namespace pdw;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

void write_json(const std::filesystem::path& p, const json& j) {
    write_text(p, j.dump(2) + "\n");
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[std::size_t(i)] = lo * std::pow(hi / lo, double(i) / double(n - 1));
    return v;
}

const char* class_name(SpectrumClass c) {
    switch (c) {
        case SpectrumClass::RealPair: return "real";
        case SpectrumClass::ComplexPair: return "complex";
        default: return "degenerate";
    }
}

// ===== subcommand bodies =====

int run_spectrum(const RunConfig& cfg) {
    auto prof = cfg.make_profile();
    auto opts = cfg.make_integrator();
    auto ks = log_spaced(cfg.spec_k_lo, cfg.spec_k_hi, cfg.spec_k_count);
    std::vector<MonodromySpectrum> sp(ks.size());
    parallel_for(ks.size(), cfg.threads, [&](std::size_t i) {
        Mat2 m = monodromy(prof, 0.0, ks[i], opts);
        sp[i] = spectrum(m, prof.period(), prof.mean_beta());
    });
    std::string csv =
        "freq,kappa1_re,kappa1_im,kappa2_re,kappa2_im,class,"
        "nu_plus_re,nu_plus_im,nu_minus_re,nu_minus_im\n";
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const auto& s = sp[i];
        csv += fmt(ks[i]) + "," + fmt(s.kappa1.real()) + "," + fmt(s.kappa1.imag()) + "," +
               fmt(s.kappa2.real()) + "," + fmt(s.kappa2.imag()) + "," +
               class_name(s.kind) + "," + fmt(s.nu_plus.real()) + "," +
               fmt(s.nu_plus.imag()) + "," + fmt(s.nu_minus.real()) + "," +
               fmt(s.nu_minus.imag()) + "\n";
    }
    write_text(std::filesystem::path(cfg.out_dir) / "spectrum.csv", csv);
    json j{{"profile", prof.describe()},
           {"rows", cfg.spec_k_count},
           {"freq_lo", cfg.spec_k_lo},
           {"freq_hi", cfg.spec_k_hi},
           {"file", "spectrum.csv"}};
    if (cfg.json) std::cout << j.dump(2) << "\n";
    else
        std::cout << "spectrum: " << cfg.spec_k_count << " rows in ["
                  << fmt(cfg.spec_k_lo) << ", " << fmt(cfg.spec_k_hi) << "] -> "
                  << (std::filesystem::path(cfg.out_dir) / "spectrum.csv").string() << "\n";
    return 0;
}

json bands_json(const DissipationProfile& prof, const StabilityIntervals& si) {
    json jb = json::array();
    for (const auto& b : si.bands) jb.push_back({{"lo", b.lo}, {"hi", b.hi}});
    return json{{"profile", prof.describe()},
                {"tau0", si.tau0},
                {"bands", jb},
                {"freq_max", si.freq_max},
                {"scan_points", si.scan_points}};
}

int run_bands(const RunConfig& cfg) {
    auto prof = cfg.make_profile();
    auto si = classify_stability_intervals(prof, cfg.freq_max, cfg.scan_points,
                                           cfg.make_integrator(), cfg.threads);
    json j = bands_json(prof, si);
    write_json(std::filesystem::path(cfg.out_dir) / "bands.json", j);
    if (cfg.json) std::cout << j.dump(2) << "\n";
    else {
        std::cout << "bands: tau0 = " << fmt(si.tau0) << ", " << si.bands.size()
                  << " real-pair window(s) above it\n";
        for (const auto& b : si.bands)
            std::cout << "  [" << fmt(b.lo) << ", " << fmt(b.hi) << "]\n";
    }
    return 0;
}

json alpha2_json(const DissipationProfile& prof, const SmallFreqExpansion& e) {
    auto rel = [](double a, double b) {
        return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
    };
    return json{{"profile", prof.describe()},
                {"alpha2_integral", e.alpha2_integral},
                {"alpha2_trace", e.alpha2_trace},
                {"alpha2_fit", e.alpha2_fit},
                {"pairwise_rel_spread",
                 std::max({rel(e.alpha2_integral, e.alpha2_trace),
                           rel(e.alpha2_integral, e.alpha2_fit),
                           rel(e.alpha2_trace, e.alpha2_fit)})},
                {"alpha1_residual", e.alpha1_residual},
                {"alpha3_magnitude", e.alpha3_magnitude},
                {"gamma", e.gamma},
                {"gamma_floquet_extrapolated", e.gamma_floquet}};
}

int run_alpha2(const RunConfig& cfg) {
    auto prof = cfg.make_profile();
    auto e = small_freq_expansion(prof, cfg.make_integrator());
    json j = alpha2_json(prof, e);
    write_json(std::filesystem::path(cfg.out_dir) / "alpha2.json", j);
    if (cfg.json) std::cout << j.dump(2) << "\n";
    else
        std::cout << "alpha2: integral " << fmt(e.alpha2_integral) << ", trace "
                  << fmt(e.alpha2_trace) << ", fit " << fmt(e.alpha2_fit) << "; gamma "
                  << fmt(e.gamma) << "\n";
    return 0;
}

struct ProbeSummary {
    int count = 0;
    double worst_high = 0.0;
    double worst_band = 0.0;
};

// Random soundness probes against the certificate: direct period-map norms
// must contract where the certificate says they do.
ProbeSummary probe_certificate(const DissipationProfile& prof, const ZoneCertificate& cert,
                               const IntegratorOptions& opts, std::uint64_t seed,
                               int probes_per_zone) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ProbeSummary ps;
    ps.count = probes_per_zone;
    double T = prof.period();
    for (int i = 0; i < probes_per_zone; ++i) {
        double t = T * unit(rng);
        double k = cert.high_freq_start * std::pow(10.0, unit(rng));  // up to 10 N
        double norm = operator_norm(monodromy(prof, t, k, opts));
        ps.worst_high = std::max(ps.worst_high, norm);
    }
    for (int i = 0; i < probes_per_zone; ++i) {
        double t = T * unit(rng);
        double k = cert.low_freq_cutoff *
                   std::pow(cert.high_freq_start / cert.low_freq_cutoff, unit(rng));
        Mat2 m = monodromy(prof, t, k, opts);
        double norm = operator_norm(monodromy_power(m, cert.band_power));
        ps.worst_band = std::max(ps.worst_band, norm);
    }
    return ps;
}

json zones_json(const DissipationProfile& prof, const ZoneCertificate& cert,
                const ProbeSummary& ps) {
    return json{{"profile", prof.describe()},
                {"high_freq_start", cert.high_freq_start},
                {"low_freq_cutoff", cert.low_freq_cutoff},
                {"tau0", cert.tau0},
                {"band_power", cert.band_power},
                {"sup_norm_high", cert.sup_norm_high},
                {"sup_norm_band", cert.sup_norm_band},
                {"delta_high", cert.delta_high},
                {"delta_band", cert.delta_band},
                {"criterion_value", cert.criterion_value},
                {"t_points", cert.t_points},
                {"xi_points", cert.xi_points},
                {"probes_per_zone", ps.count},
                {"probe_worst_high", ps.worst_high},
                {"probe_worst_band", ps.worst_band}};
}

int run_zones(const RunConfig& cfg) {
    auto prof = cfg.make_profile();
    auto opts = cfg.make_integrator();
    auto cert = zone_certificate(prof, opts, cfg.threads, cfg.t_points, cfg.xi_points,
                                 cfg.freq_max, cfg.scan_points);
    auto ps = probe_certificate(prof, cert, opts, cfg.seed, 20);
    json j = zones_json(prof, cert, ps);
    write_json(std::filesystem::path(cfg.out_dir) / "zones.json", j);
    if (cfg.json) std::cout << j.dump(2) << "\n";
    else
        std::cout << "zones: N = " << fmt(cert.high_freq_start) << ", c = "
                  << fmt(cert.low_freq_cutoff) << ", power = " << cert.band_power
                  << ", delta_high = " << fmt(cert.delta_high) << ", delta_band = "
                  << fmt(cert.delta_band) << ", probes ok = "
                  << (ps.worst_high < 1.0 && ps.worst_band < 1.0 ? "yes" : "NO") << "\n";
    if (!(ps.worst_high < 1.0 && ps.worst_band < 1.0))
        throw NumericalError("zones: a random probe contradicted the certificate");
    return 0;
}

std::string trace_csv(const EnergyTraces& tr) {
    std::string csv = "t,u_l2,grad_l2,dt_l2\n";
    for (std::size_t i = 0; i < tr.u_l2.times.size(); ++i)
        csv += fmt(tr.u_l2.times[i]) + "," + fmt(tr.u_l2.values[i]) + "," +
               fmt(tr.grad_l2.values[i]) + "," + fmt(tr.dt_l2.values[i]) + "\n";
    return csv;
}

int run_decay(const RunConfig& cfg) {
    auto prof = cfg.make_profile();
    auto opts = cfg.make_integrator();
    auto data = cfg.make_data();
    double k_max = std::max(8.0, 4.0 * cfg.freq_max / 3.75);  // generous top end
    FreqGrid grid = FreqGrid::build(cfg.grid_k_min, k_max, cfg.grid_panels, 8);
    auto times = cfg.slope_times();
    auto tr = energy_trace(prof, data, times, grid, opts, cfg.threads);
    auto su = decay_slope(tr.u_l2, cfg.slope_t_lo, cfg.slope_t_hi);
    auto sg = decay_slope(tr.grad_l2, cfg.slope_t_lo, cfg.slope_t_hi);
    auto sd = decay_slope(tr.dt_l2, cfg.slope_t_lo, cfg.slope_t_hi);
    write_text(std::filesystem::path(cfg.out_dir) / "decay_trace.csv", trace_csv(tr));
    json j{{"profile", prof.describe()},
           {"dimension", data.dimension},
           {"u1_power", data.u1.power},
           {"window", {{"t_lo", cfg.slope_t_lo}, {"t_hi", cfg.slope_t_hi}}},
           {"u_l2_slope", su.slope},
           {"grad_l2_slope", sg.slope},
           {"dt_l2_slope", sd.slope},
           {"file", "decay_trace.csv"}};
    write_json(std::filesystem::path(cfg.out_dir) / "decay.json", j);
    if (cfg.json) std::cout << j.dump(2) << "\n";
    else
        std::cout << "decay slopes: u " << fmt(su.slope) << ", grad " << fmt(sg.slope)
                  << ", dt " << fmt(sd.slope) << "\n";
    return 0;
}

int run_diffusion(const RunConfig& cfg) {
    auto prof = cfg.make_profile();
    auto opts = cfg.make_integrator();
    auto data = cfg.make_data();
    // The wave-heat difference lives at low frequency; integrate over a low
    // window wide enough to hold all the mass that has not decayed away.
    FreqGrid grid = FreqGrid::build(cfg.grid_k_min, 4.0, cfg.grid_panels, 8);
    auto times = cfg.slope_times();
    auto d = diffusion_difference(prof, data, times, grid, opts, cfg.threads);
    auto slope = decay_slope(d.difference, cfg.slope_t_lo, cfg.slope_t_hi);
    std::string csv = "t,difference,control\n";
    for (std::size_t i = 0; i < times.size(); ++i)
        csv += fmt(times[i]) + "," + fmt(d.difference.values[i]) + "," +
               fmt(d.control.values[i]) + "\n";
    write_text(std::filesystem::path(cfg.out_dir) / "diffusion_trace.csv", csv);
    double ratio_end = d.control.values.back() /
                       std::max(d.difference.values.back(), 1e-300);
    json j{{"profile", prof.describe()},
           {"alpha2", d.alpha2},
           {"gamma", d.gamma},
           {"difference_slope", slope.slope},
           {"control_ratio_at_end", ratio_end},
           {"file", "diffusion_trace.csv"}};
    write_json(std::filesystem::path(cfg.out_dir) / "diffusion.json", j);
    if (cfg.json) std::cout << j.dump(2) << "\n";
    else
        std::cout << "diffusion: slope " << fmt(slope.slope) << ", control ratio "
                  << fmt(ratio_end) << "\n";
    return 0;
}

// Aggregated pass/fail checks for the configured profile. Every entry carries
// its measured value, its tolerance, and its verdict.
int run_report(const RunConfig& cfg) {
    auto prof = cfg.make_profile();
    auto opts = cfg.make_integrator();
    double T = prof.period();
    double beta = prof.mean_beta();
    json checks = json::array();
    bool all_ok = true;
    auto add = [&](const std::string& name, double value, double tol, bool ok,
                   const std::string& detail) {
        checks.push_back({{"name", name},
                          {"value", value},
                          {"tolerance", tol},
                          {"pass", ok},
                          {"detail", detail}});
        all_ok = all_ok && ok;
    };

    {  // determinant identity on a t x k grid
        int nt = 16, nk = 48;
        double worst = 0.0;
        std::vector<double> tg(static_cast<std::size_t>(nt));
        for (int i = 0; i < nt; ++i) tg[std::size_t(i)] = T * double(i) / double(nt);
        std::vector<double> worst_k(std::size_t(nk), 0.0);
        parallel_for(std::size_t(nk), cfg.threads, [&](std::size_t j) {
            double k = 1e-3 * std::pow(8.0 / 1e-3, double(j) / double(nk - 1));
            auto ms = monodromy_sweep(prof, tg, k, opts);
            double w = 0.0;
            for (const auto& m : ms)
                w = std::max(w,
                             std::abs(m.det() * std::exp(2.0 * beta * T) - 1.0));
            worst_k[j] = w;
        });
        for (double w : worst_k) worst = std::max(worst, w);
        add("determinant_identity", worst, 1e-7, worst < 1e-7,
            "max |det M * exp(2 beta T) - 1| over the grid");
    }

    double tau0 = 0.0;
    {  // interval structure
        auto si = classify_stability_intervals(prof, cfg.freq_max, cfg.scan_points, opts,
                                               cfg.threads);
        tau0 = si.tau0;
        add("tau0_positive", si.tau0, 0.0, si.tau0 > 0.0, "end of the low real interval");
    }

    {  // low frequency expansion consistency
        auto e = small_freq_expansion(prof, opts);
        auto rel = [](double a, double b) {
            return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
        };
        double spread = std::max({rel(e.alpha2_integral, e.alpha2_trace),
                                  rel(e.alpha2_integral, e.alpha2_fit),
                                  rel(e.alpha2_trace, e.alpha2_fit)});
        add("alpha2_consistency", spread, 1e-5, spread < 1e-5,
            "pairwise relative spread of the three alpha2 routes");
        add("alpha1_residual", e.alpha1_residual, 1e-6, e.alpha1_residual < 1e-6,
            "first trace derivative at frequency zero");
        double gdiff = std::abs(e.gamma - e.gamma_floquet);
        add("gamma_consistency", gdiff, 1e-4, gdiff < 1e-4,
            "quadrature gamma vs Floquet extrapolation");
    }

    {  // zone certificate + probes
        auto cert = zone_certificate(prof, opts, cfg.threads, cfg.t_points, cfg.xi_points,
                                     cfg.freq_max, cfg.scan_points);
        auto ps = probe_certificate(prof, cert, opts, cfg.seed, 20);
        add("certificate_sup_high", cert.sup_norm_high, 1.0, cert.sup_norm_high < 1.0,
            "certified period-map bound above N");
        add("certificate_sup_band", cert.sup_norm_band, 1.0, cert.sup_norm_band < 1.0,
            "certified power bound on the window");
        add("probe_worst_high", ps.worst_high, 1.0, ps.worst_high < 1.0,
            "worst random period-map norm above N");
        add("probe_worst_band", ps.worst_band, 1.0, ps.worst_band < 1.0,
            "worst random powered norm on the window");
    }

    {  // diffusion behaviour
        auto data = cfg.make_data();
        FreqGrid grid = FreqGrid::build(cfg.grid_k_min, 4.0, cfg.grid_panels, 8);
        auto times = cfg.slope_times();
        auto d = diffusion_difference(prof, data, times, grid, opts, cfg.threads);
        auto slope = decay_slope(d.difference, cfg.slope_t_lo, cfg.slope_t_hi);
        add("diffusion_slope", slope.slope, 0.1, std::abs(slope.slope + 1.0) < 0.1,
            "wave-heat difference slope, target -1");
        double ratio = d.control.values.back() /
                       std::max(d.difference.values.back(), 1e-300);
        add("diffusion_control_ratio", ratio, 2.0, ratio >= 2.0,
            "mismatched datum must stall the convergence");
        (void)tau0;
    }

    json j{{"profile", prof.describe()}, {"all_pass", all_ok}, {"checks", checks}};
    write_json(std::filesystem::path(cfg.out_dir) / "report.json", j);
    if (cfg.json) std::cout << j.dump(2) << "\n";
    else {
        for (const auto& c : checks)
            std::cout << (c["pass"].get<bool>() ? "[pass] " : "[FAIL] ")
                      << c["name"].get<std::string>() << " = "
                      << fmt(c["value"].get<double>()) << " (tol "
                      << fmt(c["tolerance"].get<double>()) << ")\n";
        std::cout << (all_ok ? "report: all checks passed\n"
                             : "report: at least one check failed\n");
    }
    return all_ok ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Floquet analysis of the damped wave equation with periodic dissipation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    int threads_override = -1;
    long long seed_override = -1;
    bool json_override = false;

    app.add_option("--config", config_path, "path to key = value config file");
    app.add_option("--out", out_override, "output directory (overrides config)");
    app.add_option("--threads", threads_override, "worker threads (overrides config)");
    app.add_option("--seed", seed_override, "probe RNG seed (overrides config)");
    app.add_flag("--json", json_override, "print the JSON document to stdout");

    auto* c_spectrum = app.add_subcommand("spectrum", "period-map eigenvalue table");
    auto* c_bands = app.add_subcommand("bands", "frequency interval classification");
    auto* c_alpha2 = app.add_subcommand("alpha2", "low frequency expansion coefficients");
    auto* c_zones = app.add_subcommand("zones", "contraction certificate");
    auto* c_decay = app.add_subcommand("decay", "energy norm decay slopes");
    auto* c_diffusion = app.add_subcommand("diffusion", "wave-heat comparison");
    auto* c_report = app.add_subcommand("report", "aggregated pass/fail checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg =
            config_path.empty() ? RunConfig{} : parse_config_file(config_path);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (threads_override > 0) cfg.threads = threads_override;
        if (seed_override >= 0) cfg.seed = std::uint64_t(seed_override);
        if (json_override) cfg.json = true;

        if (c_spectrum->parsed()) return run_spectrum(cfg);
        if (c_bands->parsed()) return run_bands(cfg);
        if (c_alpha2->parsed()) return run_alpha2(cfg);
        if (c_zones->parsed()) return run_zones(cfg);
        if (c_decay->parsed()) return run_decay(cfg);
        if (c_diffusion->parsed()) return run_diffusion(cfg);
        if (c_report->parsed()) return run_report(cfg);
        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

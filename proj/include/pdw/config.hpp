#pragma once

#include "pdw/estimates.hpp"
#include "pdw/integrate.hpp"
#include "pdw/profile.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pdw {

// Flat key = value run configuration (a TOML-compatible subset: comments with
// '#', quoted strings, numbers, booleans, and [a, b, c] number lists).
// Unknown keys are rejected with their line number.
struct RunConfig {
    // dissipation profile
    std::string family = "sinusoid";
    double period = 1.0;
    double b0 = 1.0;
    double amp = 0.5;
    double phase = 0.0;
    double lo = 0.5;
    double hi = 1.5;
    double duty = 0.5;
    std::vector<double> fourier_cos;
    std::vector<double> fourier_sin;

    // integration
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = 0.0;

    // frequency scan / zones
    double freq_max = 30.0;
    int scan_points = 4000;
    int t_points = 64;
    int xi_points = 256;

    // spectrum table
    double spec_k_lo = 1e-3;
    double spec_k_hi = 8.0;
    int spec_k_count = 200;

    // initial data and radial quadrature
    int dimension = 3;
    double u1_amplitude = 1.0;
    double u1_power = std::numeric_limits<double>::quiet_NaN();  // default -n/2
    double u2_amplitude = 0.0;
    double u2_power = 0.0;
    double grid_k_min = 1e-6;
    int grid_panels = 256;

    // time windows
    double slope_t_lo = 100.0;
    double slope_t_hi = 10000.0;
    int slope_samples = 30;
    double tail_t_max = 48.0;
    int tail_samples = 25;

    // run control
    int threads = 1;
    std::uint64_t seed = 12345;
    std::string out_dir = "out";
    bool json = false;

    DissipationProfile make_profile() const;
    IntegratorOptions make_integrator() const;
    RadialData make_data() const;
    double resolved_u1_power() const;
    std::vector<double> slope_times() const;  // log-spaced, 1 .. slope_t_hi
    std::vector<double> tail_times() const;   // linear, 0 .. tail_t_max
};

RunConfig parse_config_text(const std::string& text, const std::string& source_name);
RunConfig parse_config_file(const std::string& path);

} // namespace pdw

#include "pdw/zones.hpp"
#include "pdw/errors.hpp"
#include "pdw/mat2.hpp"
#include "pdw/parallel.hpp"
#include "pdw/propagator.hpp"
#include "pdw/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pdw {

namespace {

constexpr double freq_search_limit = 1048576.0;  // 2^20

double contraction_criterion(const DissipationProfile& prof, const HighFreqFrame& frame,
                             int t_points) {
    double T = prof.period();
    double worst = 0.0;
    for (int i = 0; i < t_points; ++i) {
        double t = T * double(i) / double(t_points);
        double v = operator_norm(frame.frame(t + T)) *
                   std::exp(frame.remainder_integral(t, t + T)) *
                   operator_norm(frame.frame_inverse(t));
        worst = std::max(worst, v);
    }
    return worst;
}

} // namespace

HighZoneResult find_high_zone(const DissipationProfile& prof, int t_points, double start,
                              const IntegratorOptions& opts) {
    opts.validate();
    if (t_points < 4 || !(start > 0.0))
        throw std::invalid_argument("find_high_zone: bad grid or starting frequency");
    double target = std::exp(prof.mean_beta() * prof.period());
    for (double freq = start; freq <= freq_search_limit; freq *= 2.0) {
        double crit;
        try {
            HighFreqFrame frame = build_frame(prof, freq);
            crit = contraction_criterion(prof, frame, t_points);
        } catch (const FrameSingular&) {
            continue;  // frame not yet invertible this low; keep doubling
        }
        if (crit < target) return {freq, crit};
    }
    throw SearchExhausted("find_high_zone: no contraction below the frequency limit");
}

BandPowerResult find_power_k(const DissipationProfile& prof, double c, double freq_hi,
                             int t_points, int xi_points, const IntegratorOptions& opts,
                             int threads) {
    opts.validate();
    if (!(c > 0.0) || !(freq_hi > c))
        throw std::invalid_argument("find_power_k: need 0 < c < upper frequency");
    if (t_points < 4 || xi_points < 4)
        throw std::invalid_argument("find_power_k: grid too coarse");
    double T = prof.period();
    double beta = prof.mean_beta();

    std::vector<double> t_grid(static_cast<std::size_t>(t_points));
    for (int i = 0; i < t_points; ++i) t_grid[std::size_t(i)] = T * double(i) / double(t_points);
    std::vector<double> k_grid(static_cast<std::size_t>(xi_points));
    double ratio = freq_hi / c;
    for (int j = 0; j < xi_points; ++j)
        k_grid[std::size_t(j)] =
            c * std::pow(ratio, double(j) / double(xi_points - 1));

    std::vector<Mat2> maps(std::size_t(t_points) * std::size_t(xi_points));
    parallel_for(std::size_t(xi_points), threads, [&](std::size_t j) {
        auto ms = monodromy_sweep(prof, t_grid, k_grid[j], opts);
        for (int i = 0; i < t_points; ++i) {
            const Mat2& m = ms[std::size_t(i)];
            MonodromySpectrum sp = spectrum(m, T, beta);
            if (sp.rho >= 1.0 - 1e-9)
                throw SpectralRadiusViolation(
                    "find_power_k: period map not strictly stable on the window");
            maps[j * std::size_t(t_points) + std::size_t(i)] = m;
        }
    });

    std::uint64_t power = 1;
    while (true) {
        double worst = 0.0;
        for (const Mat2& m : maps) worst = std::max(worst, operator_norm(m));
        if (worst < 1.0) return {power, worst};
        if (power > (std::uint64_t(1) << 20))
            throw SearchExhausted("find_power_k: no contraction power below 2^20");
        for (Mat2& m : maps) m = m * m;
        power *= 2;
    }
}

ZoneCertificate zone_certificate(const DissipationProfile& prof, const IntegratorOptions& opts,
                                 int threads, int t_points, int xi_points,
                                 double freq_max_scan, int scan_points) {
    StabilityIntervals scan =
        classify_stability_intervals(prof, freq_max_scan, scan_points, opts, threads);
    HighZoneResult hz = find_high_zone(prof, t_points, 4.0, opts);
    double c = 0.5 * scan.tau0;
    BandPowerResult bp = find_power_k(prof, c, hz.freq_start, t_points, xi_points, opts, threads);

    double T = prof.period();
    ZoneCertificate cert;
    cert.high_freq_start = hz.freq_start;
    cert.low_freq_cutoff = c;
    cert.tau0 = scan.tau0;
    cert.band_power = bp.power;
    cert.sup_norm_high = std::exp(-prof.mean_beta() * T) * hz.criterion_value;
    cert.sup_norm_band = bp.sup_norm;
    cert.criterion_value = hz.criterion_value;
    cert.t_points = t_points;
    cert.xi_points = xi_points;
    cert.delta_high = std::log(1.0 / cert.sup_norm_high) / T;
    cert.delta_band = std::log(1.0 / cert.sup_norm_band) / (double(cert.band_power) * T);
    return cert;
}

std::pair<double, double> decay_constants(const ZoneCertificate& cert) {
    return {cert.delta_high, cert.delta_band};
}

} // namespace pdw

#pragma once

#include "pdw/integrate.hpp"
#include "pdw/profile.hpp"

#include <cstdint>
#include <utility>

namespace pdw {

// Frequency-splitting certificate: above high_freq_start every period map is a
// strict contraction (witnessed by the frame criterion value); on the window
// [low_freq_cutoff, high_freq_start] some fixed power of the period map is a
// strict contraction uniformly over anchors. The two sup norms convert into
// per-time decay rates delta_high and delta_band.
struct ZoneCertificate {
    double high_freq_start = 0.0;       // N
    double low_freq_cutoff = 0.0;       // c = tau0 / 2
    double tau0 = 0.0;
    std::uint64_t band_power = 0;       // contraction power on [c, N]
    double sup_norm_high = 0.0;         // bound on ||M|| above N
    double sup_norm_band = 0.0;         // max ||M^power|| on the window grid
    double delta_high = 0.0;
    double delta_band = 0.0;
    double criterion_value = 0.0;       // accepted contraction product
    int t_points = 0;
    int xi_points = 0;
};

struct HighZoneResult {
    double freq_start = 0.0;
    double criterion_value = 0.0;
};

// Doubles the candidate frequency from `start` until
//   sup_t ||N1(t+T)|| exp(int_t^{t+T} ||R2||) ||N1^{-1}(t)|| < exp(beta T)
// over a uniform anchor grid. Candidates whose frame is singular are skipped.
// Throws SearchExhausted past 2^20.
HighZoneResult find_high_zone(const DissipationProfile& prof, int t_points = 64,
                              double start = 4.0, const IntegratorOptions& opts = {});

struct BandPowerResult {
    std::uint64_t power = 0;
    double sup_norm = 0.0;
};

// Smallest power of two p with max ||M(t, k)^p|| < 1 over a t x k grid
// covering [0, T) x [c, N] (k log-spaced). Every grid point must first have
// spectral radius < 1 - 1e-9 (SpectralRadiusViolation otherwise); throws
// SearchExhausted if doubling the power past 2^20 never contracts.
BandPowerResult find_power_k(const DissipationProfile& prof, double c, double freq_hi,
                             int t_points = 64, int xi_points = 256,
                             const IntegratorOptions& opts = {}, int threads = 1);

// Full certificate: interval scan for tau0, then the two searches above.
ZoneCertificate zone_certificate(const DissipationProfile& prof,
                                 const IntegratorOptions& opts = {}, int threads = 1,
                                 int t_points = 64, int xi_points = 256,
                                 double freq_max_scan = 30.0, int scan_points = 4000);

// (delta_high, delta_band) from the certificate's sup norms.
std::pair<double, double> decay_constants(const ZoneCertificate& cert);

} // namespace pdw

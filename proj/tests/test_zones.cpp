#include <doctest.h>

#include "pdw/propagator.hpp"
#include "pdw/spectral.hpp"
#include "pdw/zones.hpp"

#include <cmath>

using namespace pdw;

TEST_SUITE("zones") {

TEST_CASE("high zone for constant damping starts at the first candidate") {
    auto p = DissipationProfile::constant(1.0);
    auto hz = find_high_zone(p, 16);
    CHECK(hz.freq_start == doctest::Approx(4.0));
    CHECK(hz.criterion_value < std::exp(1.0));
    CHECK(hz.criterion_value > 1.0);  // the product can never drop below e^{0}
}

TEST_CASE("high zone criterion accepted for the sinusoid") {
    auto p = DissipationProfile::sinusoid(1.0, 0.5, 0.0);
    auto hz = find_high_zone(p, 16);
    CHECK(hz.freq_start <= 16.0);
    CHECK(hz.criterion_value < std::exp(1.0));
}

TEST_CASE("high zone really contracts the period map") {
    auto p = DissipationProfile::sinusoid(1.0, 0.5, 0.0);
    auto hz = find_high_zone(p, 16);
    for (double mult : {1.0, 3.7, 12.0}) {
        for (double t : {0.0, 0.41}) {
            double norm = operator_norm(monodromy(p, t, hz.freq_start * mult));
            CHECK(norm < 1.0);
        }
    }
}

TEST_CASE("band power contracts on the window") {
    auto p = DissipationProfile::constant(1.0);
    auto bp = find_power_k(p, 0.5, 4.0, 8, 24, {}, 4);
    CHECK(bp.power >= 1);
    CHECK(bp.sup_norm < 1.0);
    // Direct check at points not on the search grid.
    for (double k : {0.63, 1.9, 3.1}) {
        Mat2 m = monodromy(p, 0.2, k);
        CHECK(operator_norm(monodromy_power(m, bp.power)) < 1.0);
    }
}

TEST_CASE("full certificate for the sinusoid") {
    auto p = DissipationProfile::sinusoid(1.0, 0.5, 0.0);
    auto cert = zone_certificate(p, {}, 4, 16, 32, 5.0, 600);
    CHECK(cert.tau0 == doctest::Approx(0.977).epsilon(0.05));
    CHECK(cert.low_freq_cutoff == doctest::Approx(0.5 * cert.tau0));
    CHECK(cert.high_freq_start >= 4.0);
    CHECK(cert.sup_norm_high < 1.0);
    CHECK(cert.sup_norm_band < 1.0);
    CHECK(cert.band_power >= 1);
    CHECK(cert.delta_high > 0.0);
    CHECK(cert.delta_band > 0.0);
    double T = p.period();
    CHECK(cert.delta_high ==
          doctest::Approx(std::log(1.0 / cert.sup_norm_high) / T).epsilon(1e-12));
    CHECK(cert.delta_band ==
          doctest::Approx(std::log(1.0 / cert.sup_norm_band) /
                          (double(cert.band_power) * T))
              .epsilon(1e-12));
    auto [dh, db] = decay_constants(cert);
    CHECK(dh == doctest::Approx(cert.delta_high));
    CHECK(db == doctest::Approx(cert.delta_band));
}

TEST_CASE("full certificate for the square wave") {
    auto p = DissipationProfile::square_wave(0.5, 1.5, 0.5);
    auto cert = zone_certificate(p, {}, 4, 16, 32, 5.0, 600);
    CHECK(cert.sup_norm_high < 1.0);
    CHECK(cert.sup_norm_band < 1.0);
    // Probe the band zone away from the grid.
    for (double k : {0.9, 2.3}) {
        Mat2 m = monodromy(p, 0.37, k);
        CHECK(operator_norm(monodromy_power(m, cert.band_power)) < 1.0);
    }
}

TEST_CASE("band search rejects an unstable window") {
    // The spectral radius check must fire if the window contains a frequency
    // whose period map cannot ever contract. There is no such profile among
    // the dissipative families (rho < 1 always holds for positive damping), so
    // instead verify the guard against the identity-like edge: frequencies
    // near zero have rho -> 1 and must still pass the 1 - 1e-9 gate with room.
    auto p = DissipationProfile::sinusoid(1.0, 0.5, 0.0);
    auto s = spectrum(monodromy(p, 0.0, 1e-3), p.period(), p.mean_beta());
    CHECK(s.rho < 1.0 - 1e-9);
}

}

#pragma once

#include "pdw/integrate.hpp"
#include "pdw/mat2.hpp"
#include "pdw/profile.hpp"

#include <utility>
#include <vector>

namespace pdw {

// Eigenstructure of a period map. The determinant is pinned analytically to
// exp(-2 beta T), so only the real part of the trace enters; both eigenvalues
// are reconstructed from (trace, determinant) rather than from a generic
// eigensolver, keeping the product and modulus identities exact.
enum class SpectrumClass { RealPair, ComplexPair, Degenerate };

struct MonodromySpectrum {
    cplx kappa1;  // larger modulus first
    cplx kappa2;
    cplx nu_plus;   // -log(kappa1) / T, principal branch
    cplx nu_minus;  // -log(kappa2) / T
    SpectrumClass kind = SpectrumClass::Degenerate;
    double discriminant = 0.0;
    double rho = 0.0;  // spectral radius
};

// Throws DeterminantMismatch if |det m - exp(-2 beta T)| > 1e-6.
MonodromySpectrum spectrum(const Mat2& m, double period, double beta);

// Frequency intervals by eigenvalue type at anchor t = 0. tau0 closes the
// low-frequency RealPair interval (0, tau0); bands lists the RealPair windows
// above tau0 (between them the pair is complex of modulus exp(-beta T)).
// Interval ends are bisected to 1e-8; windows narrower than 1e-6 (grazing
// contacts) are dropped. A window still open at freq_max is reported clipped.
struct StabilityBand {
    double lo = 0.0;
    double hi = 0.0;
};

struct StabilityIntervals {
    double tau0 = 0.0;
    std::vector<StabilityBand> bands;
    double freq_max = 0.0;
    int scan_points = 0;
};

StabilityIntervals classify_stability_intervals(const DissipationProfile& prof,
                                                double freq_max, int scan_points,
                                                const IntegratorOptions& opts = {},
                                                int threads = 1);

// Scalar mode solve at frequency k: returns (u, u') at the requested ascending
// times for initial data (u0, up0) at t = 0.
std::vector<std::pair<cplx, cplx>> mode_path(const DissipationProfile& prof, double freq,
                                             cplx u0, cplx up0, const std::vector<double>& ts,
                                             const IntegratorOptions& opts = {});

// Quasiperiodic solution u(t) = e^{-nu t} f(t) with f periodic, f(0) = 1,
// built from an eigenvector of the period map at anchor 0. Samples of f and f'
// over one period support Hermite interpolation; eval_u extends by the Floquet
// relation to all t >= 0.
struct FloquetSolution {
    cplx nu;
    cplx kappa;
    cplx dtf0;  // f'(0)
    double period = 1.0;
    std::vector<double> times;
    std::vector<cplx> f;
    std::vector<cplx> fprime;
    double periodicity_defect = 0.0;  // |f(T) - 1|

    cplx eval_f(double tau) const;
    cplx eval_fprime(double tau) const;
    cplx eval_u(double t) const;
    cplx eval_uprime(double t) const;
};

// Both branches at one frequency; plus = slower-decaying eigenvalue. Throws
// DegenerateMonodromy at a band edge and EigenvectorDegenerate when an
// eigenvector has no displacement component, which is exactly the fast branch
// at freq = 0: there the pair does not exist as a chart and only the slow
// branch below is available.
std::pair<FloquetSolution, FloquetSolution> floquet_solutions(
    const DissipationProfile& prof, double freq, const IntegratorOptions& opts = {},
    int samples_per_period = 256);

// Slow branch only. At freq = 0 it is the exact constant solution (nu = 0,
// f identically 1); for freq > 0 it is the first element of the pair above.
FloquetSolution floquet_slow(const DissipationProfile& prof, double freq,
                             const IntegratorOptions& opts = {},
                             int samples_per_period = 256);

// Solutions with data (1, 0) and (0, 1): returns (Phi1(t), Phi2(t)). Computed
// by the direct mode solve and independently from the Floquet pair; the two
// must agree to 1e-7. Throws DenominatorSmall if the branches nearly collide.
std::pair<cplx, cplx> phi_basis(const DissipationProfile& prof, double freq, double t,
                                const IntegratorOptions& opts = {});

// ===== low frequency expansion =====

// Quadratic coefficient of the slow decay exponent, three independent routes:
// a closed-form double integral of the accumulated damping, a Richardson
// finite difference of the period-map trace at frequency zero, and a least
// squares fit of the exponent over a small-frequency window.
double alpha2_integral(const DissipationProfile& prof, double quad_tol = 1e-10);
double alpha2_trace_fd(const DissipationProfile& prof, const IntegratorOptions& opts = {});
std::pair<double, double> alpha2_exponent_fit(const DissipationProfile& prof,
                                              const IntegratorOptions& opts = {});
double alpha1_trace_residual(const DissipationProfile& prof,
                             const IntegratorOptions& opts = {});

// Derivative coefficient of the slow branch at frequency zero:
//   gamma = 2 beta - (1 - e^{-2 beta T}) / int_0^T lambda^{-2}.
// Zero for constant dissipation. The Floquet route extrapolates f'(0) of the
// fast branch from small positive frequencies (that branch's eigenvector chart
// is singular at zero, so the limit is taken, not evaluated).
double gamma_coefficient(const DissipationProfile& prof, double quad_tol = 1e-12);
double gamma_floquet_extrapolated(const DissipationProfile& prof,
                                  const IntegratorOptions& opts = {});

struct SmallFreqExpansion {
    double alpha2_integral = 0.0;
    double alpha2_trace = 0.0;
    double alpha2_fit = 0.0;
    double alpha1_residual = 0.0;
    double alpha3_magnitude = 0.0;
    double gamma = 0.0;
    double gamma_floquet = 0.0;
};

SmallFreqExpansion small_freq_expansion(const DissipationProfile& prof,
                                        const IntegratorOptions& opts = {});

} // namespace pdw

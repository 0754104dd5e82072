#pragma once

#include "pdw/integrate.hpp"
#include "pdw/mat2.hpp"
#include "pdw/profile.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace pdw {

// Radial frequency profile amplitude * k^power * exp(-k^2 / 2). The power
// lets the data mimic rough energy-space initial states: power = -n/2 puts
// the profile exactly on the borderline where the displacement norm stops
// gaining extra decay from the data.
struct RadialProfile {
    double amplitude = 1.0;
    double power = 0.0;

    double eval(double k) const;
};

// Rotation-invariant initial data in dimension n: displacement spectrum u1,
// velocity spectrum u2.
struct RadialData {
    int dimension = 3;
    RadialProfile u1{1.0, 0.0};
    RadialProfile u2{0.0, 0.0};
};

// Geometric panels between k_min and k_max, Gauss-Legendre nodes per panel.
// Weights carry the dk measure only; the k^{n-1} surface factor is applied at
// accumulation time.
struct FreqGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    double k_min = 0.0, k_max = 0.0;
    int panels = 0, order = 0;

    static FreqGrid build(double k_min, double k_max, int panels, int order = 8);
};

// Surface measure of the unit sphere in R^n: 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);

// ===== single-mode evolution =====

enum class EvolvePath { Auto, Direct, PowerStep, Floquet };

// (u(t), u'(t)) for the mode at frequency k with data (u1, u2) at t = 0.
// Direct integrates the mode equation over [0, t]; PowerStep factors the
// propagator through powers of the period map at the anchor t mod T; Floquet
// expands the data in the two quasiperiodic branches. Auto uses Direct below
// 20 periods and PowerStep beyond. At freq = 0 the reduced equation is solved
// in closed form up to one quadrature of lambda^{-2}.
std::pair<cplx, cplx> evolve_mode(const DissipationProfile& prof, double freq, cplx u1,
                                  cplx u2, double t, const IntegratorOptions& opts = {},
                                  EvolvePath path = EvolvePath::Auto);

// ===== norm traces =====

struct NormTrace {
    std::vector<double> times;
    std::vector<double> values;
};

struct EnergyTraces {
    NormTrace u_l2;
    NormTrace grad_l2;
    NormTrace dt_l2;
};

EnergyTraces energy_trace(const DissipationProfile& prof, const RadialData& data,
                          const std::vector<double>& times, const FreqGrid& grid,
                          const IntegratorOptions& opts = {}, int threads = 1);

struct EnergyNorms {
    double u_l2 = 0.0;
    double grad_l2 = 0.0;
    double dt_l2 = 0.0;
};

// Norms at one time, with a convergence control: the same panels at doubled
// Gauss order must agree to 1e-6 relative or QuadratureNotConverged is thrown.
EnergyNorms energy_norms(const DissipationProfile& prof, const RadialData& data, double t,
                         const FreqGrid& grid, const IntegratorOptions& opts = {},
                         int threads = 1);

// Least squares fit of log(value) against log(1 + t) over the window
// [t_lo, t_hi]. Needs at least 8 positive samples (InsufficientSamples).
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
    int count = 0;
};

SlopeFit decay_slope(const NormTrace& trace, double t_lo, double t_hi);

// Same fit against t itself (for exponential windows); slope is the signed
// exponential rate.
SlopeFit exponential_rate(const NormTrace& trace, double t_lo, double t_hi);

// ===== low-frequency multiplier norms =====

enum class MultiplierWeight { Solution, Gradient, TimeDerivative };

constexpr double lr_infinity = std::numeric_limits<double>::infinity();

// L^r norm over {k <= cutoff} of the slow-branch multiplier
//   Solution        e^{-Re nu t} |f(t mod T)|
//   Gradient        k e^{-Re nu t} |f(t mod T)|
//   TimeDerivative  e^{-Re nu t} (|nu| |f| + |f'|)
// with the k^{n-1} radial measure; r = lr_infinity takes the sup instead.
NormTrace multiplier_lr_trace(const DissipationProfile& prof, double cutoff,
                              const std::vector<double>& times, double r, int dimension,
                              MultiplierWeight weight, int panels = 64,
                              const IntegratorOptions& opts = {}, int threads = 1);

// ===== tail, diffusion =====

// Energy content above the cutoff: the three norms (summed) with a smooth
// ramp from 0 to 1 across [cutoff, 2 cutoff] under the integral.
NormTrace exponential_tail(const DissipationProfile& prof, const RadialData& data,
                           double cutoff, const std::vector<double>& times,
                           const FreqGrid& grid, const IntegratorOptions& opts = {},
                           int threads = 1);

// Scalar datum for the limiting parabolic problem. Throws
// DegenerateDenominator if 2 beta - gamma is numerically zero.
cplx w0_from_data(cplx u1, cplx u2, double beta, double gamma);

// Mode of the limiting problem: w0 * exp(-alpha2 k^2 t).
cplx heat_mode(double alpha2, double freq, cplx w0, double t);

struct DiffusionTraces {
    NormTrace difference;  // || u(t) - heat(t) || over the low grid
    NormTrace control;     // same with the datum deliberately mismatched by 10%
    double alpha2 = 0.0;
    double gamma = 0.0;
};

DiffusionTraces diffusion_difference(const DissipationProfile& prof, const RadialData& data,
                                     const std::vector<double>& times, const FreqGrid& grid,
                                     const IntegratorOptions& opts = {}, int threads = 1);

} // namespace pdw

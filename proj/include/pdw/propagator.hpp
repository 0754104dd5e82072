#pragma once

#include "pdw/integrate.hpp"
#include "pdw/mat2.hpp"
#include "pdw/profile.hpp"

#include <utility>
#include <vector>

namespace pdw {

// First order system matrix at frequency k: rows act on V = (k u, D_t u).
//   A(t, k) = ( 0      k      )
//             ( k      2 i b(t) )
// The propagator solves dE/dt = i A(t) E.
Mat2 coefficient_matrix(const DissipationProfile& prof, double t, double freq);

// Propagator E(t, s, k) with E(s, s) = I. For t < s the forward propagator
// E(s, t, k) is computed and inverted (its determinant is a known phase-free
// exponential, so the inverse is well conditioned in the regimes used here).
Mat2 fundamental_solution(const DissipationProfile& prof, double t, double s, double freq,
                          const IntegratorOptions& opts = {});

// E(ts[i], s, k) for ascending ts with ts.front() >= s, in one forward pass.
std::vector<Mat2> fundamental_path(const DissipationProfile& prof, double s,
                                   const std::vector<double>& ts, double freq,
                                   const IntegratorOptions& opts = {});

// Period map M(t, k) = E(t + T, t, k), solved directly over [t, t + T].
Mat2 monodromy(const DissipationProfile& prof, double t, double freq,
               const IntegratorOptions& opts = {});

// M(t_i, k) for a grid of anchors in [0, T), via one solve over [0, 2T] and
// the factorisation M(t) = E(t + T, 0) E(t, 0)^{-1}.
std::vector<Mat2> monodromy_sweep(const DissipationProfile& prof,
                                  const std::vector<double>& t_grid, double freq,
                                  const IntegratorOptions& opts = {});

// M^p by repeated squaring.
inline Mat2 monodromy_power(const Mat2& m, unsigned long long p) { return matrix_power(m, p); }

// Oscillatory damping integrals
//   n+(t, k) = int_0^t exp(+2ik(t-s)) b(s) ds,   n-(t, k) = conj(n+).
// Evaluated by panelwise Filon quadrature: piecewise cubic Hermite fit of b
// (exact segment constants for the square wave) times the exact exponential
// moment integrals, so accuracy does not degrade as k grows.
std::pair<cplx, cplx> n_pm(const DissipationProfile& prof, double t, double freq,
                           int panels_per_period = 512);

// High frequency diagonalising frame anchored at t = 0, tabulated on [0, 2T].
//
//   N1(t) = ( 1      -n+(t) )        R2(t) = -i b(t) N1(t)^{-1} diag(n-, n+)
//           ( -n-(t)  1     )
//
// N1 conjugates the rotated system into diagonal-plus-remainder form with the
// remainder R2 of size O(1/k); the tabulated data supports the contraction
// criterion and the product reconstruction of the period map.
class HighFreqFrame {
  public:
    HighFreqFrame(const DissipationProfile& prof, double freq, int panels_per_period);

    double freq() const { return freq_; }
    const DissipationProfile& profile() const { return prof_; }

    cplx n_plus(double tau) const;
    Mat2 frame(double tau) const;
    Mat2 frame_inverse(double tau) const;
    // The segment hint pins the square wave branch for evaluation points that
    // sit exactly on a jump; pass any interior point of the current segment.
    Mat2 remainder(double tau, double segment_hint) const;
    double remainder_norm(double tau, double segment_hint) const;

    // Trapezoid prefix of ||R2|| on the tabulation grid.
    double remainder_integral(double tau_lo, double tau_hi) const;

    // Grid diagnostics over [0, 2T].
    double sup_frame_minus_identity() const { return sup_n1_minus_id_; }
    double sup_frame_norm() const { return sup_n1_; }
    double sup_frame_inverse_norm() const { return sup_n1_inv_; }
    double sup_remainder_norm() const { return sup_r2_; }
    double min_frame_det() const { return min_det_; }
    double sup_n_abs() const { return sup_n_abs_; }

  private:
    std::size_t panel_index(double tau) const;

    DissipationProfile prof_;
    double freq_;
    double t_max_;
    std::vector<double> grid_;
    std::vector<cplx> n_nodes_;
    std::vector<double> r2_prefix_;
    double sup_n1_minus_id_ = 0.0, sup_n1_ = 0.0, sup_n1_inv_ = 0.0, sup_r2_ = 0.0;
    double min_det_ = 1.0, sup_n_abs_ = 0.0;
};

// Builds the frame; throws FrameSingular if det N1 = 1 - |n+|^2 drops below
// 0.5 anywhere on the grid (frequency too small for the frame to be useful).
HighFreqFrame build_frame(const DissipationProfile& prof, double freq,
                          int panels_per_period = 512);

// Reassembles M(t, k) from the frame data:
//   M(t) = e^{-beta T} W N1(t+T) diag(e^{ikT}, e^{-ikT}) Q(t+T, t) N1(t)^{-1} W^{-1}
// where W is the constant rotation (1,-1;1,1)/sqrt(2) and Q solves the phase
// conjugated remainder equation dQ/dtau = i D0(t-tau) R2(tau) D0(tau-t) Q.
// The bound ||Q|| <= exp(int ||R2||) is checked and a NumericalError thrown on
// violation. Requires t in [0, T].
Mat2 reconstruct_monodromy(const DissipationProfile& prof, const HighFreqFrame& frame,
                           double t, const IntegratorOptions& opts = {});
Mat2 reconstruct_monodromy(const DissipationProfile& prof, double t, double freq,
                           const IntegratorOptions& opts = {});

} // namespace pdw

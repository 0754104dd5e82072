#pragma once

#include <string>
#include <vector>

namespace pdw {

// Time-periodic dissipation coefficient b(t) >= 0 with period T and positive
// mean. Four families, each with closed-form antiderivative so that the
// accumulated damping exp(integral of b) never goes through quadrature.
//
//   Constant    b(t) = b0
//   Sinusoid    b(t) = b0 + amp * sin(2 pi t / T + phase)
//   SquareWave  b(t) = lo on [0, duty*T), hi on [duty*T, T), extended T-periodically
//   Fourier     b(t) = a0 + sum_k (ck cos(2 pi k t / T) + sk sin(2 pi k t / T))
//
// Construction validates nonnegativity and positive mean and throws
// std::invalid_argument on violation.
class DissipationProfile {
  public:
    enum class Family { Constant, Sinusoid, SquareWave, Fourier };

    static DissipationProfile constant(double b0, double period = 1.0);
    static DissipationProfile sinusoid(double b0, double amp, double phase, double period = 1.0);
    static DissipationProfile square_wave(double lo, double hi, double duty, double period = 1.0);
    static DissipationProfile fourier(double a0, std::vector<double> cos_coef,
                                      std::vector<double> sin_coef, double period = 1.0);

    Family family() const { return family_; }
    double period() const { return period_; }

    // Pointwise values. b_prime throws UnsupportedFamily for SquareWave
    // (the derivative there lives at the jumps, outside pointwise evaluation).
    double eval_b(double t) const;
    double b_prime(double t) const;

    // At jump times the square wave is right-continuous. Inside an integration
    // segment known to contain no jump, eval_b_stable(t, mid) evaluates the
    // square wave at the segment midpoint so that stage evaluations at the
    // segment ends cannot read the neighbouring branch.
    double eval_b_stable(double t, double segment_mid) const;

    // Antiderivative of b from 0 to t, closed form, valid for all real t.
    double integral_b(double t) const;

    // Mean value over one period; positive by construction.
    double mean_beta() const { return beta_; }

    // Accumulated damping lambda(t) = exp(integral_b(t)). log_lambda is the
    // overflow-safe version every internal consumer should use.
    double log_lambda(double t) const { return integral_b(t); }
    double lambda(double t) const;

    // freq^2 - b(t)^2 - b'(t), the effective potential after removing first
    // order damping. Throws UnsupportedFamily for SquareWave.
    double hill_potential(double t, double freq) const;

    bool has_jumps() const { return family_ == Family::SquareWave; }

    // Jump times strictly inside (t0, t1), sorted ascending. Empty for
    // families without jumps.
    std::vector<double> jump_times_between(double t0, double t1) const;

    std::string describe() const;

  private:
    DissipationProfile() = default;

    Family family_ = Family::Constant;
    double period_ = 1.0;
    double beta_ = 0.0;
    // Constant/Sinusoid: p0_ = b0, p1_ = amp, p2_ = phase.
    // SquareWave: p0_ = lo, p1_ = hi, p2_ = duty.
    double p0_ = 0.0, p1_ = 0.0, p2_ = 0.0;
    std::vector<double> cos_coef_, sin_coef_;
};

} // namespace pdw

#include "pdw/profile.hpp"
#include "pdw/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pdw {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

} // namespace

DissipationProfile DissipationProfile::constant(double b0, double period) {
    require(period > 0.0, "profile: period must be positive");
    require(b0 > 0.0, "profile: constant coefficient must be positive");
    DissipationProfile p;
    p.family_ = Family::Constant;
    p.period_ = period;
    p.p0_ = b0;
    p.beta_ = b0;
    return p;
}

DissipationProfile DissipationProfile::sinusoid(double b0, double amp, double phase,
                                                double period) {
    require(period > 0.0, "profile: period must be positive");
    require(b0 > 0.0, "profile: sinusoid mean must be positive");
    require(b0 - std::abs(amp) >= 0.0, "profile: sinusoid dips below zero");
    DissipationProfile p;
    p.family_ = Family::Sinusoid;
    p.period_ = period;
    p.p0_ = b0;
    p.p1_ = amp;
    p.p2_ = phase;
    p.beta_ = b0;
    return p;
}

DissipationProfile DissipationProfile::square_wave(double lo, double hi, double duty,
                                                   double period) {
    require(period > 0.0, "profile: period must be positive");
    require(lo >= 0.0 && hi >= 0.0, "profile: square wave levels must be nonnegative");
    require(duty > 0.0 && duty < 1.0, "profile: duty must lie in (0,1)");
    DissipationProfile p;
    p.family_ = Family::SquareWave;
    p.period_ = period;
    p.p0_ = lo;
    p.p1_ = hi;
    p.p2_ = duty;
    p.beta_ = duty * lo + (1.0 - duty) * hi;
    require(p.beta_ > 0.0, "profile: square wave mean must be positive");
    return p;
}

DissipationProfile DissipationProfile::fourier(double a0, std::vector<double> cos_coef,
                                               std::vector<double> sin_coef, double period) {
    require(period > 0.0, "profile: period must be positive");
    require(a0 > 0.0, "profile: fourier mean must be positive");
    DissipationProfile p;
    p.family_ = Family::Fourier;
    p.period_ = period;
    p.p0_ = a0;
    p.beta_ = a0;
    p.cos_coef_ = std::move(cos_coef);
    p.sin_coef_ = std::move(sin_coef);
    // No closed-form positivity criterion for a trigonometric polynomial;
    // sample densely instead.
    const int n = 10000;
    for (int i = 0; i <= n; ++i) {
        double t = period * double(i) / double(n);
        require(p.eval_b(t) >= -1e-12, "profile: fourier series takes negative values");
    }
    return p;
}

double DissipationProfile::eval_b(double t) const {
    switch (family_) {
        case Family::Constant:
            return p0_;
        case Family::Sinusoid:
            return p0_ + p1_ * std::sin(two_pi * t / period_ + p2_);
        case Family::SquareWave: {
            double tau = t - period_ * std::floor(t / period_);
            return tau < p2_ * period_ ? p0_ : p1_;
        }
        case Family::Fourier: {
            double v = p0_;
            double w = two_pi / period_;
            for (std::size_t k = 0; k < cos_coef_.size(); ++k)
                v += cos_coef_[k] * std::cos(w * double(k + 1) * t);
            for (std::size_t k = 0; k < sin_coef_.size(); ++k)
                v += sin_coef_[k] * std::sin(w * double(k + 1) * t);
            return v;
        }
    }
    return 0.0;
}

double DissipationProfile::b_prime(double t) const {
    switch (family_) {
        case Family::Constant:
            return 0.0;
        case Family::Sinusoid:
            return p1_ * (two_pi / period_) * std::cos(two_pi * t / period_ + p2_);
        case Family::SquareWave:
            throw UnsupportedFamily("profile: square wave has no pointwise derivative");
        case Family::Fourier: {
            double v = 0.0;
            double w = two_pi / period_;
            for (std::size_t k = 0; k < cos_coef_.size(); ++k)
                v -= cos_coef_[k] * w * double(k + 1) * std::sin(w * double(k + 1) * t);
            for (std::size_t k = 0; k < sin_coef_.size(); ++k)
                v += sin_coef_[k] * w * double(k + 1) * std::cos(w * double(k + 1) * t);
            return v;
        }
    }
    return 0.0;
}

double DissipationProfile::eval_b_stable(double t, double segment_mid) const {
    if (family_ == Family::SquareWave) return eval_b(segment_mid);
    return eval_b(t);
}

double DissipationProfile::integral_b(double t) const {
    switch (family_) {
        case Family::Constant:
            return p0_ * t;
        case Family::Sinusoid: {
            double w = two_pi / period_;
            return p0_ * t + (p1_ / w) * (std::cos(p2_) - std::cos(w * t + p2_));
        }
        case Family::SquareWave: {
            double m = std::floor(t / period_);
            double tau = t - m * period_;
            double split = p2_ * period_;
            double partial = tau < split ? p0_ * tau : p0_ * split + p1_ * (tau - split);
            return m * beta_ * period_ + partial;
        }
        case Family::Fourier: {
            double v = p0_ * t;
            double w = two_pi / period_;
            for (std::size_t k = 0; k < cos_coef_.size(); ++k) {
                double wk = w * double(k + 1);
                v += cos_coef_[k] / wk * std::sin(wk * t);
            }
            for (std::size_t k = 0; k < sin_coef_.size(); ++k) {
                double wk = w * double(k + 1);
                v += sin_coef_[k] / wk * (1.0 - std::cos(wk * t));
            }
            return v;
        }
    }
    return 0.0;
}

double DissipationProfile::lambda(double t) const { return std::exp(integral_b(t)); }

double DissipationProfile::hill_potential(double t, double freq) const {
    if (family_ == Family::SquareWave)
        throw UnsupportedFamily("profile: hill potential undefined for square wave");
    double b = eval_b(t);
    return freq * freq - b * b - b_prime(t);
}

std::vector<double> DissipationProfile::jump_times_between(double t0, double t1) const {
    std::vector<double> out;
    if (family_ != Family::SquareWave || !(t1 > t0)) return out;
    // Jumps sit at m*T and (m + duty)*T. Walk candidates from below t0.
    double m = std::floor(t0 / period_) - 1.0;
    for (;; m += 1.0) {
        double at_start = m * period_;
        double at_duty = (m + p2_) * period_;
        if (at_start > t0 && at_start < t1) out.push_back(at_start);
        if (at_duty > t0 && at_duty < t1) out.push_back(at_duty);
        if (at_start >= t1) break;
    }
    return out;
}

std::string DissipationProfile::describe() const {
    std::ostringstream os;
    switch (family_) {
        case Family::Constant:
            os << "Constant(b0=" << p0_ << ", T=" << period_ << ")";
            break;
        case Family::Sinusoid:
            os << "Sinusoid(b0=" << p0_ << ", amp=" << p1_ << ", phase=" << p2_
               << ", T=" << period_ << ")";
            break;
        case Family::SquareWave:
            os << "SquareWave(lo=" << p0_ << ", hi=" << p1_ << ", duty=" << p2_
               << ", T=" << period_ << ")";
            break;
        case Family::Fourier:
            os << "Fourier(a0=" << p0_ << ", " << cos_coef_.size() << " cos, "
               << sin_coef_.size() << " sin, T=" << period_ << ")";
            break;
    }
    return os.str();
}

} // namespace pdw

#include "pdw/propagator.hpp"
#include "pdw/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace pdw {

namespace {

constexpr cplx iu{0.0, 1.0};

// State layout for 2x2 propagator solves: two columns, each (v1, v2) as
// re/im pairs: y = (Re v1, Im v1, Re v2, Im v2 | columns 1, 2).
Mat2 state_to_mat(const std::array<double, 8>& y) {
    return Mat2{{y[0], y[1]}, {y[4], y[5]}, {y[2], y[3]}, {y[6], y[7]}};
}

std::array<double, 8> mat_to_state(const Mat2& m) {
    return {m.a.real(), m.a.imag(), m.c.real(), m.c.imag(),
            m.b.real(), m.b.imag(), m.d.real(), m.d.imag()};
}

// dV/dt = i A(t) V for V = (v1, v2): v1' = i k v2, v2' = i k v1 - 2 b v2.
struct PropagatorRHS {
    const DissipationProfile& prof;
    double k;
    double seg_mid;
    void operator()(double t, const std::array<double, 8>& y, std::array<double, 8>& dy) const {
        double b = prof.eval_b_stable(t, seg_mid);
        for (int c = 0; c < 2; ++c) {
            int o = 4 * c;
            double v1r = y[o + 0], v1i = y[o + 1], v2r = y[o + 2], v2i = y[o + 3];
            dy[o + 0] = -k * v2i;
            dy[o + 1] = k * v2r;
            dy[o + 2] = -k * v1i - 2.0 * b * v2r;
            dy[o + 3] = k * v1r - 2.0 * b * v2i;
        }
    }
};

void advance_state(const DissipationProfile& prof, double k, double a, double b,
                   std::array<double, 8>& y, const IntegratorOptions& opts) {
    if (b <= a) return;
    auto splits = prof.jump_times_between(a, b);
    auto factory = [&](double mid) { return PropagatorRHS{prof, k, mid}; };
    rk45_segmented<8>(factory, a, b, y, opts, opts.effective_max_step(prof.period()), splits);
}

// Exponential moment integrals int_0^h s^m exp(mu s) ds, m = 0..3. The series
// branch keeps full accuracy when |mu| h is small and the recurrence would
// cancel.
std::array<cplx, 4> exp_moments(cplx mu, double h) {
    std::array<cplx, 4> im;
    double amuh = std::abs(mu) * h;
    if (amuh < 0.5) {
        cplx muh = mu * h;
        double hp = h;
        for (int m = 0; m < 4; ++m) {
            cplx sum = 1.0 / double(m + 1);
            cplx pw = 1.0;
            double fact = 1.0;
            for (int j = 1; j < 40; ++j) {
                pw *= muh;
                fact *= double(j);
                cplx tj = pw / (fact * double(m + j + 1));
                sum += tj;
                if (std::abs(tj) < 1e-18 * std::abs(sum)) break;
            }
            im[m] = hp * sum;
            hp *= h;
        }
    } else {
        cplx emuh = std::exp(mu * h);
        im[0] = (emuh - 1.0) / mu;
        double hm = 1.0;
        for (int m = 1; m < 4; ++m) {
            hm *= h;
            im[m] = (hm * emuh - double(m) * im[m - 1]) / mu;
        }
    }
    return im;
}

// Cubic coefficients of the coefficient fit on a panel [u0, u1]: Hermite for
// smooth families, the exact segment constant for the square wave.
std::array<double, 4> panel_poly(const DissipationProfile& prof, double u0, double u1) {
    double mid = 0.5 * (u0 + u1);
    if (prof.has_jumps()) return {prof.eval_b(mid), 0.0, 0.0, 0.0};
    double h = u1 - u0;
    double b0 = prof.eval_b(u0), b1 = prof.eval_b(u1);
    double m0 = prof.b_prime(u0), m1 = prof.b_prime(u1);
    double slope = (b1 - b0) / h;
    return {b0, m0, (3.0 * slope - 2.0 * m0 - m1) / h, (m0 + m1 - 2.0 * slope) / (h * h)};
}

// Contribution of panel [u0, u0 + h] to n+(u0 + h) given the panel polynomial:
// exp(2ikh) sum_m c_m I_m(-2ik, h).
cplx panel_contribution(const std::array<double, 4>& c, double k, double h) {
    auto im = exp_moments(cplx{0.0, -2.0 * k}, h);
    cplx s = c[0] * im[0] + c[1] * im[1] + c[2] * im[2] + c[3] * im[3];
    return std::exp(cplx{0.0, 2.0 * k * h}) * s;
}

std::vector<double> filon_grid(const DissipationProfile& prof, double t_end,
                               int panels_per_period) {
    std::vector<double> g;
    double h = prof.period() / double(panels_per_period);
    long nfull = long(std::floor(t_end / h + 1e-9));
    g.reserve(std::size_t(nfull) + 8);
    for (long j = 0; j <= nfull; ++j) g.push_back(double(j) * h);
    for (double s : prof.jump_times_between(0.0, t_end)) g.push_back(s);
    if (g.empty() || g.back() < t_end) g.push_back(t_end);
    std::sort(g.begin(), g.end());
    double tol = 1e-12 * std::max(1.0, t_end);
    g.erase(std::unique(g.begin(), g.end(),
                        [tol](double x, double y) { return std::abs(x - y) < tol; }),
            g.end());
    if (g.back() > t_end) g.back() = t_end;
    return g;
}

} // namespace

Mat2 coefficient_matrix(const DissipationProfile& prof, double t, double freq) {
    return Mat2{0.0, freq, freq, 2.0 * iu * prof.eval_b(t)};
}

Mat2 fundamental_solution(const DissipationProfile& prof, double t, double s, double freq,
                          const IntegratorOptions& opts) {
    opts.validate();
    if (t == s) return Mat2::identity();
    if (t < s) return fundamental_solution(prof, s, t, freq, opts).inverse();
    auto y = mat_to_state(Mat2::identity());
    advance_state(prof, freq, s, t, y, opts);
    return state_to_mat(y);
}

std::vector<Mat2> fundamental_path(const DissipationProfile& prof, double s,
                                   const std::vector<double>& ts, double freq,
                                   const IntegratorOptions& opts) {
    opts.validate();
    std::vector<Mat2> out;
    out.reserve(ts.size());
    auto y = mat_to_state(Mat2::identity());
    double cur = s;
    for (double t : ts) {
        if (t < cur)
            throw std::invalid_argument("fundamental_path: times must ascend from the anchor");
        advance_state(prof, freq, cur, t, y, opts);
        cur = t;
        out.push_back(state_to_mat(y));
    }
    return out;
}

Mat2 monodromy(const DissipationProfile& prof, double t, double freq,
               const IntegratorOptions& opts) {
    opts.validate();
    auto y = mat_to_state(Mat2::identity());
    advance_state(prof, freq, t, t + prof.period(), y, opts);
    return state_to_mat(y);
}

std::vector<Mat2> monodromy_sweep(const DissipationProfile& prof,
                                  const std::vector<double>& t_grid, double freq,
                                  const IntegratorOptions& opts) {
    opts.validate();
    double T = prof.period();
    for (double t : t_grid)
        if (t < 0.0 || t >= T)
            throw std::invalid_argument("monodromy_sweep: anchors must lie in [0, T)");
    std::vector<double> obs;
    obs.reserve(2 * t_grid.size());
    for (double t : t_grid) {
        obs.push_back(t);
        obs.push_back(t + T);
    }
    std::sort(obs.begin(), obs.end());
    obs.erase(std::unique(obs.begin(), obs.end()), obs.end());
    auto path = fundamental_path(prof, 0.0, obs, freq, opts);
    auto locate = [&](double t) {
        auto it = std::lower_bound(obs.begin(), obs.end(), t);
        return std::size_t(it - obs.begin());
    };
    std::vector<Mat2> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        const Mat2& e_t = path[locate(t)];
        const Mat2& e_tT = path[locate(t + T)];
        out.push_back(e_tT * e_t.inverse());
    }
    return out;
}

std::pair<cplx, cplx> n_pm(const DissipationProfile& prof, double t, double freq,
                           int panels_per_period) {
    if (t < 0.0) throw std::invalid_argument("n_pm: time must be nonnegative");
    cplx np{0.0, 0.0};
    if (t > 0.0) {
        auto grid = filon_grid(prof, t, panels_per_period);
        for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
            double u0 = grid[j], u1 = grid[j + 1];
            double h = u1 - u0;
            auto c = panel_poly(prof, u0, u1);
            np = std::exp(cplx{0.0, 2.0 * freq * h}) * np + panel_contribution(c, freq, h);
        }
    }
    return {np, std::conj(np)};
}

// ===== high frequency frame =====

HighFreqFrame::HighFreqFrame(const DissipationProfile& prof, double freq,
                             int panels_per_period)
    : prof_(prof), freq_(freq), t_max_(2.0 * prof.period()) {
    if (!(freq > 0.0)) throw std::invalid_argument("frame: frequency must be positive");
    grid_ = filon_grid(prof_, t_max_, panels_per_period);
    n_nodes_.resize(grid_.size());
    r2_prefix_.resize(grid_.size());
    n_nodes_[0] = 0.0;
    r2_prefix_[0] = 0.0;
    cplx np{0.0, 0.0};
    for (std::size_t j = 0; j + 1 < grid_.size(); ++j) {
        double u0 = grid_[j], u1 = grid_[j + 1];
        double h = u1 - u0;
        auto c = panel_poly(prof_, u0, u1);
        np = std::exp(cplx{0.0, 2.0 * freq_ * h}) * np + panel_contribution(c, freq_, h);
        n_nodes_[j + 1] = np;
    }
    for (std::size_t j = 0; j < grid_.size(); ++j) {
        cplx n = n_nodes_[j];
        double det = 1.0 - std::norm(n);
        min_det_ = std::min(min_det_, det);
        sup_n_abs_ = std::max(sup_n_abs_, std::abs(n));
    }
    if (min_det_ < 0.5)
        throw FrameSingular("frame: determinant below 0.5, frequency too small");
    for (std::size_t j = 0; j < grid_.size(); ++j) {
        Mat2 n1 = frame(grid_[j]);
        sup_n1_ = std::max(sup_n1_, operator_norm(n1));
        sup_n1_inv_ = std::max(sup_n1_inv_, operator_norm(frame_inverse(grid_[j])));
        sup_n1_minus_id_ = std::max(sup_n1_minus_id_, operator_norm(n1 - Mat2::identity()));
    }
    for (std::size_t j = 0; j + 1 < grid_.size(); ++j) {
        double u0 = grid_[j], u1 = grid_[j + 1];
        double mid = 0.5 * (u0 + u1);
        double r0 = remainder_norm(u0, mid);
        double r1 = remainder_norm(u1, mid);
        sup_r2_ = std::max(sup_r2_, std::max(r0, r1));
        r2_prefix_[j + 1] = r2_prefix_[j] + 0.5 * (u0 < u1 ? (u1 - u0) * (r0 + r1) : 0.0);
    }
}

std::size_t HighFreqFrame::panel_index(double tau) const {
    auto it = std::upper_bound(grid_.begin(), grid_.end(), tau);
    if (it == grid_.begin()) return 0;
    std::size_t j = std::size_t(it - grid_.begin()) - 1;
    return std::min(j, grid_.size() - 2);
}

cplx HighFreqFrame::n_plus(double tau) const {
    if (tau <= 0.0) return {0.0, 0.0};
    if (tau > t_max_ + 1e-12)
        throw std::invalid_argument("frame: evaluation outside tabulated range");
    std::size_t j = panel_index(tau);
    double u0 = grid_[j];
    double h = tau - u0;
    if (h <= 0.0) return n_nodes_[j];
    auto c = panel_poly(prof_, u0, grid_[j + 1]);
    return std::exp(cplx{0.0, 2.0 * freq_ * h}) * n_nodes_[j] +
           panel_contribution(c, freq_, h);
}

Mat2 HighFreqFrame::frame(double tau) const {
    cplx n = n_plus(tau);
    return Mat2{1.0, -n, -std::conj(n), 1.0};
}

Mat2 HighFreqFrame::frame_inverse(double tau) const {
    cplx n = n_plus(tau);
    double det = 1.0 - std::norm(n);
    return Mat2{1.0 / det, n / det, std::conj(n) / det, 1.0 / det};
}

Mat2 HighFreqFrame::remainder(double tau, double segment_hint) const {
    double b = prof_.eval_b_stable(tau, segment_hint);
    cplx n = n_plus(tau);
    double det = 1.0 - std::norm(n);
    cplx s = -iu * b / det;
    cplx nc = std::conj(n);
    return Mat2{s * nc, s * n * n, s * nc * nc, s * n};
}

double HighFreqFrame::remainder_norm(double tau, double segment_hint) const {
    return operator_norm(remainder(tau, segment_hint));
}

double HighFreqFrame::remainder_integral(double tau_lo, double tau_hi) const {
    auto prefix_at = [&](double tau) {
        if (tau <= 0.0) return 0.0;
        std::size_t j = panel_index(tau);
        double u0 = grid_[j], u1 = grid_[j + 1];
        double w = u1 > u0 ? (tau - u0) / (u1 - u0) : 0.0;
        return r2_prefix_[j] + w * (r2_prefix_[j + 1] - r2_prefix_[j]);
    };
    return prefix_at(tau_hi) - prefix_at(tau_lo);
}

HighFreqFrame build_frame(const DissipationProfile& prof, double freq,
                          int panels_per_period) {
    return HighFreqFrame(prof, freq, panels_per_period);
}

namespace {

// dQ/dtau = i D(t - tau) R2(tau) D(tau - t) Q with D(s) = diag(e^{iks}, e^{-iks}).
struct RemainderRHS {
    const HighFreqFrame& frame;
    double t_anchor;
    double seg_mid;
    void operator()(double tau, const std::array<double, 8>& y, std::array<double, 8>& dy) const {
        Mat2 r2 = frame.remainder(tau, seg_mid);
        double k = frame.freq();
        cplx ph = std::exp(cplx{0.0, 2.0 * k * (t_anchor - tau)});
        cplx b11 = iu * r2.a;
        cplx b12 = iu * r2.b * ph;
        cplx b21 = iu * r2.c / ph;
        cplx b22 = iu * r2.d;
        for (int c = 0; c < 2; ++c) {
            int o = 4 * c;
            cplx v1{y[o + 0], y[o + 1]}, v2{y[o + 2], y[o + 3]};
            cplx d1 = b11 * v1 + b12 * v2;
            cplx d2 = b21 * v1 + b22 * v2;
            dy[o + 0] = d1.real();
            dy[o + 1] = d1.imag();
            dy[o + 2] = d2.real();
            dy[o + 3] = d2.imag();
        }
    }
};

} // namespace

Mat2 reconstruct_monodromy(const DissipationProfile& prof, const HighFreqFrame& frame,
                           double t, const IntegratorOptions& opts) {
    opts.validate();
    double T = prof.period();
    if (t < 0.0 || t > T)
        throw std::invalid_argument("reconstruct: anchor must lie in [0, T]");
    double k = frame.freq();

    auto y = mat_to_state(Mat2::identity());
    auto splits = prof.jump_times_between(t, t + T);
    auto factory = [&](double mid) { return RemainderRHS{frame, t, mid}; };
    rk45_segmented<8>(factory, t, t + T, y, opts, opts.effective_max_step(T), splits);
    Mat2 q = state_to_mat(y);

    double bound = std::exp(frame.remainder_integral(t, t + T));
    if (operator_norm(q) > bound + 1e-9)
        throw NumericalError("reconstruct: remainder propagator exceeds its integral bound");

    const double r = 1.0 / std::numbers::sqrt2;
    Mat2 w{r, -r, r, r};
    Mat2 winv{r, r, -r, r};
    Mat2 d0 = Mat2::diag(std::exp(iu * k * T), std::exp(-iu * k * T));
    double pre = std::exp(-prof.mean_beta() * T);
    return pre * (w * frame.frame(t + T) * d0 * q * frame.frame_inverse(t) * winv);
}

Mat2 reconstruct_monodromy(const DissipationProfile& prof, double t, double freq,
                           const IntegratorOptions& opts) {
    HighFreqFrame frame = build_frame(prof, freq);
    return reconstruct_monodromy(prof, frame, t, opts);
}

} // namespace pdw

#include "pdw/integrate.hpp"

#include <cmath>

namespace pdw {

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || depth > 48) {
        if (depth > 48 && std::abs(delta) > 15.0 * tol)
            throw QuadratureNotConverged("quad: adaptive simpson recursion too deep");
        return left + right + delta / 15.0;
    }
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

} // namespace

double quad_simpson(const std::function<double(double)>& f, double a, double b,
                    double abs_tol) {
    if (b == a) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, 0);
}

double quad_adaptive(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, const std::vector<double>& splits) {
    double total = 0.0;
    double lo = a;
    double seg_tol = abs_tol / double(splits.size() + 1);
    for (std::size_t s = 0; s <= splits.size(); ++s) {
        double hi = s < splits.size() ? splits[s] : b;
        if (hi <= lo) continue;
        total += quad_simpson(f, lo, hi, seg_tol);
        lo = hi;
    }
    return total;
}

PanelRule gauss_panel(double a, double b, int order) {
    static const double x8[4] = {0.18343464249564980494, 0.52553240991632898582,
                                 0.79666647741362673959, 0.96028985649753623168};
    static const double w8[4] = {0.36268378337836198297, 0.31370664587788728734,
                                 0.22238103445337447054, 0.10122853629037625915};
    static const double x16[8] = {0.09501250983763744019, 0.28160355077925891323,
                                  0.45801677765722738634, 0.61787624440264374845,
                                  0.75540440835500303390, 0.86563120238783174388,
                                  0.94457502307323257608, 0.98940093499164993260};
    static const double w16[8] = {0.18945061045506849629, 0.18260341504492358887,
                                  0.16915651939500253819, 0.14959598881657673208,
                                  0.12462897125553387205, 0.09515851168249278481,
                                  0.06225352393864789286, 0.02715245941175409485};
    const double* xs = nullptr;
    const double* ws = nullptr;
    int half = 0;
    if (order == 8) {
        xs = x8;
        ws = w8;
        half = 4;
    } else if (order == 16) {
        xs = x16;
        ws = w16;
        half = 8;
    } else {
        throw std::invalid_argument("gauss_panel: supported orders are 8 and 16");
    }
    PanelRule r;
    r.nodes.reserve(2 * std::size_t(half));
    r.weights.reserve(2 * std::size_t(half));
    double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
    // Symmetric pairs, ascending within the panel.
    for (int i = half - 1; i >= 0; --i) {
        r.nodes.push_back(mid - rad * xs[i]);
        r.weights.push_back(rad * ws[i]);
    }
    for (int i = 0; i < half; ++i) {
        r.nodes.push_back(mid + rad * xs[i]);
        r.weights.push_back(rad * ws[i]);
    }
    return r;
}

} // namespace pdw

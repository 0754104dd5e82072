#pragma once

#include <cmath>
#include <complex>

namespace pdw {

using cplx = std::complex<double>;

// 2x2 complex matrix, row major: (a b; c d). Everything the propagator needs
// has a closed form at this size, so no linear algebra library is involved.
struct Mat2 {
    cplx a{0.0}, b{0.0}, c{0.0}, d{0.0};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(cplx x, cplx y) { return {x, 0.0, 0.0, y}; }

    cplx trace() const { return a + d; }
    cplx det() const { return a * d - b * c; }

    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 operator*(cplx s) const { return {a * s, b * s, c * s, d * s}; }

    Mat2 inverse() const {
        cplx dt = det();
        return Mat2{d / dt, -b / dt, -c / dt, a / dt};
    }

    Mat2 adjoint() const {
        return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
    }
};

inline Mat2 operator*(cplx s, const Mat2& m) { return m * s; }

inline cplx mat2_apply_row1(const Mat2& m, cplx v1, cplx v2) { return m.a * v1 + m.b * v2; }
inline cplx mat2_apply_row2(const Mat2& m, cplx v1, cplx v2) { return m.c * v1 + m.d * v2; }

inline double frobenius_norm(const Mat2& m) {
    return std::sqrt(std::norm(m.a) + std::norm(m.b) + std::norm(m.c) + std::norm(m.d));
}

inline double max_abs_entry_diff(const Mat2& x, const Mat2& y) {
    double r = std::abs(x.a - y.a);
    r = std::max(r, std::abs(x.b - y.b));
    r = std::max(r, std::abs(x.c - y.c));
    r = std::max(r, std::abs(x.d - y.d));
    return r;
}

// Spectral norm: largest singular value, from the eigenvalues of m* m.
// For a 2x2 Hermitian matrix (p r; conj(r) q) the eigenvalues are
// (p+q)/2 +- sqrt(((p-q)/2)^2 + |r|^2).
inline double operator_norm(const Mat2& m) {
    double p = std::norm(m.a) + std::norm(m.c);
    double q = std::norm(m.b) + std::norm(m.d);
    cplx r = std::conj(m.a) * m.b + std::conj(m.c) * m.d;
    double mid = 0.5 * (p + q);
    double rad = std::sqrt(0.25 * (p - q) * (p - q) + std::norm(r));
    double lam = mid + rad;
    return lam > 0.0 ? std::sqrt(lam) : 0.0;
}

// m^k by binary exponentiation. k = 0 gives the identity.
inline Mat2 matrix_power(Mat2 m, unsigned long long k) {
    Mat2 r = Mat2::identity();
    while (k > 0) {
        if (k & 1ULL) r = r * m;
        k >>= 1ULL;
        if (k > 0) m = m * m;
    }
    return r;
}

} // namespace pdw

// Legendre polynomials, associated Legendre functions, unit-normalized
// spherical harmonics, factorials and the Riemann zeta function at integer
// argument.
//
// Conventions: Y_{l,m} carries the Condon-Shortley phase (-1)^m exactly once,
// in the harmonic; assoc_legendre is the plain (phase-free) function. The
// normalization is sqrt((2l+1)(l-m)! / (4 pi (l+m)!)), so that the harmonics
// are orthonormal on S^2 and satisfy the addition theorem
//   sum_m Y_{l,m}(d1) Y*_{l,m}(d2) = (2l+1)/(4 pi) P_l(d1 . d2)
// and the z-rotation covariance Y_{l,m}(d rotated by a) = e^{-i m a} Y_{l,m}(d).
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>

#include "rotodec/constants.hpp"
#include "rotodec/core_types.hpp"

namespace rotodec {

struct SphericalHarmonicIndex {
    int l;
    int m;

    SphericalHarmonicIndex(int l_, int m_) : l(l_), m(m_) {
        if (l < 0) throw std::invalid_argument("SphericalHarmonicIndex: l < 0");
        if (std::abs(m) > l) throw std::invalid_argument("SphericalHarmonicIndex: |m| > l");
    }
};

namespace detail {
inline double clamp_to_unit(double x, const char* who) {
    if (std::abs(x) > 1.0 + 1e-12) throw std::domain_error(std::string(who) + ": |x| > 1");
    return std::min(1.0, std::max(-1.0, x));
}
} // namespace detail

// Legendre polynomial P_l(x) by the three-term recurrence.
inline double legendre_p(int l, double x) {
    if (l < 0) throw std::invalid_argument("legendre_p: l < 0");
    x = detail::clamp_to_unit(x, "legendre_p");
    if (l == 0) return 1.0;
    double pm = 1.0, p = x;
    for (int j = 2; j <= l; ++j) {
        const double pn = ((2.0 * j - 1.0) * x * p - (j - 1.0) * pm) / j;
        pm = p;
        p = pn;
    }
    return p;
}

// Associated Legendre function P_l^m(x), m >= 0, without the Condon-Shortley
// phase: P_m^m = (2m-1)!! (1-x^2)^{m/2}, then upward recurrence in l.
inline double assoc_legendre(int l, int m, double x) {
    if (l < 0 || m < 0) throw std::invalid_argument("assoc_legendre: negative index");
    if (m > l) throw std::invalid_argument("assoc_legendre: m > l");
    x = detail::clamp_to_unit(x, "assoc_legendre");
    const double somx2 = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
    double pmm = 1.0;
    for (int i = 1; i <= m; ++i) pmm *= (2.0 * i - 1.0) * somx2;
    if (l == m) return pmm;
    double pmmp1 = x * (2.0 * m + 1.0) * pmm;
    if (l == m + 1) return pmmp1;
    double pll = 0.0;
    for (int ll = m + 2; ll <= l; ++ll) {
        pll = (x * (2.0 * ll - 1.0) * pmmp1 - (ll + m - 1.0) * pmm) / (ll - m);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    return pll;
}

// n! as a double; exact for n <= 22, overflow error beyond 170.
inline double factorial(int n) {
    if (n < 0) throw std::invalid_argument("factorial: n < 0");
    if (n > 170) throw std::overflow_error("factorial: overflow beyond n = 170");
    double r = 1.0;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

namespace detail {
// (l-m)!/(l+m)! computed as a running product, avoiding large intermediates.
inline double factorial_ratio(int l, int m) {
    double r = 1.0;
    for (int k = l - m + 1; k <= l + m; ++k) r /= k;
    return r;
}
} // namespace detail

inline std::complex<double> spherical_harmonic(const SphericalHarmonicIndex& idx,
                                               const UnitDirection& d) {
    const int l = idx.l, ma = std::abs(idx.m);
    const double norm =
        std::sqrt((2.0 * l + 1.0) / (4.0 * pi) * detail::factorial_ratio(l, ma));
    const double plm = assoc_legendre(l, ma, std::cos(d.theta()));
    const double sign = (ma % 2 == 0) ? 1.0 : -1.0; // Condon-Shortley, applied once
    const std::complex<double> y =
        sign * norm * plm * std::polar(1.0, ma * d.phi());
    if (idx.m >= 0) return y;
    return sign * std::conj(y); // Y_{l,-m} = (-1)^m conj(Y_{l,m})
}

// sum_m Y_{l,m}(d1) Y*_{l,m}(d2); real up to round-off, equal to
// (2l+1)/(4 pi) P_l(d1 . d2).
inline double addition_theorem_lhs(int l, const UnitDirection& d1, const UnitDirection& d2) {
    if (l < 0) throw std::invalid_argument("addition_theorem_lhs: l < 0");
    std::complex<double> s = 0.0;
    for (int m = -l; m <= l; ++m)
        s += spherical_harmonic({l, m}, d1) * std::conj(spherical_harmonic({l, m}, d2));
    return s.real();
}

namespace detail {
inline double ipow(double x, int n) {
    double r = 1.0;
    while (n > 0) {
        if (n & 1) r *= x;
        x *= x;
        n >>= 1;
    }
    return r;
}

// Direct series to k = 10^6 summed small-to-large, with an Euler-Maclaurin
// tail through the B4 term. For s >= 2 the tail remainder is far below
// double round-off.
inline double zeta_direct(int s) {
    constexpr double N = 1.0e6;
    double sum = 0.0, comp = 0.0; // Kahan-compensated, summed small-to-large
    for (double k = N - 1.0; k >= 1.0; k -= 1.0) {
        const double y = ipow(1.0 / k, s) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    const double invN = 1.0 / N;
    const double Ns = ipow(invN, s);
    double tail = N * Ns / (s - 1.0);      // integral term
    tail += 0.5 * Ns;                      // + f(N)/2
    tail += s / 12.0 * Ns * invN;          // - B2/2! f'(N)
    tail -= s * (s + 1.0) * (s + 2.0) / 720.0 * Ns * invN * invN * invN;
    return sum + tail;
}
} // namespace detail

// Riemann zeta at integer s >= 2. Values for small s are cached after the
// first evaluation; the cache is immutable once written.
inline double riemann_zeta_int(int s) {
    if (s < 2) throw std::invalid_argument("riemann_zeta_int: s < 2");
    constexpr int kCacheMax = 40;
    if (s > kCacheMax) return detail::zeta_direct(s);
    static std::array<double, kCacheMax + 1> cache{};
    static std::array<std::once_flag, kCacheMax + 1> flags;
    std::call_once(flags[s], [s] { cache[s] = detail::zeta_direct(s); });
    return cache[s];
}

} // namespace rotodec

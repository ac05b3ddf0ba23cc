// Thermal-photon environment: Planck occupation of photon modes at
// temperature T, the effective spectral density n rho(k), and the moment
// integrals M_n(T) = int_0^inf k^n / (e^{hbar c k / k_B T} - 1) dk, both in
// closed form (n! zeta(n+1) (k_B T / hbar c)^{n+1}) and by quadrature.
#pragma once

#include <cmath>
#include <stdexcept>

#include "rotodec/constants.hpp"
#include "rotodec/gauss_legendre.hpp"
#include "rotodec/special_functions.hpp"

namespace rotodec {

// Quadrature refinement ran out of panels before meeting the tolerance.
class nonconvergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ThermalBath {
    double temperature; // K

    explicit ThermalBath(double T) : temperature(T) {
        if (!(T > 0.0)) throw std::invalid_argument("ThermalBath: temperature must be > 0");
    }
    // k_T = k_B T / (hbar c), the thermal wavenumber.
    double thermal_wavenumber() const {
        return codata.k_B * temperature / (codata.hbar * codata.c);
    }
};

// Photon occupation 2 / (e^{hbar c k / k_B T} - 1); the factor 2 counts the
// two polarization directions. Strictly positive and decreasing in k.
inline double occupation(const ThermalBath& bath, double k) {
    if (!(k > 0.0)) throw std::domain_error("occupation: k must be > 0");
    const double x = k / bath.thermal_wavenumber();
    return 2.0 / std::expm1(x);
}

// Effective spectral density n rho(k) = 4 pi k^2 * occupation(k), 1/m^4.
// The box-normalization factors V/N and N/V cancel and never appear alone.
struct SpectralWeight {
    ThermalBath bath;

    double operator()(double k) const { return 4.0 * pi * k * k * occupation(bath, k); }
};

// Closed form of the Bose integral: M_n = n! zeta(n+1) k_T^{n+1}.
inline double photon_moment_closed(const ThermalBath& bath, int n) {
    if (n < 2) throw std::invalid_argument("photon_moment_closed: n < 2");
    const double kT = bath.thermal_wavenumber();
    return factorial(n) * riemann_zeta_int(n + 1) * std::pow(kT, n + 1);
}

namespace detail {

// Exact tail of int_X^inf x^n e^{-jx} dx via integration by parts.
inline double exp_poly_tail(int n, double j, double X) {
    double term = std::exp(-j * X) / j;
    double sum = 0.0;
    double coeff = 1.0; // n!/(n-i)!
    double xpow = std::pow(X, n);
    for (int i = 0; i <= n; ++i) {
        sum += coeff * xpow * term;
        term /= j;
        coeff *= (n - i);
        if (n - i > 0) xpow /= X;
    }
    return sum;
}

// int_40^inf x^n/(e^x - 1) dx = sum_j int x^n e^{-jx} dx; three geometric
// terms put the remainder below e^{-160}.
inline double bose_tail(int n) {
    double t = 0.0;
    for (int j = 1; j <= 3; ++j) t += exp_poly_tail(n, static_cast<double>(j), 40.0);
    return t;
}

} // namespace detail

// Quadrature evaluation of M_n(T): substitution x = hbar c k / k_B T, then
// panel-doubled composite 16-point Gauss-Legendre on [0, 40] plus the
// analytic exponential tail. Serves as the independent check of the closed
// form. Throws nonconvergence_error if doubling stalls.
inline double photon_moment_numeric(const ThermalBath& bath, int n, double reltol) {
    if (n < 2) throw std::invalid_argument("photon_moment_numeric: n < 2");
    if (!(reltol >= 1e-13))
        throw std::invalid_argument("photon_moment_numeric: reltol below 1e-13");
    static const auto rule = gauss_legendre(16);
    const auto integrand = [n](double x) {
        if (x == 0.0) return 0.0;
        return std::pow(x, n) / std::expm1(x);
    };
    const double tail = detail::bose_tail(n);
    double prev = 0.0;
    bool have_prev = false;
    for (int panels = 8; panels <= 4096; panels *= 2) {
        const double h = 40.0 / panels;
        double sum = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double a = p * h;
            double s = 0.0;
            for (const auto& g : rule) s += g.w * integrand(a + 0.5 * h * (g.x + 1.0));
            sum += 0.5 * h * s;
        }
        const double value = sum + tail;
        if (have_prev && std::abs(value - prev) <= 0.25 * reltol * std::abs(value)) {
            const double kT = bath.thermal_wavenumber();
            return value * std::pow(kT, n + 1);
        }
        prev = value;
        have_prev = true;
    }
    throw nonconvergence_error("photon_moment_numeric: panel doubling did not converge");
}

} // namespace rotodec

// Physical constants (SI, CODATA 2018 / 2019 SI redefinition).
#pragma once

#include <numbers>

namespace rotodec {

inline constexpr double pi = std::numbers::pi;

struct PhysicalConstants {
    double c;         // speed of light, m/s
    double hbar;      // reduced Planck constant, J s
    double k_B;       // Boltzmann constant, J/K
    double epsilon_0; // vacuum permittivity, F/m
};

// c, h and k_B are exact by definition since 2019; hbar is derived from the
// exact h so that no rounding beyond the final double happens here.
inline constexpr PhysicalConstants codata{
    299792458.0,                    // c (exact)
    6.62607015e-34 / (2.0 * pi),    // hbar = h / 2pi
    1.380649e-23,                   // k_B (exact)
    8.8541878128e-12,               // epsilon_0 (CODATA 2018)
};

} // namespace rotodec

// Induced-dipole photon scattering off the anisotropic ellipsoid:
// polarization-resolved amplitude, transverse projectors, and the angular
// kernels entering the decoherence rate and the channel integrals.
//
// Polarization bookkeeping. The amplitude for polarizations (xi', xi) is
// f = k^2/(4 pi eps0) xi' . (alpha . xi). Summing |f|^2 over two orthonormal
// transverse bases at each direction is the trace form
//   Tr[(I - kk^T) dA (I - pp^T) dA^T],  dA = alpha_0 - alpha_omega,
// independent of basis choice. With everything else fixed by the Planck
// weight and the 1/(8 pi) measure, the angular integrals
// int (I - kk^T) dOmega = (8 pi / 3) I give a total rate exactly 4x the
// closed form; averaging over both the incoming and outgoing polarization
// (factor 1/4, AVG_AVG) reproduces it. AVG_AVG is the calibrated default.
// The derivation is spelled out in the README.
//
// The channel (partial-wave) integrals need the amplitude product at two
// distinct direction pairs, f*(k',p') f(k'',p''), where "a polarization sum
// per direction" is no longer well defined. cross_kernel contracts the
// polarization structure onto the propagation directions instead,
//   4 c(conv) (k'.A.p')(k''.B.p''),
// the unique form that is an exact degree-1 object in every direction; it
// makes every channel except l = l' = 1 vanish identically for the dipole
// amplitude and reduces to delta_kernel after integration over coincident
// direction pairs (not pointwise). The scale is fixed so the calibrated
// convention reproduces the l = l' = 1 closed form.
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "rotodec/constants.hpp"
#include "rotodec/core_types.hpp"

namespace rotodec {

// Bookkeeping of the (incoming, outgoing) photon polarization treatment.
enum class PolarizationConvention { SumSum, AvgSum, AvgAvg };

inline constexpr PolarizationConvention kCalibratedConvention = PolarizationConvention::AvgAvg;

inline double convention_factor(PolarizationConvention c) {
    switch (c) {
        case PolarizationConvention::SumSum: return 1.0;
        case PolarizationConvention::AvgSum: return 0.5;
        case PolarizationConvention::AvgAvg: return 0.25;
    }
    throw std::invalid_argument("convention_factor: unknown convention");
}

inline std::string to_string(PolarizationConvention c) {
    switch (c) {
        case PolarizationConvention::SumSum: return "sum_sum";
        case PolarizationConvention::AvgSum: return "avg_sum";
        case PolarizationConvention::AvgAvg: return "avg_avg";
    }
    return "?";
}

inline PolarizationConvention polarization_convention_from_string(const std::string& s) {
    if (s == "sum_sum") return PolarizationConvention::SumSum;
    if (s == "avg_sum") return PolarizationConvention::AvgSum;
    if (s == "avg_avg") return PolarizationConvention::AvgAvg;
    throw std::invalid_argument("unknown polarization convention '" + s +
                                "' (expected sum_sum, avg_sum or avg_avg)");
}

struct ScatteringKernelInputs {
    double k; // wavenumber, 1/m
    UnitDirection k_out;
    UnitDirection k_in;
    PolarizabilityTensor tensor;

    ScatteringKernelInputs(double k_, UnitDirection out, UnitDirection in,
                           PolarizabilityTensor t)
        : k(k_), k_out(out), k_in(in), tensor(std::move(t)) {
        if (!(k > 0.0)) throw std::invalid_argument("ScatteringKernelInputs: k must be > 0");
    }
};

// Dipole scattering amplitude f = k^2/(4 pi eps0) xi' . (alpha . xi).
// Real for a real symmetric tensor; the complex return type is kept for the
// mock amplitudes with phases used in tests.
inline std::complex<double> amplitude(const ScatteringKernelInputs& in, Vec3 pol_out,
                                      Vec3 pol_in) {
    const double tol = 1e-12;
    if (std::abs(norm(pol_out) - 1.0) > 1e-9 || std::abs(norm(pol_in) - 1.0) > 1e-9)
        throw std::invalid_argument("amplitude: polarization vectors must be unit");
    if (std::abs(dot(pol_out, in.k_out.unit_vector())) > tol ||
        std::abs(dot(pol_in, in.k_in.unit_vector())) > tol)
        throw std::invalid_argument("amplitude: polarization not transverse to propagation");
    const Vec3 d = in.tensor.to_matrix() * pol_in;
    return in.k * in.k / (4.0 * pi * codata.epsilon_0) * dot(pol_out, d);
}

// I - dd^T: idempotent, trace 2, annihilates d. Equals the polarization sum
// sum_lambda xi_i xi_j over any orthonormal transverse basis at d.
inline Mat3 transverse_projector(const UnitDirection& d) {
    const Vec3 u = d.unit_vector();
    return Mat3::identity() - Mat3::outer(u, u);
}

namespace detail {

// c(conv) Tr[(I - kk^T) dA (I - pp^T) dA^T] with the difference tensor
// supplied by the caller (hot path of the direct rate integral).
inline double delta_kernel_from_difference(const Vec3& k_out, const Vec3& p_in,
                                           const PolarizabilityTensor& diff,
                                           PolarizationConvention conv) {
    const Mat3 d = diff.to_matrix();
    const Mat3 pk = Mat3::identity() - Mat3::outer(k_out, k_out);
    const Mat3 pp = Mat3::identity() - Mat3::outer(p_in, p_in);
    return convention_factor(conv) * (pk * d * pp * d.transpose()).trace();
}

} // namespace detail

// Polarization-reduced squared difference amplitude for the direct rate
// integral, with the k^4/(4 pi eps0)^2 prefactor excluded (applied once by
// the k-integral). Non-negative; zero at omega = 0 or isotropic transverse
// polarizability.
inline double delta_kernel(const UnitDirection& k_out, const UnitDirection& p_in,
                           const PolarizabilityTensor& alpha0, double omega,
                           PolarizationConvention conv) {
    return detail::delta_kernel_from_difference(k_out.unit_vector(), p_in.unit_vector(),
                                                delta_polarizability(alpha0, omega), conv);
}

// Polarization-reduced amplitude product for the channel integrals (see the
// header comment), k^4/(4 pi eps0)^2 prefactor excluded. At the calibrated
// convention the coincident-pair angular integral over S^2 x S^2 equals that
// of delta_kernel with equal tensors.
inline double cross_kernel(const UnitDirection& k1, const UnitDirection& p1,
                           const UnitDirection& k2, const UnitDirection& p2,
                           const PolarizabilityTensor& tensor_a,
                           const PolarizabilityTensor& tensor_b,
                           PolarizationConvention conv) {
    const Vec3 uk1 = k1.unit_vector(), up1 = p1.unit_vector();
    const Vec3 uk2 = k2.unit_vector(), up2 = p2.unit_vector();
    const double fa = dot(uk1, tensor_a.to_matrix() * up1);
    const double fb = dot(uk2, tensor_b.to_matrix() * up2);
    return 4.0 * convention_factor(conv) * fa * fb;
}

} // namespace rotodec

// Angular-momentum channel decomposition of the decoherence rate:
//   Lambda = sum_{l,l'} Lambda_ll',
//   Lambda_ll' = 2 c M6(T) (I_ll'(0) - I_ll'(omega))   [I at unit wavenumber]
// with the 8-dimensional channel integral
//   I_ll'(omega) = (2l+1)(2l'+1)/(4 pi)^2 * k^4/(4 pi eps0)^2 *
//     int dk' dp' dk'' dp'' P_l(cos g') P_l'(cos g) cross_kernel(...),
//   cos g' = cos t_k' cos t_k'' + sin t_k' sin t_k'' cos(phi_k' - phi_k'' + omega)
// and cos g the same on the p-pair. For the dipole kernel every channel
// except l = l' = 1 vanishes identically, and
//   I_11(omega) = k^4/(9 eps0^2) (alpha_x^2+alpha_y^2+alpha_z^2
//                                  - sin^2(omega) (alpha_x-alpha_y)^2).
//
// The sweep enumerates the product grid in the canonical order
// (a_k, b_k, a_p, b_p), accumulates every requested channel in a single
// pass (the kernel value at each node is computed once and reused), blocks
// on (a_k, b_k), and merges block partials with a pairwise tree. Restricting
// the channel range reproduces the shared-pass values bit for bit.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rotodec/angular_quadrature.hpp"
#include "rotodec/constants.hpp"
#include "rotodec/core_types.hpp"
#include "rotodec/decoherence_rates.hpp"
#include "rotodec/planck_bath.hpp"
#include "rotodec/scattering_model.hpp"
#include "rotodec/special_functions.hpp"

namespace rotodec {

inline constexpr int kMaxPartialWaveL = 6;

namespace detail {

// Tables over ordered node pairs of one grid: P_0..P_lmax of cos(gamma)
// (used for both the outgoing and the incoming direction pair, which share
// the omega shift), and the weight-folded amplitude factors
// w_i w_j (u_i . T . u_j) for each tensor. The Legendre tables pair
// like-role directions (k', k'') and (p', p''); the amplitude factors pair
// an outgoing with an incoming direction (k', p') and (k'', p'').
struct SweepTables {
    int n = 0;
    int l_max = 0;
    std::vector<double> pl;    // [(l * n + i) * n + j]
    std::vector<double> amp_a; // f* factors, [out_node * n + in_node]
    std::vector<double> amp_b; // f factors
};

inline SweepTables build_sweep_tables(const SphereGrid& grid, double omega, int l_max,
                                      const PolarizabilityTensor& tensor_a,
                                      const PolarizabilityTensor& tensor_b) {
    SweepTables t;
    t.n = static_cast<int>(grid.size());
    t.l_max = l_max;
    const std::size_t n2 = static_cast<std::size_t>(t.n) * t.n;
    t.pl.assign(static_cast<std::size_t>(l_max + 1) * n2, 0.0);
    t.amp_a.assign(n2, 0.0);
    t.amp_b.assign(n2, 0.0);
    const Mat3 a = tensor_a.to_matrix();
    const Mat3 b = tensor_b.to_matrix();
    for (int i = 0; i < t.n; ++i) {
        const SphereNode& ni = grid.node(static_cast<std::size_t>(i));
        const double ct_i = std::cos(ni.dir.theta()), st_i = std::sin(ni.dir.theta());
        const Vec3 au = a * ni.u;
        const Vec3 bu = b * ni.u;
        for (int j = 0; j < t.n; ++j) {
            const SphereNode& nj = grid.node(static_cast<std::size_t>(j));
            const double cg = ct_i * std::cos(nj.dir.theta()) +
                              st_i * std::sin(nj.dir.theta()) *
                                  std::cos(ni.dir.phi() - nj.dir.phi() + omega);
            const std::size_t ij = static_cast<std::size_t>(i) * t.n + j;
            // ascending Legendre recurrence, shared with legendre_p
            double pm = 1.0, p = cg;
            t.pl[ij] = 1.0;
            if (l_max >= 1) t.pl[n2 + ij] = cg;
            for (int l = 2; l <= l_max; ++l) {
                const double pn = ((2.0 * l - 1.0) * cg * p - (l - 1.0) * pm) / l;
                pm = p;
                p = pn;
                t.pl[static_cast<std::size_t>(l) * n2 + ij] = pn;
            }
            t.amp_a[ij] = ni.w * nj.w * dot(nj.u, au); // u_i . A . u_j (A symmetric)
            t.amp_b[ij] = ni.w * nj.w * dot(nj.u, bu);
        }
    }
    return t;
}

// Raw channel sums over the canonical 8-D sweep for channels
// (l, l') in [l_lo, l_hi] x [lp_lo, lp_hi]; prefactors applied by callers.
// Sample order is (a_k, b_k, a_p, b_p); blocks are the (a_k, b_k) pairs.
inline std::vector<double> channel_sweep(const SweepTables& t, PolarizationConvention conv,
                                         int l_lo, int l_hi, int lp_lo, int lp_hi) {
    const int n = t.n;
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    const int nl = l_hi - l_lo + 1, nlp = lp_hi - lp_lo + 1;
    const std::size_t n_ch = static_cast<std::size_t>(nl) * nlp;
    const std::size_t n_blocks = n2; // one block per (a_k, b_k)
    const double scale = 4.0 * convention_factor(conv);

    std::vector<double> partial(n_blocks * n_ch, 0.0);
    parallel_blocks(n_blocks, worker_count(), [&](std::size_t blk) {
        const int ak = static_cast<int>(blk) / n;
        const int bk = static_cast<int>(blk) % n;
        double plk[kMaxPartialWaveL + 1];
        for (int l = l_lo; l <= l_hi; ++l)
            plk[l - l_lo] = t.pl[static_cast<std::size_t>(l) * n2 + blk];
        const double* amp_a_row = &t.amp_a[static_cast<std::size_t>(ak) * n];
        const double* amp_b_row = &t.amp_b[static_cast<std::size_t>(bk) * n];
        double acc[(kMaxPartialWaveL + 1) * (kMaxPartialWaveL + 1)] = {0.0};
        for (int ap = 0; ap < n; ++ap) {
            const std::size_t row = static_cast<std::size_t>(ap) * n;
            const double fa = scale * amp_a_row[ap]; // f*(k'_{ak}, p'_{ap})
            for (int bp = 0; bp < n; ++bp) {
                const double q = fa * amp_b_row[bp]; // f(k''_{bk}, p''_{bp})
                for (int li = 0; li < nl; ++li) {
                    const double u = q * plk[li];
                    for (int lj = 0; lj < nlp; ++lj)
                        acc[li * nlp + lj] +=
                            u * t.pl[static_cast<std::size_t>(lp_lo + lj) * n2 + row + bp];
                }
            }
        }
        for (std::size_t c = 0; c < n_ch; ++c) partial[blk * n_ch + c] = acc[c];
    });

    std::vector<double> result(n_ch);
    std::vector<double> scratch(n_blocks);
    for (std::size_t c = 0; c < n_ch; ++c) {
        for (std::size_t b = 0; b < n_blocks; ++b) scratch[b] = partial[b * n_ch + c];
        result[c] = pairwise_tree(scratch);
    }
    return result;
}

inline double channel_prefactor(int l, int lp, double k) {
    const double denom = 4.0 * pi;
    const double eps = 4.0 * pi * codata.epsilon_0;
    return (2.0 * l + 1.0) * (2.0 * lp + 1.0) / (denom * denom) * std::pow(k, 4) / (eps * eps);
}

inline void validate_channel(int l, int lp) {
    if (l < 0 || lp < 0 || l > kMaxPartialWaveL || lp > kMaxPartialWaveL)
        throw std::invalid_argument("partial_waves: l, l' must be in [0, 6]");
}

} // namespace detail

// Channel integral I_ll'(omega) at wavenumber k by the 8-D product
// quadrature. Exact once the per-sphere band limit covers the integrand
// (trigonometric degree l + 1 per sphere; the conservative guideline is
// L >= 2 max(l, l') + 4). Smaller orders are accepted so that refinement
// checks can detect under-resolution.
inline double i_llprime(int l, int lp, double omega, double k,
                        const PolarizabilityTensor& tensor, int grid_order,
                        PolarizationConvention conv = kCalibratedConvention) {
    detail::validate_channel(l, lp);
    if (!(k > 0.0)) throw std::invalid_argument("i_llprime: k must be > 0");
    const SphereGrid grid = build_sphere_grid(grid_order);
    const auto tables = detail::build_sweep_tables(grid, omega, std::max(l, lp), tensor, tensor);
    const auto raw = detail::channel_sweep(tables, conv, l, l, lp, lp);
    return raw[0] * detail::channel_prefactor(l, lp, k);
}

// Closed form of the only surviving channel:
// I_11(omega) = k^4/(9 eps0^2) (-sin^2 omega (ax-ay)^2 + ax^2+ay^2+az^2).
inline double i11_closed(double omega, double k, const PolarizabilityTensor& tensor) {
    detail::require_diagonal(tensor, "i11_closed");
    const double ax = tensor.xx(), ay = tensor.yy(), az = tensor.zz();
    const double s = std::sin(omega);
    return std::pow(k, 4) / (9.0 * codata.epsilon_0 * codata.epsilon_0) *
           (-s * s * (ax - ay) * (ax - ay) + ax * ax + ay * ay + az * az);
}

struct PartialWaveEntry {
    int l = 0, lp = 0;
    double i_zero = 0.0;  // I_ll'(0) at unit wavenumber
    double i_omega = 0.0; // I_ll'(omega) at unit wavenumber
    double lambda = 0.0;  // channel rate, 1/s
    double drift = 0.0;   // relative change of I under L -> L+4
    bool converged = true;
};

// Complete channel table for 0 <= l, l' <= l_max with convergence metadata
// and the shell grouping of the total.
class PartialWaveTable {
public:
    PartialWaveTable(int l_max, double omega, int grid_order, PolarizationConvention conv,
                     double temperature, PolarizabilityTensor tensor,
                     std::vector<PartialWaveEntry> entries, double lambda_closed)
        : l_max_(l_max), omega_(omega), grid_order_(grid_order), conv_(conv),
          temperature_(temperature), tensor_(std::move(tensor)), entries_(std::move(entries)),
          lambda_closed_(lambda_closed) {}

    int l_max() const { return l_max_; }
    double omega() const { return omega_; }
    int grid_order() const { return grid_order_; }
    PolarizationConvention convention() const { return conv_; }
    double temperature() const { return temperature_; }
    const PolarizabilityTensor& tensor() const { return tensor_; }
    double lambda_closed() const { return lambda_closed_; }

    const PartialWaveEntry& entry(int l, int lp) const {
        detail::validate_channel(l, lp);
        if (l > l_max_ || lp > l_max_)
            throw std::invalid_argument("PartialWaveTable: channel beyond l_max");
        return entries_[static_cast<std::size_t>(l) * (l_max_ + 1) + lp];
    }
    const std::vector<PartialWaveEntry>& entries() const { return entries_; }

    double total() const {
        double s = 0.0;
        for (const auto& e : entries_) s += e.lambda;
        return s;
    }
    // Shell s groups the channels with max(l, l') = s, the grouping of the
    // series by angular-momentum cutoff.
    double shell_sum(int s) const {
        double r = 0.0;
        for (const auto& e : entries_)
            if (std::max(e.l, e.lp) == s) r += e.lambda;
        return r;
    }
    double ratio_to_closed() const {
        return lambda_closed_ != 0.0 ? total() / lambda_closed_
                                     : std::numeric_limits<double>::quiet_NaN();
    }
    bool all_converged() const {
        for (const auto& e : entries_)
            if (!e.converged) return false;
        return true;
    }

private:
    int l_max_;
    double omega_;
    int grid_order_;
    PolarizationConvention conv_;
    double temperature_;
    PolarizabilityTensor tensor_;
    std::vector<PartialWaveEntry> entries_;
    double lambda_closed_;
};

namespace detail {

// Shared-pass channel integrals at unit wavenumber (prefactors applied),
// for omega and for 0, at the given grid order.
struct SweepPair {
    std::vector<double> at_omega, at_zero; // (l_max+1)^2 each
};

inline SweepPair full_sweep(int l_max, double omega, const PolarizabilityTensor& tensor,
                            int grid_order, PolarizationConvention conv) {
    const SphereGrid grid = build_sphere_grid(grid_order);
    SweepPair out;
    for (const bool zero_case : {false, true}) {
        const double w = zero_case ? 0.0 : omega;
        const auto tables = build_sweep_tables(grid, w, l_max, tensor, tensor);
        auto raw = channel_sweep(tables, conv, 0, l_max, 0, l_max);
        for (int l = 0; l <= l_max; ++l)
            for (int lp = 0; lp <= l_max; ++lp)
                raw[static_cast<std::size_t>(l) * (l_max + 1) + lp] *=
                    channel_prefactor(l, lp, 1.0);
        (zero_case ? out.at_zero : out.at_omega) = std::move(raw);
    }
    return out;
}

} // namespace detail

// Channel rate Lambda_ll' with the exact k^4 separability of the dipole
// amplitude: the angular integrals at unit wavenumber times the sixth
// photon moment. Refinement L -> L+4 feeds the convergence flag.
inline PartialWaveEntry lambda_llprime(int l, int lp, const ThermalBath& bath,
                                       const PolarizabilityTensor& tensor, double omega,
                                       int grid_order,
                                       PolarizationConvention conv = kCalibratedConvention) {
    detail::validate_channel(l, lp);
    PartialWaveEntry e;
    e.l = l;
    e.lp = lp;
    e.i_zero = i_llprime(l, lp, 0.0, 1.0, tensor, grid_order, conv);
    e.i_omega = i_llprime(l, lp, omega, 1.0, tensor, grid_order, conv);
    const double i_zero_ref = i_llprime(l, lp, 0.0, 1.0, tensor, grid_order + 4, conv);
    const double i_omega_ref = i_llprime(l, lp, omega, 1.0, tensor, grid_order + 4, conv);
    const double unit = std::max({std::abs(i_zero_ref), std::abs(i_omega_ref),
                                  std::abs(i11_closed(0.0, 1.0, tensor)), 1e-300});
    e.drift = std::max(std::abs(e.i_zero - i_zero_ref), std::abs(e.i_omega - i_omega_ref)) / unit;
    e.converged = e.drift <= 1e-8;
    e.lambda = 2.0 * codata.c * photon_moment_closed(bath, 6) * (e.i_zero - e.i_omega);
    return e;
}

// Non-separable fallback: outer quadrature over the photon spectrum with the
// channel integral re-evaluated at every wavenumber node. Kept for amplitude
// models without a pure power-law k dependence; for the dipole kernel it
// reproduces lambda_llprime.
inline double lambda_llprime_kquadrature(int l, int lp, const ThermalBath& bath,
                                         const PolarizabilityTensor& tensor, double omega,
                                         int grid_order,
                                         PolarizationConvention conv = kCalibratedConvention,
                                         int panels = 16) {
    detail::validate_channel(l, lp);
    static const auto rule = gauss_legendre(16);
    const double kT = bath.thermal_wavenumber();
    const double h = 40.0 / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = p * h;
        double s = 0.0;
        for (const auto& g : rule) {
            const double x = a + 0.5 * h * (g.x + 1.0);
            if (x == 0.0) continue;
            const double k = x * kT;
            const double di = i_llprime(l, lp, 0.0, k, tensor, grid_order, conv) -
                              i_llprime(l, lp, omega, k, tensor, grid_order, conv);
            s += g.w * k * k * (2.0 / std::expm1(x)) * di;
        }
        sum += 0.5 * h * kT * s;
    }
    return codata.c * sum;
}

// Complete table over 0 <= l, l' <= l_max. All channels are accumulated in
// two shared passes (omega and 0) per grid order; the L+4 pass feeds the
// per-channel convergence flags.
inline PartialWaveTable build_table(int l_max, const ThermalBath& bath,
                                    const PolarizabilityTensor& tensor, double omega,
                                    int grid_order,
                                    PolarizationConvention conv = kCalibratedConvention) {
    if (l_max < 0 || l_max > kMaxPartialWaveL)
        throw std::invalid_argument("build_table: l_max must be in [0, 6]");
    detail::require_diagonal(tensor, "build_table");

    const auto base = detail::full_sweep(l_max, omega, tensor, grid_order, conv);
    const auto fine = detail::full_sweep(l_max, omega, tensor, grid_order + 4, conv);

    double unit = std::abs(i11_closed(0.0, 1.0, tensor));
    for (const auto* v : {&fine.at_zero, &fine.at_omega})
        for (double x : *v) unit = std::max(unit, std::abs(x));
    unit = std::max(unit, 1e-300);

    const double m6 = photon_moment_closed(bath, 6);
    std::vector<PartialWaveEntry> entries;
    entries.reserve(static_cast<std::size_t>(l_max + 1) * (l_max + 1));
    for (int l = 0; l <= l_max; ++l)
        for (int lp = 0; lp <= l_max; ++lp) {
            const std::size_t c = static_cast<std::size_t>(l) * (l_max + 1) + lp;
            PartialWaveEntry e;
            e.l = l;
            e.lp = lp;
            e.i_zero = base.at_zero[c];
            e.i_omega = base.at_omega[c];
            e.drift = std::max(std::abs(base.at_zero[c] - fine.at_zero[c]),
                               std::abs(base.at_omega[c] - fine.at_omega[c])) /
                      unit;
            e.converged = e.drift <= 1e-8;
            e.lambda = 2.0 * codata.c * m6 * (e.i_zero - e.i_omega);
            entries.push_back(e);
        }
    const double closed = lambda_closed_form(bath, tensor, omega).lambda;
    return {l_max, omega, grid_order, conv, bath.temperature, tensor, std::move(entries), closed};
}

} // namespace rotodec

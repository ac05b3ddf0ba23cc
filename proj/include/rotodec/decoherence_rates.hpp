// Rotational decoherence rate of the dielectric ellipsoid in the thermal
// photon bath, from the closed form
//   Lambda = 6! (2c / 9 eps0^2) (k_B T / hbar c)^7 zeta(7)
//            (alpha_x - alpha_y)^2 sin^2(omega)
// and from direct quadrature of the scattering integrals, plus the
// exponential evolution of rotational coherences.
#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rotodec/angular_quadrature.hpp"
#include "rotodec/constants.hpp"
#include "rotodec/core_types.hpp"
#include "rotodec/planck_bath.hpp"
#include "rotodec/scattering_model.hpp"
#include "rotodec/special_functions.hpp"

namespace rotodec {

enum class RateMethod { ClosedForm, Numeric };

struct GridMeta {
    int grid_order = 0;          // angular order used (0 for closed form)
    double refinement_drift = 0; // relative change under L -> L+4
    double moment_reltol = 0;    // tolerance requested of the photon moment
    bool converged = true;
};

struct RateResult {
    double lambda = 0.0; // 1/s
    RateMethod method = RateMethod::ClosedForm;
    GridMeta grid_meta{};
};

namespace detail {

inline void require_diagonal(const PolarizabilityTensor& t, const char* who) {
    if (!t.is_diagonal())
        throw std::invalid_argument(std::string(who) +
                                    ": tensor must be diagonal; diagonalize it first");
    if (t.xx() < 0.0 || t.yy() < 0.0 || t.zz() < 0.0)
        throw std::invalid_argument(std::string(who) + ": negative diagonal polarizability");
}

} // namespace detail

// Closed-form rate. The thermal prefactor is grouped as (k_B T / hbar c)^7
// in a single power to keep the ~1e35-spanning magnitudes tame.
inline RateResult lambda_closed_form(const ThermalBath& bath, const PolarizabilityTensor& alpha0,
                                     double omega) {
    detail::require_diagonal(alpha0, "lambda_closed_form");
    const double kT7 = std::pow(bath.thermal_wavenumber(), 7);
    const double aniso = alpha0.xx() - alpha0.yy();
    const double s = std::sin(omega);
    const double lambda = factorial(6) * 2.0 * codata.c /
                          (9.0 * codata.epsilon_0 * codata.epsilon_0) * kT7 *
                          riemann_zeta_int(7) * aniso * aniso * s * s;
    return {lambda, RateMethod::ClosedForm, {}};
}

// Direct numerical evaluation: the angular integral of delta_kernel over
// S^2 x S^2 (exact for L >= 4, checked by an L -> L+4 refinement) times the
// sixth photon moment by quadrature, assembled as
//   Lambda = c M6(T) D(omega) / (4 pi eps0)^2.
// Non-convergence of the refinement is reported through grid_meta.converged.
inline RateResult lambda_numeric(const ThermalBath& bath, const PolarizabilityTensor& alpha0,
                                 double omega, int grid_order,
                                 PolarizationConvention conv = kCalibratedConvention) {
    if (grid_order < 1) throw std::invalid_argument("lambda_numeric: grid order must be >= 1");
    const PolarizabilityTensor diff = delta_polarizability(alpha0, omega);
    const auto angular = [&](int L) {
        const SphereGrid grid = build_sphere_grid(L);
        return integrate_product(
            [&](const UnitDirection& k, const UnitDirection& p) {
                return detail::delta_kernel_from_difference(k.unit_vector(), p.unit_vector(),
                                                            diff, conv);
            },
            grid, grid);
    };
    const double d0 = angular(grid_order);
    const double d1 = angular(grid_order + 4);
    const double scale = std::max({std::abs(d0), std::abs(d1), 1e-300});
    const double drift = std::abs(d0 - d1) / scale;
    const bool ang_converged = (d0 == d1) || drift <= 1e-9;

    const double moment_reltol = 1e-12;
    const double m6 = photon_moment_numeric(bath, 6, moment_reltol);
    const double denom = 4.0 * pi * codata.epsilon_0;
    const double lambda = codata.c * m6 * d0 / (denom * denom);
    return {lambda, RateMethod::Numeric, {grid_order, drift, moment_reltol, ang_converged}};
}

// 1/Lambda; +inf signals "no decoherence" (omega = 0 mod pi or isotropic
// transverse polarizability).
inline double decoherence_time(const ThermalBath& bath, const PolarizabilityTensor& alpha0,
                               double omega) {
    const double lambda = lambda_closed_form(bath, alpha0, omega).lambda;
    return lambda > 0.0 ? 1.0 / lambda : std::numeric_limits<double>::infinity();
}

namespace detail {

// Eigenvalues of a real symmetric n x n matrix by cyclic Jacobi sweeps.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = at(i, i);
    return ev;
}

} // namespace detail

// Rotational coherence matrix rho(alpha_i, alpha_j) over an ordered angle
// grid. Construction validates hermiticity, unit trace and positive
// semidefiniteness; evolution preserves them analytically.
class CoherenceGrid {
public:
    CoherenceGrid(std::vector<double> angles, std::vector<std::complex<double>> matrix)
        : angles_(std::move(angles)), rho_(std::move(matrix)) {
        const std::size_t n = angles_.size();
        if (n == 0) throw std::invalid_argument("CoherenceGrid: empty angle grid");
        if (rho_.size() != n * n)
            throw std::invalid_argument("CoherenceGrid: matrix size does not match angles");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (std::abs(angles_[i] - angles_[j]) <= 1e-12)
                    throw std::invalid_argument("CoherenceGrid: duplicate angles");
        validate();
    }

    // Equal superposition of the given angles: rho_ij = 1/n (pure state).
    static CoherenceGrid equal_superposition(std::vector<double> angles) {
        const std::size_t n = angles.size();
        std::vector<std::complex<double>> m(n * n, std::complex<double>(1.0 / double(n), 0.0));
        return {std::move(angles), std::move(m)};
    }

    std::size_t size() const { return angles_.size(); }
    const std::vector<double>& angles() const { return angles_; }
    const std::complex<double>& operator()(std::size_t i, std::size_t j) const {
        return rho_[i * angles_.size() + j];
    }
    std::complex<double>& at(std::size_t i, std::size_t j) { return rho_[i * angles_.size() + j]; }

private:
    void validate() const {
        const std::size_t n = angles_.size();
        double scale = 0.0;
        for (const auto& v : rho_) scale = std::max(scale, std::abs(v));
        scale = std::max(scale, 1.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > 1e-12 * scale)
                    throw std::invalid_argument("CoherenceGrid: matrix is not Hermitian");
        std::complex<double> tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += (*this)(i, i);
        if (std::abs(tr - 1.0) > 1e-10)
            throw std::invalid_argument("CoherenceGrid: trace must be 1");
        // PSD check on the real embedding [[X, -Y], [Y, X]] of rho = X + iY,
        // whose spectrum doubles that of rho.
        const int m = static_cast<int>(2 * n);
        std::vector<double> emb(static_cast<std::size_t>(m) * m, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const auto v = (*this)(i, j);
                emb[i * m + j] = v.real();
                emb[(i + n) * m + (j + n)] = v.real();
                emb[i * m + (j + n)] = -v.imag();
                emb[(i + n) * m + j] = v.imag();
            }
        for (double ev : detail::symmetric_eigenvalues(std::move(emb), m))
            if (ev < -1e-10 * scale)
                throw std::invalid_argument("CoherenceGrid: matrix is not positive semidefinite");
    }

    std::vector<double> angles_;
    std::vector<std::complex<double>> rho_;
};

// rho_ij(t) = rho_ij(0) exp(-Lambda(alpha_i - alpha_j) t). Diagonal entries
// are untouched; the decay factor is computed once per unordered pair, so
// Hermiticity is preserved exactly.
inline CoherenceGrid evolve_coherences(const CoherenceGrid& rho0, const ThermalBath& bath,
                                       const PolarizabilityTensor& alpha0, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("evolve_coherences: t must be >= 0");
    detail::require_diagonal(alpha0, "evolve_coherences");
    CoherenceGrid out = rho0;
    const std::size_t n = rho0.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double omega = rho0.angles()[i] - rho0.angles()[j];
            const double decay = std::exp(-lambda_closed_form(bath, alpha0, omega).lambda * t);
            out.at(i, j) = rho0(i, j) * decay;
            out.at(j, i) = rho0(j, i) * decay;
        }
    return out;
}

} // namespace rotodec

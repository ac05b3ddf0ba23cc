#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "rotodec/angular_quadrature.hpp"
#include "rotodec/scattering_model.hpp"

using namespace rotodec;

namespace {

std::mt19937_64 gen(99);
double uni() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
UnitDirection random_dir() { return {std::acos(2.0 * uni() - 1.0), 2.0 * pi * uni()}; }

// Independent orthonormal transverse pair at d, rotated by a random angle
// in the transverse plane so no particular basis is privileged.
std::pair<Vec3, Vec3> transverse_basis(const UnitDirection& d, double spin) {
    const Vec3 u = d.unit_vector();
    const Vec3 seed = std::abs(u.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    const Vec3 e1 = normalized(cross(seed, u));
    const Vec3 e2 = cross(u, e1);
    const double c = std::cos(spin), s = std::sin(spin);
    return {c * e1 + s * e2, -1.0 * s * e1 + c * e2};
}

// Brute-force polarization-basis sum of |xi' . dA . xi|^2 over both bases.
double polarization_sum_oracle(const UnitDirection& k_out, const UnitDirection& p_in,
                               const PolarizabilityTensor& diff, double spin_out,
                               double spin_in) {
    const auto [o1, o2] = transverse_basis(k_out, spin_out);
    const auto [i1, i2] = transverse_basis(p_in, spin_in);
    const Mat3 d = diff.to_matrix();
    double s = 0.0;
    for (const Vec3& xo : {o1, o2})
        for (const Vec3& xi : {i1, i2}) {
            const double f = dot(xo, d * xi);
            s += f * f;
        }
    return s;
}

} // namespace

TEST_CASE("transverse projector properties") {
    const auto pz = transverse_projector(UnitDirection(0.0, 0.0));
    CHECK(pz(0, 0) == Catch::Approx(1.0).margin(1e-15));
    CHECK(pz(1, 1) == Catch::Approx(1.0).margin(1e-15));
    CHECK(std::abs(pz(2, 2)) < 1e-15);

    for (int i = 0; i < 20; ++i) {
        const auto d = random_dir();
        const Mat3 p = transverse_projector(d);
        CHECK(p.trace() == Catch::Approx(2.0).epsilon(1e-14));
        const Mat3 p2 = p * p;
        for (int r = 0; r < 9; ++r) CHECK(std::abs(p2.m[r] - p.m[r]) < 1e-15);
        const Vec3 pd = p * d.unit_vector();
        CHECK(norm(pd) < 1e-14);
    }
}

TEST_CASE("amplitude pinned values") {
    const UnitDirection z(0.0, 0.0);
    const double k = 2.0e5;
    const Vec3 xhat{1, 0, 0}, yhat{0, 1, 0};

    const ScatteringKernelInputs zero(k, z, z, PolarizabilityTensor{});
    CHECK(std::abs(amplitude(zero, xhat, xhat)) == 0.0);

    const auto iso = PolarizabilityTensor::diagonal(2.0e-37, 2.0e-37, 2.0e-37);
    const ScatteringKernelInputs in_iso(k, z, z, iso);
    CHECK(std::abs(amplitude(in_iso, xhat, yhat)) < 1e-60); // orthogonal polarizations

    const auto diag = PolarizabilityTensor::diagonal(3.0e-37, 1.0e-37, 2.0e-37);
    const ScatteringKernelInputs in_diag(k, z, z, diag);
    const auto f = amplitude(in_diag, xhat, xhat);
    CHECK(f.real() ==
          Catch::Approx(k * k * 3.0e-37 / (4.0 * pi * codata.epsilon_0)).epsilon(1e-14));
    CHECK(f.imag() == 0.0); // real for a real symmetric tensor
}

TEST_CASE("amplitude rejects non-transverse polarization") {
    const UnitDirection z(0.0, 0.0);
    const ScatteringKernelInputs in(1e5, z, z, PolarizabilityTensor::diagonal(1, 1, 1));
    CHECK_THROWS_AS(amplitude(in, Vec3{0, 0, 1}, Vec3{1, 0, 0}), std::invalid_argument);
    const Vec3 tilted = normalized({1.0, 0.0, 0.1});
    CHECK_THROWS_AS(amplitude(in, tilted, Vec3{1, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(amplitude(in, 0.5 * Vec3{1, 0, 0}, Vec3{1, 0, 0}), std::invalid_argument);
}

TEST_CASE("amplitude reciprocity for symmetric tensors") {
    for (int i = 0; i < 20; ++i) {
        const auto a = random_dir(), b = random_dir();
        const Vec3 xa = transverse_basis(a, 2.0 * pi * uni()).first;
        const Vec3 xb = transverse_basis(b, 2.0 * pi * uni()).first;
        const auto tensor = PolarizabilityTensor(3.0 * uni(), 2.0 * uni(), uni(),
                                                 0.5 * uni() - 0.25, 0.0, 0.0);
        const double k = 1.0e5;
        const auto fwd = amplitude({k, a, b, tensor}, xa, xb);
        const auto rev = amplitude({k, b, a, tensor}, xb, xa);
        CHECK(std::abs(fwd - rev) < 1e-13 * std::max(1.0, std::abs(fwd)));
    }
}

TEST_CASE("delta kernel trivial zeros") {
    const auto t = PolarizabilityTensor::diagonal(3.0e-37, 1.0e-37, 2.0e-37);
    const auto iso = PolarizabilityTensor::diagonal(2.0e-37, 2.0e-37, 5.0e-37);
    for (int i = 0; i < 5; ++i) {
        const auto k = random_dir(), p = random_dir();
        CHECK(delta_kernel(k, p, t, 0.0, kCalibratedConvention) == 0.0);
        CHECK(std::abs(delta_kernel(k, p, iso, 1.1, kCalibratedConvention)) < 1e-87);
    }
}

TEST_CASE("delta kernel matches the brute-force polarization sum") {
    for (int i = 0; i < 30; ++i) {
        const auto k = random_dir(), p = random_dir();
        const auto t = PolarizabilityTensor::diagonal(5.0 * uni(), 2.0 * uni(), 3.0 * uni());
        const double w = pi * uni();
        const auto diff = delta_polarizability(t, w);
        const double oracle =
            polarization_sum_oracle(k, p, diff, 2.0 * pi * uni(), 2.0 * pi * uni());
        CHECK(delta_kernel(k, p, t, w, PolarizationConvention::SumSum) ==
              Catch::Approx(oracle).margin(1e-12));
        CHECK(delta_kernel(k, p, t, w, PolarizationConvention::AvgSum) ==
              Catch::Approx(0.5 * oracle).margin(1e-12));
        CHECK(delta_kernel(k, p, t, w, PolarizationConvention::AvgAvg) ==
              Catch::Approx(0.25 * oracle).margin(1e-12));
    }
}

TEST_CASE("delta kernel is non-negative and covariant under global z-rotation") {
    for (int i = 0; i < 20; ++i) {
        const auto kd = random_dir(), pd = random_dir();
        const auto t = PolarizabilityTensor::diagonal(4.0 * uni(), uni(), 2.0 * uni());
        const double w = pi * uni();
        const double base = delta_kernel(kd, pd, t, w, kCalibratedConvention);
        CHECK(base >= -1e-15);

        const double psi = 2.0 * pi * uni();
        // active rotation by psi: directions phi -> phi + psi, tensor a -> Rz a Rz^T
        const auto t_rot = rotate_polarizability(t, -psi);
        const double rot = delta_kernel(rotate_direction_z(kd, -psi),
                                        rotate_direction_z(pd, -psi), t_rot, w,
                                        kCalibratedConvention);
        CHECK(rot == Catch::Approx(base).epsilon(1e-12).margin(1e-15));
    }
}

TEST_CASE("angular average of delta kernel follows sin^2(omega) (ax-ay)^2") {
    const SphereGrid g = build_sphere_grid(6);
    const auto t = PolarizabilityTensor::diagonal(6.0e-37, 2.0e-37, 3.5e-37);
    const double aniso2 = std::pow(6.0e-37 - 2.0e-37, 2);
    double ref = 0.0;
    for (double w = 0.2; w < 1.5; w += 0.3) {
        const double avg = integrate_product(
            [&](const UnitDirection& k, const UnitDirection& p) {
                return delta_kernel(k, p, t, w, kCalibratedConvention);
            },
            g, g);
        const double ratio = avg / (std::sin(w) * std::sin(w) * aniso2);
        if (ref == 0.0) ref = ratio;
        CHECK(ratio == Catch::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("cross kernel basics") {
    const auto a = PolarizabilityTensor::diagonal(3.0e-37, 1.0e-37, 2.0e-37);
    const auto zero = PolarizabilityTensor{};
    const auto k1 = random_dir(), p1 = random_dir(), k2 = random_dir(), p2 = random_dir();
    CHECK(cross_kernel(k1, p1, k2, p2, a, zero, kCalibratedConvention) == 0.0);

    // swap symmetry of the two amplitude factors
    const auto b = PolarizabilityTensor::diagonal(1.0e-37, 4.0e-37, 0.5e-37);
    CHECK(cross_kernel(k1, p1, k2, p2, a, b, kCalibratedConvention) ==
          Catch::Approx(cross_kernel(k2, p2, k1, p1, b, a, kCalibratedConvention))
              .epsilon(1e-14));

    // direct formula check: 4 c(conv) (k1.A.p1)(k2.B.p2)
    const double fa = dot(k1.unit_vector(), a.to_matrix() * p1.unit_vector());
    const double fb = dot(k2.unit_vector(), b.to_matrix() * p2.unit_vector());
    CHECK(cross_kernel(k1, p1, k2, p2, a, b, PolarizationConvention::SumSum) ==
          Catch::Approx(4.0 * fa * fb).epsilon(1e-15));
}

TEST_CASE("cross kernel reduces to delta kernel after angular integration") {
    // The coincident-pair reduction holds for the S^2 x S^2 integrals (the
    // objects the rate is built from), for every convention.
    const auto t = PolarizabilityTensor::diagonal(5.0e-37, 2.0e-37, 1.0e-37);
    const double w = 0.8;
    const auto diff = delta_polarizability(t, w);
    const SphereGrid g = build_sphere_grid(6);
    for (auto conv : {PolarizationConvention::SumSum, PolarizationConvention::AvgSum,
                      PolarizationConvention::AvgAvg}) {
        const double lhs = integrate_product(
            [&](const UnitDirection& k, const UnitDirection& p) {
                return cross_kernel(k, p, k, p, diff, diff, conv);
            },
            g, g);
        const double rhs = integrate_product(
            [&](const UnitDirection& k, const UnitDirection& p) {
                return delta_kernel(k, p, t, w, conv);
            },
            g, g);
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("convention bookkeeping") {
    CHECK(convention_factor(PolarizationConvention::SumSum) == 1.0);
    CHECK(convention_factor(PolarizationConvention::AvgSum) == 0.5);
    CHECK(convention_factor(PolarizationConvention::AvgAvg) == 0.25);
    CHECK(kCalibratedConvention == PolarizationConvention::AvgAvg);
    CHECK(polarization_convention_from_string("avg_avg") == PolarizationConvention::AvgAvg);
    CHECK(to_string(PolarizationConvention::SumSum) == "sum_sum");
    CHECK_THROWS_AS(polarization_convention_from_string("bogus"), std::invalid_argument);
}

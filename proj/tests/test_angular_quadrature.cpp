#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <random>
#include <vector>

#include "rotodec/angular_quadrature.hpp"
#include "rotodec/gauss_legendre.hpp"
#include "rotodec/scattering_model.hpp"
#include "rotodec/special_functions.hpp"

using namespace rotodec;

namespace {
std::mt19937_64 gen(11);
double uni() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
} // namespace

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
    const auto rule = gauss_legendre(6); // degree 11
    for (int deg = 0; deg <= 11; ++deg) {
        double s = 0.0;
        for (const auto& n : rule) s += n.w * std::pow(n.x, deg);
        const double exact = (deg % 2) ? 0.0 : 2.0 / (deg + 1.0);
        CHECK(s == Catch::Approx(exact).margin(1e-14));
    }
    double wsum = 0.0;
    for (const auto& n : rule) wsum += n.w;
    CHECK(wsum == Catch::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("sphere grid weights sum to 4 pi") {
    for (int L : {1, 2, 6, 16, 33}) {
        const SphereGrid g = build_sphere_grid(L);
        double s = 0.0;
        for (const auto& n : g.nodes()) s += n.w;
        CHECK(s == Catch::Approx(4.0 * pi).epsilon(1e-12));
    }
    CHECK_THROWS_AS(build_sphere_grid(0), std::invalid_argument);
    CHECK_THROWS_AS(build_sphere_grid(65), std::invalid_argument);
}

TEST_CASE("constant integrates to 4 pi and harmonics to zero") {
    const SphereGrid g = build_sphere_grid(6);
    CHECK(integrate_s2(g, [](const UnitDirection&) { return 1.0; }) ==
          Catch::Approx(4.0 * pi).epsilon(1e-13));
    for (int l = 1; l <= 6; ++l)
        for (int m = -l; m <= l; ++m) {
            const auto v = integrate_s2(g, [&](const UnitDirection& d) {
                return spherical_harmonic({l, m}, d);
            });
            CHECK(std::abs(v) < 1e-13);
        }
}

TEST_CASE("unit normalization of |Y_32|^2 on the L = 6 grid") {
    const SphereGrid g = build_sphere_grid(6);
    const auto v = integrate_s2(g, [](const UnitDirection& d) {
        return std::norm(spherical_harmonic({3, 2}, d));
    });
    CHECK(v == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random band-limited functions integrate to their mean component") {
    constexpr int L = 8;
    const SphereGrid g = build_sphere_grid(L);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<std::pair<SphericalHarmonicIndex, double>> terms;
        for (int l = 0; l <= L; ++l)
            for (int m = 0; m <= l; ++m) terms.push_back({{l, m}, 2.0 * uni() - 1.0});
        const auto f = [&](const UnitDirection& d) {
            double s = 0.0;
            for (const auto& [idx, c] : terms)
                s += c * (idx.m == 0 ? spherical_harmonic(idx, d).real()
                                     : std::sqrt(2.0) * spherical_harmonic(idx, d).real());
            return s;
        };
        const double c00 = terms[0].second;
        CHECK(integrate_s2(g, f) == Catch::Approx(c00 * std::sqrt(4.0 * pi)).margin(1e-11));
    }
}

TEST_CASE("linearity of integrate_s2") {
    const SphereGrid g = build_sphere_grid(4);
    const auto f = [](const UnitDirection& d) { return std::cos(d.theta()); };
    const auto h = [](const UnitDirection& d) { return std::sin(d.theta()) * std::cos(d.phi()); };
    const double a = 2.25, b = -0.75;
    const double lhs = integrate_s2(g, [&](const UnitDirection& d) { return a * f(d) + b * h(d); });
    const double rhs = a * integrate_s2(g, f) + b * integrate_s2(g, h);
    CHECK(lhs == Catch::Approx(rhs).margin(1e-13));
}

TEST_CASE("product quadrature basics") {
    const SphereGrid g = build_sphere_grid(4);
    const double two = integrate_product(
        [](const UnitDirection&, const UnitDirection&) { return 1.0; }, g, g);
    CHECK(two == Catch::Approx(16.0 * pi * pi).epsilon(1e-13));

    const double odd = integrate_product(
        [](const UnitDirection& a, const UnitDirection& b) {
            return dot(a.unit_vector(), b.unit_vector()); // P_1 of the angle between
        },
        g, g);
    CHECK(std::abs(odd) < 1e-12 * 16.0 * pi * pi);

    const SphereGrid small = build_sphere_grid(2);
    const double three = integrate_product(
        [](const UnitDirection&, const UnitDirection&, const UnitDirection&) { return 1.0; },
        small, small, small);
    CHECK(three == Catch::Approx(std::pow(4.0 * pi, 3)).epsilon(1e-12));
}

TEST_CASE("delta kernel angular integral matches the symbolic trace value") {
    // int (I - kk^T) dOmega = (8 pi / 3) I collapses the double integral to
    // c(conv) (8 pi / 3)^2 * 2 (ax - ay)^2 sin^2 w.
    const auto tensor = PolarizabilityTensor::diagonal(3.0e-37, 1.0e-37, 2.0e-37);
    const double w = 0.9;
    const SphereGrid g = build_sphere_grid(6);
    for (auto conv : {PolarizationConvention::SumSum, PolarizationConvention::AvgAvg}) {
        const double got = integrate_product(
            [&](const UnitDirection& k, const UnitDirection& p) {
                return delta_kernel(k, p, tensor, w, conv);
            },
            g, g);
        const double aniso = 3.0e-37 - 1.0e-37;
        const double expect = convention_factor(conv) * std::pow(8.0 * pi / 3.0, 2) * 2.0 *
                              aniso * aniso * std::sin(w) * std::sin(w);
        CHECK(got == Catch::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("refinement leaves the exact integral unchanged") {
    const auto tensor = PolarizabilityTensor::diagonal(2.0e-37, 0.5e-37, 1.0e-37);
    auto value = [&](int L) {
        const SphereGrid g = build_sphere_grid(L);
        return integrate_product(
            [&](const UnitDirection& k, const UnitDirection& p) {
                return delta_kernel(k, p, tensor, 0.6, kCalibratedConvention);
            },
            g, g);
    };
    const double v4 = value(4), v8 = value(8);
    CHECK(std::abs(v4 - v8) <= 1e-12 * std::abs(v8));
}

TEST_CASE("worker count override parsing") {
    CHECK(worker_count(3) == 3);
    ::setenv("ROTODEC_THREADS", "5", 1);
    CHECK(worker_count() == 5);
    ::setenv("ROTODEC_THREADS", "junk", 1);
    CHECK(worker_count() >= 1);
    ::setenv("ROTODEC_THREADS", "0", 1);
    CHECK(worker_count() >= 1);
    ::unsetenv("ROTODEC_THREADS");
}

TEST_CASE("parallel evaluation is bit-identical to serial") {
    const SphereGrid g = build_sphere_grid(12);
    const auto tensor = PolarizabilityTensor::diagonal(4.0e-37, 1.0e-37, 2.5e-37);
    const auto kernel = [&](const UnitDirection& k, const UnitDirection& p) {
        return delta_kernel(k, p, tensor, 1.2, kCalibratedConvention);
    };
    ::setenv("ROTODEC_THREADS", "1", 1);
    const double serial = integrate_product(kernel, g, g);
    const double s2 = integrate_s2(g, [](const UnitDirection& d) {
        return std::cos(3.0 * d.theta()) + std::sin(2.0 * d.phi());
    });
    ::setenv("ROTODEC_THREADS", "4", 1);
    const double parallel = integrate_product(kernel, g, g);
    const double p2 = integrate_s2(g, [](const UnitDirection& d) {
        return std::cos(3.0 * d.theta()) + std::sin(2.0 * d.phi());
    });
    ::unsetenv("ROTODEC_THREADS");
    CHECK(serial == parallel); // bitwise
    CHECK(s2 == p2);
}

TEST_CASE("complex integrands are supported") {
    const SphereGrid g = build_sphere_grid(6);
    // mock amplitude with a phase: e^{i phi} sin(theta) has zero mean
    const auto v = integrate_s2(g, [](const UnitDirection& d) {
        return std::polar(std::sin(d.theta()), d.phi());
    });
    CHECK(std::abs(v) < 1e-13);
}

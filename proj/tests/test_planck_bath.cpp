#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rotodec/planck_bath.hpp"

using namespace rotodec;

TEST_CASE("thermal bath validation and thermal wavenumber") {
    CHECK_THROWS_AS(ThermalBath(0.0), std::invalid_argument);
    CHECK_THROWS_AS(ThermalBath(-3.0), std::invalid_argument);
    const ThermalBath bath(300.0);
    CHECK(bath.thermal_wavenumber() ==
          Catch::Approx(codata.k_B * 300.0 / (codata.hbar * codata.c)).epsilon(1e-15));
    CHECK(bath.thermal_wavenumber() > 0.0);
}

TEST_CASE("occupation pinned points") {
    const ThermalBath bath(300.0);
    const double kT = bath.thermal_wavenumber();
    CHECK(occupation(bath, kT * std::log(2.0)) == Catch::Approx(2.0).epsilon(1e-14));
    CHECK(occupation(bath, kT) == Catch::Approx(2.0 / (std::exp(1.0) - 1.0)).epsilon(1e-14));
    CHECK(occupation(bath, 200.0 * kT) < 1e-80); // exponential suppression
    CHECK_THROWS_AS(occupation(bath, 0.0), std::domain_error);
    CHECK_THROWS_AS(occupation(bath, -1.0), std::domain_error);
}

TEST_CASE("occupation is decreasing and log-convex") {
    const ThermalBath bath(77.0);
    const double kT = bath.thermal_wavenumber();
    double prev = occupation(bath, 0.01 * kT);
    std::vector<double> logs;
    for (int i = 1; i <= 60; ++i) {
        const double k = (0.01 + 0.25 * i) * kT;
        const double f = occupation(bath, k);
        CHECK(f < prev);
        prev = f;
        logs.push_back(std::log(f));
    }
    for (std::size_t i = 1; i + 1 < logs.size(); ++i)
        CHECK(logs[i - 1] + logs[i + 1] - 2.0 * logs[i] >= -1e-12);
}

TEST_CASE("spectral weight shape") {
    const ThermalBath bath(300.0);
    const SpectralWeight w{bath};
    const double kT = bath.thermal_wavenumber();
    CHECK(w(1e-9 * kT) >= 0.0);
    CHECK(w(1e-9 * kT) < w(kT));   // rises from zero
    CHECK(w(60.0 * kT) < w(kT));   // falls at large k
    CHECK(w(1e-12 * kT) < 1e-6 * w(kT));
    CHECK(w(kT) == Catch::Approx(4.0 * pi * kT * kT * occupation(bath, kT)).epsilon(1e-15));
}

TEST_CASE("closed-form moments") {
    const ThermalBath bath(300.0), hot(600.0);
    CHECK(photon_moment_closed(hot, 6) / photon_moment_closed(bath, 6) ==
          Catch::Approx(128.0).epsilon(1e-12)); // T^7 scaling
    const double kT = bath.thermal_wavenumber();
    CHECK(photon_moment_closed(bath, 6) ==
          Catch::Approx(720.0 * riemann_zeta_int(7) * std::pow(kT, 7)).epsilon(1e-14));
    CHECK(photon_moment_closed(bath, 2) ==
          Catch::Approx(2.0 * riemann_zeta_int(3) * std::pow(kT, 3)).epsilon(1e-14));
    CHECK_THROWS_AS(photon_moment_closed(bath, 1), std::invalid_argument);
}

TEST_CASE("numeric moments agree with the Bose integral identity") {
    for (double T : {3.0, 77.0, 300.0, 3000.0}) {
        const ThermalBath bath(T);
        for (int n = 2; n <= 8; ++n) {
            const double num = photon_moment_numeric(bath, n, 1e-11);
            const double cls = photon_moment_closed(bath, n);
            CHECK(num == Catch::Approx(cls).epsilon(1e-10));
        }
    }
}

TEST_CASE("numeric moment validation") {
    const ThermalBath bath(300.0);
    CHECK_THROWS_AS(photon_moment_numeric(bath, 1, 1e-10), std::invalid_argument);
    CHECK_THROWS_AS(photon_moment_numeric(bath, 6, 1e-14), std::invalid_argument);
    CHECK_NOTHROW(photon_moment_numeric(bath, 6, 1e-13));
}

TEST_CASE("scaled moment is temperature independent") {
    // M_n / k_T^{n+1} is a pure number.
    const ThermalBath a(11.0), b(1700.0);
    for (int n : {2, 4, 6}) {
        const double ra = photon_moment_numeric(a, n, 1e-12) / std::pow(a.thermal_wavenumber(), n + 1);
        const double rb = photon_moment_numeric(b, n, 1e-12) / std::pow(b.thermal_wavenumber(), n + 1);
        CHECK(ra == Catch::Approx(rb).epsilon(1e-12));
    }
}

TEST_CASE("sixth-moment integrand peak location") {
    // Golden-section maximization of x^6/(e^x - 1): the independent oracle
    // for the integrand shape. The maximizer solves x = 6(1 - e^-x), which
    // sits just below 6.
    const auto g = [](double x) { return std::pow(x, 6) / std::expm1(x); };
    auto maximize = [&](double lo, double hi) {
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = lo, b = hi;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        for (int it = 0; it < 200; ++it) {
            if (g(c) > g(d)) b = d; else a = c;
            c = b - gr * (b - a);
            d = a + gr * (b - a);
        }
        return 0.5 * (a + b);
    };
    const double xstar = maximize(1.0, 20.0);
    CHECK(xstar > 5.5);
    CHECK(xstar < 6.5);
    CHECK(6.0 * (1.0 - std::exp(-xstar)) == Catch::Approx(xstar).margin(1e-6)); // stationarity
    CHECK(maximize(4.0, 8.0) == Catch::Approx(xstar).margin(1e-9));             // refinement-stable
}

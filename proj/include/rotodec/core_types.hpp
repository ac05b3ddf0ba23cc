// Small geometric/tensorial value types shared by all modules: 3-vectors,
// 3x3 matrices, the symmetric polarizability tensor and its z-rotations,
// orientation pairs and unit directions on the sphere.
//
// Everything here is an immutable value; all operations are pure functions.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rotodec/constants.hpp"

namespace rotodec {

// Reduce an angle to (-pi, pi].
inline double reduce_angle(double a) {
    double r = std::fmod(a, 2.0 * pi);
    if (r > pi) r -= 2.0 * pi;
    if (r <= -pi) r += 2.0 * pi;
    return r;
}

// Wrap an angle into [0, 2pi).
inline double wrap_angle_2pi(double a) {
    double r = std::fmod(a, 2.0 * pi);
    if (r < 0.0) r += 2.0 * pi;
    if (r >= 2.0 * pi) r = 0.0;
    return r;
}

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) {
    double n = norm(a);
    if (n == 0.0) throw std::domain_error("normalized: zero vector");
    return (1.0 / n) * a;
}

// Row-major dense 3x3 matrix. Used for rotations, projectors and as the
// working representation of tensors inside products.
struct Mat3 {
    std::array<double, 9> m{};

    double operator()(int i, int j) const { return m[3 * i + j]; }
    double& operator()(int i, int j) { return m[3 * i + j]; }

    static Mat3 identity() {
        Mat3 r;
        r(0, 0) = r(1, 1) = r(2, 2) = 1.0;
        return r;
    }
    static Mat3 outer(Vec3 a, Vec3 b) {
        Mat3 r;
        const double av[3] = {a.x, a.y, a.z}, bv[3] = {b.x, b.y, b.z};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = av[i] * bv[j];
        return r;
    }
    Mat3 transpose() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }
    double trace() const { return m[0] + m[4] + m[8]; }

    friend Mat3 operator+(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = a.m[i] + b.m[i];
        return r;
    }
    friend Mat3 operator-(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = a.m[i] - b.m[i];
        return r;
    }
    friend Mat3 operator*(double s, const Mat3& a) {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = s * a.m[i];
        return r;
    }
    friend Mat3 operator*(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
                r(i, j) = s;
            }
        return r;
    }
    friend Vec3 operator*(const Mat3& a, Vec3 v) {
        return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z,
                a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z,
                a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z};
    }
};

inline double determinant(const Mat3& a) {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

// Active rotation about z by angle a: maps azimuth phi to phi + a.
inline Mat3 rotation_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r(0, 0) = c;  r(0, 1) = -s; r(0, 2) = 0.0;
    r(1, 0) = s;  r(1, 1) = c;  r(1, 2) = 0.0;
    r(2, 0) = 0.0; r(2, 1) = 0.0; r(2, 2) = 1.0;
    return r;
}

// Real symmetric 3x3 polarizability tensor, SI units C m^2 / V.
// Stores the six unique components, so T[i][j] == T[j][i] holds exactly.
// Differences of tensors (used by the rate kernels) are held in the same
// type and may be indefinite; non-negativity is validated where physical
// tensors are constructed.
class PolarizabilityTensor {
public:
    PolarizabilityTensor() = default;
    PolarizabilityTensor(double xx, double yy, double zz, double xy, double xz, double yz)
        : xx_(xx), yy_(yy), zz_(zz), xy_(xy), xz_(xz), yz_(yz) {}

    static PolarizabilityTensor diagonal(double ax, double ay, double az) {
        return {ax, ay, az, 0.0, 0.0, 0.0};
    }
    // Accepts a numerically symmetric matrix; the upper triangle is stored.
    static PolarizabilityTensor from_matrix(const Mat3& m, double tol = 1e-12) {
        double scale = 0.0;
        for (double v : m.m) scale = std::max(scale, std::abs(v));
        const double atol = tol * std::max(scale, 1e-300);
        if (std::abs(m(0, 1) - m(1, 0)) > atol || std::abs(m(0, 2) - m(2, 0)) > atol ||
            std::abs(m(1, 2) - m(2, 1)) > atol)
            throw std::invalid_argument("PolarizabilityTensor: matrix is not symmetric");
        return {m(0, 0), m(1, 1), m(2, 2), m(0, 1), m(0, 2), m(1, 2)};
    }

    double xx() const { return xx_; }
    double yy() const { return yy_; }
    double zz() const { return zz_; }
    double xy() const { return xy_; }
    double xz() const { return xz_; }
    double yz() const { return yz_; }

    double operator()(int i, int j) const {
        if (i == j) return i == 0 ? xx_ : (i == 1 ? yy_ : zz_);
        const int a = std::min(i, j), b = std::max(i, j);
        if (a == 0) return b == 1 ? xy_ : xz_;
        return yz_;
    }

    Mat3 to_matrix() const {
        Mat3 r;
        r(0, 0) = xx_; r(0, 1) = xy_; r(0, 2) = xz_;
        r(1, 0) = xy_; r(1, 1) = yy_; r(1, 2) = yz_;
        r(2, 0) = xz_; r(2, 1) = yz_; r(2, 2) = zz_;
        return r;
    }

    double trace() const { return xx_ + yy_ + zz_; }
    double frobenius_norm_sq() const {
        return xx_ * xx_ + yy_ * yy_ + zz_ * zz_ + 2.0 * (xy_ * xy_ + xz_ * xz_ + yz_ * yz_);
    }
    double max_abs() const {
        double m = 0.0;
        for (double v : {xx_, yy_, zz_, xy_, xz_, yz_}) m = std::max(m, std::abs(v));
        return m;
    }
    bool is_diagonal(double tol = 1e-14) const {
        const double scale = std::max(max_abs(), 1e-300);
        return std::abs(xy_) <= tol * scale && std::abs(xz_) <= tol * scale &&
               std::abs(yz_) <= tol * scale;
    }

    friend PolarizabilityTensor operator-(const PolarizabilityTensor& a,
                                          const PolarizabilityTensor& b) {
        return {a.xx_ - b.xx_, a.yy_ - b.yy_, a.zz_ - b.zz_,
                a.xy_ - b.xy_, a.xz_ - b.xz_, a.yz_ - b.yz_};
    }

private:
    double xx_ = 0.0, yy_ = 0.0, zz_ = 0.0, xy_ = 0.0, xz_ = 0.0, yz_ = 0.0;
};

// Superposed orientations (alpha, alpha') about z; omega = alpha - alpha'
// reduced to (-pi, pi].
struct OrientationPair {
    double alpha = 0.0;
    double alpha_prime = 0.0;

    double omega() const { return reduce_angle(alpha - alpha_prime); }
};

// Direction on the unit sphere, (theta, phi) with theta in [0, pi] and
// phi in [0, 2pi).
class UnitDirection {
public:
    UnitDirection(double theta, double phi) : theta_(theta), phi_(wrap_angle_2pi(phi)) {
        if (!(theta >= -1e-12 && theta <= pi + 1e-12))
            throw std::domain_error("UnitDirection: theta outside [0, pi]");
        if (theta_ < 0.0) theta_ = 0.0;
        if (theta_ > pi) theta_ = pi;
    }
    static UnitDirection from_cartesian(Vec3 v) {
        const Vec3 u = normalized(v);
        double ct = u.z;
        ct = std::min(1.0, std::max(-1.0, ct));
        return {std::acos(ct), std::atan2(u.y, u.x)};
    }

    double theta() const { return theta_; }
    double phi() const { return phi_; }

    Vec3 unit_vector() const {
        const double st = std::sin(theta_);
        return {st * std::cos(phi_), st * std::sin(phi_), std::cos(theta_)};
    }

private:
    double theta_;
    double phi_;
};

// alpha_omega = Rz(omega)^T alpha0 Rz(omega). A similarity transform, so the
// spectrum is preserved; the result is re-symmetrized exactly by storage.
inline PolarizabilityTensor rotate_polarizability(const PolarizabilityTensor& alpha0,
                                                  double omega) {
    const Mat3 r = rotation_z(omega);
    const Mat3 a = r.transpose() * (alpha0.to_matrix() * r);
    return {a(0, 0), a(1, 1), a(2, 2),
            0.5 * (a(0, 1) + a(1, 0)), 0.5 * (a(0, 2) + a(2, 0)), 0.5 * (a(1, 2) + a(2, 1))};
}

// Difference tensor alpha0 - alpha_omega between the two superposed
// configurations. Zero when omega = 0 mod pi-rotations of a transverse
// isotropic tensor; for diagonal alpha0 every z-row/column entry is exactly 0.
inline PolarizabilityTensor delta_polarizability(const PolarizabilityTensor& alpha0,
                                                 double omega) {
    return alpha0 - rotate_polarizability(alpha0, omega);
}

// Rotate a direction by alpha about z with the sign that pairs with the
// e^{-i m alpha} covariance of the spherical harmonics: phi -> phi - alpha.
inline UnitDirection rotate_direction_z(const UnitDirection& d, double alpha) {
    return {d.theta(), d.phi() - alpha};
}

// Diagonal tensor from polarizability volumes (m^3): alpha = 4 pi eps0 vol.
inline PolarizabilityTensor polarizability_from_volume(double vx, double vy, double vz) {
    if (vx < 0.0 || vy < 0.0 || vz < 0.0)
        throw std::invalid_argument("polarizability_from_volume: negative volume component");
    const double f = 4.0 * pi * codata.epsilon_0;
    return PolarizabilityTensor::diagonal(f * vx, f * vy, f * vz);
}

} // namespace rotodec

// Vector algebra, state containers and the internal unit system.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ideal {

template <typename Scalar> using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar> using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
template <typename Scalar> using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

/// Raised when a state sits on a coordinate singularity (r = 0, G = 0,
/// q <= 0, ...). Integrators treat it as a rejected trial step.
class SingularStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for initial conditions that are not a bound (elliptic) orbit.
class UnboundOrbitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename Scalar>
struct CartesianState {
    Scalar t{0};
    Vec3<Scalar> x = Vec3<Scalar>::Zero();
    Vec3<Scalar> X = Vec3<Scalar>::Zero();
};

template <typename Scalar>
struct GravParams {
    Scalar gm{1};
    Scalar j2{0};
    Scalar re{1};
};

/// Length and time units such that GM = 1. UL is the semi-major axis of
/// the osculating ellipse at departure; UT = UL sqrt(UL / GM).
template <typename Scalar>
struct UnitSystem {
    Scalar ul{1};
    Scalar ut{1};

    Scalar length(Scalar v) const { return v / ul; }
    Scalar time(Scalar v) const { return v / ut; }
    Scalar velocity(Scalar v) const { return v * ut / ul; }
    Scalar gm(Scalar v) const { return v * ut * ut / (ul * ul * ul); }
    Scalar rate(Scalar v) const { return v * ut; }

    Scalar length_out(Scalar v) const { return v * ul; }
    Scalar time_out(Scalar v) const { return v * ut; }
    Scalar velocity_out(Scalar v) const { return v * ul / ut; }
};

template <typename Scalar>
UnitSystem<Scalar> make_unit_system(const Vec3<Scalar>& x0, const Vec3<Scalar>& X0, Scalar gm) {
    using std::sqrt;
    const Scalar r = x0.norm();
    if (!(r > 0)) throw SingularStateError("make_unit_system: zero radius");
    if (!(gm > 0)) throw std::invalid_argument("make_unit_system: GM must be positive");
    const Scalar denom = -X0.squaredNorm() + 2 * gm / r;
    if (!(denom > 0)) throw UnboundOrbitError("make_unit_system: not a bound orbit");
    UnitSystem<Scalar> u;
    u.ul = gm / denom;
    u.ut = u.ul * sqrt(u.ul / gm);
    return u;
}

template <typename Scalar>
Vec3<Scalar> angular_momentum(const Vec3<Scalar>& x, const Vec3<Scalar>& X) {
    return x.cross(X);
}

/// Laplace-Runge-Lenz vector scaled to the osculating eccentricity.
template <typename Scalar>
Vec3<Scalar> eccentricity_vector(const Vec3<Scalar>& x, const Vec3<Scalar>& X, Scalar gm) {
    const Scalar r = x.norm();
    if (!(r > 0)) throw SingularStateError("eccentricity_vector: zero radius");
    return X.cross(x.cross(X)) / gm - x / r;
}

/// G . e, identically zero for exact arithmetic.
template <typename Scalar>
Scalar orthogonality_defect(const Vec3<Scalar>& x, const Vec3<Scalar>& X, Scalar gm) {
    return angular_momentum(x, X).dot(eccentricity_vector(x, X, gm));
}

}  // namespace ideal

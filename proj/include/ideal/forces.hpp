// Disturbing accelerations: J2 zonal term and a moon on a circular orbit,
// plus their projection on the ideal frame.
#pragma once

#include <cmath>
#include <optional>

#include "ideal/core.hpp"
#include "ideal/frames.hpp"

namespace ideal {

/// Perturbing body on a circular orbit about the primary. The orbit plane is
/// given by inclination and node on the space frame; phase0 is the argument
/// of latitude at t = 0.
template <typename Scalar>
struct MoonParams {
    Scalar gm{0};
    Scalar radius{0};
    Scalar mean_motion{0};
    Scalar inclination{0};
    Scalar node{0};
    Scalar phase0{0};

    // In-plane basis: direction of the ascending node and its 90 deg lead.
    Vec3<Scalar> p_hat = Vec3<Scalar>::UnitX();
    Vec3<Scalar> q_hat = Vec3<Scalar>::UnitY();
};

template <typename Scalar>
MoonParams<Scalar> make_moon(Scalar gm, Scalar radius, Scalar mean_motion, Scalar inclination,
                             Scalar node, Scalar phase0) {
    using std::cos;
    using std::sin;
    if (!(gm > 0) || !(radius > 0) || !(mean_motion > 0))
        throw std::invalid_argument("make_moon: gm, radius and mean motion must be positive");
    MoonParams<Scalar> m{gm, radius, mean_motion, inclination, node, phase0};
    const Scalar cn = cos(node), sn = sin(node), ci = cos(inclination), si = sin(inclination);
    m.p_hat = Vec3<Scalar>(cn, sn, 0);
    m.q_hat = Vec3<Scalar>(-sn * ci, cn * ci, si);
    return m;
}

template <typename Scalar>
struct ForceConfig {
    GravParams<Scalar> grav;
    bool enable_j2{false};
    bool enable_moon{false};
    std::optional<MoonParams<Scalar>> moon;
};

template <typename Scalar>
struct PerturbationSample {
    Vec3<Scalar> p_space = Vec3<Scalar>::Zero();
    // Components of P* = (r^3 / G^2) P on u, v, n.
    Scalar pu{0}, pv{0}, pn{0};
};

/// Disturbing potential of the second zonal harmonic,
/// U = -(GM J2 Re^2 / 2 r^3) (3 (z/r)^2 - 1).
template <typename Scalar>
Scalar j2_potential(const Vec3<Scalar>& x, const GravParams<Scalar>& grav) {
    const Scalar r2 = x.squaredNorm();
    if (!(r2 > 0)) throw SingularStateError("j2_potential: zero radius");
    using std::sqrt;
    const Scalar r = sqrt(r2);
    return -grav.gm * grav.j2 * grav.re * grav.re / (2 * r2 * r) * (3 * x[2] * x[2] / r2 - 1);
}

/// Gradient of j2_potential.
template <typename Scalar>
Vec3<Scalar> j2_accel(const Vec3<Scalar>& x, const GravParams<Scalar>& grav) {
    using std::sqrt;
    const Scalar r2 = x.squaredNorm();
    if (!(r2 > 0)) throw SingularStateError("j2_accel: zero radius");
    const Scalar r = sqrt(r2);
    const Scalar k = Scalar(-1.5) * grav.gm * grav.j2 * grav.re * grav.re / (r2 * r2 * r);
    const Scalar s2 = 5 * x[2] * x[2] / r2;
    return Vec3<Scalar>(k * x[0] * (1 - s2), k * x[1] * (1 - s2), k * x[2] * (3 - s2));
}

template <typename Scalar>
Vec3<Scalar> moon_position(Scalar t, const MoonParams<Scalar>& m) {
    using std::cos;
    using std::sin;
    const Scalar a = m.phase0 + m.mean_motion * t;
    return m.radius * (cos(a) * m.p_hat + sin(a) * m.q_hat);
}

/// Differential (tidal) attraction of a third body at xm on a particle at x,
/// both relative to the primary.
template <typename Scalar>
Vec3<Scalar> third_body_accel(const Vec3<Scalar>& x, const Vec3<Scalar>& xm, Scalar gmm) {
    using std::sqrt;
    const Vec3<Scalar> d = xm - x;
    const Scalar d2 = d.squaredNorm();
    const Scalar m2 = xm.squaredNorm();
    if (!(d2 > 0)) throw SingularStateError("third_body_accel: collision with perturbing body");
    if (!(m2 > 0)) throw SingularStateError("third_body_accel: perturbing body at origin");
    return gmm * (d / (d2 * sqrt(d2)) - xm / (m2 * sqrt(m2)));
}

template <typename Scalar>
Vec3<Scalar> total_perturbation(Scalar t, const Vec3<Scalar>& x, const Vec3<Scalar>& /*X*/,
                                const ForceConfig<Scalar>& cfg) {
    Vec3<Scalar> p = Vec3<Scalar>::Zero();
    if (cfg.enable_j2) p += j2_accel(x, cfg.grav);
    if (cfg.enable_moon) {
        if (!cfg.moon) throw std::invalid_argument("total_perturbation: moon enabled without parameters");
        p += third_body_accel(x, moon_position(t, *cfg.moon), cfg.moon->gm);
    }
    return p;
}

template <typename Scalar>
PerturbationSample<Scalar> project_perturbation(const Vec3<Scalar>& p_space, const FrameAxes<Scalar>& axes,
                                                Scalar r, Scalar G) {
    const Scalar k = r * r * r / (G * G);
    return {p_space, k * p_space.dot(axes.u), k * p_space.dot(axes.v), k * p_space.dot(axes.n)};
}

}  // namespace ideal

// Orbital frame, departure rotation, Euler parameters and their sqrt(G)-scaled
// counterpart.
#pragma once

#include <cmath>

#include "ideal/core.hpp"

namespace ideal {

template <typename Scalar>
struct OrbitalFrame {
    Vec3<Scalar> u, v, n;
    Scalar r{0};
    Scalar G{0};
};

/// Unit quaternion (lambda1..lambda4) giving the attitude of the ideal frame in
/// the departure frame. lambda4 is the scalar part.
template <typename Scalar>
struct EulerParams {
    Vec4<Scalar> l = Vec4<Scalar>(0, 0, 0, 1);
};

/// g_i = sqrt(G) lambda_i; the squared norm carries the angular momentum.
template <typename Scalar>
struct ScaledParams {
    Vec4<Scalar> g = Vec4<Scalar>::Zero();

    Scalar angular_momentum() const { return g.squaredNorm(); }
};

/// Unit vectors of the orbital (or ideal) frame expressed in space axes.
template <typename Scalar>
struct FrameAxes {
    Vec3<Scalar> u, v, n;
};

template <typename Scalar>
OrbitalFrame<Scalar> orbital_frame(const Vec3<Scalar>& x, const Vec3<Scalar>& X) {
    OrbitalFrame<Scalar> f;
    f.r = x.norm();
    const Vec3<Scalar> Gv = angular_momentum(x, X);
    f.G = Gv.norm();
    if (!(f.r > 0) || !(f.G > 0))
        throw SingularStateError("orbital_frame: zero radius or rectilinear state");
    f.u = x / f.r;
    f.n = Gv / f.G;
    f.v = f.n.cross(f.u);
    return f;
}

/// Columns are u, v, n in space axes: q_S = M q_O.
template <typename Scalar>
Mat3<Scalar> departure_matrix(const OrbitalFrame<Scalar>& frame) {
    Mat3<Scalar> m;
    m.col(0) = frame.u;
    m.col(1) = frame.v;
    m.col(2) = frame.n;
    return m;
}

/// Quaternion-to-matrix table, entry for entry. Not renormalized: a drifted
/// lambda yields a slightly non-orthogonal matrix.
template <typename Scalar>
Mat3<Scalar> rotation_from_params(const EulerParams<Scalar>& p) {
    const Scalar l1 = p.l[0], l2 = p.l[1], l3 = p.l[2], l4 = p.l[3];
    Mat3<Scalar> n;
    n << 1 - 2 * (l2 * l2 + l3 * l3), 2 * (l1 * l2 - l4 * l3), 2 * (l1 * l3 + l4 * l2),
         2 * (l1 * l2 + l4 * l3), 1 - 2 * (l1 * l1 + l3 * l3), 2 * (l2 * l3 - l4 * l1),
         2 * (l1 * l3 - l4 * l2), 2 * (l2 * l3 + l4 * l1), 1 - 2 * (l1 * l1 + l2 * l2);
    return n;
}

/// Same table evaluated with lambda_i lambda_j = g_i g_j / G, which avoids
/// the square root of the explicit normalization. inv_G = 1 / sum g^2.
template <typename Scalar>
Mat3<Scalar> rotation_from_params(const ScaledParams<Scalar>& p, Scalar inv_G) {
    const Scalar k = 2 * inv_G;
    const Scalar g1 = p.g[0], g2 = p.g[1], g3 = p.g[2], g4 = p.g[3];
    Mat3<Scalar> n;
    n << 1 - k * (g2 * g2 + g3 * g3), k * (g1 * g2 - g4 * g3), k * (g1 * g3 + g4 * g2),
         k * (g1 * g2 + g4 * g3), 1 - k * (g1 * g1 + g3 * g3), k * (g2 * g3 - g4 * g1),
         k * (g1 * g3 - g4 * g2), k * (g2 * g3 + g4 * g1), 1 - k * (g1 * g1 + g2 * g2);
    return n;
}

template <typename Scalar>
Mat3<Scalar> rotation_from_params(const ScaledParams<Scalar>& p) {
    const Scalar G = p.angular_momentum();
    if (!(G > 0)) throw SingularStateError("rotation_from_params: zero scaled parameters");
    return rotation_from_params(p, 1 / G);
}

template <typename Scalar>
ScaledParams<Scalar> scale_params(const EulerParams<Scalar>& p, Scalar G) {
    using std::sqrt;
    if (!(G > 0)) throw SingularStateError("scale_params: non-positive angular momentum");
    return {sqrt(G) * p.l};
}

template <typename Scalar>
struct Unscaled {
    EulerParams<Scalar> lambda;
    Scalar G;
};

template <typename Scalar>
Unscaled<Scalar> unscale_params(const ScaledParams<Scalar>& p) {
    using std::sqrt;
    const Scalar G = p.angular_momentum();
    if (!(G > 0)) throw SingularStateError("unscale_params: zero scaled parameters");
    return {{p.g / sqrt(G)}, G};
}

/// (u_S, v_S, n_S) = M0 N (u_I, v_I, n_I) with u_I = (cos, sin, 0) and
/// v_I = (-sin, cos, 0) of the ideal-frame angle.
template <typename Scalar, typename Params>
FrameAxes<Scalar> ideal_axes_in_space(const Mat3<Scalar>& m0, const Params& params, Scalar theta) {
    using std::cos;
    using std::sin;
    const Mat3<Scalar> mn = m0 * rotation_from_params(params);
    const Scalar c = cos(theta), s = sin(theta);
    return {c * mn.col(0) + s * mn.col(1), c * mn.col(1) - s * mn.col(0), mn.col(2)};
}

}  // namespace ideal

// Derivative fields of the Cowell, 8D and 7D ideal-frame formulations and the
// encode/decode maps between Cartesian states and each state vector.
//
// State component order (the independent variable is never stored):
//
//   COWELL        indep t       [x, y, z, vx, vy, vz]
//   IDEAL8_QQ     indep theta*  [l1, l2, l3, l4, G, q, Q, t]
//   IDEAL8_CS     indep theta*  [l1, l2, l3, l4, G, C*, S*, t]
//   IDEAL7_QQ     indep theta*  [g1, g2, g3, g4, q, Q, t]
//   IDEAL7_CS     indep theta*  [g1, g2, g3, g4, C*, S*, t]
//   IDEAL7_QQ_T   indep t       [g1, g2, g3, g4, r, rdot, theta*]
//   IDEAL7_CS_T   indep t       [g1, g2, g3, g4, C*, S*, theta*]
//
// q = 1/r, Q = -rdot/G, and theta* is the angle from the ideal direction u* to
// the radius vector.
#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string_view>
#include <utility>

#include "ideal/core.hpp"
#include "ideal/forces.hpp"
#include "ideal/frames.hpp"

namespace ideal {

enum class FormulationKind { Cowell, Ideal8QQ, Ideal8CS, Ideal7QQ, Ideal7CS, Ideal7QQTime, Ideal7CSTime };

inline constexpr std::array<FormulationKind, 7> all_formulations{
    FormulationKind::Cowell,   FormulationKind::Ideal8QQ,     FormulationKind::Ideal8CS,
    FormulationKind::Ideal7QQ, FormulationKind::Ideal7CS,     FormulationKind::Ideal7QQTime,
    FormulationKind::Ideal7CSTime};

constexpr std::string_view kind_name(FormulationKind k) {
    switch (k) {
        case FormulationKind::Cowell: return "COWELL";
        case FormulationKind::Ideal8QQ: return "IDEAL8_QQ";
        case FormulationKind::Ideal8CS: return "IDEAL8_CS";
        case FormulationKind::Ideal7QQ: return "IDEAL7_QQ";
        case FormulationKind::Ideal7CS: return "IDEAL7_CS";
        case FormulationKind::Ideal7QQTime: return "IDEAL7_QQ_T";
        case FormulationKind::Ideal7CSTime: return "IDEAL7_CS_T";
    }
    return "?";
}

constexpr std::optional<FormulationKind> parse_kind(std::string_view s) {
    for (auto k : all_formulations)
        if (kind_name(k) == s) return k;
    return std::nullopt;
}

template <FormulationKind K>
struct KindTraits {
    static constexpr bool eight = K == FormulationKind::Ideal8QQ || K == FormulationKind::Ideal8CS;
    static constexpr bool regularized = K == FormulationKind::Ideal8QQ || K == FormulationKind::Ideal8CS ||
                                        K == FormulationKind::Ideal7QQ || K == FormulationKind::Ideal7CS;
    static constexpr bool cs = K == FormulationKind::Ideal8CS || K == FormulationKind::Ideal7CS ||
                               K == FormulationKind::Ideal7CSTime;
    static constexpr bool ideal = K != FormulationKind::Cowell;
    static constexpr int dim = K == FormulationKind::Cowell ? 6 : (eight ? 8 : 7);
};

template <typename Scalar, FormulationKind K>
using StateOf = Eigen::Matrix<Scalar, KindTraits<K>::dim, 1>;

template <typename Scalar>
struct FieldContext {
    ForceConfig<Scalar> cfg;
    Mat3<Scalar> m0 = Mat3<Scalar>::Identity();
};

// --- Deprit ideal elements <-> (r, rdot) -------------------------------------

template <typename Scalar>
std::pair<Scalar, Scalar> cs_from_r(Scalar G, Scalar p, Scalar r, Scalar rdot, Scalar theta) {
    using std::cos;
    using std::sin;
    const Scalar c = cos(theta), s = sin(theta);
    const Scalar w = G / r - G / p;
    return {w * c + rdot * s, w * s - rdot * c};
}

/// Returns (G/r, rdot) on the osculating ellipse.
template <typename Scalar>
std::pair<Scalar, Scalar> g_r_from_cs(Scalar C, Scalar S, Scalar theta, Scalar G, Scalar p) {
    using std::cos;
    using std::sin;
    const Scalar c = cos(theta), s = sin(theta);
    return {C * c + S * s + G / p, C * s - S * c};
}

namespace detail {

/// Quaternion kinematic combination multiplying the normal force component:
/// (p4 c - p3 s, p4 s + p3 c, p1 s - p2 c, -p1 c - p2 s).
template <typename Scalar>
Vec4<Scalar> normal_rate(const Vec4<Scalar>& p, Scalar c, Scalar s) {
    return Vec4<Scalar>(p[3] * c - p[2] * s, p[3] * s + p[2] * c, p[0] * s - p[1] * c, -p[0] * c - p[1] * s);
}

template <typename Scalar>
struct IdealPoint {
    FrameAxes<Scalar> axes;
    PerturbationSample<Scalar> sample;
};

/// FORCE MODEL step: rotate the ideal axes to space, rebuild x and X, evaluate
/// the disturbing force there and project it.
template <typename Scalar>
IdealPoint<Scalar> force_at(const FieldContext<Scalar>& ctx, const Mat3<Scalar>& n, Scalar c, Scalar s, Scalar t,
                            Scalar r, Scalar rdot, Scalar G) {
    const Mat3<Scalar> mn = ctx.m0 * n;
    IdealPoint<Scalar> pt;
    pt.axes = {c * mn.col(0) + s * mn.col(1), c * mn.col(1) - s * mn.col(0), mn.col(2)};
    if (!ctx.cfg.enable_j2 && !ctx.cfg.enable_moon) return pt;
    const Vec3<Scalar> x = r * pt.axes.u;
    const Vec3<Scalar> X = rdot * pt.axes.u + (G / r) * pt.axes.v;
    pt.sample = project_perturbation(total_perturbation(t, x, X, ctx.cfg), pt.axes, r, G);
    return pt;
}

template <typename Scalar>
void require_positive(Scalar v, const char* what) {
    if (!(v > 0)) throw SingularStateError(what);
}

}  // namespace detail

// --- Cowell -------------------------------------------------------------------

template <typename Scalar>
Eigen::Matrix<Scalar, 6, 1> cowell_field(Scalar t, const Eigen::Matrix<Scalar, 6, 1>& y,
                                         const ForceConfig<Scalar>& cfg) {
    const Vec3<Scalar> x = y.template head<3>();
    const Vec3<Scalar> X = y.template tail<3>();
    const Scalar r2 = x.squaredNorm();
    detail::require_positive(r2, "cowell_field: zero radius");
    using std::sqrt;
    const Scalar r = sqrt(r2);
    Eigen::Matrix<Scalar, 6, 1> dy;
    dy.template head<3>() = X;
    dy.template tail<3>() = -cfg.grav.gm / (r2 * r) * x + total_perturbation(t, x, X, cfg);
    return dy;
}

// --- 7D, regularized ----------------------------------------------------------

template <typename Scalar>
Eigen::Matrix<Scalar, 7, 1> ideal7_qq_field(Scalar theta, const Eigen::Matrix<Scalar, 7, 1>& y,
                                            const FieldContext<Scalar>& ctx) {
    using std::cos;
    using std::sin;
    const ScaledParams<Scalar> g{y.template head<4>()};
    const Scalar G = g.angular_momentum();
    const Scalar q = y[4], Q = y[5], t = y[6];
    detail::require_positive(G, "ideal7_qq_field: zero scaled parameters");
    detail::require_positive(q, "ideal7_qq_field: non-positive inverse distance");
    const Scalar c = cos(theta), s = sin(theta);
    const Scalar inv_G = 1 / G;
    const auto pt = detail::force_at(ctx, rotation_from_params(g, inv_G), c, s, t, 1 / q, -Q * G, G);
    const auto& f = pt.sample;

    Eigen::Matrix<Scalar, 7, 1> dy;
    dy.template head<4>() = Scalar(0.5) * (f.pv * g.g + f.pn * detail::normal_rate(g.g, c, s));
    dy[4] = Q;
    dy[5] = ctx.cfg.grav.gm / (G * G) - q * (1 + f.pu) - Q * f.pv;
    dy[6] = 1 / (q * q * G);
    return dy;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 7, 1> ideal7_cs_field(Scalar theta, const Eigen::Matrix<Scalar, 7, 1>& y,
                                            const FieldContext<Scalar>& ctx) {
    using std::cos;
    using std::sin;
    const ScaledParams<Scalar> g{y.template head<4>()};
    const Scalar G = g.angular_momentum();
    const Scalar C = y[4], S = y[5], t = y[6];
    detail::require_positive(G, "ideal7_cs_field: zero scaled parameters");
    const Scalar c = cos(theta), s = sin(theta);
    const Scalar inv_G = 1 / G;
    const Scalar gp = ctx.cfg.grav.gm * inv_G;  // G/p
    const Scalar gr = C * c + S * s + gp;   // G/r
    detail::require_positive(gr, "ideal7_cs_field: osculating conic does not reach this angle");
    const Scalar r = G / gr;
    const auto pt = detail::force_at(ctx, rotation_from_params(g, inv_G), c, s, t, r, C * s - S * c, G);
    const auto& f = pt.sample;

    Eigen::Matrix<Scalar, 7, 1> dy;
    dy.template head<4>() = Scalar(0.5) * (f.pv * g.g + f.pn * detail::normal_rate(g.g, c, s));
    dy[4] = (gr + gp) * f.pv * c + gr * f.pu * s;
    dy[5] = (gr + gp) * f.pv * s - gr * f.pu * c;
    dy[6] = r * r / G;
    return dy;
}

// --- 8D, regularized ----------------------------------------------------------
// Time-domain lambda and G rates carried to theta* with d/dtheta* = (r^2/G) d/dt.

template <typename Scalar>
Eigen::Matrix<Scalar, 8, 1> ideal8_qq_field(Scalar theta, const Eigen::Matrix<Scalar, 8, 1>& y,
                                            const FieldContext<Scalar>& ctx) {
    using std::cos;
    using std::sin;
    const EulerParams<Scalar> l{y.template head<4>()};
    const Scalar G = y[4], q = y[5], Q = y[6], t = y[7];
    detail::require_positive(G, "ideal8_qq_field: non-positive angular momentum");
    detail::require_positive(q, "ideal8_qq_field: non-positive inverse distance");
    const Scalar c = cos(theta), s = sin(theta);
    const auto pt = detail::force_at(ctx, rotation_from_params(l), c, s, t, 1 / q, -Q * G, G);
    const auto& f = pt.sample;

    Eigen::Matrix<Scalar, 8, 1> dy;
    dy.template head<4>() = Scalar(0.5) * f.pn * detail::normal_rate(l.l, c, s);
    dy[4] = G * f.pv;
    dy[5] = Q;
    dy[6] = ctx.cfg.grav.gm / (G * G) - q * (1 + f.pu) - Q * f.pv;
    dy[7] = 1 / (q * q * G);
    return dy;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 8, 1> ideal8_cs_field(Scalar theta, const Eigen::Matrix<Scalar, 8, 1>& y,
                                            const FieldContext<Scalar>& ctx) {
    using std::cos;
    using std::sin;
    const EulerParams<Scalar> l{y.template head<4>()};
    const Scalar G = y[4], C = y[5], S = y[6], t = y[7];
    detail::require_positive(G, "ideal8_cs_field: non-positive angular momentum");
    const Scalar c = cos(theta), s = sin(theta);
    const Scalar gp = ctx.cfg.grav.gm / G;
    const Scalar gr = C * c + S * s + gp;
    detail::require_positive(gr, "ideal8_cs_field: osculating conic does not reach this angle");
    const Scalar r = G / gr;
    const auto pt = detail::force_at(ctx, rotation_from_params(l), c, s, t, r, C * s - S * c, G);
    const auto& f = pt.sample;

    Eigen::Matrix<Scalar, 8, 1> dy;
    dy.template head<4>() = Scalar(0.5) * f.pn * detail::normal_rate(l.l, c, s);
    dy[4] = G * f.pv;
    dy[5] = (gr + gp) * f.pv * c + gr * f.pu * s;
    dy[6] = (gr + gp) * f.pv * s - gr * f.pu * c;
    dy[7] = r * r / G;
    return dy;
}

// --- 7D, physical time ----------------------------------------------------------
// Written with the unscaled force P so that they stay an independent route
// from the regularized fields above.

template <typename Scalar>
Eigen::Matrix<Scalar, 7, 1> ideal7_qq_time_field(Scalar t, const Eigen::Matrix<Scalar, 7, 1>& y,
                                                 const FieldContext<Scalar>& ctx) {
    using std::cos;
    using std::sin;
    const ScaledParams<Scalar> g{y.template head<4>()};
    const Scalar G = g.angular_momentum();
    const Scalar r = y[4], rdot = y[5], theta = y[6];
    detail::require_positive(G, "ideal7_qq_time_field: zero scaled parameters");
    detail::require_positive(r, "ideal7_qq_time_field: non-positive radius");
    const Scalar c = cos(theta), s = sin(theta);
    const Scalar inv_G = 1 / G;
    const auto pt = detail::force_at(ctx, rotation_from_params(g, inv_G), c, s, t, r, rdot, G);
    const Vec3<Scalar>& P = pt.sample.p_space;
    const Scalar Pu = P.dot(pt.axes.u), Pv = P.dot(pt.axes.v), Pn = P.dot(pt.axes.n);
    const Scalar gp = ctx.cfg.grav.gm / G;

    Eigen::Matrix<Scalar, 7, 1> dy;
    dy.template head<4>() = r / (2 * G) * (Pv * g.g + Pn * detail::normal_rate(g.g, c, s));
    dy[4] = rdot;
    dy[5] = (G / r - gp) * G / (r * r) + Pu;
    dy[6] = G / (r * r);
    return dy;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 7, 1> ideal7_cs_time_field(Scalar t, const Eigen::Matrix<Scalar, 7, 1>& y,
                                                 const FieldContext<Scalar>& ctx) {
    using std::cos;
    using std::sin;
    const ScaledParams<Scalar> g{y.template head<4>()};
    const Scalar G = g.angular_momentum();
    const Scalar C = y[4], S = y[5], theta = y[6];
    detail::require_positive(G, "ideal7_cs_time_field: zero scaled parameters");
    const Scalar c = cos(theta), s = sin(theta);
    const Scalar inv_G = 1 / G;
    const Scalar gp = ctx.cfg.grav.gm / G;
    const Scalar gr = C * c + S * s + gp;
    detail::require_positive(gr, "ideal7_cs_time_field: osculating conic does not reach this angle");
    const Scalar r = G / gr;
    const auto pt = detail::force_at(ctx, rotation_from_params(g, inv_G), c, s, t, r, C * s - S * c, G);
    const Vec3<Scalar>& P = pt.sample.p_space;
    const Scalar Pu = P.dot(pt.axes.u), Pv = P.dot(pt.axes.v), Pn = P.dot(pt.axes.n);
    const Scalar k = 1 + r * gp / G;  // 1 + r/p

    Eigen::Matrix<Scalar, 7, 1> dy;
    dy.template head<4>() = r / (2 * G) * (Pv * g.g + Pn * detail::normal_rate(g.g, c, s));
    dy[4] = k * Pv * c + Pu * s;
    dy[5] = k * Pv * s - Pu * c;
    dy[6] = G / (r * r);
    return dy;
}

// --- dispatch -------------------------------------------------------------------

template <FormulationKind K, typename Scalar>
StateOf<Scalar, K> field(Scalar s, const StateOf<Scalar, K>& y, const FieldContext<Scalar>& ctx) {
    if constexpr (K == FormulationKind::Cowell) return cowell_field(s, y, ctx.cfg);
    else if constexpr (K == FormulationKind::Ideal8QQ) return ideal8_qq_field(s, y, ctx);
    else if constexpr (K == FormulationKind::Ideal8CS) return ideal8_cs_field(s, y, ctx);
    else if constexpr (K == FormulationKind::Ideal7QQ) return ideal7_qq_field(s, y, ctx);
    else if constexpr (K == FormulationKind::Ideal7CS) return ideal7_cs_field(s, y, ctx);
    else if constexpr (K == FormulationKind::Ideal7QQTime) return ideal7_qq_time_field(s, y, ctx);
    else return ideal7_cs_time_field(s, y, ctx);
}

/// Physical time of a state.
template <FormulationKind K, typename Scalar>
Scalar time_of(Scalar s, const StateOf<Scalar, K>& y) {
    if constexpr (KindTraits<K>::regularized) return y[KindTraits<K>::dim - 1];
    else return s;
}

/// theta* of a state (zero for Cowell).
template <FormulationKind K, typename Scalar>
Scalar angle_of(Scalar s, const StateOf<Scalar, K>& y) {
    if constexpr (K == FormulationKind::Cowell) return Scalar(0);
    else if constexpr (KindTraits<K>::regularized) return s;
    else return y[6];
}

/// Angular momentum magnitude carried by a state (|x cross X| for Cowell).
template <FormulationKind K, typename Scalar>
Scalar angular_momentum_of(const StateOf<Scalar, K>& y) {
    if constexpr (K == FormulationKind::Cowell)
        return angular_momentum<Scalar>(y.template head<3>(), y.template tail<3>()).norm();
    else if constexpr (KindTraits<K>::eight) return y[4];
    else return y.template head<4>().squaredNorm();
}

template <typename Scalar, FormulationKind K>
struct Encoded {
    Scalar s{0};  // independent variable
    StateOf<Scalar, K> y;
    Mat3<Scalar> m0 = Mat3<Scalar>::Identity();
};

/// INITIAL CONDITIONS: departure frame from (x0, X0), theta* = 0, identity
/// attitude, and (q, Q) or (C*, S*) from r and rdot.
template <FormulationKind K, typename Scalar>
Encoded<Scalar, K> encode(const CartesianState<Scalar>& s0, const ForceConfig<Scalar>& cfg) {
    using std::sqrt;
    Encoded<Scalar, K> e;
    if constexpr (K == FormulationKind::Cowell) {
        e.s = s0.t;
        e.y << s0.x, s0.X;
        return e;
    } else {
        const auto frame = orbital_frame(s0.x, s0.X);
        e.m0 = departure_matrix(frame);
        const Scalar G = frame.G, r = frame.r;
        const Scalar rdot = s0.X.dot(s0.x) / r;
        const Scalar p = G * G / cfg.grav.gm;
        constexpr int off = KindTraits<K>::eight ? 5 : 4;
        if constexpr (KindTraits<K>::eight) {
            e.y.template head<4>() = Vec4<Scalar>(0, 0, 0, 1);
            e.y[4] = G;
        } else {
            e.y.template head<4>() = Vec4<Scalar>(0, 0, 0, sqrt(G));
        }
        if constexpr (KindTraits<K>::cs) {
            const auto [C, S] = cs_from_r(G, p, r, rdot, Scalar(0));
            e.y[off] = C;
            e.y[off + 1] = S;
        } else if constexpr (KindTraits<K>::regularized) {
            e.y[off] = 1 / r;
            e.y[off + 1] = -rdot / G;
        } else {
            e.y[off] = r;
            e.y[off + 1] = rdot;
        }
        if constexpr (KindTraits<K>::regularized) {
            e.s = 0;
            e.y[off + 2] = s0.t;
        } else {
            e.s = s0.t;
            e.y[off + 2] = 0;
        }
        return e;
    }
}

/// x = r M0 N u_I, X = (rdot/r) x + (G/r) M0 N v_I.
template <FormulationKind K, typename Scalar>
CartesianState<Scalar> decode(Scalar s, const StateOf<Scalar, K>& y, const Mat3<Scalar>& m0,
                              const ForceConfig<Scalar>& cfg) {
    CartesianState<Scalar> out;
    out.t = time_of<K>(s, y);
    if constexpr (K == FormulationKind::Cowell) {
        out.x = y.template head<3>();
        out.X = y.template tail<3>();
        return out;
    } else {
        constexpr int off = KindTraits<K>::eight ? 5 : 4;
        const Scalar G = angular_momentum_of<K>(y);
        detail::require_positive(G, "decode: non-positive angular momentum");
        const Scalar theta = angle_of<K>(s, y);
        Scalar r, rdot;
        if constexpr (KindTraits<K>::cs) {
            const auto [gr, rd] = g_r_from_cs(y[off], y[off + 1], theta, G, G * G / cfg.grav.gm);
            detail::require_positive(gr, "decode: osculating conic does not reach this angle");
            r = G / gr;
            rdot = rd;
        } else if constexpr (KindTraits<K>::regularized) {
            detail::require_positive(y[off], "decode: non-positive inverse distance");
            r = 1 / y[off];
            rdot = -y[off + 1] * G;
        } else {
            r = y[off];
            rdot = y[off + 1];
            detail::require_positive(r, "decode: non-positive radius");
        }
        FrameAxes<Scalar> axes;
        if constexpr (KindTraits<K>::eight)
            axes = ideal_axes_in_space(m0, EulerParams<Scalar>{y.template head<4>()}, theta);
        else
            axes = ideal_axes_in_space(m0, ScaledParams<Scalar>{y.template head<4>()}, theta);
        out.x = r * axes.u;
        out.X = (rdot / r) * out.x + (G / r) * axes.v;
        return out;
    }
}

/// p1 p2' - p2 p1' + p3 p4' - p4 p3' for the attitude block of an ideal
/// state; zero along the exact flow.
template <FormulationKind K, typename Scalar>
Scalar bilinear_residual(const StateOf<Scalar, K>& y, const StateOf<Scalar, K>& dy) {
    if constexpr (K == FormulationKind::Cowell) {
        return Scalar(0);
    } else {
        return y[0] * dy[1] - y[1] * dy[0] + y[2] * dy[3] - y[3] * dy[2];
    }
}

}  // namespace ideal

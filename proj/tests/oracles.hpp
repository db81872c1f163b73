// Independent reference computations for the tests. Nothing here calls the
// library under test.
#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace oracle {

struct State {
    Eigen::Vector3d x;
    Eigen::Vector3d v;
};

/// Two-body state at time t from (x0, v0) at time 0, via Kepler's equation in
/// the eccentric anomaly and the Lagrange f and g coefficients. Elliptic only.
inline State kepler(const Eigen::Vector3d& x0, const Eigen::Vector3d& v0, double mu, double t) {
    using L = long double;
    const L r0 = x0.norm();
    const L a = 1 / (2 / r0 - L(v0.squaredNorm()) / mu);
    const L n = std::sqrt(mu / (a * a * a));
    const L ecosE0 = 1 - r0 / a;
    const L esinE0 = L(x0.dot(v0)) / std::sqrt(mu * a);
    const L e = std::hypot(ecosE0, esinE0);
    const L E0 = std::atan2(esinE0, ecosE0);
    const L two_pi = 2 * std::numbers::pi_v<L>;
    const L M = std::fmod(E0 - esinE0 + n * t, two_pi);

    L E = e < 0.8 ? M : std::numbers::pi_v<L>;
    for (int i = 0; i < 100; ++i) {
        const L dE = (E - e * std::sin(E) - M) / (1 - e * std::cos(E));
        E -= dE;
        if (std::abs(dE) < 1e-19L) break;
    }
    // Eccentric-anomaly increment, reduced modulo whole revolutions.
    const L dE = std::remainder(E - E0, two_pi);
    const L tau = (dE - (esinE0 * std::cos(dE) + ecosE0 * std::sin(dE)) + esinE0) / n;  // time within the revolution
    const L r = a * (1 - ecosE0 * std::cos(dE) + esinE0 * std::sin(dE));
    const L f = 1 - a / r0 * (1 - std::cos(dE));
    const L g = tau - (dE - std::sin(dE)) / n;
    const L fd = -std::sqrt(mu * a) * std::sin(dE) / (r * r0);
    const L gd = 1 - a / r * (1 - std::cos(dE));
    return {Eigen::Vector3d((f * x0.cast<L>() + g * v0.cast<L>()).cast<double>()),
            Eigen::Vector3d((fd * x0.cast<L>() + gd * v0.cast<L>()).cast<double>())};
}

/// Closed-form conic in polar form: r(theta) = p / (1 + e cos theta).
inline double conic_radius(double p, double e, double theta) { return p / (1 + e * std::cos(theta)); }

}  // namespace oracle

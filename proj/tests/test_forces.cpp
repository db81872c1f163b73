#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ideal/forces.hpp"

using namespace ideal;
using V3 = Vec3<double>;
using std::numbers::pi;

namespace {
const GravParams<double> kGrav{1.0, 1.08263e-3, 0.8};

MoonParams<double> test_moon() { return make_moon(0.0123, 60.0, 0.0021, 0.5, 0.3, 0.7); }
}  // namespace

TEST_CASE("J2 acceleration symmetries") {
    const V3 polar = j2_accel<double>(V3(0, 0, 1.5), kGrav);
    CHECK(polar[0] == 0.0);
    CHECK(polar[1] == 0.0);
    CHECK(polar[2] != 0.0);
    const V3 eq = j2_accel<double>(V3(1.1, -0.4, 0), kGrav);
    CHECK(eq[2] == 0.0);
    CHECK_THROWS_AS(j2_accel<double>(V3::Zero(), kGrav), SingularStateError);
}

TEST_CASE("J2 acceleration is the gradient of its potential") {
    // Central differences on the printed potential; the step is balanced
    // between truncation and round-off.
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n;
    std::uniform_real_distribution<double> rad(1.0, 4.0);
    for (int i = 0; i < 200; ++i) {
        const V3 x = V3(n(rng), n(rng), n(rng)).normalized() * rad(rng);
        const V3 a = j2_accel(x, kGrav);
        V3 fd;
        const double h = 1e-5 * x.norm();
        for (int k = 0; k < 3; ++k) {
            V3 xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            fd[k] = (j2_potential(xp, kGrav) - j2_potential(xm, kGrav)) / (2 * h);
        }
        CHECK((a - fd).norm() / a.norm() < 1e-6);
    }
}

TEST_CASE("moon position") {
    const auto m = test_moon();
    CHECK((moon_position(0.0, m) - m.radius * (std::cos(m.phase0) * m.p_hat + std::sin(m.phase0) * m.q_hat)).norm() <
          1e-13);
    const double quarter = pi / 2 / m.mean_motion;
    const V3 a = moon_position(0.0, m), b = moon_position(quarter, m);
    CHECK(std::abs(a.dot(b)) < 1e-15 * m.radius * m.radius);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> t(-1e5, 1e5);
    for (int i = 0; i < 100; ++i) CHECK(moon_position(t(rng), m).norm() == doctest::Approx(m.radius).epsilon(1e-15));
    // The orbit normal has the requested inclination.
    CHECK(m.p_hat.cross(m.q_hat)[2] == doctest::Approx(std::cos(m.inclination)).epsilon(1e-15));
}

TEST_CASE("third-body acceleration") {
    const V3 xm(10, 20, -5);
    CHECK(third_body_accel<double>(V3::Zero(), xm, 0.5) == V3::Zero());
    CHECK_THROWS_AS(third_body_accel<double>(xm, xm, 0.5), SingularStateError);
    CHECK_THROWS_AS(third_body_accel<double>(V3(1, 0, 0), V3::Zero(), 0.5), SingularStateError);

    // Tidal limit along the perturber line: 2 GMm |x| / |xm|^3.
    const double gmm = 0.7;
    for (double ratio : {1e-3, 5e-3, 9e-3}) {
        const V3 x = xm.normalized() * ratio * xm.norm();
        const double expect = 2 * gmm * x.norm() / std::pow(xm.norm(), 3);
        CHECK(third_body_accel(x, xm, gmm).norm() == doctest::Approx(expect).epsilon(0.01));
    }
}

TEST_CASE("total perturbation is the sum of its parts") {
    ForceConfig<double> cfg;
    cfg.grav = kGrav;
    cfg.moon = test_moon();
    const V3 x(0.8, 1.1, -0.3), X(0, 1, 0);
    const double t = 123.4;
    CHECK(total_perturbation(t, x, X, cfg) == V3::Zero());
    cfg.enable_j2 = true;
    CHECK(total_perturbation(t, x, X, cfg) == j2_accel(x, kGrav));
    cfg.enable_moon = true;
    const V3 sum = j2_accel(x, kGrav) + third_body_accel(x, moon_position(t, *cfg.moon), cfg.moon->gm);
    CHECK((total_perturbation(t, x, X, cfg) - sum).norm() < 1e-18);
    cfg.moon.reset();
    CHECK_THROWS(total_perturbation(t, x, X, cfg));
}

TEST_CASE("projection on the ideal frame") {
    const FrameAxes<double> ax{V3(0, 1, 0), V3(-1, 0, 0), V3(0, 0, 1)};
    auto s = project_perturbation<double>(V3::Zero(), ax, 1.0, 1.0);
    CHECK((s.pu == 0.0 && s.pv == 0.0 && s.pn == 0.0));
    s = project_perturbation<double>(ax.u, ax, 1.0, 1.0);
    CHECK((s.pu == 1.0 && s.pv == 0.0 && s.pn == 0.0));
    const V3 P(0.3, -0.2, 0.1);
    const auto a = project_perturbation(P, ax, 1.3, 0.9), b = project_perturbation(P, ax, 2.6, 0.9);
    CHECK(b.pu == doctest::Approx(8 * a.pu).epsilon(1e-15));
    CHECK(b.pv == doctest::Approx(8 * a.pv).epsilon(1e-15));
    CHECK(b.pn == doctest::Approx(8 * a.pn).epsilon(1e-15));
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ideal/propagator.hpp"
#include "oracles.hpp"

using namespace ideal;
using std::numbers::pi;
using V3 = Vec3<double>;
using FK = FormulationKind;

namespace {

Problem<double> ellipse(double e, std::vector<double> epochs) {
    Problem<double> pb;
    pb.initial.x = V3(1 - e, 0, 0);
    pb.initial.X = V3(0, std::sqrt((1 + e) / (1 - e)), 0);
    pb.output_epochs = std::move(epochs);
    return pb;
}

Problem<double> j2_problem(double T) {
    Problem<double> pb;
    pb.initial.x = V3(1.1, 0.1, -0.2);
    pb.initial.X = V3(-0.1, 0.8, 0.45);
    pb.forces.grav = {1.0, 1.08263e-3, 0.9};
    pb.forces.enable_j2 = true;
    pb.output_epochs = {T};
    return pb;
}

}  // namespace

TEST_CASE("circular orbit returns after one period for every formulation") {
    const auto pb = ellipse(0.0, {pi, 2 * pi});
    for (auto k : all_formulations) {
        CAPTURE(kind_name(k));
        const auto tr = propagate(pb, k, Tolerances<double>{});
        REQUIRE(tr.states.size() == 3);
        CHECK((tr.states[1].x - V3(-1, 0, 0)).norm() < 1e-10);
        CHECK((tr.final_state().x - pb.initial.x).norm() < 1e-10);
        CHECK((tr.final_state().X - pb.initial.X).norm() < 1e-10);
    }
}

TEST_CASE("tilted eccentric orbit against the analytic solution") {
    const Eigen::Matrix3d tilt = Eigen::AngleAxisd(0.9, V3(1, -2, 0.5).normalized()).toRotationMatrix();
    auto pb = ellipse(0.6, {});
    pb.initial.x = tilt * pb.initial.x;
    pb.initial.X = tilt * pb.initial.X;
    pb.initial.t = 3.0;
    for (int i = 1; i <= 7; ++i) pb.output_epochs.push_back(3.0 + 2.7 * i);
    for (auto k : all_formulations) {
        CAPTURE(kind_name(k));
        const auto tr = propagate(pb, k, Tolerances<double>{});
        for (std::size_t i = 1; i < tr.states.size(); ++i) {
            const double t = pb.output_epochs[i - 1];
            const auto o = oracle::kepler(pb.initial.x, pb.initial.X, 1.0, t - 3.0);
            CHECK((tr.states[i].x - o.x).norm() < 1e-9);
            CHECK((tr.states[i].X - o.v).norm() < 1e-9 * o.v.norm() + 1e-9);
        }
    }
}

TEST_CASE("samples sit on the requested epochs and start at the initial state") {
    const auto pb = j2_problem(5.0);
    auto p2 = pb;
    p2.initial.t = 0.5;
    p2.output_epochs = {1.0, 2.25, 4.0, 7.5};
    for (auto k : all_formulations) {
        CAPTURE(kind_name(k));
        const auto tr = propagate(p2, k, Tolerances<double>{});
        REQUIRE(tr.states.size() == 5);
        CHECK(tr.states[0].t == 0.5);
        CHECK((tr.states[0].x - p2.initial.x).norm() < 1e-15);
        CHECK((tr.states[0].X - p2.initial.X).norm() < 1e-15);
        for (std::size_t i = 1; i < 5; ++i)
            CHECK(std::abs(tr.states[i].t - p2.output_epochs[i - 1]) <= 32 * 2.3e-16 * std::max(1.0, p2.output_epochs[i - 1]));
        CHECK(tr.raw.size() == 5);
        CHECK(tr.diagnostics.energy.size() == 5);
        CHECK(tr.diagnostics.bilinear[0] == 0.0);
        CHECK(std::abs(tr.diagnostics.norm_defect[0]) < 1e-15);
    }
}

TEST_CASE("invalid problems are rejected") {
    auto pb = ellipse(0.0, {1.0});
    pb.initial.X = V3(0, 1.5, 0);  // energy > 0
    CHECK_THROWS_AS(propagate(pb, FK::Ideal7CS, Tolerances<double>{}), UnboundOrbitError);
    pb.initial.X = V3(0.3, 0, 0);  // rectilinear
    CHECK_THROWS_AS(propagate(pb, FK::Cowell, Tolerances<double>{}), SingularStateError);
    pb = ellipse(0.0, {});
    CHECK_THROWS_AS(propagate(pb, FK::Ideal7CS, Tolerances<double>{}), std::invalid_argument);
    pb.output_epochs = {2.0, 1.0};
    CHECK_THROWS_AS(propagate(pb, FK::Ideal7QQ, Tolerances<double>{}), std::invalid_argument);
}

TEST_CASE("J2 energy and polar angular momentum are conserved") {
    const auto pb = j2_problem(60.0);
    Tolerances<double> tol;
    tol.rtol = tol.atol = 1e-13;
    const auto c0 = conserved_quantities(pb.initial, pb.forces);
    for (auto k : all_formulations) {
        CAPTURE(kind_name(k));
        const auto tr = propagate(pb, k, tol);
        const auto c1 = conserved_quantities(tr.final_state(), pb.forces);
        CHECK(std::abs(c1.energy - c0.energy) < 1e-10 * std::abs(c0.energy));
        CHECK(std::abs(c1.gz - c0.gz) < 1e-10 * std::abs(c0.gz));
    }
}

TEST_CASE("CS in physical time agrees with CS in the ideal anomaly") {
    auto pb = j2_problem(30.0);
    pb.forces.enable_moon = true;
    pb.forces.moon = make_moon(0.0123, 20.0, 0.011, 0.5, 0.0, -pi / 2);
    Tolerances<double> tol;
    tol.rtol = tol.atol = 1e-12;
    const auto a = propagate(pb, FK::Ideal7CS, tol).final_state();
    const auto b = propagate(pb, FK::Ideal7CSTime, tol).final_state();
    CHECK((a.x - b.x).norm() < 1e-7 * a.x.norm());
}

TEST_CASE("long double propagation matches double to double precision") {
    const auto pb = j2_problem(10.0);
    Problem<long double> pl;
    pl.initial.t = pb.initial.t;
    pl.initial.x = pb.initial.x.cast<long double>();
    pl.initial.X = pb.initial.X.cast<long double>();
    pl.forces.grav = {1.0L, 1.08263e-3L, 0.9L};
    pl.forces.enable_j2 = true;
    pl.output_epochs = {10.0L};
    Tolerances<long double> tl;
    tl.rtol = tl.atol = 1e-15L;
    Tolerances<double> td;
    td.rtol = td.atol = 1e-13;
    const auto a = propagate(pl, FK::Cowell, tl).final_state();
    const auto b = propagate(pb, FK::Ideal7CS, td).final_state();
    CHECK((a.x.cast<double>() - b.x).norm() < 1e-10);
}

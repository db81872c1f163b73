#include "ideal/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "ideal/propagator.hpp"

namespace ideal {
namespace {

using std::numbers::pi;

CheckResult check(std::string name, double residual, double tolerance) {
    return {std::move(name), std::isfinite(residual) && residual <= tolerance, residual, tolerance};
}

Vec4<double> random_unit4(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Vec4<double> v(n(rng), n(rng), n(rng), n(rng));
    return v.normalized();
}

ForceConfig<double> toy_forces(bool j2, bool moon) {
    ForceConfig<double> cfg;
    cfg.grav = {1.0, 1.08e-3, 0.05};
    cfg.enable_j2 = j2;
    cfg.enable_moon = moon;
    cfg.moon = make_moon(0.012, 3.0, 0.2, 0.5, 0.3, -1.2);
    return cfg;
}

// Position on a Keplerian ellipse (GM = 1) that starts at periapsis on +x
// moving towards +y, via the eccentric anomaly.
Vec3<double> conic_position(double a, double e, double t) {
    const double M = std::fmod(t / std::sqrt(a * a * a), 2 * pi);
    double E = e < 0.8 ? M : pi;
    for (int i = 0; i < 50; ++i) {
        const double dE = (E - e * std::sin(E) - M) / (1 - e * std::cos(E));
        E -= dE;
        if (std::abs(dE) < 1e-16) break;
    }
    return {a * (std::cos(E) - e), a * std::sqrt(1 - e * e) * std::sin(E), 0.0};
}

CheckResult rotation_orthogonality(std::mt19937_64& rng) {
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
        const Mat3<double> n = rotation_from_params(EulerParams<double>{random_unit4(rng)});
        worst = std::max(worst, (n.transpose() * n - Mat3<double>::Identity()).cwiseAbs().maxCoeff());
        worst = std::max(worst, std::abs(n.determinant() - 1));
    }
    return check("rotation orthogonality", worst, 1e-14);
}

CheckResult scaled_rotation(std::mt19937_64& rng) {
    double worst = 0;
    std::uniform_real_distribution<double> G(0.1, 10.0);
    for (int i = 0; i < 200; ++i) {
        const EulerParams<double> l{random_unit4(rng)};
        const auto g = scale_params(l, G(rng));
        worst = std::max(worst, (rotation_from_params(g) - rotation_from_params(l)).cwiseAbs().maxCoeff());
    }
    return check("scaled rotation equals unit rotation", worst, 1e-14);
}

template <FormulationKind K>
double roundtrip_error(const CartesianState<double>& s0, const ForceConfig<double>& cfg) {
    const auto enc = encode<K>(s0, cfg);
    const auto back = decode<K>(enc.s, enc.y, enc.m0, cfg);
    return std::max((back.x - s0.x).norm() / s0.x.norm(), (back.X - s0.X).norm() / s0.X.norm());
}

CheckResult encode_decode(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    const auto cfg = toy_forces(true, true);
    double worst = 0;
    for (int i = 0; i < 50; ++i) {
        CartesianState<double> s0;
        s0.t = u(rng);
        s0.x = Vec3<double>(u(rng), u(rng), u(rng)).normalized() * (1 + 0.5 * u(rng));
        s0.X = Vec3<double>(u(rng), u(rng), u(rng)) * 0.6;
        if (angular_momentum(s0.x, s0.X).norm() < 0.05) continue;
        worst = std::max({worst, roundtrip_error<FormulationKind::Ideal8QQ>(s0, cfg),
                          roundtrip_error<FormulationKind::Ideal8CS>(s0, cfg),
                          roundtrip_error<FormulationKind::Ideal7QQ>(s0, cfg),
                          roundtrip_error<FormulationKind::Ideal7CS>(s0, cfg),
                          roundtrip_error<FormulationKind::Ideal7QQTime>(s0, cfg),
                          roundtrip_error<FormulationKind::Ideal7CSTime>(s0, cfg)});
    }
    return check("encode/decode round trip", worst, 1e-13);
}

template <FormulationKind K>
double bilinear_on_random(std::mt19937_64& rng, const FieldContext<double>& ctx) {
    std::uniform_real_distribution<double> u(-1, 1);
    constexpr int off = KindTraits<K>::eight ? 5 : 4;
    StateOf<double, K> y;
    y.template head<4>() = random_unit4(rng);
    if constexpr (KindTraits<K>::eight) y[4] = 1 + 0.3 * u(rng);
    else y.template head<4>() *= std::sqrt(1 + 0.3 * u(rng));
    y[off] = KindTraits<K>::cs ? 0.3 * u(rng) : 1 + 0.3 * u(rng);  // C* or q or r
    y[off + 1] = 0.3 * u(rng);
    y[off + 2] = u(rng);
    const double s = pi * u(rng);
    const auto dy = field<K>(s, y, ctx);
    const double scale = y.template head<4>().squaredNorm() * dy.template head<4>().norm() + 1e-300;
    return std::abs(bilinear_residual<K>(y, dy)) / scale;
}

CheckResult bilinear_identity(std::mt19937_64& rng) {
    FieldContext<double> ctx{toy_forces(true, true), rotation_from_params(EulerParams<double>{random_unit4(rng)})};
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
        worst = std::max({worst, bilinear_on_random<FormulationKind::Ideal8QQ>(rng, ctx),
                          bilinear_on_random<FormulationKind::Ideal8CS>(rng, ctx),
                          bilinear_on_random<FormulationKind::Ideal7QQ>(rng, ctx),
                          bilinear_on_random<FormulationKind::Ideal7CS>(rng, ctx),
                          bilinear_on_random<FormulationKind::Ideal7QQTime>(rng, ctx),
                          bilinear_on_random<FormulationKind::Ideal7CSTime>(rng, ctx)});
    }
    return check("bilinear constraint identity", worst, 1e-14);
}

CheckResult unperturbed_attitude(std::mt19937_64& rng) {
    FieldContext<double> ctx{toy_forces(false, false), Mat3<double>::Identity()};
    std::uniform_real_distribution<double> u(-1, 1);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        StateOf<double, FormulationKind::Ideal7CS> y;
        y << random_unit4(rng), 0.3 * u(rng), 0.3 * u(rng), u(rng);
        const auto dy = field<FormulationKind::Ideal7CS>(pi * u(rng), y, ctx);
        worst = std::max(worst, dy.head<4>().cwiseAbs().maxCoeff());
    }
    return check("unperturbed attitude is frozen", worst, 0.0);
}

CheckResult conic_oracle(const SelftestHooks& hooks) {
    const double a = 1.0, e = 0.7, revs = 5;
    Problem<double> pb;
    pb.initial.t = 0;
    pb.initial.x = Vec3<double>(a * (1 - e), 0, 0);
    pb.initial.X = Vec3<double>(0, std::sqrt((1 + e) / (a * (1 - e))), 0);
    pb.forces.grav.gm = hooks.gm_scale;
    const double T = revs * 2 * pi * std::sqrt(a * a * a);
    pb.output_epochs = {T};
    const auto tr = propagate(pb, FormulationKind::Ideal7CS, Tolerances<double>{});
    const Vec3<double> expect = conic_position(a, e, T);
    return check("conic oracle (e=0.7, 5 revolutions)", (tr.final_state().x - expect).norm() / expect.norm(), 1e-9);
}

CheckResult circular_period() {
    Problem<double> pb;
    pb.initial.x = Vec3<double>(1, 0, 0);
    pb.initial.X = Vec3<double>(0, 1, 0);
    pb.output_epochs = {2 * pi};
    double worst = 0;
    for (auto k : all_formulations) {
        const auto s = propagate(pb, k, Tolerances<double>{}).final_state();
        worst = std::max({worst, (s.x - pb.initial.x).norm(), (s.X - pb.initial.X).norm()});
    }
    return check("circular orbit periodicity", worst, 1e-10);
}

CheckResult dimension_equivalence() {
    Problem<double> pb;
    pb.initial.x = Vec3<double>(0.3, -0.1, 0.05);
    pb.initial.X = Vec3<double>(0.2, 2.2, 0.6);
    pb.forces = toy_forces(true, true);
    for (int i = 1; i <= 20; ++i) pb.output_epochs.push_back(0.5 * i);
    const auto t8 = propagate(pb, FormulationKind::Ideal8CS, Tolerances<double>{});
    const auto t7 = propagate(pb, FormulationKind::Ideal7CS, Tolerances<double>{});
    double worst = 0;
    for (std::size_t i = 0; i < t8.raw.size(); ++i) {
        const Vec4<double> l = t8.raw[i].head<4>();
        const Vec4<double> g = t7.raw[i].head<4>().normalized();
        worst = std::max(worst, std::min((l - g).norm(), (l + g).norm()));
    }
    return check("7D/8D attitude agreement", worst, 1e-9);
}

}  // namespace

std::vector<CheckResult> run_selftest(const SelftestHooks& hooks) {
    std::mt19937_64 rng(20240611);
    std::vector<CheckResult> out;
    auto guarded = [&](const char* name, auto&& fn) {
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back({std::string(name) + " (" + e.what() + ")", false, std::numeric_limits<double>::quiet_NaN(), 0});
        }
    };
    guarded("rotation orthogonality", [&] { return rotation_orthogonality(rng); });
    guarded("scaled rotation", [&] { return scaled_rotation(rng); });
    guarded("encode/decode", [&] { return encode_decode(rng); });
    guarded("bilinear identity", [&] { return bilinear_identity(rng); });
    guarded("unperturbed attitude", [&] { return unperturbed_attitude(rng); });
    guarded("conic oracle", [&] { return conic_oracle(hooks); });
    guarded("circular periodicity", [&] { return circular_period(); });
    guarded("7D/8D agreement", [&] { return dimension_equivalence(); });
    return out;
}

void print_selftest(std::ostream& out, const std::vector<CheckResult>& results) {
    int failed = 0;
    char line[256];
    for (const auto& r : results) {
        std::snprintf(line, sizeof line, "%-4s  %-40s residual %-11.3e tolerance %.1e\n", r.passed ? "PASS" : "FAIL",
                      r.name.c_str(), r.residual, r.tolerance);
        out << line;
        failed += !r.passed;
    }
    out << (failed ? std::to_string(failed) + " of " + std::to_string(results.size()) + " checks failed\n"
                   : "all " + std::to_string(results.size()) + " checks passed\n");
}

}  // namespace ideal

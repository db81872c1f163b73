// Scenario files: JSON with explicit unit annotations, converted to km / s /
// rad at ingestion and to internal units (GM = 1) on demand.
#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ideal/core.hpp"
#include "ideal/forces.hpp"
#include "ideal/propagator.hpp"

namespace ideal {

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything in source units: km, s, km/s, km^3/s^2, rad, rad/s.
struct Scenario {
    struct Moon {
        double gm{0};
        double radius{0};
        double mean_motion{0};
        double inclination{0};
        double node{0};
        double phase0{0};
        bool operator==(const Moon&) const = default;
    };

    std::string name;
    double t0{0};
    double t_end{0};
    double gm{0};
    Eigen::Vector3d x0 = Eigen::Vector3d::Zero();
    Eigen::Vector3d X0 = Eigen::Vector3d::Zero();
    bool enable_j2{false};
    double j2{0};
    double re{0};
    bool enable_moon{false};
    std::optional<Moon> moon;
    // Strictly increasing, in (t0, t_end]; always ends with t_end.
    std::vector<double> output_epochs;

    bool operator==(const Scenario& o) const {
        return name == o.name && t0 == o.t0 && t_end == o.t_end && gm == o.gm && x0 == o.x0 && X0 == o.X0 &&
               enable_j2 == o.enable_j2 && j2 == o.j2 && re == o.re && enable_moon == o.enable_moon &&
               moon == o.moon && output_epochs == o.output_epochs;
    }
};

Scenario parse_scenario(const std::filesystem::path& path);
Scenario parse_scenario_text(std::string_view text, std::string_view origin = "<memory>");
nlohmann::json to_json(const Scenario& s);

/// Checks the invariants listed on Scenario; throws ScenarioError naming the
/// offending field.
void validate(const Scenario& s);

template <typename Scalar>
struct InternalProblem {
    Problem<Scalar> problem;
    UnitSystem<Scalar> units;
};

template <typename Scalar>
InternalProblem<Scalar> to_internal(const Scenario& sc) {
    const Vec3<Scalar> x0 = sc.x0.cast<Scalar>();
    const Vec3<Scalar> X0 = sc.X0.cast<Scalar>();
    InternalProblem<Scalar> ip;
    const auto& u = ip.units = make_unit_system(x0, X0, Scalar(sc.gm));
    auto& p = ip.problem;
    p.initial.t = u.time(Scalar(sc.t0));
    p.initial.x = x0 / u.ul;
    p.initial.X = X0 * (u.ut / u.ul);
    p.forces.grav = {u.gm(Scalar(sc.gm)), Scalar(sc.j2), u.length(Scalar(sc.re))};
    p.forces.enable_j2 = sc.enable_j2;
    p.forces.enable_moon = sc.enable_moon;
    if (sc.moon) {
        const auto& m = *sc.moon;
        p.forces.moon = make_moon(u.gm(Scalar(m.gm)), u.length(Scalar(m.radius)), u.rate(Scalar(m.mean_motion)),
                                  Scalar(m.inclination), Scalar(m.node), Scalar(m.phase0));
    }
    for (double t : sc.output_epochs) p.output_epochs.push_back(u.time(Scalar(t)));
    return ip;
}

template <typename Scalar>
CartesianState<double> to_source(const CartesianState<Scalar>& s, const UnitSystem<Scalar>& u) {
    CartesianState<double> out;
    out.t = static_cast<double>(u.time_out(s.t));
    out.x = (s.x * u.ul).template cast<double>();
    out.X = (s.X * (u.ul / u.ut)).template cast<double>();
    return out;
}

}  // namespace ideal

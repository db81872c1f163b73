#include "ideal/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace ideal {
namespace {

using nlohmann::json;

enum class Dim { Length, Time, Velocity, GravParam, Angle, Rate };

const char* dim_name(Dim d) {
    switch (d) {
        case Dim::Length: return "length";
        case Dim::Time: return "time";
        case Dim::Velocity: return "velocity";
        case Dim::GravParam: return "gravitational parameter";
        case Dim::Angle: return "angle";
        case Dim::Rate: return "angular rate";
    }
    return "?";
}

// Factor to the canonical unit of each dimension (km, s, km/s, km^3/s^2, rad, rad/s).
double unit_factor(Dim d, const std::string& unit, const std::string& field) {
    constexpr double deg = std::numbers::pi / 180.0;
    static const std::map<std::string, std::pair<Dim, double>> table{
        {"km", {Dim::Length, 1.0}},
        {"m", {Dim::Length, 1e-3}},
        {"s", {Dim::Time, 1.0}},
        {"min", {Dim::Time, 60.0}},
        {"h", {Dim::Time, 3600.0}},
        {"day", {Dim::Time, 86400.0}},
        {"km/s", {Dim::Velocity, 1.0}},
        {"m/s", {Dim::Velocity, 1e-3}},
        {"km^3/s^2", {Dim::GravParam, 1.0}},
        {"m^3/s^2", {Dim::GravParam, 1e-9}},
        {"rad", {Dim::Angle, 1.0}},
        {"deg", {Dim::Angle, deg}},
        {"rad/s", {Dim::Rate, 1.0}},
        {"rad/day", {Dim::Rate, 1.0 / 86400.0}},
        {"deg/s", {Dim::Rate, deg}},
        {"deg/day", {Dim::Rate, deg / 86400.0}},
    };
    const auto it = table.find(unit);
    if (it == table.end() || it->second.first != d)
        throw ScenarioError("field '" + field + "': unit '" + unit + "' is not a " + dim_name(d) + " unit");
    return it->second.second;
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) throw ScenarioError("missing field '" + path + key + "'");
    return obj.at(key);
}

double number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ScenarioError("field '" + field + "': expected a number");
    return j.get<double>();
}

/// {"value": <number>, "unit": "<unit>"} -> canonical value.
double quantity(const json& obj, const std::string& key, Dim d, const std::string& path = "") {
    const std::string field = path + key;
    const json& q = require(obj, key, path);
    const json& unit = require(q, "unit", field + ".");
    if (!unit.is_string()) throw ScenarioError("field '" + field + ".unit': expected a string");
    return number(require(q, "value", field + "."), field + ".value") * unit_factor(d, unit, field);
}

std::vector<double> quantity_list(const json& obj, const std::string& key, Dim d, const std::string& path = "") {
    const std::string field = path + key;
    const json& q = require(obj, key, path);
    const json& unit = require(q, "unit", field + ".");
    const json& values = require(q, "value", field + ".");
    if (!unit.is_string()) throw ScenarioError("field '" + field + ".unit': expected a string");
    if (!values.is_array()) throw ScenarioError("field '" + field + ".value': expected an array");
    const double f = unit_factor(d, unit, field);
    std::vector<double> out;
    for (const auto& v : values) out.push_back(number(v, field + ".value") * f);
    return out;
}

Eigen::Vector3d vector3(const json& obj, const std::string& key, Dim d) {
    const auto v = quantity_list(obj, key, d);
    if (v.size() != 3) throw ScenarioError("field '" + key + ".value': expected 3 components");
    return {v[0], v[1], v[2]};
}

bool flag(const json& obj, const std::string& key, const std::string& path) {
    const json& j = require(obj, key, path);
    if (!j.is_boolean()) throw ScenarioError("field '" + path + key + "': expected true or false");
    return j.get<bool>();
}

json q(double v, const char* unit) { return json{{"value", v}, {"unit", unit}}; }

std::string line_context(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

void validate(const Scenario& s) {
    auto finite3 = [](const Eigen::Vector3d& v) { return v.allFinite(); };
    if (!(s.t_end > s.t0)) throw ScenarioError("field 'final_epoch': must be later than 'epoch'");
    if (!(s.gm > 0)) throw ScenarioError("field 'gm': must be positive");
    if (!finite3(s.x0) || !(s.x0.norm() > 0)) throw ScenarioError("field 'position': must be finite and nonzero");
    if (!finite3(s.X0)) throw ScenarioError("field 'velocity': must be finite");
    if (!(s.x0.cross(s.X0).norm() > 0)) throw ScenarioError("field 'velocity': rectilinear initial state");
    if (!(s.X0.squaredNorm() / 2 - s.gm / s.x0.norm() < 0))
        throw ScenarioError("field 'velocity': initial state is not a bound orbit");
    if (s.enable_j2 && (!(s.re > 0) || !std::isfinite(s.j2)))
        throw ScenarioError("field 'j2': radius must be positive and coefficient finite");
    if (s.enable_moon && !s.moon) throw ScenarioError("field 'moon': enabled without parameters");
    if (s.moon) {
        const auto& m = *s.moon;
        if (!(m.gm > 0)) throw ScenarioError("field 'moon.gm': must be positive");
        if (!(m.radius > 0)) throw ScenarioError("field 'moon.radius': must be positive");
        if (!(m.mean_motion > 0)) throw ScenarioError("field 'moon.mean_motion': must be positive");
    }
    if (s.output_epochs.empty() || s.output_epochs.back() != s.t_end)
        throw ScenarioError("field 'output': epochs must end at the final epoch");
    double last = s.t0;
    for (double t : s.output_epochs) {
        if (!(t > last)) throw ScenarioError("field 'output': epochs must be strictly increasing after 'epoch'");
        last = t;
    }
}

Scenario parse_scenario_text(std::string_view text, std::string_view origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string(origin) + ": parse error at " + line_context(text, e.byte ? e.byte - 1 : 0) +
                            ": " + e.what());
    }
    if (!doc.is_object()) throw ScenarioError(std::string(origin) + ": top level must be an object");

    Scenario s;
    try {
        s.name = doc.value("name", std::string("unnamed"));
        s.t0 = doc.contains("epoch") ? quantity(doc, "epoch", Dim::Time) : 0.0;
        s.t_end = quantity(doc, "final_epoch", Dim::Time);
        s.gm = quantity(doc, "gm", Dim::GravParam);
        s.x0 = vector3(doc, "position", Dim::Length);
        s.X0 = vector3(doc, "velocity", Dim::Velocity);

        if (doc.contains("j2")) {
            const json& j = doc.at("j2");
            s.enable_j2 = j.contains("enabled") ? flag(j, "enabled", "j2.") : true;
            s.j2 = number(require(j, "coefficient", "j2."), "j2.coefficient");
            s.re = quantity(j, "radius", Dim::Length, "j2.");
        }
        if (doc.contains("moon")) {
            const json& j = doc.at("moon");
            s.enable_moon = j.contains("enabled") ? flag(j, "enabled", "moon.") : true;
            Scenario::Moon m;
            m.gm = quantity(j, "gm", Dim::GravParam, "moon.");
            m.radius = quantity(j, "radius", Dim::Length, "moon.");
            m.mean_motion = quantity(j, "mean_motion", Dim::Rate, "moon.");
            m.inclination = quantity(j, "inclination", Dim::Angle, "moon.");
            m.node = quantity(j, "node", Dim::Angle, "moon.");
            m.phase0 = quantity(j, "phase", Dim::Angle, "moon.");
            s.moon = m;
        }

        if (doc.contains("output")) {
            const json& o = doc.at("output");
            if (o.contains("epochs")) {
                s.output_epochs = quantity_list(o, "epochs", Dim::Time, "output.");
            } else if (o.contains("interval")) {
                const double dt = quantity(o, "interval", Dim::Time, "output.");
                if (!(dt > 0)) throw ScenarioError("field 'output.interval': must be positive");
                for (long k = 1;; ++k) {
                    const double t = s.t0 + double(k) * dt;
                    if (t >= s.t_end - 1e-9 * dt) break;
                    s.output_epochs.push_back(t);
                }
            }
        }
        if (s.output_epochs.empty() || s.output_epochs.back() < s.t_end) s.output_epochs.push_back(s.t_end);
    } catch (const json::exception& e) {
        throw ScenarioError(std::string(origin) + ": " + e.what());
    } catch (const ScenarioError& e) {
        throw ScenarioError(std::string(origin) + ": " + e.what());
    }
    try {
        validate(s);
    } catch (const ScenarioError& e) {
        throw ScenarioError(std::string(origin) + ": " + e.what());
    }
    return s;
}

Scenario parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open scenario file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path.string());
}

json to_json(const Scenario& s) {
    json doc;
    doc["name"] = s.name;
    doc["epoch"] = q(s.t0, "s");
    doc["final_epoch"] = q(s.t_end, "s");
    doc["gm"] = q(s.gm, "km^3/s^2");
    doc["position"] = json{{"value", {s.x0[0], s.x0[1], s.x0[2]}}, {"unit", "km"}};
    doc["velocity"] = json{{"value", {s.X0[0], s.X0[1], s.X0[2]}}, {"unit", "km/s"}};
    if (s.enable_j2 || s.re > 0)
        doc["j2"] = json{{"enabled", s.enable_j2}, {"coefficient", s.j2}, {"radius", q(s.re, "km")}};
    if (s.moon) {
        const auto& m = *s.moon;
        doc["moon"] = json{{"enabled", s.enable_moon},       {"gm", q(m.gm, "km^3/s^2")},
                           {"radius", q(m.radius, "km")},     {"mean_motion", q(m.mean_motion, "rad/s")},
                           {"inclination", q(m.inclination, "rad")}, {"node", q(m.node, "rad")},
                           {"phase", q(m.phase0, "rad")}};
    }
    doc["output"] = json{{"epochs", json{{"value", s.output_epochs}, {"unit", "s"}}}};
    return doc;
}

}  // namespace ideal

#include <doctest.h>

#include <filesystem>
#include <string>

#include "ideal/scenario.hpp"

using namespace ideal;

namespace {

const std::filesystem::path data_dir = IDEAL_DATA_DIR;

constexpr const char* minimal = R"({
  "final_epoch": {"value": 2.0, "unit": "h"},
  "gm": {"value": 398600.4418, "unit": "km^3/s^2"},
  "position": {"value": [7000.0, 0.0, 0.0], "unit": "km"},
  "velocity": {"value": [0.0, 7546.05, 0.0], "unit": "m/s"}
})";

std::string with(std::string text, const std::string& from, const std::string& to) {
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    return text.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("minimal scenario") {
    const auto s = parse_scenario_text(minimal);
    CHECK(s.name == "unnamed");
    CHECK(s.t0 == 0.0);
    CHECK(s.t_end == 7200.0);
    CHECK(s.X0[1] == doctest::Approx(7.54605).epsilon(1e-15));
    CHECK_FALSE(s.enable_j2);
    CHECK_FALSE(s.enable_moon);
    CHECK_FALSE(s.moon.has_value());
    CHECK(s.output_epochs == std::vector<double>{7200.0});
}

TEST_CASE("invalid scenarios") {
    const std::string m = minimal;
    CHECK_THROWS_AS(parse_scenario_text(with(m, "2.0, \"unit\": \"h\"", "-1.0, \"unit\": \"h\"")), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text(with(m, "\"unit\": \"h\"", "\"unit\": \"km\"")), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text(with(m, "7546.05", "20000.0")), ScenarioError);  // unbound
    CHECK_THROWS_AS(parse_scenario_text(with(m, "[0.0, 7546.05, 0.0]", "[1000.0, 0.0, 0.0]")), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text(with(m, "\"gm\"", "\"mu\"")), ScenarioError);
    try {
        parse_scenario_text(with(m, "\"position\"", "\"position\" oops"), "bad.json");
        FAIL("expected a parse error");
    } catch (const ScenarioError& e) {
        const std::string what = e.what();
        CHECK(what.find("bad.json") != std::string::npos);
        CHECK(what.find("line 4") != std::string::npos);
        CHECK(what.find("column") != std::string::npos);
    }
}

TEST_CASE("units are converted at ingestion") {
    const auto s = parse_scenario(data_dir / "stiefel_scheifele.json");
    CHECK(s.t_end == doctest::Approx(288.12768941 * 86400).epsilon(1e-15));
    REQUIRE(s.moon.has_value());
    CHECK(s.moon->inclination == doctest::Approx(std::numbers::pi / 6).epsilon(1e-15));
    CHECK(s.moon->phase0 == doctest::Approx(-std::numbers::pi / 2).epsilon(1e-15));
    CHECK(s.output_epochs.size() == 289);
    CHECK(s.output_epochs.front() == 86400.0);
    CHECK(s.output_epochs.back() == s.t_end);

    const auto ip = to_internal<double>(s);
    CHECK(ip.problem.forces.grav.gm == doctest::Approx(1.0).epsilon(1e-15));
    const auto& x = ip.problem.initial.x;
    const auto& X = ip.problem.initial.X;
    CHECK(X.squaredNorm() / 2 - 1 / x.norm() == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(ip.problem.forces.moon.has_value());
}

TEST_CASE("to_json round trip") {
    for (const char* f : {"stiefel_scheifele.json", "circular_toy.json"}) {
        const auto s = parse_scenario(data_dir / f);
        CHECK(parse_scenario_text(to_json(s).dump(2)) == s);
    }
}

TEST_CASE("missing file is an I/O error") {
    CHECK_THROWS_AS(parse_scenario(data_dir / "does_not_exist.json"), std::ios_base::failure);
}

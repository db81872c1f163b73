// idealprop: propagate a scenario, run a work-precision comparison, or run the
// embedded self-test.
//
// Exit codes: 0 success, 1 usage / invalid input, 2 numeric failure, 3 I/O.
#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ideal/bench.hpp"
#include "ideal/selftest.hpp"

namespace {

constexpr int kOk = 0, kUsage = 1, kNumeric = 2, kIo = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

double parse_number(const std::string& s, const char* what) {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !(v > 0) || !std::isfinite(v))
        throw UsageError(std::string(what) + ": '" + s + "' is not a positive number");
    return v;
}

ideal::FormulationKind parse_kind_arg(const std::string& s) {
    const auto k = ideal::parse_kind(s);
    if (!k) throw UsageError("unknown formulation '" + s + "'");
    return *k;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open output file '" + path + "'");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.close();
    if (!out) throw std::ios_base::failure("failed writing '" + path + "'");
}

int cmd_run(const std::string& scenario, const std::string& kind_s, const std::string& rtol_s,
            const std::string& atol_s, const std::string& out_path) {
    const auto kind = parse_kind_arg(kind_s);
    const double rtol = parse_number(rtol_s, "--rtol");
    const double atol = atol_s.empty() ? rtol : parse_number(atol_s, "--atol");
    const auto sc = ideal::parse_scenario(scenario);
    const auto traj = ideal::run_scenario(sc, kind, rtol, atol);
    auto out = open_out(out_path);
    ideal::write_trajectory_csv(out, traj, ideal::to_internal<double>(sc).units);
    finish(out, out_path);
    const auto& st = traj.diagnostics.stats;
    std::cerr << ideal::kind_name(kind) << ": " << traj.states.size() << " samples, " << st.accepted << " steps, "
              << st.rejected << " rejected, " << st.evaluations << " field evaluations\n";
    return kOk;
}

int cmd_compare(const std::string& scenario, const std::string& kinds_s, const std::string& sweep_s, int repeats,
                const std::string& out_path) {
    ideal::CompareOptions opt;
    for (const auto& k : split(kinds_s)) opt.kinds.push_back(parse_kind_arg(k));
    for (const auto& r : split(sweep_s)) opt.rtols.push_back(parse_number(r, "--rtol-sweep"));
    if (opt.kinds.empty()) throw UsageError("--formulations: at least one formulation is required");
    if (opt.rtols.empty()) throw UsageError("--rtol-sweep: at least one tolerance is required");
    if (repeats < 1) throw UsageError("--repeats: must be at least 1");
    opt.repeats = repeats;

    const auto sc = ideal::parse_scenario(scenario);
    auto out = open_out(out_path);
    const auto report = ideal::run_compare(sc, opt);
    ideal::write_report_csv(out, report);
    finish(out, out_path);

    std::cerr << "reference: long double Cowell, rtol " << static_cast<double>(report.reference.rtol)
              << ", confirmation agreement " << report.reference.agreement_rel << " (" << report.reference.usable_digits
              << " digits)\n";
    int failed = 0;
    for (const auto& r : report.rows) {
        if (r.status != "ok") {
            ++failed;
            std::cerr << ideal::kind_name(r.kind) << " rtol " << r.rtol << ": " << r.status << '\n';
        }
    }
    return failed ? kNumeric : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orbit propagation with ideal-frame formulations"};
    app.require_subcommand(1);

    std::string scenario, kind, rtol, atol, out;
    auto* run = app.add_subcommand("run", "Propagate a scenario and write the trajectory CSV");
    run->add_option("--scenario", scenario, "Scenario JSON file")->required();
    run->add_option("--formulation", kind, "COWELL, IDEAL8_QQ, IDEAL8_CS, IDEAL7_QQ, IDEAL7_CS, IDEAL7_QQ_T, IDEAL7_CS_T")
        ->required();
    run->add_option("--rtol", rtol, "Relative tolerance")->required();
    run->add_option("--atol", atol, "Absolute tolerance in internal units (default: rtol)");
    run->add_option("--out", out, "Output CSV path")->required();

    std::string kinds, sweep;
    int repeats = 11;
    auto* compare = app.add_subcommand("compare", "Work-precision grid against a long double reference");
    compare->add_option("--scenario", scenario, "Scenario JSON file")->required();
    compare->add_option("--formulations", kinds, "Comma-separated formulation names")->required();
    compare->add_option("--rtol-sweep", sweep, "Comma-separated relative tolerances (atol = rtol)")->required();
    compare->add_option("--repeats", repeats, "Timed runs per cell after one warm-up")->capture_default_str();
    compare->add_option("--out", out, "Output CSV path")->required();

    double perturb_gm = 1.0;
    auto* selftest = app.add_subcommand("selftest", "Run the embedded invariant suite");
    selftest->add_option("--perturb-gm", perturb_gm, "Negative control: scale GM in the conic check")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (run->parsed()) return cmd_run(scenario, kind, rtol, atol, out);
        if (compare->parsed()) return cmd_compare(scenario, kinds, sweep, repeats, out);
        const auto results = ideal::run_selftest({perturb_gm});
        ideal::print_selftest(std::cout, results);
        for (const auto& r : results)
            if (!r.passed) return kNumeric;
        return kOk;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ideal::ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kNumeric;
    }
}

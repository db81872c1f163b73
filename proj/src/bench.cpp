#include "ideal/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <locale>
#include <ostream>

namespace ideal {

const char* const kTrajectoryHeader =
    "t_s,x_km,y_km,z_km,vx_km_s,vy_km_s,vz_km_s,bilinear,norm_defect,ge_defect,energy_km2_s2,hz_km2_s";
const char* const kReportHeader =
    "formulation,rtol,atol,steps,rejected,field_evals,runtime_ns,pos_err_km,pos_err_rel,vel_err_rel,"
    "max_bilinear,max_norm_defect,max_ge_defect,status";

namespace {

Scenario final_epoch_only(Scenario sc) {
    sc.output_epochs = {sc.t_end};
    return sc;
}

std::string csv_field(std::string s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

BenchRow failed_row(FormulationKind kind, double rtol, double atol, const std::string& why) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    BenchRow r;
    r.kind = kind;
    r.rtol = rtol;
    r.atol = atol;
    r.pos_err_km = r.pos_err_rel = r.vel_err_rel = nan;
    r.max_bilinear = r.max_norm_defect = r.max_ge_defect = nan;
    r.status = why.empty() ? "failed" : why;
    return r;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
    return std::string(buf, res.ptr);
}

Reference make_reference(const Scenario& sc, long double rtol) {
    const auto ip = to_internal<long double>(final_epoch_only(sc));
    Tolerances<long double> tol;
    tol.rtol = tol.atol = rtol;
    const auto a = propagate(ip.problem, FormulationKind::Cowell, tol);
    tol.rtol = tol.atol = rtol / 2;
    const auto b = propagate(ip.problem, FormulationKind::Cowell, tol);

    Reference ref;
    ref.rtol = rtol;
    ref.final_state = to_source(a.final_state(), ip.units);
    const auto confirm = to_source(b.final_state(), ip.units);
    ref.agreement_rel = (ref.final_state.x - confirm.x).norm() / ref.final_state.x.norm();
    ref.usable_digits = ref.agreement_rel > 0 ? std::min(17.0, -std::log10(ref.agreement_rel)) : 17.0;
    ref.stats = a.diagnostics.stats;
    return ref;
}

Trajectory<double> run_scenario(const Scenario& sc, FormulationKind kind, double rtol, double atol) {
    const auto ip = to_internal<double>(sc);
    Tolerances<double> tol;
    tol.rtol = rtol;
    tol.atol = atol;
    return propagate(ip.problem, kind, tol);
}

BenchReport run_compare(const Scenario& sc, const CompareOptions& opt) {
    return run_compare(sc, opt, make_reference(sc));
}

BenchReport run_compare(const Scenario& sc, const CompareOptions& opt, const Reference& ref) {
    using clock = std::chrono::steady_clock;
    BenchReport report;
    report.scenario = sc.name;
    report.reference = ref;
    const auto ip = to_internal<double>(final_epoch_only(sc));
    const int repeats = std::max(1, opt.repeats);

    // Cells run one after another so that timings never compete for a core.
    for (double rtol : opt.rtols) {
        const double atol = opt.atol_factor * rtol;
        Tolerances<double> tol;
        tol.rtol = rtol;
        tol.atol = atol;
        for (FormulationKind kind : opt.kinds) {
            try {
                // Warm-up run; also the source of every deterministic column.
                const auto traj = propagate(ip.problem, kind, tol);
                std::vector<std::int64_t> times;
                for (int i = 0; i < repeats; ++i) {
                    const auto t0 = clock::now();
                    const auto again = propagate(ip.problem, kind, tol);
                    const auto t1 = clock::now();
                    times.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
                    if (again.final_state().x != traj.final_state().x)
                        throw IntegrationError("non-deterministic result across repeats");
                }
                std::nth_element(times.begin(), times.begin() + repeats / 2, times.end());

                const auto fin = to_source(traj.final_state(), ip.units);
                const auto& d = traj.diagnostics;
                BenchRow row;
                row.kind = kind;
                row.rtol = rtol;
                row.atol = atol;
                row.steps = d.stats.accepted;
                row.rejected = d.stats.rejected;
                row.field_evals = d.stats.evaluations;
                row.runtime_ns = times[repeats / 2];
                row.pos_err_km = (fin.x - ref.final_state.x).norm();
                row.pos_err_rel = row.pos_err_km / ref.final_state.x.norm();
                row.vel_err_rel = (fin.X - ref.final_state.X).norm() / ref.final_state.X.norm();
                row.max_bilinear = Diagnostics<double>::max_abs(d.bilinear);
                row.max_norm_defect = Diagnostics<double>::max_abs(d.norm_defect);
                row.max_ge_defect = Diagnostics<double>::max_abs(d.ge_defect);
                report.rows.push_back(row);
            } catch (const std::exception& e) {
                report.rows.push_back(failed_row(kind, rtol, atol, e.what()));
            }
        }
    }
    return report;
}

void write_trajectory_csv(std::ostream& out, const Trajectory<double>& traj, const UnitSystem<double>& units) {
    const auto& d = traj.diagnostics;
    const double e_scale = (units.ul / units.ut) * (units.ul / units.ut);
    const double h_scale = units.ul * units.ul / units.ut;
    out.imbue(std::locale::classic());
    out << kTrajectoryHeader << '\n';
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const auto s = to_source(traj.states[i], units);
        out << format_double(s.t);
        for (int k = 0; k < 3; ++k) out << ',' << format_double(s.x[k]);
        for (int k = 0; k < 3; ++k) out << ',' << format_double(s.X[k]);
        out << ',' << format_double(d.bilinear[i]) << ',' << format_double(d.norm_defect[i]) << ','
            << format_double(d.ge_defect[i]) << ',' << format_double(d.energy[i] * e_scale) << ','
            << format_double(d.gz[i] * h_scale) << '\n';
    }
}

void write_report_csv(std::ostream& out, const BenchReport& report) {
    out.imbue(std::locale::classic());
    out << kReportHeader << '\n';
    for (const auto& r : report.rows) {
        out << kind_name(r.kind) << ',' << format_double(r.rtol) << ',' << format_double(r.atol) << ',' << r.steps
            << ',' << r.rejected << ',' << r.field_evals << ',' << r.runtime_ns << ',' << format_double(r.pos_err_km)
            << ',' << format_double(r.pos_err_rel) << ',' << format_double(r.vel_err_rel) << ','
            << format_double(r.max_bilinear) << ',' << format_double(r.max_norm_defect) << ','
            << format_double(r.max_ge_defect) << ',' << csv_field(r.status) << '\n';
    }
}

}  // namespace ideal

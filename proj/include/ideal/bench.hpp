// Benchmark harness: reference generation, work-precision grids and CSV
// emission. Everything crossing this interface is in source units.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ideal/propagator.hpp"
#include "ideal/scenario.hpp"

namespace ideal {

/// Self-generated accuracy oracle: Cowell in long double at a very tight
/// tolerance, confirmed by a second run at half that tolerance.
struct Reference {
    CartesianState<double> final_state;
    long double rtol{0};
    double agreement_rel{0};  // |x(rtol) - x(rtol/2)| / |x|
    double usable_digits{0};  // -log10(agreement_rel), capped at 17
    StepStats stats;
};

Reference make_reference(const Scenario& sc, long double rtol = 1e-17L);

struct BenchRow {
    FormulationKind kind{FormulationKind::Cowell};
    double rtol{0};
    double atol{0};
    long steps{0};
    long rejected{0};
    long field_evals{0};
    std::int64_t runtime_ns{0};  // median over the timed repeats
    double pos_err_km{0};
    double pos_err_rel{0};
    double vel_err_rel{0};
    double max_bilinear{0};
    double max_norm_defect{0};
    double max_ge_defect{0};
    std::string status{"ok"};  // "ok" or the failure message of the cell
};

struct BenchReport {
    std::string scenario;
    Reference reference;
    std::vector<BenchRow> rows;
};

struct CompareOptions {
    std::vector<FormulationKind> kinds;
    std::vector<double> rtols;
    int repeats{11};
    double atol_factor{1.0};  // atol = atol_factor * rtol
};

/// Runs the full (kind x tolerance) grid on the scenario's final epoch.
/// A failing cell is recorded in its row and the grid continues.
BenchReport run_compare(const Scenario& sc, const CompareOptions& opt);
BenchReport run_compare(const Scenario& sc, const CompareOptions& opt, const Reference& ref);

/// One propagation of the scenario in double precision, all output epochs.
Trajectory<double> run_scenario(const Scenario& sc, FormulationKind kind, double rtol, double atol);

/// Scientific notation with 17 significant digits, independent of the locale.
std::string format_double(double v);

void write_trajectory_csv(std::ostream& out, const Trajectory<double>& traj, const UnitSystem<double>& units);
void write_report_csv(std::ostream& out, const BenchReport& report);

extern const char* const kTrajectoryHeader;
extern const char* const kReportHeader;

}  // namespace ideal

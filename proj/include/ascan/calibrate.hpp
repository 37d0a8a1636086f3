#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ascan/signal_core.hpp"
#include "ascan/telegraph_solver.hpp"

namespace ascan {

// Trapezoid-weighted discrete L2 distance between a measured trace and the
// model trace at the given parameters, over the full record.
double misfit(const MaterialParams& params, const AScan& g_meas, const Solver& solver);
double misfit(const MaterialParams& params, const AScan& g_meas,
              const ExcitationPulse& pulse, const PlateModel& plate,
              const SolverOptions& solver_options = {});

struct NelderMeadOptions {
    double initial_step = 0.05;  // simplex offset, box-relative units
    double tolerance = 1e-5;     // diameter below which the simplex stops
    int max_iterations = 500;
};

struct CalibrationResult {
    MaterialParams params{0.0, 1.0};
    double misfit = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Derivative-free simplex minimization in box-relative coordinates (so b and
// c steps are comparable). Non-finite objective values act as +infinity; the
// returned vertex is never worse than the best starting vertex.
CalibrationResult nelder_mead(const std::function<double(const MaterialParams&)>& objective,
                              const MaterialParams& start, const PriorBox& box,
                              const NelderMeadOptions& options = {});

// Least-squares fit of one scan: nelder_mead on the misfit, +infinity outside
// the box.
CalibrationResult calibrate_scan(const AScan& scan, const Solver& solver,
                                 const MaterialParams& start, const PriorBox& box,
                                 const NelderMeadOptions& options = {});

enum class CellStatus {
    missing_scan,  // no scan recorded at this location
    faulty,        // jump detector rejected the scan
    ok,            // fit produced a result (see CalibrationResult::converged)
    failed,        // fit threw; no result stored
};

struct ParameterMap {
    int nx = 0;
    int ny = 0;
    std::vector<std::optional<CalibrationResult>> cells;  // row-major, y outer
    std::vector<CellStatus> status;

    int index(int ix, int iy) const;
    bool has(int ix, int iy) const { return cells[index(ix, iy)].has_value(); }
    const CalibrationResult& at(int ix, int iy) const;
};

struct CalibrateGridOptions {
    PriorBox box{};
    NelderMeadOptions nelder_mead{};
    SolverOptions solver{};
    double echo_threshold = 0.25;  // fault screening before fitting
    double excitation_threshold = 1.0;
    int threads = 0;  // 0 = hardware concurrency
};

// Per-location least-squares maps over a scan grid. Faulty scans are
// screened out, per-cell fit errors are recorded in the status plane, and
// cells are fitted independently (and in parallel), so the result does not
// depend on thread count.
ParameterMap calibrate_grid(const ScanSet& scans, const ExcitationPulse& pulse,
                            const PlateModel& plate, const MaterialParams& start,
                            const CalibrateGridOptions& options = {});

}  // namespace ascan

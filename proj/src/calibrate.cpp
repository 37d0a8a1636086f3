#include "ascan/calibrate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "ascan/preprocess.hpp"

namespace ascan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_inf(double v) { return std::isnan(v) ? kInf : v; }

struct Vertex {
    double x[2];
    double value;
};

double diameter(const Vertex* v) {
    double d = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            d = std::max(d, std::hypot(v[i].x[0] - v[j].x[0], v[i].x[1] - v[j].x[1]));
        }
    }
    return d;
}

}  // namespace

double misfit(const MaterialParams& params, const AScan& g_meas, const Solver& solver) {
    if (!(g_meas.grid == solver.grid()))
        throw InvalidArgument("misfit: scan grid does not match the solver grid");
    AScan model = solver.forward(params);
    const int N = g_meas.grid.n_samples;
    const double dt = g_meas.grid.dt;
    double acc = 0.0;
    for (int n = 0; n < N; ++n) {
        double d = model.samples[n] - g_meas.samples[n];
        double w = (n == 0 || n == N - 1) ? 0.5 * dt : dt;
        acc += w * d * d;
    }
    return std::sqrt(acc);
}

double misfit(const MaterialParams& params, const AScan& g_meas,
              const ExcitationPulse& pulse, const PlateModel& plate,
              const SolverOptions& solver_options) {
    Solver solver(pulse, plate, g_meas.grid, solver_options);
    return misfit(params, g_meas, solver);
}

CalibrationResult nelder_mead(const std::function<double(const MaterialParams&)>& objective,
                              const MaterialParams& start, const PriorBox& box,
                              const NelderMeadOptions& options) {
    if (!(options.initial_step > 0.0) || !(options.tolerance > 0.0) ||
        options.max_iterations < 1)
        throw InvalidArgument("nelder_mead: step, tolerance, max_iterations must be positive");

    const double rb = box.b_range();
    const double rc = box.c_range();
    auto unscale = [&](const double* x) {
        return MaterialParams{box.b_min + x[0] * rb, box.c_min + x[1] * rc};
    };
    auto eval = [&](const double* x) { return finite_or_inf(objective(unscale(x))); };

    Vertex v[3];
    v[0].x[0] = (start.b - box.b_min) / rb;
    v[0].x[1] = (start.c - box.c_min) / rc;
    for (int i = 1; i < 3; ++i) {
        v[i] = v[0];
        // Step into the box when the start sits near the upper edge.
        double s = (v[0].x[i - 1] + options.initial_step <= 1.0) ? options.initial_step
                                                                 : -options.initial_step;
        v[i].x[i - 1] += s;
    }
    for (auto& vertex : v) vertex.value = eval(vertex.x);
    if (!std::isfinite(v[0].value) && !std::isfinite(v[1].value) && !std::isfinite(v[2].value))
        throw NumericalError("nelder_mead: objective is non-finite at every starting vertex");

    CalibrationResult result;
    int iter = 0;
    bool converged = false;
    while (iter < options.max_iterations) {
        std::sort(std::begin(v), std::end(v),
                  [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
        if (diameter(v) < options.tolerance) {
            converged = true;
            break;
        }
        ++iter;

        double xc[2] = {0.5 * (v[0].x[0] + v[1].x[0]), 0.5 * (v[0].x[1] + v[1].x[1])};
        double xr[2] = {xc[0] + (xc[0] - v[2].x[0]), xc[1] + (xc[1] - v[2].x[1])};
        double vr = eval(xr);

        if (vr < v[0].value) {
            double xe[2] = {xc[0] + 2.0 * (xc[0] - v[2].x[0]), xc[1] + 2.0 * (xc[1] - v[2].x[1])};
            double ve = eval(xe);
            if (ve < vr) {
                v[2] = {{xe[0], xe[1]}, ve};
            } else {
                v[2] = {{xr[0], xr[1]}, vr};
            }
        } else if (vr < v[1].value) {
            v[2] = {{xr[0], xr[1]}, vr};
        } else {
            bool outside = vr < v[2].value;
            double xk[2];
            if (outside) {
                xk[0] = xc[0] + 0.5 * (xr[0] - xc[0]);
                xk[1] = xc[1] + 0.5 * (xr[1] - xc[1]);
            } else {
                xk[0] = xc[0] + 0.5 * (v[2].x[0] - xc[0]);
                xk[1] = xc[1] + 0.5 * (v[2].x[1] - xc[1]);
            }
            double vk = eval(xk);
            if ((outside && vk <= vr) || (!outside && vk < v[2].value)) {
                v[2] = {{xk[0], xk[1]}, vk};
            } else {
                for (int i = 1; i < 3; ++i) {
                    v[i].x[0] = v[0].x[0] + 0.5 * (v[i].x[0] - v[0].x[0]);
                    v[i].x[1] = v[0].x[1] + 0.5 * (v[i].x[1] - v[0].x[1]);
                    v[i].value = eval(v[i].x);
                }
            }
        }
    }

    std::sort(std::begin(v), std::end(v),
              [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
    result.params = unscale(v[0].x);
    result.misfit = v[0].value;
    result.iterations = iter;
    result.converged = converged;
    return result;
}

CalibrationResult calibrate_scan(const AScan& scan, const Solver& solver,
                                 const MaterialParams& start, const PriorBox& box,
                                 const NelderMeadOptions& options) {
    if (!box.contains(start))
        throw InvalidArgument("calibrate: start point must lie inside the box");
    auto objective = [&](const MaterialParams& p) {
        if (!box.contains(p)) return kInf;
        return misfit(p, scan, solver);
    };
    return nelder_mead(objective, start, box, options);
}

int ParameterMap::index(int ix, int iy) const {
    if (ix < 0 || ix >= nx || iy < 0 || iy >= ny)
        throw InvalidArgument("parameter map: location outside the grid");
    return iy * nx + ix;
}

const CalibrationResult& ParameterMap::at(int ix, int iy) const {
    const auto& cell = cells[index(ix, iy)];
    if (!cell) throw InvalidArgument("parameter map: no result at this location");
    return *cell;
}

ParameterMap calibrate_grid(const ScanSet& scans, const ExcitationPulse& pulse,
                            const PlateModel& plate, const MaterialParams& start,
                            const CalibrateGridOptions& options) {
    if (!options.box.contains(start))
        throw InvalidArgument("calibrate: start point must lie inside the box");
    const TimeGrid grid = scans.grid();
    if (!(pulse.grid == grid))
        throw InvalidArgument("calibrate: pulse grid does not match the scans");

    ParameterMap map;
    map.nx = scans.nx();
    map.ny = scans.ny();
    map.cells.resize(static_cast<size_t>(map.nx) * map.ny);
    map.status.assign(map.cells.size(), CellStatus::missing_scan);

    std::vector<std::pair<int, int>> todo;
    for (int iy = 0; iy < map.ny; ++iy) {
        for (int ix = 0; ix < map.nx; ++ix) {
            if (scans.has(ix, iy)) todo.emplace_back(ix, iy);
        }
    }

    int threads = options.threads > 0 ? options.threads
                                      : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, std::max(1, static_cast<int>(todo.size())));

    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        try {
            Solver solver(pulse, plate, grid, options.solver);
            for (size_t i = next++; i < todo.size(); i = next++) {
                auto [ix, iy] = todo[i];
                int idx = map.index(ix, iy);
                const AScan& scan = scans.at(ix, iy);
                FaultReport fault = detect_faulty(scan, pulse.t_ex, options.echo_threshold,
                                                  options.excitation_threshold);
                if (fault.faulty) {
                    map.status[idx] = CellStatus::faulty;
                    continue;
                }
                try {
                    map.cells[idx] =
                        calibrate_scan(scan, solver, start, options.box, options.nelder_mead);
                    map.status[idx] = CellStatus::ok;
                } catch (const Error&) {
                    map.status[idx] = CellStatus::failed;
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return map;
}

}  // namespace ascan

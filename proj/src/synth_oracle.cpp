#include "ascan/synth_oracle.hpp"

#include <cmath>
#include <string>

#include "ascan/rng.hpp"
#include "ascan/telegraph_solver.hpp"

namespace ascan {

ExcitationPulse make_pulse(double center_freq_mhz, double n_cycles, double amplitude,
                           const TimeGrid& grid, double t_ex) {
    if (!(center_freq_mhz > 0.0))
        throw InvalidArgument("pulse: center frequency must be positive");
    if (!(n_cycles >= 0.5))
        throw InvalidArgument("pulse: need at least half a cycle");
    if (!(amplitude != 0.0) || !std::isfinite(amplitude))
        throw InvalidArgument("pulse: amplitude must be finite and nonzero");

    double support = n_cycles / center_freq_mhz;  // us
    if (!(support < t_ex))
        throw InvalidArgument("pulse: " + std::to_string(support) +
                              " us of burst does not fit before t_ex");
    if (!(t_ex <= grid.duration()))
        throw InvalidArgument("pulse: t_ex beyond the record");

    // Center the burst in the excitation window so the leading edge keeps a
    // margin from both t = 0 and t_ex.
    double t_start = 0.5 * (t_ex - support);

    std::vector<double> samples(grid.n_samples, 0.0);
    double w = 2.0 * M_PI * center_freq_mhz;
    for (int i = 0; i < grid.n_samples; ++i) {
        double s = grid.time(i) - t_start;
        if (s <= 0.0 || s >= support) continue;
        double hann = 0.5 - 0.5 * std::cos(2.0 * M_PI * s / support);
        samples[i] = amplitude * hann * std::sin(w * s);
    }
    return make_excitation_pulse(grid, std::move(samples), t_ex);
}

namespace {

// Catmull-Rom evaluation of the pulse at an off-grid time. The march runs on
// a refined grid, so the boundary trace has to be interpolated; cubic keeps
// the interpolation error far below the scheme's own truncation error.
double pulse_value(const ExcitationPulse& pulse, double t) {
    const TimeGrid& g = pulse.grid;
    if (t <= g.t0 || t >= pulse.t_ex) return 0.0;
    double x = (t - g.t0) / g.dt;
    int i = static_cast<int>(std::floor(x));
    if (i < 0 || i >= g.n_samples - 1) return 0.0;
    double f = x - i;
    auto sample = [&](int k) -> double {
        return (k >= 0 && k < g.n_samples) ? pulse.samples[k] : 0.0;
    };
    double p0 = sample(i - 1), p1 = sample(i), p2 = sample(i + 1), p3 = sample(i + 2);
    return p1 + 0.5 * f * (p2 - p0 +
                           f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                f * (3.0 * (p1 - p2) + p3 - p0)));
}

}  // namespace

FdtdSolution fdtd_solve(const MaterialParams& params, const ExcitationPulse& pulse,
                        const PlateModel& plate, const TimeGrid& grid,
                        const FdtdOptions& options) {
    if (options.refinement < 1)
        throw InvalidArgument("fdtd: refinement must be >= 1");
    if (!(pulse.grid == grid))
        throw InvalidArgument("fdtd: pulse grid must match the output grid");

    const int r = options.refinement;
    const double dt = grid.dt / r;
    const double dz = plate.dz / r;
    const int J = plate.n_intervals() * r;  // points 0..J
    const double nu = params.c * dt / dz;
    if (nu > 1.0 + 1e-12)
        throw InvalidArgument("fdtd: CFL violated, c*dt/dz = " + std::to_string(nu) +
                              " > 1; refine dz or reduce dt");

    const double nu2 = nu * nu;
    const double g = 0.5 * params.b * dt;
    const double inv = 1.0 / (1.0 + g);
    const double om = 1.0 - g;

    std::vector<double> u_prev(J + 1, 0.0), u_cur(J + 1, 0.0), u_next(J + 1, 0.0);
    AScan surface = make_ascan(grid, std::vector<double>(grid.n_samples, 0.0));
    surface.samples[0] = 0.0;

    FdtdSolution out;
    const int fine_steps = (grid.n_samples - 1) * r;
    const int energy_every = options.energy_stride > 0 ? options.energy_stride * r : 0;

    auto energy_now = [&](double& e) {
        // Trapezoid over z of (u_t)^2 + c^2 (u_z)^2, centered differences.
        double c2 = params.c * params.c;
        double acc = 0.0;
        for (int j = 0; j <= J; ++j) {
            double ut = (u_next[j] - u_prev[j]) / (2.0 * dt);
            double uz;
            if (j == 0)
                uz = (-1.5 * u_cur[0] + 2.0 * u_cur[1] - 0.5 * u_cur[2]) / dz;
            else if (j == J)
                uz = (1.5 * u_cur[J] - 2.0 * u_cur[J - 1] + 0.5 * u_cur[J - 2]) / dz;
            else
                uz = (u_cur[j + 1] - u_cur[j - 1]) / (2.0 * dz);
            double w = (j == 0 || j == J) ? 0.5 : 1.0;
            acc += w * (ut * ut + c2 * uz * uz);
        }
        e = acc * dz;
    };

    for (int m = 0; m < fine_steps; ++m) {
        double t_next = grid.t0 + (m + 1) * dt;

        for (int j = 1; j < J; ++j) {
            u_next[j] = (2.0 * u_cur[j] - om * u_prev[j] +
                         nu2 * (u_cur[j + 1] - 2.0 * u_cur[j] + u_cur[j - 1])) * inv;
        }
        // z = L: free end, mirror ghost.
        u_next[J] = (2.0 * u_cur[J] - om * u_prev[J] +
                     nu2 * 2.0 * (u_cur[J - 1] - u_cur[J])) * inv;
        // z = 0: driven while t <= t_ex, free end afterwards.
        if (t_next <= pulse.t_ex + 1e-12) {
            u_next[0] = pulse_value(pulse, t_next);
        } else {
            u_next[0] = (2.0 * u_cur[0] - om * u_prev[0] +
                         nu2 * 2.0 * (u_cur[1] - u_cur[0])) * inv;
        }

        if (energy_every > 0 && m > 0 && m % energy_every == 0) {
            double e = 0.0;
            energy_now(e);
            out.energy_times.push_back(grid.t0 + m * dt);
            out.energy.push_back(e);
        }

        std::swap(u_prev, u_cur);
        std::swap(u_cur, u_next);

        if ((m + 1) % r == 0) surface.samples[(m + 1) / r] = u_cur[0];
    }

    out.surface = std::move(surface);
    return out;
}

ScanSet make_synthetic_plate(const SyntheticPlateSpec& spec, const ExcitationPulse& pulse,
                             const PlateModel& plate, const TimeGrid& grid) {
    if (spec.nx <= 0 || spec.ny <= 0)
        throw InvalidArgument("synthetic plate: grid dims must be positive");
    if (spec.noise_sigma < 0.0)
        throw InvalidArgument("synthetic plate: noise sigma must be >= 0");
    if (spec.patch_w > 0 && spec.patch_h > 0) {
        if (spec.patch_x0 < 0 || spec.patch_y0 < 0 ||
            spec.patch_x0 + spec.patch_w > spec.nx ||
            spec.patch_y0 + spec.patch_h > spec.ny)
            throw InvalidArgument("synthetic plate: patch sticks out of the grid");
    }

    AScan clean_base = forward_model(spec.base, pulse, plate, grid);
    AScan clean_patch = clean_base;
    if (spec.patch_w > 0 && spec.patch_h > 0) {
        MaterialParams damaged = make_material_params(spec.base.b + spec.delta_b,
                                                      spec.base.c + spec.delta_c);
        clean_patch = forward_model(damaged, pulse, plate, grid);
    }

    ScanSet set(spec.nx, spec.ny, spec.dx_mm, spec.dy_mm);
    set.set_t_ex(pulse.t_ex);
    for (int iy = 0; iy < spec.ny; ++iy) {
        for (int ix = 0; ix < spec.nx; ++ix) {
            const AScan& clean = spec.in_patch(ix, iy) ? clean_patch : clean_base;
            AScan scan = clean;
            scan.x_mm = set.x_of(ix);
            scan.y_mm = set.y_of(iy);
            if (spec.noise_sigma > 0.0) {
                Rng rng(derive_seed(spec.seed, ix, iy));
                for (double& s : scan.samples) s += spec.noise_sigma * rng.normal();
            }
            set.set(ix, iy, std::move(scan));
        }
    }
    return set;
}

}  // namespace ascan

#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "ascan/signal_core.hpp"

namespace ascan {

// Frequency-domain decay/propagation exponent
//     B(tau) = sqrt(-tau^2 + i b tau) / c
// with tau in rad/us, principal square root (Re B >= 0, sqrt(0) = 0).
std::complex<double> transfer_exponent(double tau, const MaterialParams& params);

// Field value and time derivative on the through-thickness grid z_j = j*dz at
// the excitation/echo handoff t = t_ex.
struct EchoState {
    std::vector<double> w0;
    std::vector<double> w0_t;
};

struct SolverOptions {
    // Decay rate (1/us) of the exponential window e^{-sigma t} applied to the
    // drive before its DFT. The discrete spectrum periodizes the response
    // with the record length; the window damps those wrapped images by
    // e^{-sigma T} while the physics is recovered exactly on the shifted
    // contour. Negative means "choose 8/record automatically".
    double window_rate = -1.0;

    // Spectral lines with |F| below this fraction of the peak line are
    // dropped from the state sums. The drive is band-limited after Tukey
    // smoothing, so this turns a 7000-line sum into a few hundred lines.
    double spectrum_rel_cutoff = 1e-10;

    // When set, the state pass also runs an unfolded two-sided sum whose
    // imaginary part must cancel; the residue lands in diagnostics(). Slow,
    // meant for verification.
    bool collect_diagnostics = false;
};

struct SolverDiagnostics {
    double max_imag_residue = 0.0;  // amplitude units
    int spectral_lines = 0;
};

// One excitation record + plate + oscilloscope grid, prepared once; forward
// runs for many (b, c) share the precomputed spectrum and transform plans.
// An instance is not safe for concurrent use; clone one per thread.
class Solver {
public:
    Solver(const ExcitationPulse& pulse, const PlateModel& plate, const TimeGrid& grid,
           const SolverOptions& options = {});
    ~Solver();

    Solver(const Solver& other);
    Solver& operator=(const Solver&) = delete;
    Solver(Solver&&) = delete;
    Solver& operator=(Solver&&) = delete;

    // Surface trace u(0, t) over the whole record: the drive itself while
    // t <= t_ex, the free-surface echo afterwards.
    AScan forward(const MaterialParams& params) const;

    // State at the handoff, from the transfer-function pass.
    EchoState excitation_state(const MaterialParams& params) const;

    // Windowed DFT lines of forward()'s trace, evaluated in closed form
    // (geometric sums over the echo modes, never materializing the series).
    // `bins` are full-record DFT bin indices; the window [win_lo, win_hi] is
    // in us. Matches zero-padded-window DFT of forward() to roundoff.
    std::vector<std::complex<double>> trace_bins(const MaterialParams& params,
                                                 const std::vector<int>& bins,
                                                 double win_lo, double win_hi) const;

    const SolverDiagnostics& diagnostics() const { return diag_; }

    const TimeGrid& grid() const { return grid_; }
    const PlateModel& plate() const { return plate_; }
    const ExcitationPulse& pulse() const { return pulse_; }

    // First sample index strictly past t_ex (start of the echo segment).
    int first_echo_index() const { return n_echo_; }

private:
    struct Impl;
    void compute_state(const MaterialParams& params, double* v, double* vt) const;
    void modal_coefficients(const MaterialParams& params) const;

    TimeGrid grid_;
    PlateModel plate_;
    ExcitationPulse pulse_;
    SolverOptions opt_;
    double sigma_ = 0.0;
    int n_echo_ = 0;
    Impl* impl_ = nullptr;
    mutable SolverDiagnostics diag_;
};

// Excitation phase: surface trace (equal to the drive, which is the boundary
// condition) plus the state at t_ex obtained from the inverse transform of
// F(tau) * cosh((L-z)B)/cosh(LB).
std::pair<std::vector<double>, EchoState> solve_excitation(
    const MaterialParams& params, const ExcitationPulse& pulse, const PlateModel& plate,
    const TimeGrid& grid, const SolverOptions& options = {});

// Echo phase: evolve the even periodic extension of the state mode-by-mode
// and return the surface samples for grid times in (t_ex, t_end].
std::vector<double> solve_echo(const EchoState& state, const MaterialParams& params,
                               const PlateModel& plate, double t_ex, double t_end,
                               const TimeGrid& grid);

// Field snapshot during the echo phase: the handoff state evolved mode by
// mode in closed form to time t >= t_ex and transformed back to the z grid.
EchoState echo_field_at(const EchoState& state, const MaterialParams& params,
                        const PlateModel& plate, double t_ex, double t);

// Both phases spliced into one surface A-scan at location (0, 0).
AScan forward_model(const MaterialParams& params, const ExcitationPulse& pulse,
                    const PlateModel& plate, const TimeGrid& grid,
                    const SolverOptions& options = {});

}  // namespace ascan

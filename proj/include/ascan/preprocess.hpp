#pragma once

#include <vector>

#include "ascan/signal_core.hpp"

namespace ascan {

// Raw oscilloscope trace: 9-bit counts as delivered by the scanner.
struct RawScan {
    TimeGrid grid;
    std::vector<int> counts;
    double x_mm = 0.0;
    double y_mm = 0.0;
};

// Map counts in [0, 511] to amplitudes in [-1, 1); anything outside that
// range is treated as hardware corruption.
AScan normalize(const RawScan& raw);

struct FaultReport {
    bool faulty = false;
    int first_violation_index = -1;   // index i of the offending pair (i, i+1)
    double max_excitation_jump = 0.0; // largest |s[i+1]-s[i]| with t[i+1] <= t_ex
    double max_echo_jump = 0.0;       // same for t[i+1] > t_ex
};

// Jump detector on successive differences. The echo region is quiet, so a
// small threshold applies there; the drive region tolerates large slews (the
// transducer is firing). A pair (i, i+1) counts as echo when t[i+1] > t_ex.
FaultReport detect_faulty(const AScan& scan, double t_ex,
                          double echo_threshold = 0.25,
                          double excitation_threshold = 1.0);

// Subtract a reference trace (e.g. the head signal recorded without the
// specimen) sample by sample. Grids must match exactly.
AScan subtract_head(const AScan& scan, const AScan& head);

// Low-pass the drive in the DFT domain with a Tukey window that is 1 up to
// (1 - taper_fraction) * cutoff and rolls off to 0 at the cutoff, then clamp
// the result back to its [0, t_ex] support. Real output is structural: the
// filtering runs through the half-spectrum transforms.
ExcitationPulse smooth_excitation(const ExcitationPulse& pulse, double cutoff_mhz,
                                  double taper_fraction = 0.5);

}  // namespace ascan

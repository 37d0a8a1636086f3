#pragma once

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ascan/preprocess.hpp"
#include "ascan/signal_core.hpp"
#include "ascan/synth_oracle.hpp"
#include "ascan/telegraph_solver.hpp"

namespace ascan_test {

// A setup small enough that a forward solve is well under a millisecond:
// 14 us record at 0.005 us, 1 MHz burst done by t_ex = 5 us, 100 depth
// intervals. The first echo shows up around 11.4 us.
struct SmallSetup {
    ascan::TimeGrid grid;
    ascan::PlateModel plate;
    ascan::ExcitationPulse pulse;
};

inline SmallSetup small_setup(int n_samples = 2800, double t_ex = 5.0) {
    SmallSetup s{ascan::make_time_grid(0.005, n_samples),
                 ascan::make_plate_model(1.0, 0.01),
                 ascan::ExcitationPulse{}};
    ascan::ExcitationPulse raw = ascan::make_pulse(1.0, 4.0, 0.5, s.grid, t_ex);
    s.pulse = ascan::smooth_excitation(raw, 6.5, 0.5);
    return s;
}

// Energy of a field snapshot, computed by projecting onto the Neumann cosine
// basis. On the K+1 point grid the trapezoid inner product diagonalizes that
// basis exactly, so unlike a finite-difference gradient this estimator has no
// resolution bias: without damping each modal term is a constant of motion.
inline double modal_energy(const ascan::EchoState& state, double c, double plate_length) {
    size_t kk = state.w0.size() - 1;
    auto project = [&](const std::vector<double>& field, size_t k) {
        double acc = 0.0;
        for (size_t j = 0; j <= kk; ++j) {
            double w = (j == 0 || j == kk) ? 0.5 : 1.0;
            acc += w * field[j] * std::cos(M_PI * double(k) * double(j) / double(kk));
        }
        double norm = (k == 0 || k == kk) ? double(kk) : 0.5 * double(kk);
        return acc / norm;
    };
    double energy = 0.0;
    for (size_t k = 0; k <= kk; ++k) {
        double a = project(state.w0, k);
        double a_t = project(state.w0_t, k);
        double omega = c * M_PI * double(k) / plate_length;
        double mode_norm = (k == 0) ? plate_length : 0.5 * plate_length;
        energy += 0.5 * mode_norm * (a_t * a_t + omega * omega * a * a);
    }
    return energy;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

inline double rel_linf(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, scale = 0.0;
    for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
        diff = std::max(diff, std::fabs(a[i] - b[i]));
        scale = std::max(scale, std::fabs(b[i]));
    }
    return scale > 0.0 ? diff / scale : diff;
}

// Split-chain potential scale reduction: each chain is halved, R-hat is
// computed over the resulting sub-chains. Values near 1 indicate mixing.
inline double split_rhat(const std::vector<std::vector<double>>& chains) {
    std::vector<std::vector<double>> halves;
    for (const auto& chain : chains) {
        size_t mid = chain.size() / 2;
        halves.emplace_back(chain.begin(), chain.begin() + mid);
        halves.emplace_back(chain.begin() + mid, chain.end());
    }
    size_t m = halves.size();
    size_t n = halves.front().size();

    std::vector<double> means(m), vars(m);
    for (size_t j = 0; j < m; ++j) {
        double mean = std::accumulate(halves[j].begin(), halves[j].end(), 0.0) / n;
        double acc = 0.0;
        for (double x : halves[j]) acc += (x - mean) * (x - mean);
        means[j] = mean;
        vars[j] = acc / (n - 1);
    }
    double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
    double between = 0.0;
    for (double mu : means) between += (mu - grand) * (mu - grand);
    between *= static_cast<double>(n) / (m - 1);
    double within = std::accumulate(vars.begin(), vars.end(), 0.0) / m;
    double var_plus = (static_cast<double>(n - 1) / n) * within + between / n;
    return std::sqrt(var_plus / within);
}

inline std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace ascan_test

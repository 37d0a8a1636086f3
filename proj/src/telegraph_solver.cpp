#include "ascan/telegraph_solver.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include "fftw_guard.hpp"

namespace ascan {

std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Modes whose characteristic discriminant is closer to zero than this are
// treated as repeated roots.
constexpr double kDiscTol = 1e-12;

using cplx = std::complex<double>;

}  // namespace

std::complex<double> transfer_exponent(double tau, const MaterialParams& params) {
    if (tau == 0.0) return {0.0, 0.0};
    // Principal branch; the argument -tau^2 + i*b*tau never crosses the
    // negative real axis except at b = 0, where the sign of i*b*tau's zero
    // still selects the conjugate-symmetric side.
    cplx arg(-tau * tau, params.b * tau);
    return std::sqrt(arg) / params.c;
}

struct Solver::Impl {
    int N = 0;
    int K = 0;
    double dt = 0.0;
    double dz = 0.0;
    double L = 0.0;
    double t_ex = 0.0;

    std::vector<int> line_j;
    std::vector<double> line_tau;
    std::vector<cplx> line_u;  // (1/N) X_j e^{i tau_j t_ex} e^{sigma t_ex}

    fftw_plan dct = nullptr;
    double* dct_in = nullptr;
    double* dct_out = nullptr;

    // scratch, sized K+1
    std::vector<double> pr, pi_, rr, ri, v, vt, ahat, dhat, alpha, acur, aprev;

    ~Impl() {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        if (dct) fftw_destroy_plan(dct);
        if (dct_in) fftw_free(dct_in);
        if (dct_out) fftw_free(dct_out);
    }
};

Solver::Solver(const ExcitationPulse& pulse, const PlateModel& plate, const TimeGrid& grid,
               const SolverOptions& options)
    : grid_(grid), plate_(plate), pulse_(pulse), opt_(options) {
    if (!(pulse.grid == grid))
        throw InvalidArgument("solver: pulse grid must match the oscilloscope grid");
    if (grid.t0 != 0.0)
        throw InvalidArgument("solver: record must start at t = 0");
    if (!(pulse.t_ex < grid.duration()))
        throw InvalidArgument("solver: t_ex must leave room for an echo segment");

    sigma_ = opt_.window_rate < 0.0 ? 8.0 / grid.duration() : opt_.window_rate;
    n_echo_ = grid.index_at_or_before(pulse.t_ex) + 1;

    impl_ = new Impl;
    impl_->N = grid.n_samples;
    impl_->K = plate.n_intervals();
    impl_->dt = grid.dt;
    impl_->dz = plate.dz;
    impl_->L = plate.length;
    impl_->t_ex = pulse.t_ex;

    const int N = impl_->N;
    const int K = impl_->K;

    // Windowed drive spectrum, computed once. The window trades the wrapped
    // periodic images for a benign e^{sigma t_ex} amplification of the state.
    std::vector<cplx> spectrum(N / 2 + 1);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        double* in = fftw_alloc_real(N);
        fftw_complex* out = fftw_alloc_complex(N / 2 + 1);
        fftw_plan plan = fftw_plan_dft_r2c_1d(N, in, out, FFTW_ESTIMATE);
        for (int i = 0; i < N; ++i)
            in[i] = pulse.samples[i] * std::exp(-sigma_ * grid.time(i));
        fftw_execute(plan);
        for (int j = 0; j <= N / 2; ++j) spectrum[j] = {out[j][0], out[j][1]};
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
    }

    double peak = 0.0;
    for (const auto& x : spectrum) peak = std::max(peak, std::abs(x));
    int j_max = 0;
    if (peak > 0.0) {
        double floor_abs = peak * opt_.spectrum_rel_cutoff;
        for (int j = N / 2; j >= 0; --j) {
            if (std::abs(spectrum[j]) > floor_abs) {
                j_max = j;
                break;
            }
        }
    } else {
        j_max = -1;  // silent drive, no lines at all
    }

    const double amp = std::exp(sigma_ * pulse.t_ex) / N;
    for (int j = 0; j <= j_max; ++j) {
        double tau = kTwoPi * j / (N * grid.dt);
        cplx phase(std::cos(tau * pulse.t_ex), std::sin(tau * pulse.t_ex));
        impl_->line_j.push_back(j);
        impl_->line_tau.push_back(tau);
        impl_->line_u.push_back(spectrum[j] * phase * amp);
    }
    diag_.spectral_lines = static_cast<int>(impl_->line_j.size());

    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        impl_->dct_in = fftw_alloc_real(K + 1);
        impl_->dct_out = fftw_alloc_real(K + 1);
        impl_->dct = fftw_plan_r2r_1d(K + 1, impl_->dct_in, impl_->dct_out,
                                      FFTW_REDFT00, FFTW_ESTIMATE);
    }

    for (auto* s : {&impl_->pr, &impl_->pi_, &impl_->rr, &impl_->ri, &impl_->v,
                    &impl_->vt, &impl_->ahat, &impl_->dhat, &impl_->alpha,
                    &impl_->acur, &impl_->aprev})
        s->assign(K + 1, 0.0);
}

Solver::Solver(const Solver& other) : Solver(other.pulse_, other.plate_, other.grid_, other.opt_) {}

Solver::~Solver() { delete impl_; }

// Transfer-function pass: for every kept line evaluate
//   H(z) = e^{-zB} (1 + e^{-2(L-z)B}) / (1 + e^{-2LB})
// on the z grid via two geometric recurrences (all exponents have
// non-positive real part, so nothing can overflow), then accumulate the
// inverse-transform sums for the state and its time derivative.
void Solver::compute_state(const MaterialParams& params, double* v, double* vt) const {
    const Impl& im = *impl_;
    const int K = im.K;
    const double b = params.b, c = params.c;

    std::fill(v, v + K + 1, 0.0);
    std::fill(vt, vt + K + 1, 0.0);

    double* pr = const_cast<double*>(im.pr.data());
    double* pi = const_cast<double*>(im.pi_.data());

    double max_imag = 0.0;

    for (size_t li = 0; li < im.line_tau.size(); ++li) {
        const double tau = im.line_tau[li];
        const int j = im.line_j[li];
        const cplx zeta(tau, -sigma_);
        const cplx B = std::sqrt((-zeta * zeta + cplx(0.0, b) * zeta)) / c;
        const cplx q = std::exp(-im.dz * B);
        const cplx q2 = q * q;
        const cplx e2LB = std::exp(-2.0 * im.L * B);

        const double fold = (j == 0 || 2 * j == im.N) ? 1.0 : 2.0;
        const cplx cj = fold * im.line_u[li] / (1.0 + e2LB);
        const cplx dj = cj * cplx(sigma_, tau);
        const double cjr = cj.real(), cji = cj.imag();
        const double djr = dj.real(), dji = dj.imag();

        // e^{-z B} marching away from the surface
        {
            double xr = 1.0, xi = 0.0;
            const double qr = q.real(), qi = q.imag();
            for (int jz = 0; jz <= K; ++jz) {
                pr[jz] = xr;
                pi[jz] = xi;
                double nr = xr * qr - xi * qi;
                xi = xr * qi + xi * qr;
                xr = nr;
            }
        }
        // e^{-2(L-z)B} marching from the back wall, folded into the
        // accumulation loop directly.
        {
            double yr = 1.0, yi = 0.0;
            const double q2r = q2.real(), q2i = q2.imag();
            for (int jz = K; jz >= 0; --jz) {
                double hr = pr[jz] * (1.0 + yr) - pi[jz] * yi;
                double hi = pr[jz] * yi + pi[jz] * (1.0 + yr);
                v[jz] += cjr * hr - cji * hi;
                vt[jz] += djr * hr - dji * hi;
                double nr = yr * q2r - yi * q2i;
                yi = yr * q2i + yi * q2r;
                yr = nr;
            }
        }

        if (opt_.collect_diagnostics && j > 0) {
            // Unfolded mirror line at -tau, evaluated independently; the
            // imaginary parts of the +/- pair must cancel to roundoff.
            const cplx zm(-tau, -sigma_);
            const cplx Bm = std::sqrt((-zm * zm + cplx(0.0, b) * zm)) / c;
            const cplx um = std::conj(im.line_u[li]);
            const cplx cm = um / (1.0 + std::exp(-2.0 * im.L * Bm));
            const cplx cp = im.line_u[li] / (1.0 + e2LB);
            for (int jz = 0; jz <= K; ++jz) {
                double z = jz * im.dz;
                cplx Hp = std::exp(-z * B) * (1.0 + std::exp(-2.0 * (im.L - z) * B)) ;
                cplx Hm = std::exp(-z * Bm) * (1.0 + std::exp(-2.0 * (im.L - z) * Bm));
                max_imag = std::max(max_imag, std::abs(std::imag(cp * Hp + cm * Hm)));
            }
        }
    }

    if (opt_.collect_diagnostics) diag_.max_imag_residue = max_imag;
}

// State -> weighted mode coefficients of the even periodic extension. The
// weights fold the +-k symmetry so the surface value is a plain sum.
void Solver::modal_coefficients(const MaterialParams& params) const {
    Impl& im = *impl_;
    const int K = im.K;

    compute_state(params, im.v.data(), im.vt.data());

    const double scale = 1.0 / (2.0 * K);
    std::copy(im.v.begin(), im.v.end(), im.dct_in);
    fftw_execute(im.dct);
    for (int k = 0; k <= K; ++k) {
        double w = (k == 0 || k == K) ? 1.0 : 2.0;
        im.ahat[k] = w * scale * im.dct_out[k];
    }
    std::copy(im.vt.begin(), im.vt.end(), im.dct_in);
    fftw_execute(im.dct);
    for (int k = 0; k <= K; ++k) {
        double w = (k == 0 || k == K) ? 1.0 : 2.0;
        im.dhat[k] = w * scale * im.dct_out[k];
    }
}

EchoState Solver::excitation_state(const MaterialParams& params) const {
    EchoState state;
    state.w0.resize(impl_->K + 1);
    state.w0_t.resize(impl_->K + 1);
    compute_state(params, state.w0.data(), state.w0_t.data());
    return state;
}

namespace {

// a(s) for one mode with initial value A, initial slope D at s = 0:
//   a'' + b a' + (c k pi / L)^2 a = 0.
// disc = (c k pi / L)^2 - b^2/4 decides oscillatory vs overdamped; the
// overdamped branch is evaluated as a sum of two decaying exponentials so
// nothing overflows.
double mode_value(double A, double D, double b, double disc, double s) {
    double slope = D + 0.5 * b * A;
    if (std::abs(disc) < kDiscTol) {
        return std::exp(-0.5 * b * s) * (A + slope * s);
    }
    if (disc > 0.0) {
        double mu = std::sqrt(disc);
        return std::exp(-0.5 * b * s) * (A * std::cos(mu * s) + slope * std::sin(mu * s) / mu);
    }
    double nu = std::sqrt(-disc);
    double g1 = std::exp((-0.5 * b + nu) * s);
    double g2 = std::exp((-0.5 * b - nu) * s);
    return 0.5 * (A * (g1 + g2) + slope * (g1 - g2) / nu);
}

// Companion recurrence multiplier: e^{l+ dt} + e^{l- dt}, real in all cases.
double mode_alpha(double b, double disc, double dt) {
    if (std::abs(disc) < kDiscTol) return 2.0 * std::exp(-0.5 * b * dt);
    if (disc > 0.0) return 2.0 * std::exp(-0.5 * b * dt) * std::cos(std::sqrt(disc) * dt);
    double nu = std::sqrt(-disc);
    return std::exp((-0.5 * b + nu) * dt) + std::exp((-0.5 * b - nu) * dt);
}

// a'(s) for the same mode, same branch split as mode_value.
double mode_slope(double A, double D, double b, double disc, double s) {
    double beta = 0.5 * b;
    double slope = D + beta * A;
    if (std::abs(disc) < kDiscTol) {
        return std::exp(-beta * s) * (slope - beta * (A + slope * s));
    }
    if (disc > 0.0) {
        double mu = std::sqrt(disc);
        return std::exp(-beta * s) *
               (D * std::cos(mu * s) - (beta * slope / mu + A * mu) * std::sin(mu * s));
    }
    double nu = std::sqrt(-disc);
    double g1 = std::exp((-beta + nu) * s);
    double g2 = std::exp((-beta - nu) * s);
    return 0.5 * (A * ((-beta + nu) * g1 + (-beta - nu) * g2) +
                  slope * ((-beta + nu) * g1 - (-beta - nu) * g2) / nu);
}

}  // namespace

AScan Solver::forward(const MaterialParams& params) const {
    Impl& im = *impl_;
    const int N = im.N;
    const int K = im.K;

    AScan out = make_ascan(grid_, pulse_.samples);
    if (n_echo_ >= N) return out;

    modal_coefficients(params);

    const double b = params.b;
    const double dt = im.dt;
    const double s1 = grid_.time(n_echo_) - im.t_ex;
    const double beta = std::exp(-b * dt);
    const double w2 = (params.c * M_PI / im.L) * (params.c * M_PI / im.L);

    double* alpha = im.alpha.data();
    double* acur = im.acur.data();
    double* aprev = im.aprev.data();

    double y1 = 0.0, y2 = 0.0;
    for (int k = 0; k <= K; ++k) {
        double disc = w2 * k * k - 0.25 * b * b;
        alpha[k] = mode_alpha(b, disc, dt);
        aprev[k] = mode_value(im.ahat[k], im.dhat[k], b, disc, s1);
        acur[k] = mode_value(im.ahat[k], im.dhat[k], b, disc, s1 + dt);
        y1 += aprev[k];
        y2 += acur[k];
    }
    out.samples[n_echo_] = y1;
    if (n_echo_ + 1 < N) out.samples[n_echo_ + 1] = y2;

    // Exact two-term recurrence a(s+dt) = alpha a(s) - beta a(s-dt), rolled
    // with four independent accumulators so the sum vectorizes yet stays
    // deterministic.
    for (int n = n_echo_ + 2; n < N; ++n) {
        double s0 = 0.0, s1a = 0.0, s2 = 0.0, s3 = 0.0;
        int k = 0;
        for (; k + 4 <= K + 1; k += 4) {
            double t0 = alpha[k] * acur[k] - beta * aprev[k];
            double t1 = alpha[k + 1] * acur[k + 1] - beta * aprev[k + 1];
            double t2 = alpha[k + 2] * acur[k + 2] - beta * aprev[k + 2];
            double t3 = alpha[k + 3] * acur[k + 3] - beta * aprev[k + 3];
            aprev[k] = acur[k];
            aprev[k + 1] = acur[k + 1];
            aprev[k + 2] = acur[k + 2];
            aprev[k + 3] = acur[k + 3];
            acur[k] = t0;
            acur[k + 1] = t1;
            acur[k + 2] = t2;
            acur[k + 3] = t3;
            s0 += t0;
            s1a += t1;
            s2 += t2;
            s3 += t3;
        }
        double tail = 0.0;
        for (; k <= K; ++k) {
            double t = alpha[k] * acur[k] - beta * aprev[k];
            aprev[k] = acur[k];
            acur[k] = t;
            tail += t;
        }
        out.samples[n] = ((s0 + s1a) + (s2 + s3)) + tail;
    }
    return out;
}

std::vector<cplx> Solver::trace_bins(const MaterialParams& params,
                                     const std::vector<int>& bins,
                                     double win_lo, double win_hi) const {
    Impl& im = *impl_;
    const int N = im.N;
    const int K = im.K;
    if (!(win_lo < win_hi))
        throw InvalidArgument("trace bins: window must have positive length");

    // Window sample range on the full record.
    auto [nw0, nw1] = window_sample_range(grid_, win_lo, win_hi);

    std::vector<cplx> out(bins.size(), cplx(0.0, 0.0));
    if (nw1 < nw0) return out;

    modal_coefficients(params);

    const double b = params.b;
    const double dt = im.dt;
    const double w2 = (params.c * M_PI / im.L) * (params.c * M_PI / im.L);

    // Echo segment covered by the window.
    const int nf = std::max(nw0, n_echo_);
    const int M = nw1 - nf + 1;
    const double s_first = grid_.time(nf) - im.t_ex;

    for (size_t bi = 0; bi < bins.size(); ++bi) {
        const int j = bins[bi];
        if (j < 0 || j >= N) throw InvalidArgument("trace bins: bin index outside record");
        const double omega = kTwoPi * j / (N * dt);
        cplx acc(0.0, 0.0);

        // Drive part of the window (t <= t_ex), summed directly.
        {
            cplx rot = std::exp(cplx(0.0, -omega * grid_.time(nw0)));
            const cplx step = std::exp(cplx(0.0, -omega * dt));
            for (int n = nw0; n <= std::min(nw1, n_echo_ - 1); ++n) {
                acc += pulse_.samples[n] * rot;
                rot *= step;
            }
        }

        if (M > 0) {
            const cplx rho_w = std::exp(cplx(0.0, -omega * dt));
            const cplx rho_wM = std::exp(cplx(0.0, -omega * dt * M));
            const cplx head_w = std::exp(cplx(0.0, -omega * grid_.time(nf)));

            for (int k = 0; k <= K; ++k) {
                const double A = im.ahat[k];
                const double D = im.dhat[k];
                if (A == 0.0 && D == 0.0) continue;
                const double disc = w2 * k * k - 0.25 * b * b;
                const cplx mu = std::sqrt(cplx(disc, 0.0));
                const cplx lp = cplx(-0.5 * b, 0.0) + cplx(0.0, 1.0) * mu;
                const cplx lm = cplx(-0.5 * b, 0.0) - cplx(0.0, 1.0) * mu;

                bool degenerate = std::abs(disc) < kDiscTol;
                if (!degenerate) {
                    const cplx Ak = (cplx(D, 0.0) - lm * A) / (lp - lm);
                    const cplx Bk = cplx(A, 0.0) - Ak;
                    cplx mode_acc(0.0, 0.0);
                    bool ok = true;
                    for (auto [lam, coef] : {std::pair{lp, Ak}, std::pair{lm, Bk}}) {
                        const cplx rho = std::exp(lam * dt) * rho_w;
                        const cplx one_minus = 1.0 - rho;
                        if (std::norm(one_minus) < 1e-18) {
                            ok = false;
                            break;
                        }
                        const cplx headv = std::exp(lam * s_first) * head_w;
                        const cplx rhoM = std::exp(lam * (dt * M)) * rho_wM;
                        mode_acc += coef * headv * (1.0 - rhoM) / one_minus;
                    }
                    if (ok) {
                        acc += mode_acc;
                        continue;
                    }
                }
                // Repeated root (or resonant bin): sum the mode directly.
                cplx rot = head_w;
                for (int n = nf; n <= nw1; ++n) {
                    acc += mode_value(A, D, b, disc, grid_.time(n) - im.t_ex) * rot;
                    rot *= rho_w;
                }
            }
        }
        out[bi] = acc;
    }
    return out;
}

std::pair<std::vector<double>, EchoState> solve_excitation(
    const MaterialParams& params, const ExcitationPulse& pulse, const PlateModel& plate,
    const TimeGrid& grid, const SolverOptions& options) {
    Solver solver(pulse, plate, grid, options);
    return {pulse.samples, solver.excitation_state(params)};
}

std::vector<double> solve_echo(const EchoState& state, const MaterialParams& params,
                               const PlateModel& plate, double t_ex, double t_end,
                               const TimeGrid& grid) {
    const int K = plate.n_intervals();
    if (static_cast<int>(state.w0.size()) != K + 1 ||
        static_cast<int>(state.w0_t.size()) != K + 1)
        throw InvalidArgument("solve_echo: state size does not match the plate grid");
    if (!(t_end > t_ex)) throw InvalidArgument("solve_echo: t_end must exceed t_ex");

    // Mode coefficients of the even periodic extension (DCT-I), weights
    // folded so the surface reconstruction is a plain sum over k.
    std::vector<double> ahat(K + 1), dhat(K + 1);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        double* in = fftw_alloc_real(K + 1);
        double* outb = fftw_alloc_real(K + 1);
        fftw_plan plan = fftw_plan_r2r_1d(K + 1, in, outb, FFTW_REDFT00, FFTW_ESTIMATE);
        const double scale = 1.0 / (2.0 * K);
        std::copy(state.w0.begin(), state.w0.end(), in);
        fftw_execute(plan);
        for (int k = 0; k <= K; ++k)
            ahat[k] = ((k == 0 || k == K) ? 1.0 : 2.0) * scale * outb[k];
        std::copy(state.w0_t.begin(), state.w0_t.end(), in);
        fftw_execute(plan);
        for (int k = 0; k <= K; ++k)
            dhat[k] = ((k == 0 || k == K) ? 1.0 : 2.0) * scale * outb[k];
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(outb);
    }

    int n0 = grid.index_at_or_before(t_ex) + 1;
    int n1 = grid.index_at_or_before(t_end);
    std::vector<double> samples;
    if (n1 < n0) return samples;
    samples.reserve(n1 - n0 + 1);

    const double b = params.b;
    const double w2 = (params.c * M_PI / plate.length) * (params.c * M_PI / plate.length);
    for (int n = n0; n <= n1; ++n) {
        double s = grid.time(n) - t_ex;
        double y = 0.0;
        for (int k = 0; k <= K; ++k)
            y += mode_value(ahat[k], dhat[k], b, w2 * k * k - 0.25 * b * b, s);
        samples.push_back(y);
    }
    return samples;
}

EchoState echo_field_at(const EchoState& state, const MaterialParams& params,
                        const PlateModel& plate, double t_ex, double t) {
    const int K = plate.n_intervals();
    if (static_cast<int>(state.w0.size()) != K + 1 ||
        static_cast<int>(state.w0_t.size()) != K + 1)
        throw InvalidArgument("echo field: state size does not match the plate grid");
    if (!(t >= t_ex)) throw InvalidArgument("echo field: t must not precede t_ex");

    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    double* in = fftw_alloc_real(K + 1);
    double* out = fftw_alloc_real(K + 1);
    fftw_plan plan = fftw_plan_r2r_1d(K + 1, in, out, FFTW_REDFT00, FFTW_ESTIMATE);

    std::vector<double> ahat(K + 1), dhat(K + 1);
    const double scale = 1.0 / (2.0 * K);
    std::copy(state.w0.begin(), state.w0.end(), in);
    fftw_execute(plan);
    for (int k = 0; k <= K; ++k) ahat[k] = scale * out[k];
    std::copy(state.w0_t.begin(), state.w0_t.end(), in);
    fftw_execute(plan);
    for (int k = 0; k <= K; ++k) dhat[k] = scale * out[k];

    // Evolve each cosine mode to time t, then transform back. The DCT pair
    // used here is its own inverse once the 1/(2K) normalization is applied.
    const double b = params.b;
    const double w2 = (params.c * M_PI / plate.length) * (params.c * M_PI / plate.length);
    const double s = t - t_ex;
    EchoState result;
    result.w0.resize(K + 1);
    result.w0_t.resize(K + 1);
    for (int k = 0; k <= K; ++k) {
        double disc = w2 * k * k - 0.25 * b * b;
        in[k] = mode_value(ahat[k], dhat[k], b, disc, s);
    }
    fftw_execute(plan);
    std::copy(out, out + K + 1, result.w0.begin());
    for (int k = 0; k <= K; ++k) {
        double disc = w2 * k * k - 0.25 * b * b;
        in[k] = mode_slope(ahat[k], dhat[k], b, disc, s);
    }
    fftw_execute(plan);
    std::copy(out, out + K + 1, result.w0_t.begin());

    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
    return result;
}

AScan forward_model(const MaterialParams& params, const ExcitationPulse& pulse,
                    const PlateModel& plate, const TimeGrid& grid,
                    const SolverOptions& options) {
    Solver solver(pulse, plate, grid, options);
    return solver.forward(params);
}

}  // namespace ascan

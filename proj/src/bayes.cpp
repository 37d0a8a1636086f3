#include "ascan/bayes.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ascan/rng.hpp"

namespace ascan {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Effective sample size of one chain coordinate, from the initial positive
// sequence of paired autocorrelations (Geyer). Independent draws give back
// roughly the nominal count; a sticky low-acceptance chain gives the number
// of states it actually visited, which is the count Silverman's rule needs.
double effective_sample_size(const std::vector<double>& x) {
    const size_t n = x.size();
    if (n < 4) return static_cast<double>(n);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> d(n);
    for (size_t i = 0; i < n; ++i) d[i] = x[i] - mean;
    double c0 = 0.0;
    for (double v : d) c0 += v * v;
    c0 /= static_cast<double>(n);
    if (!(c0 > 0.0)) return static_cast<double>(n);
    auto rho = [&](size_t lag) {
        double acc = 0.0;
        for (size_t i = 0; i + lag < n; ++i) acc += d[i] * d[i + lag];
        return acc / (c0 * static_cast<double>(n));
    };
    double tau = -1.0;
    for (size_t m = 0; 2 * m + 1 < n; ++m) {
        const double pair = rho(2 * m) + rho(2 * m + 1);
        if (pair <= 0.0) break;
        tau += 2.0 * pair;
    }
    const double ess = static_cast<double>(n) / std::max(tau, 1.0);
    return std::min(std::max(ess, 1.0), static_cast<double>(n));
}

void validate(const ChainOptions& options) {
    if (options.burn_in < 0) throw InvalidArgument("chain: burn_in must be >= 0");
    if (options.n_samples < 1) throw InvalidArgument("chain: n_samples must be >= 1");
    if (!(options.schedule.eps_early > 0.0) || !(options.schedule.eps_late > 0.0))
        throw InvalidArgument("chain: proposal eps values must be positive");
    if (options.schedule.switch_step < 0)
        throw InvalidArgument("chain: switch_step must be >= 0");
}

}  // namespace

ProposalSchedule make_proposal_schedule(double eps_early, double eps_late, int switch_step) {
    if (!(eps_early > 0.0) || !(eps_late > 0.0))
        throw InvalidArgument("proposal schedule: eps values must be positive");
    if (switch_step < 0) throw InvalidArgument("proposal schedule: switch_step must be >= 0");
    return ProposalSchedule{eps_early, eps_late, switch_step};
}

double log_likelihood(const FeatureVector& model, const FeatureVector& measured,
                      const FeatureCovariance& cov) {
    if (model.bins != measured.bins || measured.bins != cov.bins)
        throw InvalidArgument("likelihood: feature bins do not match the covariance bins");
    Eigen::Matrix<double, 6, 6> sigma;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) sigma(i, j) = cov.sigma[i][j];
    Eigen::LLT<Eigen::Matrix<double, 6, 6>> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw NumericalError("likelihood: covariance is not positive definite");
    auto mp = model.packed();
    auto ap = measured.packed();
    Eigen::Matrix<double, 6, 1> r;
    for (int i = 0; i < 6; ++i) r(i) = mp[i] - ap[i];
    return -0.5 * r.dot(llt.solve(r));
}

double log_posterior(const MaterialParams& params, const FeatureVector& model,
                     const FeatureVector& measured, const FeatureCovariance& cov,
                     const PriorBox& prior) {
    if (!prior.contains(params)) return kNegInf;
    return log_likelihood(model, measured, cov);
}

double PosteriorChain::acceptance_rate() const {
    const double steps = burn_in + static_cast<double>(samples.size());
    return steps > 0.0 ? accepted / steps : 0.0;
}

PosteriorChain run_chain(const std::function<double(const MaterialParams&)>& log_target,
                         const PriorBox& prior, const ChainOptions& options) {
    validate(options);
    auto target = [&](const MaterialParams& p) {
        try {
            double v = log_target(p);
            return std::isnan(v) ? kNegInf : v;
        } catch (const Error&) {
            return kNegInf;
        }
    };

    PosteriorChain chain;
    chain.burn_in = options.burn_in;
    chain.seed = options.seed;
    chain.box = prior;
    chain.schedule = options.schedule;
    chain.samples.reserve(options.n_samples);

    Rng rng(options.seed);
    MaterialParams cur = prior.midpoint();
    double cur_lp = target(cur);

    const int total = options.burn_in + options.n_samples;
    for (int k = 0; k < total; ++k) {
        const double eps =
            k < options.schedule.switch_step ? options.schedule.eps_early
                                             : options.schedule.eps_late;
        const double step_b = std::sqrt(eps * prior.b_range());
        const double step_c = std::sqrt(eps * prior.c_range());
        MaterialParams prop{cur.b + step_b * rng.normal(), cur.c + step_c * rng.normal()};

        if (prior.contains(prop)) {
            if (!options.cache_current) cur_lp = target(cur);
            const double lp = target(prop);
            const double u = rng.uniform01_open_left();
            if (lp > kNegInf && std::log(u) < lp - cur_lp) {
                cur = prop;
                cur_lp = lp;
                ++chain.accepted;
            }
        }
        if (k >= options.burn_in) chain.samples.push_back(cur);
    }
    return chain;
}

PosteriorChain run_chain(const std::function<FeatureVector(const MaterialParams&)>& model,
                         const FeatureVector& measured, const FeatureCovariance& cov,
                         const PriorBox& prior, const ChainOptions& options) {
    auto log_target = [&](const MaterialParams& p) {
        return log_likelihood(model(p), measured, cov);
    };
    return run_chain(log_target, prior, options);
}

double Kde2::density(double b_at, double c_at) const {
    if (b.empty() || !(h_b > 0.0) || !(h_c > 0.0)) return 0.0;
    if (b_at < box.b_min || b_at > box.b_max || c_at < box.c_min || c_at > box.c_max)
        return 0.0;
    const double inv_two_hb2 = 1.0 / (2.0 * h_b * h_b);
    const double inv_two_hc2 = 1.0 / (2.0 * h_c * h_c);
    const double norm = 1.0 / (2.0 * M_PI * h_b * h_c);
    double acc = 0.0;
    for (size_t i = 0; i < b.size(); ++i) {
        const double db = b_at - b[i];
        const double dc = c_at - c[i];
        acc += weight[i] * std::exp(-db * db * inv_two_hb2 - dc * dc * inv_two_hc2);
    }
    return acc * norm / static_cast<double>(b.size());
}

PosteriorSummary posterior_summary(const PosteriorChain& chain) {
    const int n = static_cast<int>(chain.samples.size());
    if (n < 10) throw InsufficientData("posterior summary: need at least 10 samples");

    double mb = 0.0, mc = 0.0;
    for (const auto& s : chain.samples) {
        mb += s.b;
        mc += s.c;
    }
    mb /= n;
    mc /= n;
    double vbb = 0.0, vbc = 0.0, vcc = 0.0;
    for (const auto& s : chain.samples) {
        vbb += (s.b - mb) * (s.b - mb);
        vbc += (s.b - mb) * (s.c - mc);
        vcc += (s.c - mc) * (s.c - mc);
    }
    vbb /= n - 1;
    vbc /= n - 1;
    vcc /= n - 1;

    PosteriorSummary out;
    out.mean = MaterialParams{mb, mc};
    out.covariance = {{{vbb, vbc}, {vbc, vcc}}};

    // Silverman's factor uses the effective sample count per axis: on a
    // correlated chain the nominal length would shrink the kernels far below
    // the spacing of the states actually visited.
    std::vector<double> bs(n), cs(n);
    for (int i = 0; i < n; ++i) {
        bs[i] = chain.samples[i].b;
        cs[i] = chain.samples[i].c;
    }
    const double sd_b = std::sqrt(vbb);
    const double sd_c = std::sqrt(vcc);
    double h_b = sd_b * std::pow(effective_sample_size(bs), -1.0 / 6.0);
    double h_c = sd_c * std::pow(effective_sample_size(cs), -1.0 / 6.0);
    if (sd_b < 1e-12 * chain.box.b_range()) {
        h_b = 1e-3 * chain.box.b_range();
        out.degenerate = true;
    }
    if (sd_c < 1e-12 * chain.box.c_range()) {
        h_c = 1e-3 * chain.box.c_range();
        out.degenerate = true;
    }

    Kde2& kde = out.kde;
    kde.box = chain.box;
    kde.h_b = h_b;
    kde.h_c = h_c;
    kde.b.resize(n);
    kde.c.resize(n);
    kde.weight.resize(n);
    const double rt2_hb = std::sqrt(2.0) * h_b;
    const double rt2_hc = std::sqrt(2.0) * h_c;
    for (int i = 0; i < n; ++i) {
        kde.b[i] = chain.samples[i].b;
        kde.c[i] = chain.samples[i].c;
        const double zb = 0.5 * (std::erf((chain.box.b_max - kde.b[i]) / rt2_hb) -
                                 std::erf((chain.box.b_min - kde.b[i]) / rt2_hb));
        const double zc = 0.5 * (std::erf((chain.box.c_max - kde.c[i]) / rt2_hc) -
                                 std::erf((chain.box.c_min - kde.c[i]) / rt2_hc));
        kde.weight[i] = 1.0 / (zb * zc);
    }
    return out;
}

RegionProbability region_probability(const PosteriorChain& chain,
                                     const std::function<bool(const MaterialParams&)>& region) {
    const int n = static_cast<int>(chain.samples.size());
    if (n < 100) throw InsufficientData("region probability: need at least 100 samples");
    int count = 0;
    for (const auto& s : chain.samples) {
        if (region(s)) ++count;
    }
    RegionProbability out;
    out.value = static_cast<double>(count) / n;
    out.standard_error = std::sqrt(out.value * (1.0 - out.value) / n);
    return out;
}

}  // namespace ascan

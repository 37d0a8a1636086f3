#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "ascan/features.hpp"
#include "ascan/signal_core.hpp"

namespace ascan {

// Random-walk step sizes: the proposal variance per axis is eps * axis range,
// with eps switching from the early to the late value at switch_step.
struct ProposalSchedule {
    double eps_early = 0.02;
    double eps_late = 0.001;
    int switch_step = 100;
};

ProposalSchedule make_proposal_schedule(double eps_early, double eps_late, int switch_step);

// Gaussian log-likelihood of the measured features given model features, up
// to the additive normalization constant.
double log_likelihood(const FeatureVector& model, const FeatureVector& measured,
                      const FeatureCovariance& cov);

// log_likelihood plus the flat box prior: unchanged inside (boundary
// included), -infinity outside.
double log_posterior(const MaterialParams& params, const FeatureVector& model,
                     const FeatureVector& measured, const FeatureCovariance& cov,
                     const PriorBox& prior);

struct PosteriorChain {
    std::vector<MaterialParams> samples;  // post burn-in states, in order
    int accepted = 0;                     // over all burn_in + samples.size() steps
    int burn_in = 0;
    std::uint64_t seed = 0;
    PriorBox box{};
    ProposalSchedule schedule{};

    double acceptance_rate() const;
    bool low_acceptance() const { return acceptance_rate() < 0.02; }
    bool high_acceptance() const { return acceptance_rate() > 0.90; }
};

struct ChainOptions {
    ProposalSchedule schedule{};
    int burn_in = 100;
    int n_samples = 1000;
    std::uint64_t seed = 1;
    // When false, the current state's log-density is recomputed on every
    // step instead of being carried over. Only useful for measuring what
    // that caching is worth.
    bool cache_current = true;
};

// Random-walk Metropolis on the box, started at its midpoint. log_target is
// called for in-box points only; out-of-box proposals are rejected without
// an evaluation. A log_target that returns -infinity or throws ascan::Error
// marks its point as zero-density.
PosteriorChain run_chain(const std::function<double(const MaterialParams&)>& log_target,
                         const PriorBox& prior, const ChainOptions& options = {});

// Chain targeting the feature-space posterior of one measured scan. model
// maps parameters to model features; the usual choice evaluates the forward
// solver's windowed trace bins.
PosteriorChain run_chain(const std::function<FeatureVector(const MaterialParams&)>& model,
                         const FeatureVector& measured, const FeatureCovariance& cov,
                         const PriorBox& prior, const ChainOptions& options = {});

// Gaussian-product kernel density estimate over the box, each kernel
// truncated to the box and renormalized, so the density integrates to 1.
struct Kde2 {
    std::vector<double> b, c;     // chain points
    std::vector<double> weight;   // per-point truncation renormalizers
    double h_b = 0.0, h_c = 0.0;  // bandwidths
    PriorBox box{};

    double density(double b_at, double c_at) const;  // 0 outside the box
};

struct PosteriorSummary {
    MaterialParams mean{0.0, 1.0};
    std::array<std::array<double, 2>, 2> covariance{};
    Kde2 kde;
    bool degenerate = false;  // chain variance vanished; bandwidth floored
};

// Sample mean and covariance plus a KDE with per-axis Silverman bandwidth
// sigma * n^(-1/6).
PosteriorSummary posterior_summary(const PosteriorChain& chain);

struct RegionProbability {
    double value = 0.0;
    double standard_error = 0.0;  // binomial
};

// Fraction of post-burn-in samples inside the region.
RegionProbability region_probability(const PosteriorChain& chain,
                                     const std::function<bool(const MaterialParams&)>& region);

}  // namespace ascan

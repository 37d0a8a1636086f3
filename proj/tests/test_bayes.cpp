#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "ascan/bayes.hpp"
#include "ascan/errors.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ascan;

namespace {

PriorBox standard_box() { return make_prior_box(0.05, 0.6, 0.2, 0.25); }

// Correlated Gaussian log-density (unnormalized); truncation to the box is
// the sampler's job.
struct GaussTarget {
    double mb = 0.325, mc = 0.225;
    double sb = 0.07, sc = 0.009, rho = 0.3;

    double operator()(const MaterialParams& p) const {
        double zb = (p.b - mb) / sb;
        double zc = (p.c - mc) / sc;
        return -0.5 * (zb * zb - 2.0 * rho * zb * zc + zc * zc) / (1.0 - rho * rho);
    }
};

// Trapezoid moments of exp(logf) truncated to the box: the reference the
// chain is checked against.
struct BoxMoments {
    double mean_b, mean_c, var_b, var_c, cov_bc;
};

BoxMoments quadrature_moments(const std::function<double(const MaterialParams&)>& logf,
                              const PriorBox& box, int n = 400) {
    double hb = box.b_range() / n;
    double hc = box.c_range() / n;
    double z = 0.0, sb = 0.0, sc = 0.0, sbb = 0.0, scc = 0.0, sbc = 0.0;
    for (int i = 0; i <= n; ++i) {
        double b = box.b_min + i * hb;
        double wi = (i == 0 || i == n) ? 0.5 : 1.0;
        for (int j = 0; j <= n; ++j) {
            double c = box.c_min + j * hc;
            double wj = (j == 0 || j == n) ? 0.5 : 1.0;
            double w = wi * wj * std::exp(logf({b, c}));
            z += w;
            sb += w * b;
            sc += w * c;
            sbb += w * b * b;
            scc += w * c * c;
            sbc += w * b * c;
        }
    }
    BoxMoments m;
    m.mean_b = sb / z;
    m.mean_c = sc / z;
    m.var_b = sbb / z - m.mean_b * m.mean_b;
    m.var_c = scc / z - m.mean_c * m.mean_c;
    m.cov_bc = sbc / z - m.mean_b * m.mean_c;
    return m;
}

double kde_integral(const Kde2& kde, double b_lo, double b_hi, double c_lo, double c_hi,
                    int n = 400) {
    double hb = (b_hi - b_lo) / n;
    double hc = (c_hi - c_lo) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        double wi = (i == 0 || i == n) ? 0.5 : 1.0;
        for (int j = 0; j <= n; ++j) {
            double wj = (j == 0 || j == n) ? 0.5 : 1.0;
            acc += wi * wj * kde.density(b_lo + i * hb, c_lo + j * hc);
        }
    }
    return acc * hb * hc;
}

double kde_box_integral(const Kde2& kde, int n = 400) {
    return kde_integral(kde, kde.box.b_min, kde.box.b_max, kde.box.c_min, kde.box.c_max, n);
}

}  // namespace

TEST_SUITE("bayes") {

TEST_CASE("chain reproduces the moments of a truncated correlated Gaussian") {
    GaussTarget target;
    ChainOptions options;
    options.burn_in = 200;
    options.n_samples = 6000;
    options.seed = 314;
    PosteriorChain chain = run_chain(target, standard_box(), options);
    REQUIRE(static_cast<int>(chain.samples.size()) == options.n_samples);

    BoxMoments m = quadrature_moments(target, standard_box());
    PosteriorSummary summary = posterior_summary(chain);

    // Correlated-walk standard errors, generously padded for autocorrelation.
    CHECK(std::fabs(summary.mean.b - m.mean_b) < 0.015);
    CHECK(std::fabs(summary.mean.c - m.mean_c) < 0.002);
    CHECK(summary.covariance[0][0] == doctest::Approx(m.var_b).epsilon(0.25));
    CHECK(summary.covariance[1][1] == doctest::Approx(m.var_c).epsilon(0.25));
    CHECK(summary.covariance[0][1] == doctest::Approx(m.cov_bc).epsilon(0.5));
    CHECK(summary.covariance[0][1] > 0.0);
    CHECK_FALSE(summary.degenerate);
}

TEST_CASE("chain stays inside the box and reports acceptance") {
    GaussTarget target;
    ChainOptions options;
    options.n_samples = 2000;
    options.seed = 2;
    PriorBox box = standard_box();
    PosteriorChain chain = run_chain(target, box, options);

    for (const auto& s : chain.samples) CHECK(box.contains(s));
    CHECK(chain.accepted > 0);
    CHECK(chain.acceptance_rate() > 0.02);
    CHECK(chain.acceptance_rate() < 0.95);
    CHECK_FALSE(chain.low_acceptance());
    CHECK(chain.seed == 2);
    CHECK(chain.burn_in == 100);
}

TEST_CASE("chains with the same seed are identical, different seeds are not") {
    GaussTarget target;
    ChainOptions options;
    options.n_samples = 500;
    options.seed = 77;
    PosteriorChain a = run_chain(target, standard_box(), options);
    PosteriorChain b = run_chain(target, standard_box(), options);
    options.seed = 78;
    PosteriorChain c = run_chain(target, standard_box(), options);

    REQUIRE(a.samples.size() == b.samples.size());
    bool same = true, differs = false;
    for (size_t i = 0; i < a.samples.size(); ++i) {
        same = same && a.samples[i].b == b.samples[i].b && a.samples[i].c == b.samples[i].c;
        differs = differs || a.samples[i].b != c.samples[i].b;
    }
    CHECK(same);
    CHECK(differs);
    CHECK(a.accepted == b.accepted);
}

TEST_CASE("disabling the density cache changes timing, not the chain") {
    GaussTarget target;
    ChainOptions options;
    options.n_samples = 800;
    options.seed = 5;
    PosteriorChain cached = run_chain(target, standard_box(), options);
    options.cache_current = false;
    PosteriorChain direct = run_chain(target, standard_box(), options);

    REQUIRE(cached.samples.size() == direct.samples.size());
    for (size_t i = 0; i < cached.samples.size(); ++i) {
        CHECK(cached.samples[i].b == direct.samples[i].b);
        CHECK(cached.samples[i].c == direct.samples[i].c);
    }
    CHECK(cached.accepted == direct.accepted);
}

TEST_CASE("a throwing or NaN target acts as zero density") {
    // Left half of the box is forbidden by exception, NaN elsewhere below
    // c = 0.21: all samples must land in the allowed quadrant.
    auto target = [](const MaterialParams& p) -> double {
        if (p.b < 0.3) throw NumericalError("forbidden");
        if (p.c < 0.21) return std::numeric_limits<double>::quiet_NaN();
        return 0.0;
    };
    ChainOptions options;
    options.n_samples = 400;
    options.seed = 9;
    PosteriorChain chain = run_chain(target, standard_box(), options);
    int inside = 0;
    for (const auto& s : chain.samples) {
        if (s.b >= 0.3 && s.c >= 0.21) ++inside;
    }
    // The start (box midpoint) is allowed here, so every retained sample is.
    CHECK(inside == static_cast<int>(chain.samples.size()));
}

TEST_CASE("chain options are validated") {
    GaussTarget target;
    ChainOptions options;
    options.n_samples = 0;
    CHECK_THROWS_AS(run_chain(target, standard_box(), options), InvalidArgument);
    options.n_samples = 10;
    options.burn_in = -1;
    CHECK_THROWS_AS(run_chain(target, standard_box(), options), InvalidArgument);
    CHECK_THROWS_AS(make_proposal_schedule(0.0, 0.001, 100), InvalidArgument);
    CHECK_THROWS_AS(make_proposal_schedule(0.02, -1.0, 100), InvalidArgument);
    CHECK_THROWS_AS(make_proposal_schedule(0.02, 0.001, -1), InvalidArgument);
}

TEST_CASE("feature-space chain overload matches the explicit target") {
    // Model features linear in the parameters, diagonal covariance: the
    // posterior is the same Gaussian both ways.
    auto model = [](const MaterialParams& p) {
        FeatureVector f;
        f.bins = {1, 2, 3};
        f.phase = {p.b, p.c, 0.0};
        f.amplitude = {1.0, 1.0, 1.0};
        return f;
    };
    FeatureVector measured = model({0.3, 0.22});
    FeatureCovariance cov;
    cov.bins = {1, 2, 3};
    for (int i = 0; i < 6; ++i) cov.sigma[i][i] = 1e-3;
    cov.n_samples = 100;

    ChainOptions options;
    options.n_samples = 600;
    options.seed = 21;
    PosteriorChain via_features = run_chain(model, measured, cov, standard_box(), options);
    auto log_target = [&](const MaterialParams& p) {
        return log_likelihood(model(p), measured, cov);
    };
    PosteriorChain direct = run_chain(log_target, standard_box(), options);

    REQUIRE(via_features.samples.size() == direct.samples.size());
    for (size_t i = 0; i < direct.samples.size(); ++i) {
        CHECK(via_features.samples[i].b == direct.samples[i].b);
        CHECK(via_features.samples[i].c == direct.samples[i].c);
    }
}

TEST_CASE("likelihood validates bins and definiteness") {
    FeatureVector a, b;
    a.bins = {1, 2, 3};
    b.bins = {1, 2, 4};
    FeatureCovariance cov;
    cov.bins = {1, 2, 3};
    for (int i = 0; i < 6; ++i) cov.sigma[i][i] = 1.0;
    CHECK_THROWS_AS(log_likelihood(a, b, cov), InvalidArgument);

    b.bins = {1, 2, 3};
    CHECK(log_likelihood(a, b, cov) == 0.0);

    FeatureCovariance indef;
    indef.bins = {1, 2, 3};
    for (int i = 0; i < 6; ++i) indef.sigma[i][i] = -1.0;
    CHECK_THROWS_AS(log_likelihood(a, b, indef), NumericalError);

    PriorBox box = standard_box();
    CHECK(log_posterior({0.7, 0.22}, a, b, cov, box) ==
          -std::numeric_limits<double>::infinity());
    CHECK(log_posterior({0.3, 0.22}, a, b, cov, box) == 0.0);
}

TEST_CASE("kernel density integrates to one over the box") {
    GaussTarget target;
    ChainOptions options;
    options.n_samples = 1000;
    options.seed = 101;
    PosteriorChain chain = run_chain(target, standard_box(), options);
    PosteriorSummary summary = posterior_summary(chain);

    CHECK(kde_box_integral(summary.kde) == doctest::Approx(1.0).epsilon(0.01));
    PriorBox box = standard_box();
    CHECK(summary.kde.density(box.b_min - 1e-9, 0.22) == 0.0);
    CHECK(summary.kde.density(0.3, box.c_max + 1e-9) == 0.0);
    CHECK(summary.kde.density(0.3, 0.22) > 0.0);
}

TEST_CASE("density concentrates near the target mode") {
    // Narrow target: KDE density at the mode should dwarf a far corner.
    GaussTarget target;
    target.sb = 0.02;
    target.sc = 0.003;
    ChainOptions options;
    options.n_samples = 1500;
    options.seed = 55;
    PosteriorChain chain = run_chain(target, standard_box(), options);
    PosteriorSummary summary = posterior_summary(chain);
    CHECK(summary.kde.density(target.mb, target.mc) >
          100.0 * summary.kde.density(0.08, 0.248));
}

TEST_CASE("degenerate chains are flagged and still integrate to one") {
    PosteriorChain chain;
    chain.box = standard_box();
    chain.samples.assign(50, MaterialParams{0.3, 0.22});
    PosteriorSummary summary = posterior_summary(chain);
    CHECK(summary.degenerate);
    CHECK(summary.kde.h_b > 0.0);
    CHECK(summary.kde.h_c > 0.0);
    // The floored bandwidth is far below any whole-box quadrature step, so
    // integrate an 8-bandwidth neighborhood of the atom instead; it carries
    // all the mass.
    double local = kde_integral(summary.kde, 0.3 - 8.0 * summary.kde.h_b,
                                0.3 + 8.0 * summary.kde.h_b, 0.22 - 8.0 * summary.kde.h_c,
                                0.22 + 8.0 * summary.kde.h_c);
    CHECK(local == doctest::Approx(1.0).epsilon(0.001));

    PosteriorChain tiny;
    tiny.box = standard_box();
    tiny.samples.assign(5, MaterialParams{0.3, 0.22});
    CHECK_THROWS_AS(posterior_summary(tiny), InsufficientData);
}

TEST_CASE("region probability counts samples with a binomial error bar") {
    PosteriorChain chain;
    chain.box = standard_box();
    for (int i = 0; i < 200; ++i)
        chain.samples.push_back({i < 50 ? 0.1 : 0.5, 0.22});

    auto low_b = [](const MaterialParams& p) { return p.b < 0.3; };
    RegionProbability r = region_probability(chain, low_b);
    CHECK(r.value == 0.25);
    CHECK(r.standard_error == doctest::Approx(std::sqrt(0.25 * 0.75 / 200.0)));

    RegionProbability all = region_probability(chain, [](const MaterialParams&) { return true; });
    CHECK(all.value == 1.0);
    CHECK(all.standard_error == 0.0);

    PosteriorChain small;
    small.box = standard_box();
    small.samples.assign(99, MaterialParams{0.3, 0.22});
    CHECK_THROWS_AS(region_probability(small, low_b), InsufficientData);
}

TEST_CASE("split statistic is near one for matched chains, large for split ones") {
    // Sanity-check the test helper itself against an analytic contrast.
    GaussTarget target;
    std::vector<std::vector<double>> matched;
    for (uint64_t seed : {1u, 2u, 3u, 4u}) {
        ChainOptions options;
        options.n_samples = 1500;
        options.seed = seed;
        PosteriorChain chain = run_chain(target, standard_box(), options);
        std::vector<double> bs;
        for (const auto& s : chain.samples) bs.push_back(s.b);
        matched.push_back(std::move(bs));
    }
    CHECK(ascan_test::split_rhat(matched) < 1.05);

    std::vector<std::vector<double>> apart = matched;
    for (double& v : apart[0]) v += 0.3;
    CHECK(ascan_test::split_rhat(apart) > 1.5);
}

}  // TEST_SUITE

#include "doctest.h"
#include "fahs/horseshoe.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fahs/errors.hpp"
#include "fahs/rng.hpp"
#include "oracles.hpp"

using namespace fahs;

namespace {

GibbsConfig fixed_xi_config(double xi, std::size_t burn, std::size_t samples,
                            std::uint64_t seed) {
    GibbsConfig c;
    c.burn_in = burn;
    c.samples = samples;
    c.seed = seed;
    c.xi_mode = XiMode::fixed;
    c.xi_value = xi;
    c.sigma_mode = SigmaMode::fixed;
    c.sigma_sq_value = 1.0;
    return c;
}

// Average the posterior means of `replicas` coordinates sharing the same y.
std::vector<double> replica_means(const std::vector<double>& ys, std::size_t replicas,
                                  const GibbsConfig& config) {
    std::vector<double> stacked;
    stacked.reserve(ys.size() * replicas);
    for (double y : ys)
        for (std::size_t r = 0; r < replicas; ++r) stacked.push_back(y);
    const PosteriorSummary summary = gibbs_run(ObservationVector(stacked), config);
    std::vector<double> means(ys.size(), 0.0);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        for (std::size_t r = 0; r < replicas; ++r) means[i] += summary.beta_mean[idx++];
        means[i] /= static_cast<double>(replicas);
    }
    return means;
}

}  // namespace

TEST_CASE("quadrature oracle: two independent routes agree on frozen values") {
    // Frozen with scipy.integrate.quad piecewise over eta (third route).
    struct Case {
        double y, xi, expected;
    };
    const Case cases[] = {{4.0, 0.01, 2.014107}, {4.0, 0.05, 2.940365},
                          {2.0, 0.5, 0.775558},  {8.0, 0.01, 7.736757},
                          {1.0, 0.05, 0.036184}, {0.0, 0.5, 0.0}};
    for (const Case& c : cases) {
        CHECK(posterior_beta_mean_quadrature(c.y, c.xi) ==
              doctest::Approx(c.expected).epsilon(5e-5));
        CHECK(oracle::posterior_beta_mean(c.y, c.xi) ==
              doctest::Approx(c.expected).epsilon(5e-5));
    }
}

TEST_CASE("gibbs matches the quadrature oracle on an easy grid") {
    const std::vector<double> ys{0.0, 0.5, 1.0, 2.0, 8.0};
    for (double xi : {0.05, 0.5}) {
        const std::vector<double> means =
            replica_means(ys, 100, fixed_xi_config(xi, 500, 2000, 20240 + int(xi * 100)));
        for (std::size_t i = 0; i < ys.size(); ++i) {
            const double expected = oracle::posterior_beta_mean(ys[i], xi);
            CHECK(std::fabs(means[i] - expected) < 0.05);
        }
    }
}

TEST_CASE("pure-noise vector shrinks to zero") {
    const ObservationVector y(std::vector<double>(20, 0.0));
    const PosteriorSummary s = gibbs_run(y, fixed_xi_config(0.05, 1000, 10000, 5));
    for (double b : s.beta_mean) CHECK(std::fabs(b) <= 0.02);
}

TEST_CASE("large observations survive shrinkage") {
    const ObservationVector y(std::vector<double>(8, 10.0));
    const PosteriorSummary s = gibbs_run(y, fixed_xi_config(0.05, 1000, 5000, 6));
    for (double b : s.beta_mean) CHECK(b >= 9.0);
}

TEST_CASE("moderate observation matches quadrature within 0.05") {
    const std::vector<double> means =
        replica_means({1.0}, 200, fixed_xi_config(0.05, 1000, 5000, 7));
    CHECK(std::fabs(means[0] - oracle::posterior_beta_mean(1.0, 0.05)) < 0.05);
}

TEST_CASE("determinism: identical config gives bit-identical summaries") {
    const ObservationVector y({0.3, -1.2, 4.0, 0.0, 2.2});
    GibbsConfig c;
    c.burn_in = 200;
    c.samples = 500;
    c.seed = 99;
    c.xi_mode = XiMode::full_bayes;
    c.sigma_mode = SigmaMode::jeffreys;
    const PosteriorSummary a = gibbs_run(y, c);
    const PosteriorSummary b = gibbs_run(y, c);
    CHECK(a.beta_mean == b.beta_mean);
    CHECK(a.kappa_mean == b.kappa_mean);
    CHECK(a.xi_mean == b.xi_mean);
    CHECK(a.sigma_sq_mean == b.sigma_sq_mean);
}

TEST_CASE("posterior means shrink and preserve sign") {
    std::vector<double> ys;
    Pcg32 rng(17, 0);
    for (int i = 0; i < 60; ++i) ys.push_back(4.0 * (rng.next_double() * 2.0 - 1.0));
    const ObservationVector y(ys);
    const PosteriorSummary s = gibbs_run(y, fixed_xi_config(0.1, 500, 4000, 21));
    for (std::size_t j = 0; j < ys.size(); ++j) {
        CHECK(std::fabs(s.beta_mean[j]) <= std::fabs(ys[j]) + 0.05);
        if (std::fabs(ys[j]) > 1.0) CHECK(s.beta_mean[j] * ys[j] > 0.0);
        CHECK(s.kappa_mean[j] >= 0.0);
        CHECK(s.kappa_mean[j] <= 1.0);
    }
}

TEST_CASE("kappa decreases with |y|") {
    const std::vector<double> grid{0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
    std::vector<double> stacked;
    const std::size_t replicas = 60;
    for (double y : grid)
        for (std::size_t r = 0; r < replicas; ++r) stacked.push_back(y);
    const PosteriorSummary s =
        gibbs_run(ObservationVector(stacked), fixed_xi_config(0.05, 500, 3000, 23));
    std::vector<double> kappa(grid.size(), 0.0);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t r = 0; r < replicas; ++r) kappa[i] += s.kappa_mean[idx++];
        kappa[i] /= static_cast<double>(replicas);
    }
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) CHECK(kappa[i] > kappa[i + 1]);
}

TEST_CASE("config validation") {
    const ObservationVector y({1.0});
    GibbsConfig c;
    c.samples = 0;
    CHECK_THROWS_AS(gibbs_run(y, c), config_error);
    c.samples = 10;
    c.xi_mode = XiMode::fixed;
    c.xi_value = 0.0;
    CHECK_THROWS_AS(gibbs_run(y, c), config_error);
    c.xi_value = 0.1;
    c.sigma_mode = SigmaMode::fixed;
    c.sigma_sq_value = -1.0;
    CHECK_THROWS_AS(gibbs_run(y, c), config_error);
}

TEST_CASE("mmle: pure noise lands on the grid floor") {
    const ObservationVector y(std::vector<double>(50, 0.0));
    CHECK(mmle_xi(y) == doctest::Approx(1.0 / 50.0));
}

TEST_CASE("mmle: refinement consistency and signal case") {
    Pcg32 rng(31, 0);
    std::vector<double> ys(1000);
    for (std::size_t j = 0; j < ys.size(); ++j) {
        const bool on = j < 100;
        ys[j] = (on ? (j % 2 == 0 ? 8.0 : -8.0) : 0.0) + normal_draw(rng);
    }
    const ObservationVector y(ys);
    const double xi_hat = mmle_xi(y);
    CHECK(xi_hat >= 0.01);
    CHECK(xi_hat <= 1.0);

    // Brute-force fine grid (double resolution) as the independent check:
    // the argmax may move by at most one coarse step.
    const double lo = std::log(1.0 / 1000.0);
    double best_ll = -1e300;
    double best_xi = 0.0;
    for (int i = 0; i < 400; ++i) {
        const double xi = std::exp(lo + (0.0 - lo) * i / 399.0);
        const double ll = hs_log_marginal(y, xi);
        if (ll > best_ll) {
            best_ll = ll;
            best_xi = xi;
        }
    }
    const double coarse_step = (0.0 - lo) / 199.0;
    CHECK(std::fabs(std::log(xi_hat) - std::log(best_xi)) <= coarse_step + 1e-12);
}

TEST_CASE("hs_decision rule") {
    const ObservationVector y({5.0, -2.0, 0.0, 1.0});
    PosteriorSummary s;
    SUBCASE("no shrinkage rejects every nonzero") {
        s.beta_mean = y.values;
        const DecisionVector d = hs_decision(s, y);
        CHECK(d.reject[0]);
        CHECK(d.reject[1]);
        CHECK_FALSE(d.reject[2]);  // y = 0 never rejected
        CHECK(d.reject[3]);
    }
    SUBCASE("full shrinkage rejects nothing") {
        s.beta_mean.assign(4, 0.0);
        CHECK(hs_decision(s, y).R == 0);
    }
    SUBCASE("boundary arithmetic") {
        s.beta_mean = {2.6, 0.0, 0.0, 0.0};
        const DecisionVector d = hs_decision(s, y);
        CHECK(d.reject[0]);  // 2.6 > 2.5
        s.beta_mean = {2.5, 0.0, 0.0, 0.0};
        CHECK_FALSE(hs_decision(s, y).reject[0]);  // strict inequality
    }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>

#include "mlmc/estimator.hpp"
#include "mlmc/models/black_scholes.hpp"
#include "mlmc/models/poisson.hpp"
#include "mlmc/sampler.hpp"

using namespace mlmc;

namespace {

Hierarchy single_level(std::vector<double> values) {
    Hierarchy h;
    LevelSamples ls;
    ls.level = 0;
    for (double v : values) ls.pairs.push_back({0, v, std::nullopt});
    h.levels.push_back(std::move(ls));
    return h;
}

}  // namespace

TEST_CASE("phi evaluation", "[estimator]") {
    CHECK(phi_of(5.0, 3.0, 0.7) == 5.0);
    CHECK(phi_of(0.0, 3.0, 0.7) == Catch::Approx(10.0).epsilon(1e-14));
    for (double tau : {0.2, 0.5, 0.9}) CHECK(phi_of(1.7, 1.7, tau) == 1.7);
    CHECK_THROWS_AS(phi_of(0.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("single-level pointwise mean", "[estimator]") {
    const Hierarchy h = single_level({2.0, 4.0});
    const ThetaGrid grid(0.0, 3.0, 4);
    const auto vals = mlmc_pointwise(h, grid, 0.5);
    CHECK(vals[0] == Catch::Approx(6.0));  // mean of {4, 8} at theta = 0

    const auto mc = mc_pointwise(h.levels[0], grid, 0.5);
    for (int j = 0; j < grid.n; ++j)
        CHECK(mc[static_cast<std::size_t>(j)] == Catch::Approx(vals[static_cast<std::size_t>(j)]).margin(1e-14));
}

TEST_CASE("identical fine and coarse collapses to the level-0 estimate", "[estimator]") {
    Hierarchy h = single_level({1.0, 2.0, 3.0});
    LevelSamples l1;
    l1.level = 1;
    for (double v : {0.5, 2.5}) l1.pairs.push_back({1, v, v});
    h.levels.push_back(std::move(l1));

    const ThetaGrid grid(0.0, 4.0, 5);
    const auto with = mlmc_pointwise(h, grid, 0.7);
    Hierarchy base = single_level({1.0, 2.0, 3.0});
    const auto without = mlmc_pointwise(base, grid, 0.7);
    for (int j = 0; j < grid.n; ++j)
        CHECK(with[static_cast<std::size_t>(j)] == Catch::Approx(without[static_cast<std::size_t>(j)]).margin(1e-14));
}

TEST_CASE("nodes share identical samples", "[estimator]") {
    const auto model = std::make_shared<models::PoissonModel>();
    const Sampler sampler(model, SamplerConfig{3, 2.0});
    const Hierarchy h = grow_hierarchy(Hierarchy{}, {60, 30}, 1, sampler);

    // The 7-node grid contains the 4-node grid at even indices.
    const ThetaGrid coarse(1.5, 2.5, 4), fine(1.5, 2.5, 7);
    const auto vc = mlmc_pointwise(h, coarse, 0.7);
    const auto vf = mlmc_pointwise(h, fine, 0.7);
    for (int j = 0; j < 4; ++j)
        CHECK(vc[static_cast<std::size_t>(j)] == vf[static_cast<std::size_t>(2 * j)]);
}

TEST_CASE("pointwise estimate is monotone in each sample", "[estimator]") {
    Hierarchy h = single_level({1.0, 2.0, 3.0});
    const ThetaGrid grid(0.0, 4.0, 5);
    const auto before = mlmc_pointwise(h, grid, 0.6);
    h.levels[0].pairs[1].fine += 0.5;
    const auto after = mlmc_pointwise(h, grid, 0.6);
    for (int j = 0; j < grid.n; ++j)
        CHECK(after[static_cast<std::size_t>(j)] >= before[static_cast<std::size_t>(j)]);
}

TEST_CASE("Lipschitz bound on stored level differences", "[estimator]") {
    const auto model = std::make_shared<models::BlackScholesModel>();
    const Sampler sampler(model, SamplerConfig{8, 2.0});
    const Hierarchy h = grow_hierarchy(Hierarchy{}, {50, 50, 50}, 2, sampler);
    const ThetaGrid grid(0.5, 2.0, 6);
    const double tau = 0.7;
    for (const auto& ls : h.levels) {
        if (ls.level == 0) continue;
        for (const auto& p : ls.pairs)
            for (int j = 0; j < grid.n; ++j) {
                const double theta = grid.node(j);
                const double lhs = std::abs(phi_of(theta, p.fine, tau) - phi_of(theta, *p.coarse, tau));
                CHECK(lhs <= std::abs(p.fine - *p.coarse) / (1.0 - tau) + 1e-12);
            }
    }
}

TEST_CASE("Poisson MLMC estimate hits the reference CVaR within noise", "[estimator]") {
    const auto model = std::make_shared<models::PoissonModel>();
    const Sampler sampler(model, SamplerConfig{1312, 2.0});
    const Hierarchy h =
        grow_hierarchy(Hierarchy{}, {1000, 1000, 1000, 1000, 1000}, 4, sampler, 2);

    const double tau = 0.7, q_tau = 1.885696;
    const ThetaGrid grid(1.5, 2.5, 10);
    const auto est = build_estimate(h, grid, tau);

    // Standard error of the telescoped estimate at q_tau.
    double se_sq = 0.0;
    for (const auto& ls : h.levels) {
        double mean = 0.0, ss = 0.0;
        std::vector<double> contrib;
        contrib.reserve(ls.count());
        for (const auto& p : ls.pairs) {
            const double c = ls.level == 0
                                 ? phi_of(q_tau, p.fine, tau)
                                 : phi_of(q_tau, p.fine, tau) - phi_of(q_tau, *p.coarse, tau);
            contrib.push_back(c);
            mean += c;
        }
        mean /= static_cast<double>(ls.count());
        for (double c : contrib) ss += (c - mean) * (c - mean);
        se_sq += ss / static_cast<double>(ls.count() - 1) / static_cast<double>(ls.count());
    }
    const double se = std::sqrt(se_sq);
    // Slack covers the level-4 discretization bias on top of sampling noise.
    CHECK(std::abs(est.curve.eval(0, q_tau) - 2.578204) <= 3.0 * se + 2e-3);

    // Curve derivative is nearly stationary at the exact VaR.
    CHECK(std::abs(est.curve.eval(1, q_tau)) <= 5.0 * se);
}

TEST_CASE("single-level MC estimate at a fine level", "[estimator]") {
    const auto model = std::make_shared<models::PoissonModel>();
    const Sampler sampler(model, SamplerConfig{5, 2.0});
    const Hierarchy h = grow_hierarchy(Hierarchy{}, {1, 1, 1, 1, 1, 10000}, 5, sampler, 2);

    const double tau = 0.7, q_tau = 1.885696;
    const ThetaGrid grid(1.5, 2.5, 10);
    const auto vals = mc_pointwise(h.levels[5], grid, tau);
    const auto curve = fit_spline(grid, vals);

    double mean = 0.0, ss = 0.0;
    for (const auto& p : h.levels[5].pairs) mean += phi_of(q_tau, p.fine, tau);
    mean /= static_cast<double>(h.levels[5].count());
    for (const auto& p : h.levels[5].pairs) {
        const double c = phi_of(q_tau, p.fine, tau) - mean;
        ss += c * c;
    }
    const double se = std::sqrt(ss / 9999.0 / 10000.0);
    CHECK(std::abs(curve.eval(0, q_tau) - 2.578204) <= 3.0 * se + 1e-3);
}

TEST_CASE("Black-Scholes CDF estimate is monotone up to noise", "[estimator]") {
    const auto model = std::make_shared<models::BlackScholesModel>();
    const Sampler sampler(model, SamplerConfig{21, 2.0});
    const Hierarchy h = grow_hierarchy(Hierarchy{}, {20000, 8000, 3000}, 2, sampler, 2);
    const auto est = build_estimate(h, ThetaGrid(0.5, 2.0, 10), 0.7);
    for (int i = 0; i + 1 < 60; ++i) {
        const double a = 0.5 + 1.5 * i / 59.0, b = 0.5 + 1.5 * (i + 1) / 59.0;
        CHECK(est.curve.eval(1, b) - est.curve.eval(1, a) >= -0.05);
    }
}

TEST_CASE("input validation", "[estimator]") {
    Hierarchy h = single_level({});
    const ThetaGrid grid(0.0, 1.0, 4);
    CHECK_THROWS_AS(mlmc_pointwise(h, grid, 0.5), std::invalid_argument);
    LevelSamples empty;
    CHECK_THROWS_AS(mc_pointwise(empty, grid, 0.5), std::invalid_argument);
    Hierarchy ok = single_level({1.0});
    CHECK_THROWS_AS(mlmc_pointwise(ok, grid, 1.5), std::invalid_argument);
}

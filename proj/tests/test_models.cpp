#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mlmc/models/black_scholes.hpp"
#include "mlmc/models/poisson.hpp"
#include "mlmc/rng.hpp"
#include "support/oracles.hpp"

using mlmc::RngStream;
using mlmc::models::BlackScholesModel;
using mlmc::models::PoissonModel;

namespace {

const PoissonModel& poisson() {
    static const PoissonModel model;
    return model;
}

}  // namespace

TEST_CASE("level-0 factor matches a dense solve of the 9-unknown system", "[models][poisson]") {
    // Independent oracle: assemble the 3x3-interior five-point system densely.
    const int m = 3;
    const double h = 0.25;
    std::vector<double> a(81, 0.0), b(9);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            const int row = j * m + i;
            a[row * 9 + row] = 4.0;
            if (i > 0) a[row * 9 + (row - 1)] = -1.0;
            if (i < m - 1) a[row * 9 + (row + 1)] = -1.0;
            if (j > 0) a[row * 9 + (row - m)] = -1.0;
            if (j < m - 1) a[row * 9 + (row + m)] = -1.0;
            const double x = (i + 1) * h, y = (j + 1) * h;
            b[row] = h * h * 432.0 * (x * (1.0 - x) + y * (1.0 - y));
        }
    const auto u = oracles::solve_dense(a, b, 9);
    double q0 = 0.0;
    for (double v : u) q0 += v;
    q0 *= h * h;

    CHECK(poisson().factor(0) == Catch::Approx(q0).margin(1e-9));
    CHECK(poisson().factor(0) == Catch::Approx(5.2734375).margin(1e-9));  // regression pin
}

TEST_CASE("level factors approach 6 at second order", "[models][poisson]") {
    std::vector<double> err;
    for (int l = 0; l <= 5; ++l) err.push_back(std::abs(poisson().factor(l) - 6.0));
    for (int l = 0; l < 5; ++l) CHECK(err[l + 1] < err[l]);
    for (int l = 1; l <= 4; ++l) {
        const double ratio = err[l] / err[l + 1];
        INFO("l=" << l << " ratio=" << ratio);
        CHECK(ratio > 3.5);
        CHECK(ratio < 4.5);
    }
}

TEST_CASE("pairs are linear in the random input", "[models][poisson]") {
    const auto zero = poisson().pair_for(2, 0.0);
    CHECK(zero.fine == 0.0);
    CHECK(zero.coarse.value() == 0.0);

    const auto unit = poisson().pair_for(0, 1.0);
    CHECK(unit.fine == Catch::Approx(poisson().factor(0)));
    CHECK_FALSE(unit.coarse.has_value());

    const auto one = poisson().pair_for(3, 0.37);
    const auto two = poisson().pair_for(3, 0.74);
    CHECK(two.fine == Catch::Approx(2.0 * one.fine).epsilon(1e-14));
    CHECK(two.coarse.value() == Catch::Approx(2.0 * one.coarse.value()).epsilon(1e-14));
}

TEST_CASE("Beta(2,6) sampling", "[models][poisson]") {
    RngStream rng(2024, 0, 0);
    const int n = 100000;
    double mean = 0.0;
    int below_quarter = 0;
    for (int i = 0; i < n; ++i) {
        const double xi = mlmc::models::beta26_sample(rng);
        REQUIRE(xi > 0.0);
        REQUIRE(xi < 1.0);
        mean += xi;
        if (xi <= 0.25) ++below_quarter;
    }
    mean /= n;
    CHECK(mean == Catch::Approx(0.25).margin(0.005));
    CHECK(static_cast<double>(below_quarter) / n ==
          Catch::Approx(oracles::beta26_cdf(0.25)).margin(0.01));
}

TEST_CASE("exact parametric expectation of the Poisson QoI", "[models][poisson]") {
    CHECK(PoissonModel::phi_exact(6.0, 0.3) == 6.0);
    CHECK(PoissonModel::phi_exact(6.0, 0.9) == 6.0);
    CHECK(PoissonModel::phi_exact(1.885696, 0.7) == Catch::Approx(2.578204).margin(1e-5));
    CHECK(PoissonModel::phi_exact_deriv(1.885696, 0.7, 1) == Catch::Approx(0.0).margin(1e-5));
    CHECK_THROWS_AS(PoissonModel::phi_exact(-0.1, 0.7), std::domain_error);
    CHECK_THROWS_AS(PoissonModel::phi_exact(6.1, 0.7), std::domain_error);

    // Quadrature cross-check of the tail integral behind the closed form.
    const double theta = 1.7, tau = 0.7;
    const double tail = oracles::integrate(
        [&](double q) { return (q - theta) * 42.0 / 6.0 * std::pow(1.0 - q / 6.0, 5.0) * (q / 6.0); },
        theta, 6.0, 1e-12);
    CHECK(PoissonModel::phi_exact(theta, tau) ==
          Catch::Approx(theta + tail / (1.0 - tau)).epsilon(1e-9));
}

TEST_CASE("Poisson exact VaR/CVaR reference values", "[models][poisson]") {
    const PoissonModel& model = poisson();
    const double rows[4][3] = {{0.6, 1.611077, 2.369803},
                               {0.7, 1.885696, 2.578204},
                               {0.8, 2.225169, 2.843327},
                               {0.9, 2.715390, 3.236473}};
    for (const auto& row : rows) {
        CHECK(model.exact_var(row[0]) == Catch::Approx(row[1]).margin(1e-5));
        CHECK(model.exact_cvar(row[0]) == Catch::Approx(row[2]).margin(1e-5));
    }
}

TEST_CASE("Poisson level-exact parametric expectation", "[models][poisson]") {
    // Monte Carlo sanity check of the closed-form level expectation.
    const int level = 2;
    const double tau = 0.7, theta = 2.0;
    RngStream rng(7, 1, 1);
    double acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double q = poisson().factor(level) * mlmc::models::beta26_sample(rng);
        acc += theta + std::max(q - theta, 0.0) / (1.0 - tau);
    }
    CHECK(acc / n == Catch::Approx(poisson().phi_level_exact(level, theta, tau)).margin(0.02));
}

TEST_CASE("drift-only paths compound on both grids", "[models][bs]") {
    const BlackScholesModel model;
    for (int level : {0, 1, 3}) {
        const std::vector<double> zeros(static_cast<std::size_t>(model.fine_steps(level)), 0.0);
        const auto [fine, coarse] = model.terminal_pair(level, zeros);
        const int steps = model.fine_steps(level);
        const double dt = model.maturity() / steps;
        CHECK(fine == Catch::Approx(10.0 * std::pow(1.0 + 0.05 * dt, steps)).epsilon(1e-13));
        if (level >= 1)
            CHECK(coarse ==
                  Catch::Approx(10.0 * std::pow(1.0 + 0.05 * 2.0 * dt, steps / 2)).epsilon(1e-13));
    }
}

TEST_CASE("zero strike, zero rate payoff equals the terminal value", "[models][bs]") {
    const BlackScholesModel model(0.0, 0.2, 1.0, 0.0, 10.0, 4);
    RngStream rng(5, 2, 9);
    for (int i = 0; i < 200; ++i) {
        const auto pair = model.sample_pair(1, rng);
        CHECK(pair.fine >= 0.0);
        CHECK(pair.coarse.value() >= 0.0);
    }
}

TEST_CASE("coupled level differences shrink with refinement", "[models][bs]") {
    const BlackScholesModel model;
    RngStream rng(11, 3, 3);
    std::vector<double> mean_abs, abs_mean;
    for (int level = 1; level <= 5; ++level) {
        double acc = 0.0, acc_signed = 0.0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) {
            const auto pair = model.sample_pair(level, rng);
            acc += std::abs(pair.fine - pair.coarse.value());
            acc_signed += pair.fine - pair.coarse.value();
        }
        mean_abs.push_back(acc / n);
        abs_mean.push_back(std::abs(acc_signed / n));
    }
    for (std::size_t l = 0; l + 1 < mean_abs.size(); ++l) CHECK(mean_abs[l + 1] < mean_abs[l]);
    CHECK(abs_mean.back() < abs_mean.front());
}

TEST_CASE("Black-Scholes exact CDF and reference values", "[models][bs]") {
    const BlackScholesModel model;
    CHECK(model.exact_cdf(-0.5) == 0.0);
    CHECK(model.exact_cdf(1e9) == Catch::Approx(1.0).margin(1e-12));

    const double rows[4][3] = {{0.6, 0.799151, 2.455898},
                               {0.7, 1.373571, 2.914953},
                               {0.8, 2.086595, 3.515684},
                               {0.9, 3.153379, 4.460298}};
    for (const auto& row : rows) {
        CHECK(model.exact_var(row[0]) == Catch::Approx(row[1]).margin(1e-5));
        CHECK(model.exact_cvar(row[0]) == Catch::Approx(row[2]).margin(1e-5));
    }

    // tau below the atom mass F(0) has no positive quantile.
    CHECK_THROWS_AS(model.exact_var(0.4), std::domain_error);
}

TEST_CASE("theoretical costs grow geometrically", "[models]") {
    const BlackScholesModel bs;
    CHECK(bs.theoretical_cost(0) == 4.0);
    CHECK(bs.theoretical_cost(1) == 12.0);
    CHECK(bs.theoretical_cost(2) == 24.0);
    CHECK(poisson().theoretical_cost(0) == 9.0);
    CHECK(poisson().theoretical_cost(1) == 64.0);
}

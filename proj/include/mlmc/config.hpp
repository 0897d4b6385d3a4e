#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "mlmc/risk.hpp"

namespace mlmc {

enum class CostModel { theoretical, measured };

// Full run configuration shared by the CMLMC driver and the CLI front end.
struct CmlmcConfig {
    std::string model_name = "poisson";

    // Model parameters (only those of the selected model are used).
    double poisson_c = 432.0;
    double bs_r = 0.05;
    double bs_sigma = 0.2;
    double bs_maturity = 1.0;
    double bs_strike = 10.0;
    double bs_spot = 10.0;
    int bs_steps0 = 4;

    double tau = 0.7;
    double theta_min = 0.0;
    double theta_max = 1.0;
    StatKind statistic = StatKind::cvar;

    double eps = 0.1;
    double w_interp = 0.1;
    double w_bias = 0.3;
    double w_stat = 0.6;

    int d = 2;
    double lambda = 1.5;
    double kappa = 1.1;
    int iteration_cap = 25;
    int level_cap = 10;

    int screening_levels = 3;
    std::size_t screening_samples = 25;

    std::uint64_t seed = 0;
    std::size_t bootstrap_initial = 100;
    std::size_t bootstrap_cap = 12800;
    int n_fine = 1000;
    CostModel cost_model = CostModel::theoretical;
    int threads = 1;

    void validate() const;
};

// Split of the squared tolerance over the three error sources.
struct ToleranceBudget {
    ToleranceBudget(double eps, double w_i, double w_b, double w_s);

    double eps;
    double w_i, w_b, w_s;

    double eps_i_sq() const { return w_i * eps * eps / 3.0; }
    double eps_b_sq() const { return w_b * eps * eps / 3.0; }
    double eps_s_sq() const { return w_s * eps * eps / 3.0; }
};

}  // namespace mlmc

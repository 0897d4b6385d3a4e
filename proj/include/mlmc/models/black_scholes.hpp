#pragma once

#include <span>
#include <utility>

#include "mlmc/models/model.hpp"

namespace mlmc::models {

// Geometric Brownian motion dS = r S dt + sigma S dW discretised with
// Euler-Maruyama on nested uniform time grids, dt_l = (T / steps0) 2^-l.
// The QoI is the discounted European call payoff e^{-rT} (S(T) - K)^+.
// The coarse path at level l reuses the fine Brownian increments summed
// pairwise, so the two payoffs share the same Brownian path.
class BlackScholesModel final : public Model {
public:
    BlackScholesModel(double r = 0.05, double sigma = 0.2, double maturity = 1.0,
                      double strike = 10.0, double spot = 10.0, int steps0 = 4);

    const std::string& name() const override;
    CorrelatedPair sample_pair(int level, RngStream& rng) const override;
    double theoretical_cost(int level) const override;  // fine + coarse time steps
    int level_cap() const override { return 16; }

    bool has_exact_reference() const override { return true; }
    double exact_var(double tau) const override;
    double exact_cvar(double tau) const override;

    // Terminal values (fine, coarse) driven by the given standard normal
    // increments; normals.size() must equal the fine step count. The coarse
    // entry is meaningful for level >= 1 only.
    std::pair<double, double> terminal_pair(int level, std::span<const double> normals) const;

    double payoff(double terminal) const;
    int fine_steps(int level) const { return steps0_ << level; }

    // Closed-form CDF of the discounted payoff (0 for theta < 0).
    double exact_cdf(double theta) const;

    // Exact parametric expectation theta + E[(Q - theta)^+] / (1 - tau),
    // by adaptive quadrature of the tail integral; used as a study oracle.
    double exact_phi(double theta, double tau) const;

    double r() const { return r_; }
    double sigma() const { return sigma_; }
    double maturity() const { return maturity_; }
    double strike() const { return strike_; }
    double spot() const { return spot_; }

private:
    double tail_integral(double q) const;  // E[(Q - q)^+]

    double r_, sigma_, maturity_, strike_, spot_;
    int steps0_;
};

}  // namespace mlmc::models

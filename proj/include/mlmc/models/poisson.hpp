#pragma once

#include <mutex>
#include <optional>
#include <vector>

#include "mlmc/models/model.hpp"

namespace mlmc::models {

// Sample of the Beta(2,6) input: ratio of Gamma(2,1) and Gamma(2,1)+Gamma(6,1).
double beta26_sample(RngStream& rng);

// 2D random Poisson problem -Lap(u) = f on the unit square with homogeneous
// Dirichlet conditions and forcing f = -C xi (x1^2 + x2^2 - x1 - x2),
// xi ~ Beta(2,6). The QoI is the spatial average of u, which is linear in
// xi: Q_l = q_l xi with a per-level factor q_l solved once and cached.
class PoissonModel final : public Model {
public:
    explicit PoissonModel(double forcing_c = 432.0);

    const std::string& name() const override;
    CorrelatedPair sample_pair(int level, RngStream& rng) const override;
    double theoretical_cost(int level) const override;  // (5 * 2^l - 2)^2
    int level_cap() const override { return 10; }

    bool has_exact_reference() const override { return true; }
    double exact_var(double tau) const override;
    double exact_cvar(double tau) const override;

    double forcing_c() const { return forcing_c_; }

    // Level factor q_l from the five-point-stencil solve at xi = 1.
    double factor(int level) const;

    // (q_l xi, q_{l-1} xi); coarse omitted at level 0.
    CorrelatedPair pair_for(int level, double xi) const;

    // Closed forms for the continuum QoI Q = 6 xi (valid for C = 432).
    // phi_exact requires theta in [0, 6]; derivative orders m <= 4.
    static double phi_exact(double theta, double tau);
    static double phi_exact_deriv(double theta, double tau, int m);
    static double cdf_exact(double theta);

    // Level-l counterparts based on the cached factor q_l, m <= 2.
    double phi_level_exact(int level, double theta, double tau, int m = 0) const;

private:
    double solve_factor(int level) const;

    double forcing_c_;
    mutable std::mutex mutex_;
    mutable std::vector<std::optional<double>> factors_;
};

}  // namespace mlmc::models

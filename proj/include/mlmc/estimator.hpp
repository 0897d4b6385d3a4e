#pragma once

#include <vector>

#include "mlmc/hierarchy.hpp"
#include "mlmc/spline.hpp"

namespace mlmc {

// phi(theta, q) = theta + (q - theta)^+ / (1 - tau).
double phi_of(double theta, double q, double tau);

// Pointwise MLMC estimates of Phi at every grid node; the same samples feed
// every node. Throws on an empty level.
std::vector<double> mlmc_pointwise(const Hierarchy& h, const ThetaGrid& grid, double tau);

// Single-level Monte Carlo counterpart, used by the cost-comparison studies.
std::vector<double> mc_pointwise(const LevelSamples& samples, const ThetaGrid& grid, double tau);

// Pointwise estimates together with their spline interpolant; curve
// derivative queries give the estimators of Phi^(m).
struct PhiEstimate {
    ThetaGrid grid;
    double tau;
    std::vector<double> pointwise;
    SplineCurve curve;
    int max_level;
    std::vector<std::size_t> level_counts;
};

PhiEstimate build_estimate(const Hierarchy& h, const ThetaGrid& grid, double tau);

}  // namespace mlmc

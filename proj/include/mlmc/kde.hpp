#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mlmc/hierarchy.hpp"
#include "mlmc/spline.hpp"

namespace mlmc {

// Gaussian kernel mixture with one kernel per sample value.
struct KdeModel {
    KdeModel(std::vector<double> centers_, double bandwidth_);

    std::vector<double> centers;
    double bandwidth;
};

// Scott's rule delta = sigma_hat * N^{-1/5} with the unbiased standard
// deviation. Throws on N < 2 or zero variance.
double scott_bandwidth(std::span<const double> samples);

// Closed form of int phi(theta, q) p_kde(q) dq for phi = theta + (q-theta)^+/(1-tau):
//   theta + 1/((1-tau) N) sum_i [(mu_i - theta) G(z_i) + delta g(z_i)],
// with z_i = (mu_i - theta)/delta, G the standard normal CDF and g its density.
double smoothed_phi(double theta, const KdeModel& model, double tau);

// Bivariate product-kernel expectation of phi(theta, Q_l) - phi(theta, Q_{l-1})
// over the paired samples; separates into the difference of two univariate
// smoothed expectations. All pairs must carry a coarse value (level >= 1).
double smoothed_diff(double theta, std::span<const CorrelatedPair> pairs, double delta_fine,
                     double delta_coarse, double tau);

// Max absolute second-order central fourth difference of the given values on
// a uniform grid with the given spacing; values.size() >= 7.
double fourth_diff_sup(std::span<const double> values, double spacing);

// As above for an arbitrary function evaluated on an n_fine-point grid on the
// interval of `grid` (only the interval matters, not the node count).
double fourth_diff_sup(const std::function<double(double)>& f, const ThetaGrid& grid, int n_fine);

// || Upsilon^(4) ||_inf estimate: smoothed_phi of the given samples (Scott
// bandwidth) evaluated on an n_fine grid, differentiated by the central
// 4th-difference stencil, maximised over interior points.
double fourth_deriv_norm(std::span<const double> samples, const ThetaGrid& grid, double tau,
                         int n_fine = 1000);

}  // namespace mlmc

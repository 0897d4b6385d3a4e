#include "mlmc/estimator.hpp"

#include <algorithm>
#include <stdexcept>

namespace mlmc {

double phi_of(double theta, double q, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("phi_of: tau must be in (0,1)");
    return theta + std::max(q - theta, 0.0) / (1.0 - tau);
}

namespace {

// Adds the per-level sample mean of the phi contribution to acc, one
// streaming pass over the samples.
void accumulate_level(const LevelSamples& ls, const ThetaGrid& grid, double tau,
                      std::vector<double>& acc) {
    if (ls.pairs.empty()) throw std::invalid_argument("mlmc_pointwise: empty level");
    const double lip = 1.0 / (1.0 - tau);
    const int n = grid.n;
    std::vector<double> sums(static_cast<std::size_t>(n), 0.0);
    if (ls.level == 0) {
        for (const auto& p : ls.pairs)
            for (int j = 0; j < n; ++j) {
                const double theta = grid.node(j);
                sums[static_cast<std::size_t>(j)] += theta + std::max(p.fine - theta, 0.0) * lip;
            }
    } else {
        for (const auto& p : ls.pairs) {
            if (!p.coarse) throw std::invalid_argument("mlmc_pointwise: missing coarse value");
            for (int j = 0; j < n; ++j) {
                const double theta = grid.node(j);
                sums[static_cast<std::size_t>(j)] +=
                    (std::max(p.fine - theta, 0.0) - std::max(*p.coarse - theta, 0.0)) * lip;
            }
        }
    }
    const double inv_n = 1.0 / static_cast<double>(ls.pairs.size());
    for (int j = 0; j < n; ++j) acc[static_cast<std::size_t>(j)] += sums[static_cast<std::size_t>(j)] * inv_n;
}

}  // namespace

std::vector<double> mlmc_pointwise(const Hierarchy& h, const ThetaGrid& grid, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("mlmc_pointwise: tau must be in (0,1)");
    if (h.empty()) throw std::invalid_argument("mlmc_pointwise: empty hierarchy");
    std::vector<double> acc(static_cast<std::size_t>(grid.n), 0.0);
    for (const auto& ls : h.levels) accumulate_level(ls, grid, tau, acc);
    return acc;
}

std::vector<double> mc_pointwise(const LevelSamples& samples, const ThetaGrid& grid, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("mc_pointwise: tau must be in (0,1)");
    if (samples.pairs.empty()) throw std::invalid_argument("mc_pointwise: empty samples");
    std::vector<double> acc(static_cast<std::size_t>(grid.n), 0.0);
    for (const auto& p : samples.pairs)
        for (int j = 0; j < grid.n; ++j)
            acc[static_cast<std::size_t>(j)] += phi_of(grid.node(j), p.fine, tau);
    for (auto& v : acc) v /= static_cast<double>(samples.pairs.size());
    return acc;
}

PhiEstimate build_estimate(const Hierarchy& h, const ThetaGrid& grid, double tau) {
    std::vector<double> pointwise = mlmc_pointwise(h, grid, tau);
    SplineCurve curve = fit_spline(grid, pointwise);
    return PhiEstimate{grid, tau, std::move(pointwise), std::move(curve), h.max_level(), h.counts()};
}

}  // namespace mlmc

#include "mlmc/kde.hpp"

#include <cmath>
#include <stdexcept>

namespace mlmc {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }
double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// E[(X - theta)^+] for X ~ N(mu, delta^2).
double gaussian_ramp(double theta, double mu, double delta) {
    const double z = (mu - theta) / delta;
    return (mu - theta) * normal_cdf(z) + delta * normal_pdf(z);
}

}  // namespace

KdeModel::KdeModel(std::vector<double> centers_, double bandwidth_)
    : centers(std::move(centers_)), bandwidth(bandwidth_) {
    if (centers.empty()) throw std::invalid_argument("KdeModel: centers must be non-empty");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("KdeModel: bandwidth must be > 0");
}

double scott_bandwidth(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("scott_bandwidth: need at least 2 samples");
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double sigma = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sigma > 0.0))
        throw std::invalid_argument("scott_bandwidth: degenerate sample (zero variance)");
    return sigma * std::pow(static_cast<double>(n), -0.2);
}

double smoothed_phi(double theta, const KdeModel& model, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("smoothed_phi: tau must be in (0,1)");
    double acc = 0.0;
    for (double mu : model.centers) acc += gaussian_ramp(theta, mu, model.bandwidth);
    return theta + acc / ((1.0 - tau) * static_cast<double>(model.centers.size()));
}

double smoothed_diff(double theta, std::span<const CorrelatedPair> pairs, double delta_fine,
                     double delta_coarse, double tau) {
    if (pairs.empty()) throw std::invalid_argument("smoothed_diff: empty pairs");
    if (!(delta_fine > 0.0 && delta_coarse > 0.0))
        throw std::invalid_argument("smoothed_diff: bandwidths must be > 0");
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("smoothed_diff: tau must be in (0,1)");
    double acc = 0.0;
    for (const auto& p : pairs) {
        if (!p.coarse) throw std::invalid_argument("smoothed_diff: pairs must have level >= 1");
        acc += gaussian_ramp(theta, p.fine, delta_fine) - gaussian_ramp(theta, *p.coarse, delta_coarse);
    }
    return acc / ((1.0 - tau) * static_cast<double>(pairs.size()));
}

double fourth_diff_sup(std::span<const double> values, double spacing) {
    if (values.size() < 7)
        throw std::invalid_argument("fourth_diff_sup: need at least 7 grid values");
    const double h4 = spacing * spacing * spacing * spacing;
    double best = 0.0;
    for (std::size_t i = 2; i + 2 < values.size(); ++i) {
        const double stencil =
            values[i - 2] - 4.0 * values[i - 1] + 6.0 * values[i] - 4.0 * values[i + 1] + values[i + 2];
        best = std::max(best, std::abs(stencil / h4));
    }
    return best;
}

double fourth_diff_sup(const std::function<double(double)>& f, const ThetaGrid& grid, int n_fine) {
    if (n_fine < 7) throw std::invalid_argument("fourth_diff_sup: need n_fine >= 7");
    std::vector<double> values(static_cast<std::size_t>(n_fine));
    for (int i = 0; i < n_fine; ++i) {
        const double w = static_cast<double>(i) / (n_fine - 1);
        values[static_cast<std::size_t>(i)] = f((1.0 - w) * grid.theta_min + w * grid.theta_max);
    }
    return fourth_diff_sup(values, grid.length() / (n_fine - 1));
}

double fourth_deriv_norm(std::span<const double> samples, const ThetaGrid& grid, double tau,
                         int n_fine) {
    const KdeModel model(std::vector<double>(samples.begin(), samples.end()),
                         scott_bandwidth(samples));
    return fourth_diff_sup([&](double theta) { return smoothed_phi(theta, model, tau); }, grid,
                           n_fine);
}

}  // namespace mlmc

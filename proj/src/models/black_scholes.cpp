#include "mlmc/models/black_scholes.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mlmc::models {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double adaptive_simpson(const auto& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const auto& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 52);
}

}  // namespace

BlackScholesModel::BlackScholesModel(double r, double sigma, double maturity, double strike,
                                     double spot, int steps0)
    : r_(r), sigma_(sigma), maturity_(maturity), strike_(strike), spot_(spot), steps0_(steps0) {
    if (r_ < 0.0 || sigma_ <= 0.0 || maturity_ <= 0.0 || strike_ < 0.0 || spot_ <= 0.0)
        throw std::invalid_argument("BlackScholesModel: parameters out of range");
    if (steps0_ < 2 || steps0_ % 2 != 0)
        throw std::invalid_argument("BlackScholesModel: steps0 must be a positive even count");
}

const std::string& BlackScholesModel::name() const {
    static const std::string n = "black_scholes";
    return n;
}

double BlackScholesModel::theoretical_cost(int level) const {
    const double fine = static_cast<double>(fine_steps(level));
    return level >= 1 ? 1.5 * fine : fine;
}

double BlackScholesModel::payoff(double terminal) const {
    return std::exp(-r_ * maturity_) * std::max(terminal - strike_, 0.0);
}

std::pair<double, double> BlackScholesModel::terminal_pair(int level,
                                                           std::span<const double> normals) const {
    const int steps = fine_steps(level);
    if (static_cast<int>(normals.size()) != steps)
        throw std::invalid_argument("terminal_pair: one normal increment per fine step required");
    const double dt = maturity_ / steps;
    const double sq_dt = std::sqrt(dt);

    double s_fine = spot_;
    for (int i = 0; i < steps; ++i)
        s_fine += r_ * dt * s_fine + sigma_ * s_fine * sq_dt * normals[i];

    double s_coarse = spot_;
    if (level >= 1) {
        const double dtc = 2.0 * dt;
        for (int i = 0; i < steps; i += 2) {
            const double dw = sq_dt * (normals[i] + normals[i + 1]);
            s_coarse += r_ * dtc * s_coarse + sigma_ * s_coarse * dw;
        }
    }
    return {s_fine, s_coarse};
}

CorrelatedPair BlackScholesModel::sample_pair(int level, RngStream& rng) const {
    std::vector<double> normals(static_cast<std::size_t>(fine_steps(level)));
    for (auto& z : normals) z = rng.normal();
    const auto [s_fine, s_coarse] = terminal_pair(level, normals);

    CorrelatedPair pair;
    pair.level = level;
    pair.fine = payoff(s_fine);
    if (level >= 1) pair.coarse = payoff(s_coarse);
    return pair;
}

double BlackScholesModel::exact_cdf(double theta) const {
    if (theta < 0.0) return 0.0;
    const double s_level = strike_ + std::exp(r_ * maturity_) * theta;
    const double z = (std::log(s_level) - std::log(spot_) - (r_ - 0.5 * sigma_ * sigma_) * maturity_) /
                     (sigma_ * std::sqrt(maturity_));
    return normal_cdf(z);
}

double BlackScholesModel::exact_var(double tau) const {
    if (tau <= 0.0 || tau >= 1.0) throw std::invalid_argument("exact_var: tau must be in (0,1)");
    if (tau <= exact_cdf(0.0))
        throw std::domain_error("exact_var: quantile sits on the payoff atom at zero");
    double lo = 0.0, hi = 1.0;
    while (exact_cdf(hi) < tau) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (exact_cdf(mid) < tau ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double BlackScholesModel::tail_integral(double q) const {
    // E[(Q - q)^+] = int_q^inf (1 - F) dt, truncated where the lognormal tail
    // contributes less than ~1e-21.
    const double sq_t = std::sqrt(maturity_);
    const double s_hi = spot_ * std::exp((r_ - 0.5 * sigma_ * sigma_) * maturity_ + 10.0 * sigma_ * sq_t);
    const double q_hi = std::exp(-r_ * maturity_) * (s_hi - strike_);
    if (q >= q_hi) return 0.0;
    auto integrand = [&](double t) { return 1.0 - exact_cdf(t); };
    return integrate(integrand, q, q_hi, 1e-10);
}

double BlackScholesModel::exact_cvar(double tau) const {
    const double q = exact_var(tau);
    return q + tail_integral(q) / (1.0 - tau);
}

double BlackScholesModel::exact_phi(double theta, double tau) const {
    if (theta < 0.0) return theta + (tail_integral(0.0) - theta) / (1.0 - tau);
    return theta + tail_integral(theta) / (1.0 - tau);
}

}  // namespace mlmc::models

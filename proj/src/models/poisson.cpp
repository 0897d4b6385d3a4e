#include "mlmc/models/poisson.hpp"

#include <cmath>
#include <stdexcept>

namespace mlmc::models {

namespace {

constexpr double kPhiDenom = 373248.0;  // 72 * 6^6, from the Beta(2,6) tail integral

// E[(6 xi - s)^+] for xi ~ Beta(2,6), valid on s in [0, 6], and derivatives.
double tail_expectation(double s, int m) {
    const double u = s - 6.0;
    switch (m) {
        case 0: return -std::pow(u, 7) * (s + 2.0) / kPhiDenom;
        case 1: return -8.0 * std::pow(u, 6) * (s + 1.0) / kPhiDenom;
        case 2: return -56.0 * s * std::pow(u, 5) / kPhiDenom;
        case 3: return -336.0 * std::pow(u, 4) * (s - 1.0) / kPhiDenom;
        case 4: return -1680.0 * std::pow(u, 3) * (s - 2.0) / kPhiDenom;
        default: throw std::invalid_argument("tail_expectation: m must be <= 4");
    }
}

}  // namespace

double beta26_sample(RngStream& rng) {
    double g2 = 0.0;
    for (int i = 0; i < 2; ++i) g2 += rng.exponential();
    double g6 = 0.0;
    for (int i = 0; i < 6; ++i) g6 += rng.exponential();
    return g2 / (g2 + g6);
}

PoissonModel::PoissonModel(double forcing_c)
    : forcing_c_(forcing_c), factors_(static_cast<std::size_t>(level_cap()) + 1) {
    if (forcing_c_ <= 0.0) throw std::invalid_argument("PoissonModel: forcing constant must be > 0");
}

const std::string& PoissonModel::name() const {
    static const std::string n = "poisson";
    return n;
}

double PoissonModel::theoretical_cost(int level) const {
    const double m = 5.0 * std::ldexp(1.0, level) - 2.0;
    return m * m;
}

CorrelatedPair PoissonModel::sample_pair(int level, RngStream& rng) const {
    return pair_for(level, beta26_sample(rng));
}

CorrelatedPair PoissonModel::pair_for(int level, double xi) const {
    CorrelatedPair pair;
    pair.level = level;
    pair.fine = factor(level) * xi;
    if (level >= 1) pair.coarse = factor(level - 1) * xi;
    return pair;
}

double PoissonModel::factor(int level) const {
    if (level < 0 || level > level_cap())
        throw std::invalid_argument("PoissonModel: level out of range");
    std::lock_guard lock(mutex_);
    auto& slot = factors_[static_cast<std::size_t>(level)];
    if (!slot) slot = solve_factor(level);
    return *slot;
}

// Conjugate gradients with Jacobi preconditioning on the five-point stencil,
// relative residual 1e-12. The QoI is the composite-trapezoid average of u,
// which with zero boundary values is h^2 times the sum of interior values.
double PoissonModel::solve_factor(int level) const {
    const int m = 5 * (1 << level) - 2;
    const std::size_t nn = static_cast<std::size_t>(m) * m;
    const double h = 1.0 / (m + 1);

    // System (4 u - u_N - u_S - u_E - u_W) = h^2 f, forcing at xi = 1.
    std::vector<double> rhs(nn);
    for (int j = 0; j < m; ++j) {
        const double y = (j + 1) * h;
        const double gy = y * (1.0 - y);
        for (int i = 0; i < m; ++i) {
            const double x = (i + 1) * h;
            rhs[static_cast<std::size_t>(j) * m + i] = h * h * forcing_c_ * (x * (1.0 - x) + gy);
        }
    }

    auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < m; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * m + i;
                double acc = 4.0 * v[k];
                if (i > 0) acc -= v[k - 1];
                if (i + 1 < m) acc -= v[k + 1];
                if (j > 0) acc -= v[k - m];
                if (j + 1 < m) acc -= v[k + m];
                out[k] = acc;
            }
        }
    };
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t k = 0; k < nn; ++k) s += a[k] * b[k];
        return s;
    };

    std::vector<double> u(nn, 0.0), r = rhs, z(nn), p(nn), ap(nn);
    const double inv_diag = 0.25;
    const double b_norm = std::sqrt(dot(rhs, rhs));
    const double tol = 1e-12 * b_norm;

    for (std::size_t k = 0; k < nn; ++k) z[k] = inv_diag * r[k];
    p = z;
    double rz = dot(r, z);

    const long max_iter = 100L * m + 2000;
    bool converged = false;
    for (long it = 0; it < max_iter; ++it) {
        apply(p, ap);
        const double alpha = rz / dot(p, ap);
        for (std::size_t k = 0; k < nn; ++k) {
            u[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        if (std::sqrt(dot(r, r)) <= tol) {
            converged = true;
            break;
        }
        for (std::size_t k = 0; k < nn; ++k) z[k] = inv_diag * r[k];
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t k = 0; k < nn; ++k) p[k] = z[k] + beta * p[k];
    }
    if (!converged)
        throw std::runtime_error("PoissonModel: CG did not reach the residual tolerance at level " +
                                 std::to_string(level));

    double sum = 0.0;
    for (std::size_t k = 0; k < nn; ++k) sum += u[k];
    return h * h * sum;
}

double PoissonModel::phi_exact(double theta, double tau) {
    if (theta < 0.0 || theta > 6.0)
        throw std::domain_error("poisson phi_exact: theta must lie in [0, 6]");
    return theta + tail_expectation(theta, 0) / (1.0 - tau);
}

double PoissonModel::phi_exact_deriv(double theta, double tau, int m) {
    if (theta < 0.0 || theta > 6.0)
        throw std::domain_error("poisson phi_exact: theta must lie in [0, 6]");
    if (m == 0) return phi_exact(theta, tau);
    const double base = (m == 1) ? 1.0 : 0.0;
    return base + tail_expectation(theta, m) / (1.0 - tau);
}

double PoissonModel::cdf_exact(double theta) {
    if (theta <= 0.0) return 0.0;
    if (theta >= 6.0) return 1.0;
    return 1.0 + tail_expectation(theta, 1);  // tau + (1 - tau) Phi' collapses to 1 + dE/dtheta
}

double PoissonModel::phi_level_exact(int level, double theta, double tau, int m) const {
    const double q = factor(level);
    if (theta < 0.0 || theta > q)
        throw std::domain_error("poisson phi_level_exact: theta must lie in [0, q_l]");
    const double s = 6.0 * theta / q;
    switch (m) {
        case 0: return theta + (q / 6.0) * tail_expectation(s, 0) / (1.0 - tau);
        case 1: return 1.0 + tail_expectation(s, 1) / (1.0 - tau);
        case 2: return (6.0 / q) * tail_expectation(s, 2) / (1.0 - tau);
        default: throw std::invalid_argument("phi_level_exact: m must be 0, 1 or 2");
    }
}

double PoissonModel::exact_var(double tau) const {
    if (tau <= 0.0 || tau >= 1.0) throw std::invalid_argument("exact_var: tau must be in (0,1)");
    // Phi is strictly convex on (0, 6); bisect on the derivative sign change.
    double lo = 0.0, hi = 6.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi_exact_deriv(mid, tau, 1) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double PoissonModel::exact_cvar(double tau) const { return phi_exact(exact_var(tau), tau); }

}  // namespace mlmc::models

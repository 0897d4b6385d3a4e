#include "mlmc/risk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlmc {

const char* to_string(StatKind kind) {
    switch (kind) {
        case StatKind::phi0: return "phi0";
        case StatKind::phi1: return "phi1";
        case StatKind::phi2: return "phi2";
        case StatKind::cdf: return "cdf";
        case StatKind::pdf: return "pdf";
        case StatKind::var: return "var";
        case StatKind::cvar: return "cvar";
    }
    return "?";
}

StatKind stat_kind_from_string(const std::string& s) {
    if (s == "phi0") return StatKind::phi0;
    if (s == "phi1") return StatKind::phi1;
    if (s == "phi2") return StatKind::phi2;
    if (s == "cdf") return StatKind::cdf;
    if (s == "pdf") return StatKind::pdf;
    if (s == "var") return StatKind::var;
    if (s == "cvar") return StatKind::cvar;
    throw std::invalid_argument("unknown statistic '" + s + "'");
}

double var_from_curve(const SplineCurve& curve) {
    const auto& grid = curve.grid();
    const double h = grid.spacing();

    double best_theta = grid.theta_min;
    double best_value = curve.eval(0, grid.theta_min);
    auto consider = [&](double theta) {
        const double v = curve.eval(0, theta);
        if (v < best_value) {
            best_value = v;
            best_theta = theta;
        }
    };

    for (int j = 0; j < grid.n - 1; ++j) {
        const auto& p = curve.pieces()[static_cast<std::size_t>(j)];
        const double left = grid.node(j);
        consider(left);
        // Stationary points: 3 d t^2 + 2 c t + b = 0 on (0, h).
        const double a2 = 3.0 * p.d, a1 = 2.0 * p.c, a0 = p.b;
        if (a2 != 0.0) {
            const double disc = a1 * a1 - 4.0 * a2 * a0;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                const double q = -0.5 * (a1 + std::copysign(sq, a1 == 0.0 ? 1.0 : a1));
                const double roots[2] = {q / a2, a0 != 0.0 && q != 0.0 ? a0 / q : q / a2};
                for (double t : roots)
                    if (t > 0.0 && t < h) consider(left + t);
            }
        } else if (a1 != 0.0) {
            const double t = -a0 / a1;
            if (t > 0.0 && t < h) consider(left + t);
        }
    }
    consider(grid.theta_max);
    return best_theta;
}

double cvar_from_curve(const SplineCurve& curve) {
    return curve.eval(0, var_from_curve(curve));
}

CurveSamples cdf_pdf_curves(const SplineCurve& curve, double tau, int n_fine) {
    if (n_fine < 2) throw std::invalid_argument("cdf_pdf_curves: need n_fine >= 2");
    const auto& grid = curve.grid();
    CurveSamples out;
    out.theta.reserve(static_cast<std::size_t>(n_fine));
    out.cdf_raw.reserve(static_cast<std::size_t>(n_fine));
    out.cdf_clipped.reserve(static_cast<std::size_t>(n_fine));
    out.pdf.reserve(static_cast<std::size_t>(n_fine));
    for (int i = 0; i < n_fine; ++i) {
        const double w = static_cast<double>(i) / (n_fine - 1);
        const double theta = (1.0 - w) * grid.theta_min + w * grid.theta_max;
        const double cdf = tau + (1.0 - tau) * curve.eval(1, theta);
        out.theta.push_back(theta);
        out.cdf_raw.push_back(cdf);
        out.cdf_clipped.push_back(std::clamp(cdf, 0.0, 1.0));
        out.pdf.push_back((1.0 - tau) * curve.eval(2, theta));
    }
    return out;
}

std::array<double, 3> stat_weights(StatKind kind, const SplineCurve& curve, double q_hat,
                                   double tau) {
    switch (kind) {
        case StatKind::phi0: return {1.0, 0.0, 0.0};
        case StatKind::phi1: return {0.0, 1.0, 0.0};
        case StatKind::phi2: return {0.0, 0.0, 1.0};
        case StatKind::cdf: return {0.0, (1.0 - tau) * (1.0 - tau), 0.0};
        case StatKind::pdf: return {0.0, 0.0, (1.0 - tau) * (1.0 - tau)};
        case StatKind::var:
        case StatKind::cvar: {
            const double d2 = curve.eval(2, q_hat);
            if (d2 == 0.0)
                throw std::domain_error(
                    "stat_weights: curve''(q_hat) = 0, density degenerate at the quantile");
            if (kind == StatKind::var) return {0.0, 1.0 / (d2 * d2), 0.0};
            const double d1 = curve.eval(1, q_hat);
            return {2.0, 2.0 * (d1 * d1) / (d2 * d2), 0.0};
        }
    }
    throw std::invalid_argument("stat_weights: unknown statistic");
}

RiskReport make_risk_report(const PhiEstimate& estimate, StatKind kind,
                            const std::array<double, 3>& k_weights, const MseSplit& mse,
                            int n_fine) {
    RiskReport report;
    report.tau = estimate.tau;
    report.statistic = kind;
    report.var_hat = var_from_curve(estimate.curve);
    report.cvar_hat = estimate.curve.eval(0, report.var_hat);
    report.curves = cdf_pdf_curves(estimate.curve, estimate.tau, n_fine);
    report.k_weights = k_weights;
    report.mse = mse;
    return report;
}

}  // namespace mlmc

#pragma once

#include <array>
#include <string>
#include <vector>

#include "mlmc/errors.hpp"
#include "mlmc/estimator.hpp"
#include "mlmc/spline.hpp"

namespace mlmc {

enum class StatKind { phi0, phi1, phi2, cdf, pdf, var, cvar };

const char* to_string(StatKind kind);
StatKind stat_kind_from_string(const std::string& s);

// Exact global minimizer of the piecewise cubic over its interval: per piece
// the stationary points solve a quadratic, compared against the interval
// endpoints; ties resolve toward the smallest theta.
double var_from_curve(const SplineCurve& curve);

// Phi evaluated at the minimizer, i.e. the minimum of the curve.
double cvar_from_curve(const SplineCurve& curve);

struct CurveSamples {
    std::vector<double> theta;
    std::vector<double> cdf_raw;      // tau + (1 - tau) Phi'
    std::vector<double> cdf_clipped;  // presentation-only clip to [0, 1]
    std::vector<double> pdf;          // (1 - tau) Phi''
};

CurveSamples cdf_pdf_curves(const SplineCurve& curve, double tau, int n_fine);

// MSE combination weights (k0, k1, k2) for the requested statistic; var and
// cvar evaluate the curve derivatives at q_hat and require curve''(q_hat) != 0.
std::array<double, 3> stat_weights(StatKind kind, const SplineCurve& curve, double q_hat,
                                   double tau);

struct RiskReport {
    double tau = 0.0;
    StatKind statistic = StatKind::cvar;
    double var_hat = 0.0;
    double cvar_hat = 0.0;
    CurveSamples curves;
    std::array<double, 3> k_weights{};
    MseSplit mse;
};

// Assembles the report from a fitted estimate; mse/k come from the caller
// (tuning computes them against the same curve).
RiskReport make_risk_report(const PhiEstimate& estimate, StatKind kind,
                            const std::array<double, 3>& k_weights, const MseSplit& mse,
                            int n_fine);

}  // namespace mlmc

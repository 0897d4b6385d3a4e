#pragma once

#include <array>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "mlmc/config.hpp"
#include "mlmc/errors.hpp"
#include "mlmc/estimator.hpp"
#include "mlmc/models/model.hpp"
#include "mlmc/risk.hpp"
#include "mlmc/sampler.hpp"

namespace mlmc {

// Fitted exponential model value(l) = exp(log_constant -/+ rate * l).
struct RateModel {
    double log_constant = 0.0;
    double rate = 0.0;
    bool decays = true;
    int first_level = 0;
    int last_level = 0;

    double value(int level) const;
};

// Ordinary least squares on (level, log value); values must be positive.
RateModel fit_rate(std::span<const std::pair<int, double>> points, bool decays);

// Smallest n >= 4 with norm4^2 sum_m k_m C1(m)^2 (|Theta|/n)^{2(4-m)} <= eps_i^2.
int optimal_nodes(double k0, double k1, double k2, double norm4, double theta_len, double eps_i);

// Smallest L >= 1 with sum_m k_m c_m^2 e^{-2 L a_m} / (e^{a_m}-1)^2 <= eps_b^2,
// capped at l_cap (sets *capped). bias_models hold the raw b_hat fits.
int optimal_levels(const std::array<RateModel, 3>& bias_models, double k0, double k1, double k2,
                   double eps_b, int l_cap, bool* capped = nullptr);

// N_l* from the fitted (already rescaled) variance and cost models; each >= 2.
std::vector<std::size_t> optimal_samples(const RateModel& var_model, const RateModel& cost_model,
                                         int max_level, double eps_s);

struct IterationRecord {
    int iteration = 0;              // 0 = screening
    double eps_a = 0.0;             // tolerance the hierarchy was launched for
    int n = 0;
    int max_level = 0;
    std::vector<std::size_t> counts;
    std::array<double, 3> k_weights{};
    MseSplit mse;
    double cost = 0.0;
    std::size_t n_bootstrap = 0;
};

struct RunResult {
    PhiEstimate estimate;
    RiskReport risk;
    ErrorReport errors;
    std::vector<IterationRecord> trace;
    Hierarchy hierarchy;
    double final_cost = 0.0;
    bool tolerance_met = false;
};

// Raised when the continuation loop exceeds its iteration cap; carries the
// partial result for reporting.
class IterationCapError : public std::runtime_error {
public:
    IterationCapError(std::string what, std::shared_ptr<RunResult> partial_)
        : std::runtime_error(std::move(what)), partial(std::move(partial_)) {}

    std::shared_ptr<RunResult> partial;
};

// Continuation MLMC: screening hierarchy, then tuned launches over the
// tolerance sequence eps * lambda^{d-j} (j <= d), eps * kappa^{d-j} after,
// until the estimated MSE of the requested statistic is below eps^2.
RunResult cmlmc_run(const CmlmcConfig& config, std::shared_ptr<const models::Model> model);

// Built-in model lookup from the config.
std::shared_ptr<const models::Model> make_model(const CmlmcConfig& config);

}  // namespace mlmc

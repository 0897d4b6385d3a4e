#include "mlmc/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mlmc/kde.hpp"
#include "mlmc/models/black_scholes.hpp"
#include "mlmc/models/poisson.hpp"

namespace mlmc {

double RateModel::value(int level) const {
    const double sign = decays ? -1.0 : 1.0;
    return std::exp(log_constant + sign * rate * level);
}

RateModel fit_rate(std::span<const std::pair<int, double>> points, bool decays) {
    if (points.size() < 2) throw std::invalid_argument("fit_rate: need at least 2 points");
    double lbar = 0.0, ybar = 0.0;
    for (const auto& [l, v] : points) {
        if (!(v > 0.0)) throw std::invalid_argument("fit_rate: values must be > 0");
        lbar += l;
        ybar += std::log(v);
    }
    lbar /= static_cast<double>(points.size());
    ybar /= static_cast<double>(points.size());
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [l, v] : points) {
        sxx += (l - lbar) * (l - lbar);
        sxy += (l - lbar) * (std::log(v) - ybar);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_rate: levels must be distinct");
    const double slope = sxy / sxx;

    RateModel model;
    model.decays = decays;
    model.rate = decays ? -slope : slope;
    model.log_constant = ybar - slope * lbar;
    model.first_level = points.front().first;
    model.last_level = points.back().first;
    return model;
}

int optimal_nodes(double k0, double k1, double k2, double norm4, double theta_len, double eps_i) {
    if (!(eps_i > 0.0)) throw std::invalid_argument("optimal_nodes: eps_i must be > 0");
    if (norm4 < 0.0) throw std::invalid_argument("optimal_nodes: norm4 must be >= 0");
    const double k[3] = {k0, k1, k2};
    auto lhs = [&](int n) {
        double s = 0.0;
        for (int m = 0; m < 3; ++m) {
            const double c1 = spline_c1(m);
            s += k[m] * c1 * c1 * std::pow(theta_len / n, 2.0 * (4 - m));
        }
        return norm4 * norm4 * s;
    };
    const double target = eps_i * eps_i;
    if (norm4 == 0.0 || lhs(4) <= target) return 4;
    int lo = 4, hi = 8;
    while (lhs(hi) > target) {
        lo = hi;
        hi *= 2;
        if (hi > 1'000'000) throw std::runtime_error("optimal_nodes: node count diverged");
    }
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        (lhs(mid) > target ? lo : hi) = mid;
    }
    return hi;
}

int optimal_levels(const std::array<RateModel, 3>& bias_models, double k0, double k1, double k2,
                   double eps_b, int l_cap, bool* capped) {
    if (!(eps_b > 0.0)) throw std::invalid_argument("optimal_levels: eps_b must be > 0");
    const double k[3] = {k0, k1, k2};
    for (int m = 0; m < 3; ++m)
        if (k[m] > 0.0 && !(bias_models[static_cast<std::size_t>(m)].rate > 0.0))
            throw std::runtime_error("optimal_levels: fitted bias rate is not decaying");
    auto lhs = [&](int level) {
        double s = 0.0;
        for (int m = 0; m < 3; ++m) {
            if (k[m] == 0.0) continue;
            const auto& model = bias_models[static_cast<std::size_t>(m)];
            const double b = model.value(level);
            const double div = std::expm1(model.rate);
            s += k[m] * b * b / (div * div);
        }
        return s;
    };
    if (capped) *capped = false;
    for (int level = 1; level <= l_cap; ++level)
        if (lhs(level) <= eps_b * eps_b) return level;
    if (capped) *capped = true;
    return l_cap;
}

std::vector<std::size_t> optimal_samples(const RateModel& var_model, const RateModel& cost_model,
                                         int max_level, double eps_s) {
    if (!(eps_s > 0.0)) throw std::invalid_argument("optimal_samples: eps_s must be > 0");
    if (max_level < 0) throw std::invalid_argument("optimal_samples: max_level must be >= 0");
    double weighted_sum = 0.0;
    for (int l = 0; l <= max_level; ++l)
        weighted_sum += std::sqrt(var_model.value(l) * cost_model.value(l));

    std::vector<std::size_t> out(static_cast<std::size_t>(max_level) + 1);
    for (int l = 0; l <= max_level; ++l) {
        const double raw = std::ceil(weighted_sum / (eps_s * eps_s) *
                                     std::sqrt(var_model.value(l) / cost_model.value(l)));
        const double clamped = std::clamp(raw, 2.0, 1e15);
        out[static_cast<std::size_t>(l)] = static_cast<std::size_t>(clamped);
    }
    return out;
}

std::shared_ptr<const models::Model> make_model(const CmlmcConfig& config) {
    if (config.model_name == "poisson")
        return std::make_shared<models::PoissonModel>(config.poisson_c);
    if (config.model_name == "black_scholes")
        return std::make_shared<models::BlackScholesModel>(config.bs_r, config.bs_sigma,
                                                           config.bs_maturity, config.bs_strike,
                                                           config.bs_spot, config.bs_steps0);
    throw std::invalid_argument("make_model: unknown model '" + config.model_name + "'");
}

namespace {

constexpr int kScreeningNodes = 10;
constexpr std::uint64_t kBootstrapSalt = 0xb00757a7ULL;

std::vector<double> per_level_costs(const Hierarchy& h, const models::Model& model,
                                    CostModel kind) {
    std::vector<double> costs;
    costs.reserve(h.levels.size());
    for (const auto& ls : h.levels) {
        const double c = kind == CostModel::theoretical ? model.theoretical_cost(ls.level)
                                                        : ls.per_sample_cost();
        costs.push_back(std::max(c, 1e-12));
    }
    return costs;
}

double hierarchy_cost(const Hierarchy& h, std::span<const double> costs) {
    double total = 0.0;
    for (std::size_t l = 0; l < h.levels.size(); ++l)
        total += static_cast<double>(h.levels[l].count()) * costs[l];
    return total;
}

struct EstimationState {
    PhiEstimate estimate;
    std::array<double, 3> k_weights{};
    ErrorReport report;
    MseSplit mse;
    std::array<RateModel, 3> bias_models;
    RateModel var_model;
    RateModel cost_model;
    double cost = 0.0;
};

// One full estimation pass over the current hierarchy at `n` nodes: curve,
// statistic weights, level statistics, rate models, bootstrap, MSE.
EstimationState estimate_state(const Hierarchy& h, int n, const CmlmcConfig& cfg,
                               const models::Model& model, double bootstrap_eps_s_sq,
                               std::uint64_t bs_seed) {
    const ThetaGrid grid(cfg.theta_min, cfg.theta_max, n);
    const int max_level = h.max_level();

    PhiEstimate estimate = build_estimate(h, grid, cfg.tau);

    const double q_hat = var_from_curve(estimate.curve);
    const std::array<double, 3> k_weights =
        stat_weights(cfg.statistic, estimate.curve, q_hat, cfg.tau);

    // || Upsilon^(4) || from the KDE-smoothed mid-level samples.
    const auto& mid = h.levels[static_cast<std::size_t>((max_level + 1) / 2)];
    std::vector<double> mid_fine;
    mid_fine.reserve(mid.count());
    for (const auto& p : mid.pairs) mid_fine.push_back(p.fine);
    const double norm4 = fourth_deriv_norm(mid_fine, grid, cfg.tau, cfg.n_fine);

    const auto costs = per_level_costs(h, model, cfg.cost_model);

    ErrorReport report;
    std::vector<double> v_hats;
    std::vector<std::size_t> counts;
    std::array<std::vector<std::pair<int, double>>, 3> bias_points;
    for (const auto& ls : h.levels) {
        LevelStats stats;
        stats.level = ls.level;
        stats.v_hat = level_variance(ls, grid, cfg.tau);
        stats.cost = costs[static_cast<std::size_t>(ls.level)];
        if (ls.level >= 1) {
            for (int m = 0; m < 3; ++m) {
                const double raw = novel_bias_norm(ls, grid, cfg.tau, m, cfg.n_fine);
                stats.b_hat_new[static_cast<std::size_t>(m)] = raw;
                bias_points[static_cast<std::size_t>(m)].emplace_back(ls.level, raw);
            }
        }
        v_hats.push_back(stats.v_hat);
        counts.push_back(ls.count());
        report.levels.push_back(std::move(stats));
    }

    std::array<RateModel, 3> bias_models;
    for (int m = 0; m < 3; ++m)
        bias_models[static_cast<std::size_t>(m)] =
            fit_rate(bias_points[static_cast<std::size_t>(m)], /*decays=*/true);

    // Naive level bias uses the fitted m = 0 decay rate as its divisor.
    const double alpha0 = bias_models[0].rate;
    if (alpha0 > 0.0) {
        for (auto& stats : report.levels)
            if (stats.level >= 1)
                stats.b_hat_naive = level_bias_naive(
                    h.levels[static_cast<std::size_t>(stats.level)], grid, cfg.tau, alpha0);
    }

    const std::array<int, 3> all_m = {0, 1, 2};
    const auto bs = bootstrap_stat_error(h, grid, cfg.tau, all_m, bootstrap_eps_s_sq, bs_seed,
                                         cfg.bootstrap_initial, cfg.bootstrap_cap, cfg.n_fine,
                                         cfg.threads);

    const auto scaling =
        rescale(v_hats, counts, bs.err_sq, k_weights[0], k_weights[1], k_weights[2]);

    std::vector<std::pair<int, double>> var_points, cost_points;
    for (int l = 1; l <= max_level; ++l) {
        var_points.emplace_back(l, scaling.v_tilde[static_cast<std::size_t>(l)]);
        cost_points.emplace_back(l, costs[static_cast<std::size_t>(l)]);
    }

    report.fourth_deriv_norm = norm4;
    report.rescaling_ratio = scaling.ratio;
    report.v_tilde = scaling.v_tilde;
    report.n_bootstrap = bs.n_bs;
    report.bootstrap_cap_hit = bs.cap_hit;
    for (int m = 0; m < 3; ++m) {
        const auto mi = static_cast<std::size_t>(m);
        report.interp[mi] = interp_error(norm4, n, m, grid.length());
        const double rate = bias_models[mi].rate;
        const double raw_top = report.levels.back().b_hat_new[mi];
        report.bias_new[mi] = rate > 0.0 ? raw_top / std::expm1(rate) : raw_top;
        report.stat_new[mi] = std::sqrt(bs.err_sq[mi]);
    }

    const MseSplit mse = combined_mse(k_weights[0], k_weights[1], k_weights[2], report);
    return EstimationState{std::move(estimate),
                           k_weights,
                           std::move(report),
                           mse,
                           bias_models,
                           fit_rate(var_points, /*decays=*/true),
                           fit_rate(cost_points, /*decays=*/false),
                           hierarchy_cost(h, costs)};
}

IterationRecord record_of(int iteration, double eps_a, const Hierarchy& h,
                          const EstimationState& state) {
    IterationRecord rec;
    rec.iteration = iteration;
    rec.eps_a = eps_a;
    rec.n = state.estimate.grid.n;
    rec.max_level = h.max_level();
    rec.counts = h.counts();
    rec.k_weights = state.k_weights;
    rec.mse = state.mse;
    rec.cost = state.cost;
    rec.n_bootstrap = state.report.n_bootstrap;
    return rec;
}

}  // namespace

RunResult cmlmc_run(const CmlmcConfig& cfg, std::shared_ptr<const models::Model> model) {
    cfg.validate();
    const Sampler sampler(model, SamplerConfig{cfg.seed, 2.0});
    const double eps_sq = cfg.eps * cfg.eps;

    auto make_result = [&](const Hierarchy& h, const EstimationState& state,
                           std::vector<IterationRecord> trace, bool met) {
        RunResult result{state.estimate,
                         make_risk_report(state.estimate, cfg.statistic, state.k_weights, state.mse,
                                          cfg.n_fine),
                         state.report,
                         std::move(trace),
                         h,
                         state.cost,
                         met};
        return result;
    };

    // Screening hierarchy.
    Hierarchy h = grow_hierarchy(
        Hierarchy{}, std::vector<std::size_t>(static_cast<std::size_t>(cfg.screening_levels),
                                              cfg.screening_samples),
        cfg.screening_levels - 1, sampler, cfg.threads);

    int j = 1;
    double eps_a = cfg.eps * std::pow(cfg.lambda, cfg.d);

    auto active_budget = [&](double e) { return ToleranceBudget(e, cfg.w_interp, cfg.w_bias, cfg.w_stat); };

    EstimationState state = estimate_state(h, kScreeningNodes, cfg, *model,
                                           active_budget(eps_a).eps_s_sq(),
                                           derive_seed(cfg.seed, kBootstrapSalt));
    std::vector<IterationRecord> trace;
    trace.push_back(record_of(0, eps_a, h, state));

    while (j <= cfg.d || state.mse.total >= eps_sq) {
        if (j > cfg.iteration_cap) {
            auto partial = std::make_shared<RunResult>(make_result(h, state, trace, false));
            throw IterationCapError("cmlmc_run: iteration cap exceeded before reaching tolerance",
                                    partial);
        }

        const double launched_for = eps_a;
        const ToleranceBudget budget_a = active_budget(launched_for);

        const int n_next =
            optimal_nodes(state.k_weights[0], state.k_weights[1], state.k_weights[2],
                          state.report.fourth_deriv_norm, cfg.theta_max - cfg.theta_min,
                          std::sqrt(budget_a.eps_i_sq()));
        const int l_star =
            optimal_levels(state.bias_models, state.k_weights[0], state.k_weights[1],
                           state.k_weights[2], std::sqrt(budget_a.eps_b_sq()), cfg.level_cap);
        const int target_level = std::max(l_star, h.max_level());

        auto targets = optimal_samples(state.var_model, state.cost_model, target_level,
                                       std::sqrt(budget_a.eps_s_sq()));
        for (int l = 0; l <= h.max_level(); ++l) {
            auto& t = targets[static_cast<std::size_t>(l)];
            t = std::max(t, h.levels[static_cast<std::size_t>(l)].count());
        }
        h = grow_hierarchy(std::move(h), targets, target_level, sampler, cfg.threads);

        eps_a = j <= cfg.d ? cfg.eps * std::pow(cfg.lambda, cfg.d - j)
                           : cfg.eps * std::pow(cfg.kappa, cfg.d - j);

        state = estimate_state(h, n_next, cfg, *model, budget_a.eps_s_sq(),
                               derive_seed(cfg.seed, kBootstrapSalt + static_cast<std::uint64_t>(j)));
        trace.push_back(record_of(j, launched_for, h, state));
        ++j;
    }

    return make_result(h, state, std::move(trace), true);
}

}  // namespace mlmc

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mlmc/hierarchy.hpp"
#include "mlmc/spline.hpp"

namespace mlmc {

// V_hat_l: mean over samples of the squared sup-node norm of the level
// difference phi(., Q_l) - phi(., Q_{l-1}); at level 0 the difference is
// replaced by phi(., Q_0) itself.
double level_variance(const LevelSamples& ls, const ThetaGrid& grid, double tau);

// ||(1/N_l) sum_i [phi(., Q_l) - phi(., Q_{l-1})]||_{linf(nodes)}, level >= 1.
double naive_bias_norm(const LevelSamples& ls, const ThetaGrid& grid, double tau);

// b_hat_l = naive_bias_norm / (e^alpha - 1).
double level_bias_naive(const LevelSamples& ls, const ThetaGrid& grid, double tau, double alpha);

// Sup norm over an n_fine grid of the m-th derivative of the spline through
// the mean level difference at the nodes (raw), and the /(e^alpha - 1)
// estimator built from it.
double naive_interp_bias_norm(const LevelSamples& ls, const ThetaGrid& grid, double tau, int m,
                              int n_fine);
double bias_naive_interp(const LevelSamples& ls, const ThetaGrid& grid, double tau, int m,
                         double alpha, int n_fine);

// KDE-smoothed level bias norm b_hat_{l,new}^{(m)} (raw): the bivariate
// smoothed expectation of the level difference at the nodes, interpolated,
// m-th derivative sup norm on the n_fine grid. Bandwidths follow Scott's
// rule unless given. When the bandwidth is degenerate (constant samples)
// the m = 0 norm falls back to the naive node norm; m >= 1 propagates the
// error since no derivative smoothing is possible.
double novel_bias_norm(const LevelSamples& ls, const ThetaGrid& grid, double tau, int m, int n_fine,
                       std::optional<double> delta_fine = std::nullopt,
                       std::optional<double> delta_coarse = std::nullopt);
double bias_novel(const LevelSamples& ls, const ThetaGrid& grid, double tau, int m, double alpha,
                  int n_fine, std::optional<double> delta_fine = std::nullopt,
                  std::optional<double> delta_coarse = std::nullopt);

// A priori estimators.
double interp_error(double norm4, int n, int m, double theta_len);
double apriori_bias(double b_hat_L, int n, int m, double theta_len);
double apriori_stat(std::span<const double> v_hats, std::span<const std::size_t> n_ls, int n, int m,
                    double theta_len);

struct BootstrapResult {
    std::array<double, 3> err_sq{};  // squared statistical error estimate per m
    std::size_t n_bs = 0;
    bool cap_hit = false;
};

// Bootstrapped statistical error: resamples the hierarchy with replacement
// per level (pair-preserving), rebuilds the interpolated estimator per
// replicate, and returns for each m the mean squared sup-norm deviation from
// the replicate-average curve. N_bs starts at `initial` and doubles until
// the Monte Carlo standard error of each requested estimate falls below 1%
// of eps_s_sq, hard-capped at `cap`.
BootstrapResult bootstrap_stat_error(const Hierarchy& h, const ThetaGrid& grid, double tau,
                                     std::span<const int> m_list, double eps_s_sq,
                                     std::uint64_t bs_seed, std::size_t initial = 100,
                                     std::size_t cap = 12800, int n_fine = 1000, int threads = 1);

struct Rescaling {
    double ratio = 0.0;               // r_e
    std::vector<double> v_tilde;      // r_e * V_hat_l
};

// r_e = sum_m k_m (e_s,new^{(m)})^2 / sum_l V_hat_l / N_l.
Rescaling rescale(std::span<const double> v_hats, std::span<const std::size_t> n_ls,
                  const std::array<double, 3>& stat_err_sq, double k0, double k1, double k2);

struct LevelStats {
    int level = 0;
    double v_hat = 0.0;
    double b_hat_naive = 0.0;               // with the /(e^alpha - 1) divisor; levels >= 1
    std::array<double, 3> b_hat_new{};      // raw KDE norms; levels >= 1
    double cost = 0.0;
};

struct ErrorReport {
    std::array<double, 3> interp{};      // e_i^{(m)}
    std::array<double, 3> bias_new{};    // e_{b,new}^{(m)}
    std::array<double, 3> stat_new{};    // e_{s,new}^{(m)}
    double rescaling_ratio = 0.0;
    std::vector<double> v_tilde;
    std::size_t n_bootstrap = 0;
    bool bootstrap_cap_hit = false;
    double fourth_deriv_norm = 0.0;
    std::vector<LevelStats> levels;
};

struct MseSplit {
    double total = 0.0;
    double interp = 0.0;
    double bias = 0.0;
    double stat = 0.0;
};

// total = 3 [ sum_m k_m e_i^2 + sum_m k_m e_b^2 + sum_m k_m e_s^2 ]; the
// reported parts carry the factor 3 so that total = interp + bias + stat.
MseSplit combined_mse(double k0, double k1, double k2, const ErrorReport& report);

}  // namespace mlmc

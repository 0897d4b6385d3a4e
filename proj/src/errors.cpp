#include "mlmc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mlmc/estimator.hpp"
#include "mlmc/kde.hpp"
#include "mlmc/parallel.hpp"
#include "mlmc/rng.hpp"

namespace mlmc {

namespace {

constexpr std::uint64_t kBootstrapTag = 0x626f6f745f726570ULL;

std::vector<double> mean_diff_at_nodes(const LevelSamples& ls, const ThetaGrid& grid, double tau) {
    if (ls.level < 1) throw std::invalid_argument("bias estimators require level >= 1");
    if (ls.pairs.empty()) throw std::invalid_argument("bias estimators require a non-empty level");
    const double lip = 1.0 / (1.0 - tau);
    std::vector<double> mean(static_cast<std::size_t>(grid.n), 0.0);
    for (const auto& p : ls.pairs)
        for (int j = 0; j < grid.n; ++j) {
            const double theta = grid.node(j);
            mean[static_cast<std::size_t>(j)] +=
                (std::max(p.fine - theta, 0.0) - std::max(*p.coarse - theta, 0.0)) * lip;
        }
    for (auto& v : mean) v /= static_cast<double>(ls.pairs.size());
    return mean;
}

double bias_divisor(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("bias estimators require alpha > 0");
    return std::expm1(alpha);
}

}  // namespace

double level_variance(const LevelSamples& ls, const ThetaGrid& grid, double tau) {
    if (ls.pairs.empty()) throw std::invalid_argument("level_variance: empty level");
    const double lip = 1.0 / (1.0 - tau);
    double acc = 0.0;
    for (const auto& p : ls.pairs) {
        double worst = 0.0;
        for (int j = 0; j < grid.n; ++j) {
            const double theta = grid.node(j);
            const double contrib =
                ls.level == 0
                    ? theta + std::max(p.fine - theta, 0.0) * lip
                    : (std::max(p.fine - theta, 0.0) - std::max(*p.coarse - theta, 0.0)) * lip;
            worst = std::max(worst, std::abs(contrib));
        }
        acc += worst * worst;
    }
    return acc / static_cast<double>(ls.pairs.size());
}

double naive_bias_norm(const LevelSamples& ls, const ThetaGrid& grid, double tau) {
    const auto mean = mean_diff_at_nodes(ls, grid, tau);
    double best = 0.0;
    for (double v : mean) best = std::max(best, std::abs(v));
    return best;
}

double level_bias_naive(const LevelSamples& ls, const ThetaGrid& grid, double tau, double alpha) {
    return naive_bias_norm(ls, grid, tau) / bias_divisor(alpha);
}

double naive_interp_bias_norm(const LevelSamples& ls, const ThetaGrid& grid, double tau, int m,
                              int n_fine) {
    const auto mean = mean_diff_at_nodes(ls, grid, tau);
    return fit_spline(grid, mean).sup_norm_deriv(m, n_fine);
}

double bias_naive_interp(const LevelSamples& ls, const ThetaGrid& grid, double tau, int m,
                         double alpha, int n_fine) {
    return naive_interp_bias_norm(ls, grid, tau, m, n_fine) / bias_divisor(alpha);
}

double novel_bias_norm(const LevelSamples& ls, const ThetaGrid& grid, double tau, int m, int n_fine,
                       std::optional<double> delta_fine, std::optional<double> delta_coarse) {
    if (ls.level < 1) throw std::invalid_argument("novel_bias_norm: level >= 1 required");
    if (ls.pairs.empty()) throw std::invalid_argument("novel_bias_norm: empty level");

    double df = 0.0, dc = 0.0;
    if (delta_fine && delta_coarse) {
        df = *delta_fine;
        dc = *delta_coarse;
    } else {
        std::vector<double> fine, coarse;
        fine.reserve(ls.pairs.size());
        coarse.reserve(ls.pairs.size());
        for (const auto& p : ls.pairs) {
            fine.push_back(p.fine);
            coarse.push_back(*p.coarse);
        }
        try {
            df = scott_bandwidth(fine);
            dc = scott_bandwidth(coarse);
        } catch (const std::invalid_argument&) {
            if (m == 0) return naive_bias_norm(ls, grid, tau);
            throw;
        }
    }

    std::vector<double> values(static_cast<std::size_t>(grid.n));
    for (int j = 0; j < grid.n; ++j)
        values[static_cast<std::size_t>(j)] = smoothed_diff(grid.node(j), ls.pairs, df, dc, tau);
    return fit_spline(grid, values).sup_norm_deriv(m, n_fine);
}

double bias_novel(const LevelSamples& ls, const ThetaGrid& grid, double tau, int m, double alpha,
                  int n_fine, std::optional<double> delta_fine, std::optional<double> delta_coarse) {
    return novel_bias_norm(ls, grid, tau, m, n_fine, delta_fine, delta_coarse) / bias_divisor(alpha);
}

double interp_error(double norm4, int n, int m, double theta_len) {
    if (norm4 < 0.0) throw std::invalid_argument("interp_error: norm4 must be >= 0");
    if (n < 2) throw std::invalid_argument("interp_error: n must be >= 2");
    return spline_c1(m) * norm4 * std::pow(theta_len / n, 4 - m);
}

double apriori_bias(double b_hat_L, int n, int m, double theta_len) {
    return spline_c2(m, theta_len) * spline_c3() * std::pow(n - 1.0, m) * b_hat_L;
}

double apriori_stat(std::span<const double> v_hats, std::span<const std::size_t> n_ls, int n, int m,
                    double theta_len) {
    if (v_hats.size() != n_ls.size())
        throw std::invalid_argument("apriori_stat: variance and count lists must match");
    double sum = 0.0;
    for (std::size_t l = 0; l < v_hats.size(); ++l)
        sum += v_hats[l] / static_cast<double>(n_ls[l]);
    return spline_c2(m, theta_len) * spline_c3() * std::pow(n - 1.0, m) *
           std::sqrt(spline_log_factor(n) * sum);
}

BootstrapResult bootstrap_stat_error(const Hierarchy& h, const ThetaGrid& grid, double tau,
                                     std::span<const int> m_list, double eps_s_sq,
                                     std::uint64_t bs_seed, std::size_t initial, std::size_t cap,
                                     int n_fine, int threads) {
    if (h.empty()) throw std::invalid_argument("bootstrap_stat_error: empty hierarchy");
    for (const auto& ls : h.levels)
        if (ls.count() < 2)
            throw std::invalid_argument("bootstrap_stat_error: every level needs N_l >= 2");

    const int n = grid.n;
    const std::size_t levels = h.levels.size();
    const double lip = 1.0 / (1.0 - tau);

    // Per-sample node contributions, so each replicate is a resampled mean.
    std::vector<std::vector<double>> contrib(levels);
    for (std::size_t l = 0; l < levels; ++l) {
        const auto& ls = h.levels[l];
        contrib[l].resize(ls.count() * static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < ls.count(); ++i) {
            const auto& p = ls.pairs[i];
            double* row = contrib[l].data() + i * static_cast<std::size_t>(n);
            for (int j = 0; j < n; ++j) {
                const double theta = grid.node(j);
                row[j] = l == 0 ? theta + std::max(p.fine - theta, 0.0) * lip
                                : (std::max(p.fine - theta, 0.0) -
                                   std::max(*p.coarse - theta, 0.0)) * lip;
            }
        }
    }

    // Node values of one resampled estimator; the stream is a pure function
    // of (bs_seed, replicate), so doubling keeps earlier replicates intact.
    auto replicate_nodes = [&](std::size_t t, double* out) {
        RngStream rng(bs_seed, kBootstrapTag, t);
        std::fill(out, out + n, 0.0);
        for (std::size_t l = 0; l < levels; ++l) {
            const std::size_t count = h.levels[l].count();
            std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
            for (std::size_t i = 0; i < count; ++i) {
                const double* row = contrib[l].data() + rng.index(count) * static_cast<std::size_t>(n);
                for (int j = 0; j < n; ++j) acc[static_cast<std::size_t>(j)] += row[j];
            }
            for (int j = 0; j < n; ++j)
                out[j] += acc[static_cast<std::size_t>(j)] / static_cast<double>(count);
        }
    };

    std::vector<double> nodes_flat;     // n_bs x n replicate node values
    std::vector<std::array<double, 3>> sq_norms;  // per replicate, per m

    BootstrapResult result;
    std::size_t n_bs = std::min(initial, cap);

    while (true) {
        const std::size_t old = sq_norms.size();
        nodes_flat.resize(n_bs * static_cast<std::size_t>(n));
        parallel_for(n_bs - old, threads, [&](std::size_t k) {
            const std::size_t t = old + k;
            replicate_nodes(t, nodes_flat.data() + t * static_cast<std::size_t>(n));
        });

        // Shifted summation: identical replicates yield an exactly zero spread.
        std::vector<double> mean(static_cast<std::size_t>(n), 0.0);
        for (std::size_t t = 0; t < n_bs; ++t)
            for (int j = 0; j < n; ++j)
                mean[static_cast<std::size_t>(j)] +=
                    nodes_flat[t * static_cast<std::size_t>(n) + j] - nodes_flat[j];
        for (int j = 0; j < n; ++j)
            mean[static_cast<std::size_t>(j)] =
                nodes_flat[j] + mean[static_cast<std::size_t>(j)] / static_cast<double>(n_bs);

        sq_norms.assign(n_bs, {});
        parallel_for(n_bs, threads, [&](std::size_t t) {
            std::vector<double> dev(static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j)
                dev[static_cast<std::size_t>(j)] =
                    nodes_flat[t * static_cast<std::size_t>(n) + j] - mean[static_cast<std::size_t>(j)];
            const SplineCurve curve = fit_spline(grid, dev);
            for (int m : m_list) {
                const double norm = curve.sup_norm_deriv(m, n_fine);
                sq_norms[t][static_cast<std::size_t>(m)] = norm * norm;
            }
        });

        result.err_sq = {};
        std::array<double, 3> se{};
        for (int m : m_list) {
            const auto mi = static_cast<std::size_t>(m);
            double s = 0.0;
            for (const auto& x : sq_norms) s += x[mi];
            const double avg = s / static_cast<double>(n_bs);
            double var = 0.0;
            for (const auto& x : sq_norms) var += (x[mi] - avg) * (x[mi] - avg);
            var /= static_cast<double>(n_bs - 1);
            result.err_sq[mi] = avg;
            se[mi] = std::sqrt(var / static_cast<double>(n_bs));
        }

        bool ok = true;
        for (int m : m_list)
            if (se[static_cast<std::size_t>(m)] > 0.01 * eps_s_sq) ok = false;
        if (ok) break;
        if (n_bs >= cap) {
            result.cap_hit = true;
            break;
        }
        n_bs = std::min(2 * n_bs, cap);
    }

    result.n_bs = n_bs;
    return result;
}

Rescaling rescale(std::span<const double> v_hats, std::span<const std::size_t> n_ls,
                  const std::array<double, 3>& stat_err_sq, double k0, double k1, double k2) {
    if (v_hats.size() != n_ls.size())
        throw std::invalid_argument("rescale: variance and count lists must match");
    double denom = 0.0;
    for (std::size_t l = 0; l < v_hats.size(); ++l)
        denom += v_hats[l] / static_cast<double>(n_ls[l]);
    if (!(denom > 0.0)) throw std::invalid_argument("rescale: sum of V_hat_l / N_l must be > 0");
    const double num = k0 * stat_err_sq[0] + k1 * stat_err_sq[1] + k2 * stat_err_sq[2];

    Rescaling out;
    out.ratio = num / denom;
    out.v_tilde.reserve(v_hats.size());
    for (double v : v_hats) out.v_tilde.push_back(out.ratio * v);
    return out;
}

MseSplit combined_mse(double k0, double k1, double k2, const ErrorReport& report) {
    if (k0 < 0.0 || k1 < 0.0 || k2 < 0.0)
        throw std::invalid_argument("combined_mse: weights must be >= 0");
    const double k[3] = {k0, k1, k2};
    MseSplit out;
    for (int m = 0; m < 3; ++m) {
        const auto mi = static_cast<std::size_t>(m);
        out.interp += 3.0 * k[m] * report.interp[mi] * report.interp[mi];
        out.bias += 3.0 * k[m] * report.bias_new[mi] * report.bias_new[mi];
        out.stat += 3.0 * k[m] * report.stat_new[mi] * report.stat_new[mi];
    }
    out.total = out.interp + out.bias + out.stat;
    return out;
}

}  // namespace mlmc

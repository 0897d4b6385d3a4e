#include "mlmc/config.hpp"

#include <cmath>

namespace mlmc {

void CmlmcConfig::validate() const {
    if (model_name != "poisson" && model_name != "black_scholes")
        throw std::invalid_argument("config: unknown model '" + model_name + "'");
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("config: tau must be in (0,1)");
    if (!(theta_min < theta_max))
        throw std::invalid_argument("config: theta.min must be < theta.max");
    if (!(eps > 0.0)) throw std::invalid_argument("config: eps must be > 0");
    if (!(w_interp > 0.0 && w_bias > 0.0 && w_stat > 0.0))
        throw std::invalid_argument("config: tolerance weights must be > 0");
    if (std::abs(w_interp + w_bias + w_stat - 1.0) > 1e-12)
        throw std::invalid_argument("config: tolerance weights must sum to 1");
    if (d < 0) throw std::invalid_argument("config: d must be >= 0");
    if (!(lambda > kappa && kappa > 1.0))
        throw std::invalid_argument("config: need lambda > kappa > 1");
    if (iteration_cap < 1) throw std::invalid_argument("config: iteration cap must be >= 1");
    if (level_cap < 1) throw std::invalid_argument("config: level cap must be >= 1");
    if (screening_levels < 3)
        throw std::invalid_argument("config: screening needs at least 3 levels for rate fits");
    if (screening_samples < 2)
        throw std::invalid_argument("config: screening needs at least 2 samples per level");
    if (bootstrap_initial < 2 || bootstrap_cap < bootstrap_initial)
        throw std::invalid_argument("config: bootstrap sizes invalid");
    if (n_fine < 7) throw std::invalid_argument("config: n_fine must be >= 7");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    if (model_name == "poisson" && !(poisson_c > 0.0))
        throw std::invalid_argument("config: model.poisson.c must be > 0");
}

ToleranceBudget::ToleranceBudget(double eps_, double w_i_, double w_b_, double w_s_)
    : eps(eps_), w_i(w_i_), w_b(w_b_), w_s(w_s_) {
    if (!(eps > 0.0)) throw std::invalid_argument("ToleranceBudget: eps must be > 0");
    if (!(w_i > 0.0 && w_b > 0.0 && w_s > 0.0))
        throw std::invalid_argument("ToleranceBudget: weights must be > 0");
    if (std::abs(w_i + w_b + w_s - 1.0) > 1e-12)
        throw std::invalid_argument("ToleranceBudget: weights must sum to 1");
}

}  // namespace mlmc

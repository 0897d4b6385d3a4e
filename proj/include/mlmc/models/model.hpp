#pragma once

#include <string>

#include "mlmc/hierarchy.hpp"
#include "mlmc/rng.hpp"

namespace mlmc::models {

// A stochastic model exposes correlated level pairs plus a deterministic
// per-level cost. Exact references (VaR/CVaR) are optional and used by the
// reliability and comparison studies.
class Model {
public:
    virtual ~Model() = default;

    virtual const std::string& name() const = 0;

    // Draw one correlated (Q_l, Q_{l-1}) realization. All randomness must be
    // taken from rng so that a counter-derived stream reproduces the sample.
    virtual CorrelatedPair sample_pair(int level, RngStream& rng) const = 0;

    // Declared cost of one pair at the given level (proportional to work,
    // e.g. degrees of freedom); used instead of wall time when the
    // theoretical cost model is selected.
    virtual double theoretical_cost(int level) const = 0;

    virtual int level_cap() const { return 10; }

    virtual bool has_exact_reference() const { return false; }
    virtual double exact_var(double /*tau*/) const {
        throw std::runtime_error(name() + ": no exact VaR reference");
    }
    virtual double exact_cvar(double /*tau*/) const {
        throw std::runtime_error(name() + ": no exact CVaR reference");
    }
};

}  // namespace mlmc::models

#pragma once

#include <memory>

#include "mlmc/hierarchy.hpp"
#include "mlmc/models/model.hpp"

namespace mlmc {

// Deterministic sampling front end: every draw is a pure function of
// (base seed, level, sample index), so draws may run concurrently and be
// reproduced in any order.
class Sampler {
public:
    Sampler(std::shared_ptr<const models::Model> model, SamplerConfig config)
        : model_(std::move(model)), config_(config) {}

    const models::Model& model() const { return *model_; }
    const SamplerConfig& config() const { return config_; }

private:
    std::shared_ptr<const models::Model> model_;
    SamplerConfig config_;
};

// One correlated pair plus its measured wall time.
struct TimedPair {
    CorrelatedPair pair;
    double seconds = 0.0;
};

CorrelatedPair draw_pair(const Sampler& sampler, int level, std::uint64_t sample_index);
TimedPair draw_pair_timed(const Sampler& sampler, int level, std::uint64_t sample_index);

// Grow (never shrink) the hierarchy to target_sizes per level; target_sizes
// must cover levels 0..target_L. Existing pairs are kept and reused, new
// draws continue the per-level sample index.
Hierarchy grow_hierarchy(Hierarchy h, const std::vector<std::size_t>& target_sizes, int target_L,
                         const Sampler& sampler, int threads = 1);

}  // namespace mlmc

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlmc {

// One correlated fine/coarse QoI realization. Both values come from the same
// underlying random input; coarse is absent exactly at level 0.
struct CorrelatedPair {
    int level = 0;
    double fine = 0.0;
    std::optional<double> coarse;
};

// All sampled pairs of one discretisation level, with cost bookkeeping.
// total_cost_seconds holds measured wall time and is excluded from
// determinism guarantees; theoretical costs come from the model.
struct LevelSamples {
    int level = 0;
    std::vector<CorrelatedPair> pairs;
    double total_cost_seconds = 0.0;

    std::size_t count() const { return pairs.size(); }
    double per_sample_cost() const {
        return pairs.empty() ? 0.0 : total_cost_seconds / static_cast<double>(pairs.size());
    }
};

// Levels 0..L, contiguous.
struct Hierarchy {
    std::vector<LevelSamples> levels;

    bool empty() const { return levels.empty(); }
    int max_level() const { return static_cast<int>(levels.size()) - 1; }

    std::vector<std::size_t> counts() const {
        std::vector<std::size_t> out;
        out.reserve(levels.size());
        for (const auto& ls : levels) out.push_back(ls.count());
        return out;
    }
};

struct SamplerConfig {
    std::uint64_t base_seed = 0;
    double refinement_factor = 2.0;  // fixed to 2 for the built-in models
};

// Model solve failure, carrying the sample that triggered it.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int level_, std::uint64_t sample_index_)
        : std::runtime_error(what + " (level " + std::to_string(level_) + ", sample " +
                             std::to_string(sample_index_) + ")"),
          level(level_),
          sample_index(sample_index_) {}

    int level;
    std::uint64_t sample_index;
};

}  // namespace mlmc

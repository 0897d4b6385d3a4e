#include "mlmc/sampler.hpp"

#include <chrono>
#include <stdexcept>

#include "mlmc/parallel.hpp"

namespace mlmc {

namespace {
// Domain separation between sampling and other consumers of the base seed.
constexpr std::uint64_t kSampleTag = 0x73616d706c655f31ULL;
}  // namespace

CorrelatedPair draw_pair(const Sampler& sampler, int level, std::uint64_t sample_index) {
    if (level < 0) throw std::invalid_argument("draw_pair: level must be >= 0");
    RngStream rng(sampler.config().base_seed, kSampleTag ^ static_cast<std::uint64_t>(level),
                  sample_index);
    try {
        return sampler.model().sample_pair(level, rng);
    } catch (const std::exception& e) {
        throw SolverError(e.what(), level, sample_index);
    }
}

TimedPair draw_pair_timed(const Sampler& sampler, int level, std::uint64_t sample_index) {
    const auto start = std::chrono::steady_clock::now();
    TimedPair out;
    out.pair = draw_pair(sampler, level, sample_index);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

Hierarchy grow_hierarchy(Hierarchy h, const std::vector<std::size_t>& target_sizes, int target_L,
                         const Sampler& sampler, int threads) {
    if (static_cast<int>(target_sizes.size()) != target_L + 1)
        throw std::invalid_argument("grow_hierarchy: target_sizes must cover levels 0..target_L");
    if (target_L < h.max_level())
        throw std::invalid_argument("grow_hierarchy: hierarchy never shrinks in levels");

    for (int l = h.max_level() + 1; l <= target_L; ++l) {
        LevelSamples ls;
        ls.level = l;
        h.levels.push_back(std::move(ls));
    }

    for (int l = 0; l <= target_L; ++l) {
        auto& ls = h.levels[static_cast<std::size_t>(l)];
        const std::size_t current = ls.count();
        const std::size_t target = target_sizes[static_cast<std::size_t>(l)];
        if (target <= current) continue;

        const std::size_t extra = target - current;
        std::vector<TimedPair> fresh(extra);
        parallel_for(extra, threads, [&](std::size_t i) {
            fresh[i] = draw_pair_timed(sampler, l, current + i);
        });
        ls.pairs.reserve(target);
        for (auto& tp : fresh) {
            ls.pairs.push_back(tp.pair);
            ls.total_cost_seconds += tp.seconds;
        }
    }
    return h;
}

}  // namespace mlmc

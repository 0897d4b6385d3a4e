#include <catch2/catch_amalgamated.hpp>

#include <memory>

#include "mlmc/models/black_scholes.hpp"
#include "mlmc/models/poisson.hpp"
#include "mlmc/sampler.hpp"

using namespace mlmc;

namespace {

Sampler make_sampler(std::uint64_t seed) {
    static const auto model = std::make_shared<models::PoissonModel>();
    return Sampler(model, SamplerConfig{seed, 2.0});
}

bool identical(const CorrelatedPair& a, const CorrelatedPair& b) {
    return a.level == b.level && a.fine == b.fine && a.coarse == b.coarse;
}

}  // namespace

TEST_CASE("draws are pure functions of (seed, level, index)", "[hierarchy]") {
    const auto s = make_sampler(42);
    const auto a = draw_pair(s, 2, 7);
    const auto b = draw_pair(s, 2, 7);
    CHECK(identical(a, b));
    CHECK(a.coarse.has_value());

    const auto other_index = draw_pair(s, 2, 8);
    CHECK(a.fine != other_index.fine);
    const auto other_seed = draw_pair(make_sampler(43), 2, 7);
    CHECK(a.fine != other_seed.fine);

    const auto l0 = draw_pair(s, 0, 0);
    CHECK_FALSE(l0.coarse.has_value());
    CHECK_THROWS_AS(draw_pair(s, -1, 0), std::invalid_argument);
}

TEST_CASE("growth reuses existing samples and continues indices", "[hierarchy]") {
    const auto s = make_sampler(7);
    Hierarchy h = grow_hierarchy(Hierarchy{}, {10, 5}, 1, s);
    REQUIRE(h.counts() == std::vector<std::size_t>{10, 5});

    const Hierarchy grown = grow_hierarchy(h, {20, 10, 4}, 2, s);
    REQUIRE(grown.counts() == std::vector<std::size_t>{20, 10, 4});
    for (int l = 0; l <= 1; ++l)
        for (std::size_t i = 0; i < h.levels[static_cast<std::size_t>(l)].count(); ++i)
            CHECK(identical(h.levels[static_cast<std::size_t>(l)].pairs[i],
                            grown.levels[static_cast<std::size_t>(l)].pairs[i]));

    // Fresh draws continue the per-level index sequence.
    CHECK(identical(grown.levels[0].pairs[15], draw_pair(s, 0, 15)));
    CHECK(identical(grown.levels[2].pairs[3], draw_pair(s, 2, 3)));
}

TEST_CASE("growth is idempotent and clamps shrinking targets", "[hierarchy]") {
    const auto s = make_sampler(11);
    const Hierarchy h = grow_hierarchy(Hierarchy{}, {10}, 0, s);

    const Hierarchy same = grow_hierarchy(h, {10}, 0, s);
    REQUIRE(same.counts() == h.counts());
    for (std::size_t i = 0; i < 10; ++i) CHECK(identical(same.levels[0].pairs[i], h.levels[0].pairs[i]));

    const Hierarchy clamped = grow_hierarchy(h, {8}, 0, s);
    CHECK(clamped.counts() == std::vector<std::size_t>{10});

    CHECK_THROWS_AS(grow_hierarchy(same, {10, 5}, 0, s), std::invalid_argument);
    Hierarchy two = grow_hierarchy(Hierarchy{}, {4, 4}, 1, s);
    CHECK_THROWS_AS(grow_hierarchy(two, {4}, 0, s), std::invalid_argument);
}

TEST_CASE("two equal run sequences produce identical hierarchies", "[hierarchy]") {
    const auto s1 = make_sampler(123);
    const auto s2 = make_sampler(123);
    Hierarchy a = grow_hierarchy(Hierarchy{}, {6, 3}, 1, s1);
    a = grow_hierarchy(a, {12, 6, 2}, 2, s1);
    Hierarchy b = grow_hierarchy(Hierarchy{}, {6, 3}, 1, s2);
    b = grow_hierarchy(b, {12, 6, 2}, 2, s2);
    REQUIRE(a.counts() == b.counts());
    for (std::size_t l = 0; l < a.levels.size(); ++l)
        for (std::size_t i = 0; i < a.levels[l].count(); ++i)
            CHECK(identical(a.levels[l].pairs[i], b.levels[l].pairs[i]));
}

TEST_CASE("parallel growth matches serial growth", "[hierarchy]") {
    const auto s = make_sampler(5150);
    const Hierarchy serial = grow_hierarchy(Hierarchy{}, {40, 20, 10}, 2, s, 1);
    const Hierarchy parallel = grow_hierarchy(Hierarchy{}, {40, 20, 10}, 2, s, 4);
    REQUIRE(serial.counts() == parallel.counts());
    for (std::size_t l = 0; l < serial.levels.size(); ++l)
        for (std::size_t i = 0; i < serial.levels[l].count(); ++i)
            CHECK(identical(serial.levels[l].pairs[i], parallel.levels[l].pairs[i]));
}

TEST_CASE("per-pair levels and coarse presence", "[hierarchy]") {
    const auto s = make_sampler(31);
    const Hierarchy h = grow_hierarchy(Hierarchy{}, {5, 5, 5}, 2, s);
    for (const auto& ls : h.levels)
        for (const auto& p : ls.pairs) {
            CHECK(p.level == ls.level);
            CHECK(p.coarse.has_value() == (ls.level >= 1));
        }
    CHECK(h.levels[1].per_sample_cost() ==
          Catch::Approx(h.levels[1].total_cost_seconds / 5.0));
}

TEST_CASE("declared cost is non-decreasing in level for built-in models", "[hierarchy]") {
    const models::PoissonModel poisson;
    const models::BlackScholesModel bs;
    for (int l = 0; l < 8; ++l) {
        CHECK(poisson.theoretical_cost(l + 1) >= poisson.theoretical_cost(l));
        CHECK(bs.theoretical_cost(l + 1) >= bs.theoretical_cost(l));
    }
}

TEST_CASE("solver failures carry level and sample index", "[hierarchy]") {
    const auto model = std::make_shared<models::PoissonModel>();
    const Sampler s(model, SamplerConfig{1, 2.0});
    try {
        draw_pair(s, 99, 12);  // beyond the level cap
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.level == 99);
        CHECK(e.sample_index == 12);
    }
}

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "srq/quantile.hpp"

using srq::QuantileMethod;
using srq::ScoringConfig;

TEST_CASE("constant map forces every quantile to the constant", "[quantile]") {
    srq::ResponseMap map{3, 3, std::vector<double>(9, 3.0)};
    const auto stats = srq::compute_robust_stats(map, ScoringConfig{});
    CHECK(stats.q50 == 3.0);
    CHECK(stats.q95 == 3.0);
}

TEST_CASE("2x2 grid with a single one interpolates q95", "[quantile]") {
    srq::ResponseMap map{2, 2, {0.0, 0.0, 0.0, 1.0}};
    const auto stats = srq::compute_robust_stats(map, ScoringConfig{});
    // sorted [0,0,0,1]: h50 = 1.5 -> 0; h95 = 2.85 -> 0 + 0.85*(1-0)
    CHECK(stats.q50 == 0.0);
    CHECK_THAT(stats.q95, Catch::Matchers::WithinAbs(0.85, 1e-12));
    CHECK_THAT(stats.q95, Catch::Matchers::WithinAbs(
                              oracle::quantile_linear(map.values, 0.95), 1e-15));
}

TEST_CASE("quantiles are permutation invariant", "[quantile]") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        srq::ResponseMap map = oracle::random_map(rng, 7, 9);
        const auto base = srq::compute_robust_stats(map, ScoringConfig{});
        std::shuffle(map.values.begin(), map.values.end(), rng);
        const auto shuffled = srq::compute_robust_stats(map, ScoringConfig{});
        CHECK(base.q50 == shuffled.q50);
        CHECK(base.q95 == shuffled.q95);
    }
}

TEST_CASE("selection quantiles match the sort-based reference", "[quantile]") {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> dim(2, 24);
    for (int rep = 0; rep < 200; ++rep) {
        const srq::ResponseMap map = oracle::random_map(rng, dim(rng), dim(rng), -5.0, 5.0);

        ScoringConfig linear;
        const auto stats = srq::compute_robust_stats(map, linear);
        REQUIRE_THAT(stats.q50,
                     Catch::Matchers::WithinAbs(oracle::quantile_linear(map.values, 0.50), 1e-12));
        REQUIRE_THAT(stats.q95,
                     Catch::Matchers::WithinAbs(oracle::quantile_linear(map.values, 0.95), 1e-12));
        REQUIRE(stats.q50 <= stats.q95);

        ScoringConfig nearest;
        nearest.quantile_method = QuantileMethod::nearest;
        const auto nstats = srq::compute_robust_stats(map, nearest);
        REQUIRE(nstats.q50 == oracle::quantile_nearest(map.values, 0.50));
        REQUIRE(nstats.q95 == oracle::quantile_nearest(map.values, 0.95));
    }
}

TEST_CASE("nearest method picks the rounded order statistic", "[quantile]") {
    // n=4, level 0.5 -> h = 1.5, rounds away from zero to index 2.
    CHECK(srq::quantile({4.0, 1.0, 3.0, 2.0}, 0.5, QuantileMethod::nearest) == 3.0);
    CHECK(srq::quantile({4.0, 1.0, 3.0, 2.0}, 0.0, QuantileMethod::nearest) == 1.0);
    CHECK(srq::quantile({4.0, 1.0, 3.0, 2.0}, 1.0, QuantileMethod::nearest) == 4.0);
}

TEST_CASE("degenerate and invalid maps are rejected at ingestion", "[quantile]") {
    CHECK_THROWS_AS(srq::compute_robust_stats(srq::ResponseMap{1, 5, std::vector<double>(5, 0.0)},
                                              ScoringConfig{}),
                    srq::IngestionError);
    CHECK_THROWS_AS(srq::compute_robust_stats(srq::ResponseMap{2, 2, {0.0, 0.0, 0.0}},
                                              ScoringConfig{}),
                    srq::IngestionError);
    srq::ResponseMap nan_map{2, 2, {0.0, 0.0, 0.0, std::nan("")}};
    CHECK_THROWS_AS(srq::compute_robust_stats(nan_map, ScoringConfig{}), srq::IngestionError);
}

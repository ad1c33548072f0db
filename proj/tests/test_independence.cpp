#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "dsinfer/error.hpp"
#include "dsinfer/independence.hpp"
#include "oracles.hpp"

using namespace dsinfer;

TEST_SUITE("independence") {

TEST_CASE("binning rules") {
    const auto t = discretize(PairedSample({{0.1, 0.1}, {0.6, 0.6}}), 2);
    CHECK(t.cells == std::vector<std::uint64_t>{1, 0, 0, 1});
    CHECK(t.total == 2);
    CHECK(bin_index(0.5, 2) == 1);
    CHECK(bin_index(1.0, 4) == 3);
    CHECK(bin_index(0.0, 4) == 0);
    const auto e = discretize(PairedSample({{1.0, 0.0}}), 4);
    CHECK(e.at(3, 0) == 1);
    // Edges that are not exact in binary floating point.
    for (std::size_t g = 2; g <= 12; ++g) {
        for (std::size_t i = 1; i < g; ++i) {
            const double edge = double(i) / double(g);
            CHECK(bin_index(edge, g) == i);
            CHECK(bin_index(std::nextafter(edge, 0.0), g) == i - 1);
        }
    }
    CHECK_THROWS_AS(discretize(PairedSample({{0.1, 0.1}}), 1), UsageError);
    CHECK_THROWS_AS(PairedSample({{1.1, 0.1}}), UsageError);
    CHECK_THROWS_AS(bin_index(-0.1, 3), UsageError);
    CHECK(t.flatten() == CountVector({1, 0, 0, 1}));
}

TEST_CASE("CSV reader") {
    std::istringstream with_header("x,y\n0.1,0.2\n0.5;0.7\n\n0.9\t1\n");
    const auto s = read_paired_csv(with_header);
    REQUIRE(s.size() == 3);
    CHECK(s.pairs()[1].second == doctest::Approx(0.7));
    std::istringstream spaces("0.25 0.75\r\n  0.5   0.5\n");
    CHECK(read_paired_csv(spaces).size() == 2);
    std::istringstream bad("0.1,0.2\nfoo,bar\n");
    CHECK_THROWS_AS(read_paired_csv(bad), UsageError);
    std::istringstream out_of_range("0.1,1.2\n");
    CHECK_THROWS_AS(read_paired_csv(out_of_range), UsageError);
    std::istringstream three("0.1,0.2,0.3\n0.1,0.2,0.3\n");
    CHECK_THROWS_AS(read_paired_csv(three), UsageError);
}

TEST_CASE("empty table is never rejected") {
    ContingencyTable t;
    t.granularity = 3;
    t.cells.assign(9, 0);
    const auto r = uniformity_plausibility(t, 1000, RandomSeed{1});
    CHECK(r.r == 1.0);
    CHECK_FALSE(r.reject);
    const auto p = uniformity_plausibility(t, 1000, RandomSeed{1}, 0.05, DecisionRule::point);
    CHECK_FALSE(p.reject);
    const auto s = uniformity_plausibility_simplex(t, 10, RandomSeed{1});
    CHECK(s.r == 1.0);
    CHECK_FALSE(s.reject);
}

TEST_CASE("plausibility of the uniform point against an independent sampler") {
    ContingencyTable t;
    t.granularity = 2;
    t.cells = {3, 2, 2, 1};
    t.total = 8;
    const auto r = uniformity_plausibility(t, 200000, RandomSeed{5});
    oracle::DirichletSampler dir(8);
    const int n = 200000;
    int inside = 0;
    for (int i = 0; i < n; ++i) {
        const auto z = dir({1, 3, 2, 2, 1});
        inside += z[1] <= 0.25 && z[2] <= 0.25 && z[3] <= 0.25 && z[4] <= 0.25;
    }
    const double ref = double(inside) / n;
    CHECK(std::abs(r.r - ref) < 4 * std::hypot(r.se_r, oracle::proportion_se(ref, n)));
}

TEST_CASE("cell plausibilities from the Beta laws") {
    const CountVector c({3, 2, 2, 1});
    const auto pl = cell_plausibilities(c, 0.25);
    for (std::size_t k = 0; k < 4; ++k) {
        const double nk = double(c[k]);
        CHECK(pl[k].first == doctest::Approx(oracle::beta_cdf(0.25, nk, 9.0 - nk)));
        CHECK(pl[k].second == doctest::Approx(1.0 - oracle::beta_cdf(0.25, nk + 1.0, 8.0 - nk)));
    }
    // All data in one cell: Z_k + Z_0 = 1, so theta_k >= c stays fully plausible.
    const auto all = cell_plausibilities(CountVector({5, 0, 0, 0}), 0.25);
    CHECK(all[0].second == 1.0);
    CHECK(all[1].first == 1.0);
}

TEST_CASE("perfect dependence is rejected") {
    const auto t = discretize(simulate_diagonal_pairs(400, RandomSeed{3}), 2);
    CHECK(t.at(0, 1) == 0);
    CHECK(t.at(1, 0) == 0);
    const auto r = uniformity_plausibility(t, 20000, RandomSeed{4});
    CHECK(r.r < 1e-3);
    CHECK(r.reject);
    CHECK(r.min_marginal_plausibility < 1e-10);
}

TEST_CASE("marginal rule keeps its size under the null") {
    int rejections = 0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        const auto t = discretize(simulate_uniform_pairs(400, RandomSeed{1000 + std::uint64_t(rep)}), 2);
        rejections += uniformity_plausibility(t, 2000, RandomSeed{std::uint64_t(rep)}).reject;
    }
    CHECK(double(rejections) / reps <= 0.10);
}

TEST_CASE("simplex variant refuses large grids and agrees in spirit on small ones") {
    ContingencyTable big;
    big.granularity = 4;
    big.cells.assign(16, 1);
    big.total = 16;
    CHECK_THROWS_WITH_AS(uniformity_plausibility_simplex(big, 10, RandomSeed{1}),
                         doctest::Contains("granularity"), UsageError);
    const auto t = discretize(simulate_uniform_pairs(6, RandomSeed{2}), 2);
    const auto r = uniformity_plausibility_simplex(t, 200, RandomSeed{3});
    CHECK(r.draws == 200);
    CHECK((r.r >= 0.0 && r.r <= 1.0));
}

TEST_CASE("benchmark rows") {
    BenchmarkConfig cfg;
    cfg.granularities = {2, 4};
    cfg.n_draws = 2000;
    cfg.repetitions = 1;
    const auto rows = runtime_benchmark(cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].granularity == 4);
    CHECK(std::isnan(rows[0].sd_seconds));
    CHECK(rows[0].mean_seconds > 0.0);
    cfg.methods = {BenchmarkMethod::simplex};
    CHECK_THROWS_AS(runtime_benchmark(cfg), UsageError);
    CHECK(to_string(BenchmarkMethod::simplex) == "simplex");
}

TEST_CASE("level must be a probability") {
    ContingencyTable t;
    t.granularity = 2;
    t.cells = {1, 1, 1, 1};
    t.total = 4;
    CHECK_THROWS_AS(uniformity_plausibility(t, 100, RandomSeed{1}, 0.0), UsageError);
    CHECK_THROWS_AS(uniformity_plausibility(t, 0, RandomSeed{1}), UsageError);
}

}  // TEST_SUITE

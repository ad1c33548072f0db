#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "dsinfer/error.hpp"
#include "dsinfer/lp.hpp"
#include "dsinfer/rng.hpp"

using namespace dsinfer;
using lp::LinearConstraint;
using lp::Sense;

namespace {

LinearConstraint leq(std::vector<double> a, double b) { return {std::move(a), b, Sense::less_equal}; }
LinearConstraint eq(std::vector<double> a, double b) { return {std::move(a), b, Sense::equal}; }

// Brute-force optimum over a fine barycentric grid of the 2-simplex.
struct GridOptimum {
    bool feasible = false;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
};

GridOptimum grid_optimum(const std::vector<LinearConstraint>& rows, const std::vector<double>& f, int m,
                         double slack) {
    GridOptimum g;
    for (int i = 0; i <= m; ++i) {
        for (int j = 0; i + j <= m; ++j) {
            const double t[3] = {double(i) / m, double(j) / m, double(m - i - j) / m};
            bool ok = true;
            for (const auto& r : rows) {
                double lhs = 0.0;
                for (int k = 0; k < 3; ++k) lhs += r.coefficients[k] * t[k];
                if (lhs > r.bound + slack) ok = false;
            }
            if (!ok) continue;
            g.feasible = true;
            const double v = f[0] * t[0] + f[1] * t[1] + f[2] * t[2];
            g.min = std::min(g.min, v);
            g.max = std::max(g.max, v);
        }
    }
    return g;
}

}  // namespace

TEST_SUITE("lp") {

TEST_CASE("unconstrained ranges over the simplex are the extreme coordinates") {
    const std::vector<LinearConstraint> none;
    const std::vector<double> f = {0.3, -1.0, 2.0, 0.5};
    const auto range = lp::objective_range(none, 4, f);
    REQUIRE(range);
    CHECK(range->min == doctest::Approx(-1.0));
    CHECK(range->max == doctest::Approx(2.0));
}

TEST_CASE("simple bounded problem") {
    // max theta_0 subject to theta_0 <= 0.3 and theta_1 <= 2 theta_0.
    lp::LpProblem p;
    p.dimension = 3;
    p.constraints = {leq({1, 0, 0}, 0.3), leq({-2, 1, 0}, 0.0)};
    p.objective = {1, 0, 0};
    p.direction = lp::Direction::maximize;
    const auto res = lp::solve(p);
    REQUIRE(res.optimal());
    CHECK(res.value == doctest::Approx(0.3));
    CHECK(lp::max_violation(p.constraints, res.witness) <= 1e-9);

    // min theta_2 with the same rows: theta_2 >= 1 - 0.3 - 0.6.
    p.objective = {0, 0, 1};
    p.direction = lp::Direction::minimize;
    const auto low = lp::solve(p);
    REQUIRE(low.optimal());
    CHECK(low.value == doctest::Approx(0.1));
}

TEST_CASE("infeasible systems are reported, not thrown") {
    const std::vector<LinearConstraint> rows = {leq({-1, 0, 0}, -0.7), leq({0, -1, 0}, -0.7)};
    CHECK_FALSE(lp::feasible(rows, 3));
    CHECK_FALSE(lp::objective_range(rows, 3, std::vector<double>{1, 0, 0}).has_value());
    lp::LpProblem p{3, rows, {1, 0, 0}, lp::Direction::minimize};
    CHECK_FALSE(lp::solve(p).optimal());
}

TEST_CASE("equality rows") {
    const std::vector<LinearConstraint> rows = {eq({1, 0, 0}, 0.25), eq({0, 1, -1}, 0.0)};
    const auto r = lp::objective_range(rows, 3, std::vector<double>{0, 1, 0});
    REQUIRE(r);
    CHECK(r->min == doctest::Approx(0.375));
    CHECK(r->max == doctest::Approx(0.375));
    const std::vector<LinearConstraint> bad = {eq({1, 0, 0}, 1.5)};
    CHECK_FALSE(lp::feasible(bad, 3));
}

TEST_CASE("degenerate single-point region") {
    // theta_0 = theta_1 = theta_2 forced by a cycle of ratio rows.
    const std::vector<LinearConstraint> rows = {leq({1, -1, 0}, 0), leq({0, 1, -1}, 0), leq({-1, 0, 1}, 0)};
    const auto r = lp::objective_range(rows, 3, std::vector<double>{1, 0, 0});
    REQUIRE(r);
    CHECK(r->min == doctest::Approx(1.0 / 3.0));
    CHECK(r->max == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("bad input is a usage error") {
    const std::vector<LinearConstraint> rows = {leq({1, 0}, 0.5)};
    CHECK_THROWS_AS(lp::feasible(rows, 3), UsageError);
    CHECK_THROWS_AS(lp::feasible({}, 1), UsageError);
    CHECK_THROWS_AS(lp::feasible({}, lp::max_dimension + 1), UsageError);
    const std::vector<LinearConstraint> nan_row = {leq({1, 0, 0}, std::nan(""))};
    CHECK_THROWS_AS(lp::feasible(nan_row, 3), UsageError);
}

TEST_CASE("random 3-dimensional programs agree with a grid search") {
    Stream s = Stream::derive(RandomSeed{2024}, 0);
    int feasible = 0;
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<LinearConstraint> rows;
        const int m = 1 + static_cast<int>(s.below(4));
        for (int i = 0; i < m; ++i)
            rows.push_back(leq({2 * s.uniform() - 1, 2 * s.uniform() - 1, 2 * s.uniform() - 1}, 0.6 * s.uniform() - 0.3));
        const std::vector<double> f = {2 * s.uniform() - 1, 2 * s.uniform() - 1, 2 * s.uniform() - 1};
        const auto range = lp::objective_range(rows, 3, f);
        // A region the LP finds must contain grid points once the rows are
        // relaxed by the grid's resolution, and vice versa.
        const auto loose = grid_optimum(rows, f, 400, 0.01);
        const auto tight = grid_optimum(rows, f, 400, 0.0);
        if (tight.feasible) CHECK(range.has_value());
        if (!loose.feasible) CHECK_FALSE(range.has_value());
        if (range && tight.feasible) {
            ++feasible;
            CHECK(range->min <= tight.min + 1e-9);
            CHECK(range->max >= tight.max - 1e-9);
            CHECK(range->min >= loose.min - 0.01);
            CHECK(range->max <= loose.max + 0.01);
        }
    }
    CHECK(feasible > 50);
}

TEST_CASE("minimum equals minus the maximum of the negated objective") {
    Stream s = Stream::derive(RandomSeed{3}, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t K = 3 + s.below(6);
        std::vector<LinearConstraint> rows;
        for (int i = 0; i < 6; ++i) {
            std::vector<double> a(K);
            for (auto& v : a) v = 2 * s.uniform() - 1;
            rows.push_back(leq(a, 0.2 * s.uniform()));
        }
        std::vector<double> f(K), g(K);
        for (std::size_t k = 0; k < K; ++k) {
            f[k] = 2 * s.uniform() - 1;
            g[k] = -f[k];
        }
        const auto a = lp::objective_range(rows, K, f);
        const auto b = lp::objective_range(rows, K, g);
        REQUIRE(a.has_value() == b.has_value());
        if (a) {
            CHECK(a->min == doctest::Approx(-b->max).epsilon(1e-9));
            CHECK(a->max == doctest::Approx(-b->min).epsilon(1e-9));
        }
    }
}

}  // TEST_SUITE

#include <string>
#include <vector>

#include "doctest.h"
#include "dsinfer/error.hpp"
#include "dsinfer/validate.hpp"

using namespace dsinfer;

TEST_SUITE("validate") {

TEST_CASE("suite names") {
    const auto& s = validator_suites();
    CHECK(s == std::vector<std::string>{"theorem1", "theorem2", "theorem3", "rip", "qmap", "lp"});
    const std::vector<std::string> bad = {"nope"};
    CHECK_THROWS_AS(run_validators(bad, ValidationBudget{}, RandomSeed{1}), UsageError);
}

TEST_CASE("every suite passes on a moderate budget") {
    const ValidationBudget budget{40000, 2000};
    const auto results = run_validators(validator_suites(), budget, RandomSeed{1});
    REQUIRE_FALSE(results.empty());
    for (const auto& r : results) {
        INFO(r.suite << ": " << r.name << " -> " << r.detail);
        CHECK(r.passed);
        CHECK(r.seconds >= 0.0);
    }
}

TEST_CASE("results depend only on the seed") {
    const std::vector<std::string> one = {"theorem2"};
    const ValidationBudget budget{5000, 200};
    const auto a = run_validators(one, budget, RandomSeed{7});
    const auto b = run_validators(one, budget, RandomSeed{7});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].statistic == b[i].statistic);
}

TEST_CASE("cycle and grid oracles agree on hand-built polytopes") {
    PolytopeFocalSet p;
    p.n = 2;
    p.K = 3;
    // Observation 0 forces theta_1 <= theta_0 / 2; observation 1 forces theta_0 <= theta_1.
    p.observations = {0, 1};
    p.z = {2.0, 1.0, 5.0, 1.0, 1.0, 5.0};
    CHECK_FALSE(polytope_feasible_by_cycles(p));
    CHECK_FALSE(polytope_feasible_by_grid(p));
    p.z = {1.0, 2.0, 5.0, 1.0, 1.0, 5.0};
    CHECK(polytope_feasible_by_cycles(p));
    CHECK(polytope_feasible_by_grid(p));
    p.K = 4;
    p.z.assign(8, 1.0);
    CHECK_THROWS_AS(polytope_feasible_by_grid(p), UsageError);
}

}  // TEST_SUITE

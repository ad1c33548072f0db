#pragma once

// Monte-Carlo validators for the theoretical properties the library relies on.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dsinfer/rng.hpp"
#include "dsinfer/simplex_dsm.hpp"

namespace dsinfer {

struct ValidatorResult {
    std::string suite;
    std::string name;
    bool passed = false;
    double statistic = 0.0;
    double threshold = 0.0;
    std::string detail;
    double seconds = 0.0;
};

struct ValidationBudget {
    std::uint64_t draws = 100000;   // Monte-Carlo draws per check
    std::uint64_t lp_draws = 5000;  // paired LP / grid-oracle proposals
};

/// theorem1, theorem2, theorem3, rip, qmap, lp
const std::vector<std::string>& validator_suites();

std::vector<ValidatorResult> run_validators(std::span<const std::string> suites,
                                            const ValidationBudget& budget, RandomSeed seed);

/// Exact feasibility of a Simplex-DSM polytope as a shortest-path problem:
/// the ratio constraints are difference constraints on log(theta) over the
/// observed categories, feasible iff no cycle has weight product below 1.
bool polytope_feasible_by_cycles(const PolytopeFocalSet& set);

/// Feasibility by scanning the simplex grid {theta = i / resolution} (K = 3).
bool polytope_feasible_by_grid(const PolytopeFocalSet& set, std::size_t resolution = 200);

}  // namespace dsinfer

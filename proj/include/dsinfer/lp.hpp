#pragma once

// Small dense linear programs over the probability simplex.
//
// Every problem implicitly carries sum(theta) = 1 and theta >= 0. Solved with
// a two-phase tableau simplex using Bland's rule, which is plenty for the
// problem sizes produced by the Simplex-DSM (K <= 64, a few hundred rows).

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dsinfer::lp {

inline constexpr std::size_t max_dimension = 64;
inline constexpr double feasibility_tolerance = 1e-9;
inline constexpr double pivot_tolerance = 1e-9;

enum class Sense { less_equal, equal };
enum class Direction { minimize, maximize };
enum class Status { optimal, infeasible };

struct LinearConstraint {
    std::vector<double> coefficients;
    double bound = 0.0;
    Sense sense = Sense::less_equal;
};

struct LpProblem {
    std::size_t dimension = 0;
    std::vector<LinearConstraint> constraints;
    std::vector<double> objective;
    Direction direction = Direction::minimize;
};

struct LpResult {
    Status status = Status::infeasible;
    double value = 0.0;           // defined iff optimal
    std::vector<double> witness;  // defined iff optimal

    bool optimal() const { return status == Status::optimal; }
};

/// Closed range of a linear objective over the feasible region.
struct ObjectiveRange {
    double min = 0.0;
    double max = 0.0;
};

LpResult solve(const LpProblem& problem);

/// Phase-1 feasibility of the constraints intersected with the simplex.
bool feasible(std::span<const LinearConstraint> constraints, std::size_t dimension);

/// Minimum and maximum of `objective`, sharing one phase-1 solve; nullopt if
/// the region is empty.
std::optional<ObjectiveRange> objective_range(std::span<const LinearConstraint> constraints,
                                              std::size_t dimension,
                                              std::span<const double> objective);

/// Largest violation of the constraints (and of the simplex) at `theta`.
double max_violation(std::span<const LinearConstraint> constraints, std::span<const double> theta);

}  // namespace dsinfer::lp

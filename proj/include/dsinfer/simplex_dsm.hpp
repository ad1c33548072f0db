#pragma once

// Dempster's Simplex-DSM posterior.
//
// Each observation X_i carries K independent Expo(1) draws Z_{i,1..K}; the
// focal set is the polytope
//   { theta in simplex : Z_{i,X_i} theta_j - Z_{i,j} theta_{X_i} <= 0, j != X_i }
// over all observations. Draws whose polytope is empty are rejected.
// Categories are 0-based.

#include <cstdint>
#include <span>
#include <vector>

#include "dsinfer/dsm.hpp"
#include "dsinfer/lp.hpp"
#include "dsinfer/rng.hpp"

namespace dsinfer {

class ObservationList {
public:
    ObservationList(std::vector<std::size_t> observations, std::size_t K);

    /// Observations in category order: counts (2,1,1) give (0,0,1,2).
    static ObservationList from_counts(const CountVector& counts);

    std::span<const std::size_t> observations() const { return obs_; }
    std::size_t size() const { return obs_.size(); }
    std::size_t categories() const { return K_; }
    CountVector counts() const;

private:
    std::vector<std::size_t> obs_;
    std::size_t K_;
};

/// One accepted focal polytope; `z` is row-major n x K.
struct PolytopeFocalSet {
    std::size_t n = 0;
    std::size_t K = 0;
    std::vector<double> z;
    std::vector<std::size_t> observations;

    double draw(std::size_t i, std::size_t j) const { return z[i * K + j]; }

    /// The n (K - 1) ratio constraints, one row per (observation, j != X_i).
    std::vector<lp::LinearConstraint> constraints() const;

    bool contains(std::span<const double> theta, double tolerance = 0.0) const;
};

/// Proposals allowed between two acceptances before the sampler gives up.
inline constexpr std::uint64_t simplex_max_gap = 10'000'000;
inline constexpr std::uint64_t simplex_chunk_size = 256;

struct SimplexSample {
    std::vector<PolytopeFocalSet> sets;
    std::uint64_t proposals = 0;

    double acceptance_rate() const;
};

/// Rejection sampler: keeps the first `n_accepted` proposals whose polytope
/// is LP-feasible on the simplex.
SimplexSample sample_focal_polytopes(const ObservationList& obs, std::uint64_t n_accepted,
                                     RandomSeed seed, unsigned threads = 1);

/// Fraction of `n_proposals` fresh draws that are feasible, with its SE.
struct FeasibilityRate {
    std::uint64_t proposals = 0;
    std::uint64_t feasible = 0;
    double rate() const;
    double standard_error() const;
};

FeasibilityRate simplex_feasibility_rate(const ObservationList& obs, std::uint64_t n_proposals,
                                         RandomSeed seed, unsigned threads = 1);

/// [min theta_k, max theta_k] over each polytope, clamped to [0, 1].
std::vector<lp::ObjectiveRange> cell_ranges(std::span<const PolytopeFocalSet> sets, std::size_t k,
                                            unsigned threads = 1);

/// For iff max theta_k <= theta0, against iff min theta_k > theta0.
PqrEstimate pqr_from_ranges(std::span<const lp::ObjectiveRange> ranges, double theta0);

PqrEstimate pqr_cell_leq_simplex(const ObservationList& obs, std::size_t k, double theta0,
                                 std::uint64_t n_accepted, RandomSeed seed, unsigned threads = 1);

std::vector<PqrEstimate> pqr_cell_leq_simplex_curve(const ObservationList& obs, std::size_t k,
                                                    std::span<const double> theta0_grid,
                                                    std::uint64_t n_accepted, RandomSeed seed,
                                                    unsigned threads = 1);

/// {theta_2 / theta_3 <= r0 | theta_1 = theta1_fixed} on K = 3. Polytopes
/// missing the slice are dropped; on the rest f = theta_2 - r0 theta_3 has
/// range [A, B]: against iff A > 0, for iff B <= 0.
PqrEstimate pqr_conditional_ratio_simplex(const ObservationList& obs, double r0,
                                          std::uint64_t n_accepted, RandomSeed seed,
                                          double theta1_fixed = 0.5, unsigned threads = 1);

/// Same, on polytopes that were already sampled.
std::vector<PqrEstimate> pqr_conditional_ratio_simplex_curve(std::span<const PolytopeFocalSet> sets,
                                                             std::span<const double> r0_grid,
                                                             double theta1_fixed = 0.5,
                                                             unsigned threads = 1);

std::vector<PqrEstimate> pqr_conditional_ratio_simplex_curve(const ObservationList& obs,
                                                             std::span<const double> r0_grid,
                                                             std::uint64_t n_accepted,
                                                             RandomSeed seed,
                                                             double theta1_fixed = 0.5,
                                                             unsigned threads = 1);

/// Theorem-2 style check: with Z_1..Z_K iid Expo(1) and theta_rest a point
/// of the (K-1)-simplex for categories 2..K, A = Z_1 / min_j(Z_j / theta_rest_j)
/// and B = A / (1 + A) should be Uniform(0, 1). Returns the KS distance.
double neutrality_lower_bound_check(std::size_t K, std::span<const double> theta_rest,
                                    std::uint64_t n_draws, RandomSeed seed);

struct CommonalityCheck {
    double empirical = 0.0;
    double standard_error = 0.0;
    double analytic = 0.0;
    std::uint64_t numerator = 0;
    std::uint64_t denominator = 0;
};

/// Theorem-3 style check: P(max_{j>=2} Z_1/Z_j <= p1/(1-p1)) / P(Z_1/sum Z <= p1)
/// against 1/(1 + (K-2)(1-p1)) * 1/(1 + sum_{i=1}^{K-2} (1-p1)^i).
CommonalityCheck commonality_vacuous_mass(std::size_t K, double p1, std::uint64_t n_draws,
                                          RandomSeed seed);

double commonality_analytic(std::size_t K, double p1);

}  // namespace dsinfer

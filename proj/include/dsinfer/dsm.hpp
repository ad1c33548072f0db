#pragma once

// Dirichlet-DSM posterior and its (p, q, r) assertion calculus.
//
// Given counts N = (N_1..N_K), the posterior random set is
//   { theta in simplex : theta_k >= Z_k for all k },
//   (Z_0, Z_1, ..., Z_K) ~ Dirichlet(1, N_1, ..., N_K).
// Z_0 is the size of the random sub-simplex. Category indices are 0-based in
// this API.

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "dsinfer/rng.hpp"
#include "dsinfer/stats.hpp"

namespace dsinfer {

/// Observed multinomial cell counts, K >= 2 categories.
class CountVector {
public:
    explicit CountVector(std::vector<std::uint64_t> counts);

    std::span<const std::uint64_t> counts() const { return counts_; }
    std::size_t size() const { return counts_.size(); }
    std::uint64_t operator[](std::size_t k) const { return counts_[k]; }
    std::uint64_t total() const { return total_; }

    /// Concentration vector (1, N_1, ..., N_K) of the posterior.
    ShapeVector posterior_shape() const;

    friend bool operator==(const CountVector&, const CountVector&) = default;

private:
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

/// One posterior focal set.
struct DirichletFocalSet {
    double z0 = 1.0;
    std::vector<double> z;

    /// Upper end of theta_k over the set: 1 - sum_{j != k} z_j.
    double upper(std::size_t k) const;
    bool contains(std::span<const double> theta) const;
};

/// Dempster-Shafer output: probability for, against, and don't know.
struct PqrTriple {
    double p = 0.0;
    double q = 0.0;
    double r = 1.0;
};

/// A Monte-Carlo (p, q, r) with standard errors and the number of focal sets
/// it was computed from.
struct PqrEstimate {
    PqrTriple value;
    double se_p = 0.0;
    double se_q = 0.0;
    double se_r = 0.0;
    std::uint64_t draws = 0;

    static PqrEstimate from_tallies(std::uint64_t n_for, std::uint64_t n_against, std::uint64_t n);
};

/// {theta_k <= theta0}
struct CellLeq {
    std::size_t k = 0;
    double theta0 = 0.0;
};

/// {theta_k = theta0}
struct CellPoint {
    std::size_t k = 0;
    double theta0 = 0.0;
};

/// {theta_2 / theta_3 <= r0 | theta_1 = theta1_fixed} for K = 3. The usual
/// conditioning value is theta1_fixed = 0.5.
struct ConditionalRatio {
    double r0 = 1.0;
    double theta1_fixed = 0.5;
};

using Assertion = std::variant<CellLeq, CellPoint, ConditionalRatio>;

/// How a single focal set bears on an assertion.
enum class Verdict { for_assertion, against, unknown, conflict };

/// Checks an assertion's parameters against K; throws UsageError.
void validate(const Assertion& assertion, std::size_t K);

/// Classifies one focal set. `conflict` means the set misses the
/// conditioning event (ConditionalRatio only).
Verdict classify(const DirichletFocalSet& set, const Assertion& assertion);

/// Disjoint non-empty groups covering 0..K-1.
class Partition {
public:
    Partition(std::vector<std::vector<std::size_t>> groups, std::size_t K);

    const std::vector<std::vector<std::size_t>>& groups() const { return groups_; }
    std::size_t size() const { return groups_.size(); }
    std::size_t categories() const { return K_; }

private:
    std::vector<std::vector<std::size_t>> groups_;
    std::size_t K_;
};

// ---- sampling --------------------------------------------------------------

/// Draws per sub-stream chunk for every Dirichlet-DSM Monte-Carlo loop.
inline constexpr std::uint64_t focal_chunk_size = 4096;

std::vector<DirichletFocalSet> ddsm_sample(const CountVector& counts, std::uint64_t n_draws,
                                           RandomSeed seed, unsigned threads = 1);

/// Result of checking the max-of-uniforms construction against Dirichlet
/// marginals. `ks[0]` is Z_0 against Beta(1, N), `ks[k]` is Z_k against
/// Beta(N_k, N + 1 - N_k); zero-count cells report 0 when every draw is
/// exactly 0 and 1 otherwise.
struct Theorem1Check {
    std::vector<double> ks;
    std::uint64_t accepted = 0;
    std::uint64_t proposals = 0;
    bool tilted = false;
    double max_ks() const;
};

enum class Theorem1Mode { automatic, naive, tilted };

/// Builds Z_k as the maximum of the N_k uniforms assigned to category k and
/// keeps draws with sum(Z) <= 1. When the acceptance probability
/// prod(N_k!) / N! is below 1e-3 the automatic mode switches to an exact
/// exponentially tilted proposal of the same conditional law.
Theorem1Check theorem1_empirical_check(const CountVector& counts, std::uint64_t n_accepted,
                                       RandomSeed seed, Theorem1Mode mode = Theorem1Mode::automatic);

// ---- closed forms ----------------------------------------------------------

/// p = P(Z_k + Z_0 <= theta0), q = P(Z_k > theta0) from the Beta laws
/// Z_k + Z_0 ~ Beta(N_k + 1, N - N_k) and Z_k ~ Beta(N_k, N + 1 - N_k).
/// The evidence-for test is a weak inequality, so theta0 = 1 gives p = 1.
PqrTriple pqr_cell_leq(const CountVector& counts, std::size_t k, double theta0);

// ---- Monte Carlo -----------------------------------------------------------

PqrEstimate pqr_cell_leq_mc(const CountVector& counts, std::size_t k, double theta0,
                            std::uint64_t n_draws, RandomSeed seed, unsigned threads = 1);

/// p = 0; r = P(Z_k <= theta0 <= Z_k + Z_0).
PqrEstimate pqr_cell_point(const CountVector& counts, std::size_t k, double theta0,
                           std::uint64_t n_draws, RandomSeed seed, unsigned threads = 1);

/// Point assertion {theta = point}: r is the fraction of focal sets with
/// Z_k <= point_k for every k.
PqrEstimate pqr_vector_point(const CountVector& counts, std::span<const double> point,
                             std::uint64_t n_draws, RandomSeed seed, unsigned threads = 1);

/// Conditional ratio assertion on a trinomial; estimates are over the draws
/// whose focal set meets {theta_1 = theta1_fixed}.
PqrEstimate pqr_conditional_ratio(const CountVector& counts, double r0, std::uint64_t n_draws,
                                  RandomSeed seed, double theta1_fixed = 0.5, unsigned threads = 1);

/// Same draws evaluated for every r0 in `r0_grid`.
std::vector<PqrEstimate> pqr_conditional_ratio_curve(const CountVector& counts,
                                                     std::span<const double> r0_grid,
                                                     std::uint64_t n_draws, RandomSeed seed,
                                                     double theta1_fixed = 0.5,
                                                     unsigned threads = 1);

/// Generic Monte-Carlo (p, q, r) for any assertion.
PqrEstimate pqr_mc(const CountVector& counts, const Assertion& assertion, std::uint64_t n_draws,
                   RandomSeed seed, unsigned threads = 1);

/// Every assertion evaluated on the same focal sets in one pass; each result
/// equals pqr_mc for that assertion with the same seed.
std::vector<PqrEstimate> pqr_mc_batch(const CountVector& counts, std::span<const Assertion> assertions,
                                      std::uint64_t n_draws, RandomSeed seed, unsigned threads = 1);

// ---- Interval-DSM and the relocation map ----------------------------------

/// Interval-DSM focal set for one observation X:
///   { theta : sum_{j<X} theta_j <= u < sum_{j<=X} theta_j }.
struct IntervalFocalSet {
    std::size_t category = 0;  // X
    double u = 0.0;
    std::size_t lower_terms = 0;  // number of leading theta's in the lower sum
    std::size_t upper_terms = 0;  // number of leading theta's in the upper sum

    bool contains(std::span<const double> theta) const;
};

IntervalFocalSet interval_dsm_focal(std::size_t K, std::size_t category, double u);

/// Relocates the partition of [0, 1) by theta (natural order) into the order
/// given by `order` (order[0] must be `category`) and maps u accordingly.
double permutation_pushforward(std::span<const double> theta, std::span<const std::size_t> order,
                               std::size_t category, double u);

CountVector aggregate_counts(const CountVector& counts, const Partition& partition);

}  // namespace dsinfer

#pragma once

// Testing independence of (X, Y) on [0, 1]^2 by discretizing into a G x G
// contingency table and checking the Dirichlet-DSM posterior against the
// uniform cell vector (1/K, ..., 1/K), K = G^2.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dsinfer/dsm.hpp"

namespace dsinfer {

class PairedSample {
public:
    PairedSample() = default;
    explicit PairedSample(std::vector<std::pair<double, double>> pairs);

    const std::vector<std::pair<double, double>>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }

private:
    std::vector<std::pair<double, double>> pairs_;
};

/// Reads two numeric columns (comma, semicolon, tab or space separated). A
/// first line that does not parse as numbers is taken as a header.
PairedSample read_paired_csv(std::istream& in);

/// n iid pairs, uniform on the unit square.
PairedSample simulate_uniform_pairs(std::size_t n, RandomSeed seed);

/// n pairs with y = x, x uniform.
PairedSample simulate_diagonal_pairs(std::size_t n, RandomSeed seed);

struct ContingencyTable {
    std::size_t granularity = 0;
    std::vector<std::uint64_t> cells;  // cells[i * G + j]: x in bin i, y in bin j
    std::uint64_t total = 0;

    std::uint64_t at(std::size_t i, std::size_t j) const { return cells[i * granularity + j]; }
    CountVector flatten() const { return CountVector(cells); }
};

/// Bin index of x in [0, 1] for bins [i/G, (i+1)/G); x = 1 goes to the top bin.
std::size_t bin_index(double x, std::size_t granularity);

ContingencyTable discretize(const PairedSample& sample, std::size_t granularity);

enum class DecisionRule {
    /// Reject when some one-sided cell plausibility Pl(theta_k <= 1/K) or
    /// Pl(theta_k >= 1/K) falls below level / (2K).
    marginal,
    /// Reject when the plausibility r of {theta = uniform} falls below level.
    point,
};

struct UniformityResult {
    double r = 1.0;          // plausibility of {theta = (1/K, ..., 1/K)}
    double se_r = 0.0;
    std::uint64_t draws = 0;
    double min_marginal_plausibility = 1.0;
    std::size_t min_marginal_cell = 0;
    double level = 0.05;
    DecisionRule rule = DecisionRule::marginal;
    bool reject = false;
};

/// Plausibility of {theta_k <= c} and of {theta_k >= c} for every cell, in
/// closed form from the Beta laws of Z_k and Z_k + Z_0.
std::vector<std::pair<double, double>> cell_plausibilities(const CountVector& counts, double c);

UniformityResult uniformity_plausibility(const ContingencyTable& table, std::uint64_t n_draws,
                                         RandomSeed seed, double level = 0.05,
                                         DecisionRule rule = DecisionRule::marginal,
                                         unsigned threads = 1);

/// Simplex-DSM analogue: r is the fraction of accepted polytopes containing
/// the uniform point. Only G <= 3 is supported.
UniformityResult uniformity_plausibility_simplex(const ContingencyTable& table,
                                                 std::uint64_t n_accepted, RandomSeed seed,
                                                 double level = 0.05);

inline constexpr std::size_t simplex_max_granularity = 3;

enum class BenchmarkMethod { ddsm, simplex };

std::string to_string(BenchmarkMethod m);

struct BenchmarkConfig {
    std::vector<std::size_t> granularities = {2, 3, 4, 5, 6, 7, 8};
    std::vector<BenchmarkMethod> methods = {BenchmarkMethod::ddsm};
    std::size_t n = 400;
    std::uint64_t n_draws = 100000;
    std::size_t simplex_n = 6;
    std::uint64_t simplex_draws = 100;
    unsigned repetitions = 5;
    RandomSeed seed{};
};

struct BenchmarkRow {
    BenchmarkMethod method = BenchmarkMethod::ddsm;
    std::size_t granularity = 0;
    std::size_t n = 0;
    std::uint64_t draws = 0;
    unsigned repetitions = 0;
    double mean_seconds = 0.0;
    double sd_seconds = 0.0;  // NaN when repetitions == 1
    double mean_r = 0.0;
    unsigned rejections = 0;
};

/// Times the whole test (simulate under the null, discretize, test) on one
/// thread. Throws UsageError when the Simplex-DSM is asked for G > 3.
std::vector<BenchmarkRow> runtime_benchmark(const BenchmarkConfig& config);

}  // namespace dsinfer

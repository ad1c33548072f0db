#include "dsinfer/simplex_dsm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dsinfer/error.hpp"
#include "dsinfer/parallel.hpp"
#include "dsinfer/stats.hpp"

namespace dsinfer {

ObservationList::ObservationList(std::vector<std::size_t> observations, std::size_t K)
    : obs_(std::move(observations)), K_(K) {
    if (K_ < 2) throw UsageError("K must be at least 2");
    if (K_ > lp::max_dimension)
        throw UsageError("Simplex-DSM supports at most " + std::to_string(lp::max_dimension) +
                         " categories");
    if (obs_.empty()) throw UsageError("the Simplex-DSM needs at least one observation");
    for (auto x : obs_)
        if (x >= K_) throw UsageError("observation category out of range");
}

ObservationList ObservationList::from_counts(const CountVector& counts) {
    std::vector<std::size_t> obs;
    for (std::size_t k = 0; k < counts.size(); ++k)
        obs.insert(obs.end(), counts[k], k);
    return ObservationList(std::move(obs), counts.size());
}

CountVector ObservationList::counts() const {
    std::vector<std::uint64_t> c(K_, 0);
    for (auto x : obs_) ++c[x];
    return CountVector(std::move(c));
}

std::vector<lp::LinearConstraint> PolytopeFocalSet::constraints() const {
    std::vector<lp::LinearConstraint> rows;
    rows.reserve(n * (K - 1));
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t x = observations[i];
        for (std::size_t j = 0; j < K; ++j) {
            if (j == x) continue;
            lp::LinearConstraint c;
            c.coefficients.assign(K, 0.0);
            c.coefficients[j] = draw(i, x);
            c.coefficients[x] = -draw(i, j);
            rows.push_back(std::move(c));
        }
    }
    return rows;
}

bool PolytopeFocalSet::contains(std::span<const double> theta, double tolerance) const {
    if (theta.size() != K) throw UsageError("theta has the wrong dimension");
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t x = observations[i];
        for (std::size_t j = 0; j < K; ++j) {
            if (j == x) continue;
            if (draw(i, x) * theta[j] - draw(i, j) * theta[x] > tolerance) return false;
        }
    }
    return true;
}

double SimplexSample::acceptance_rate() const {
    return proposals == 0 ? 0.0 : static_cast<double>(sets.size()) / static_cast<double>(proposals);
}

double FeasibilityRate::rate() const {
    return proposals == 0 ? 0.0 : static_cast<double>(feasible) / static_cast<double>(proposals);
}

double FeasibilityRate::standard_error() const {
    if (proposals == 0) return 0.0;
    const double r = rate();
    return std::sqrt(r * (1.0 - r) / static_cast<double>(proposals));
}

namespace {

PolytopeFocalSet propose(const ObservationList& obs, Stream& stream) {
    PolytopeFocalSet s;
    s.n = obs.size();
    s.K = obs.categories();
    s.observations.assign(obs.observations().begin(), obs.observations().end());
    s.z.resize(s.n * s.K);
    for (double& v : s.z) v = sample_exponential(stream);
    return s;
}

bool polytope_feasible(const PolytopeFocalSet& s) {
    // A single observation is always satisfied by the vertex at X_1.
    if (s.n == 1) return true;
    return lp::feasible(s.constraints(), s.K);
}

std::vector<double> unit(std::size_t K, std::size_t k) {
    std::vector<double> e(K, 0.0);
    e[k] = 1.0;
    return e;
}

struct FeasibleTally {
    std::uint64_t proposals = 0;
    std::uint64_t feasible = 0;
    FeasibleTally& operator+=(const FeasibleTally& o) {
        proposals += o.proposals;
        feasible += o.feasible;
        return *this;
    }
};

void check_conditional(const ObservationList& obs, double r0, double theta1_fixed) {
    if (obs.categories() != 3) throw UsageError("the conditional ratio assertion needs K = 3");
    if (!(r0 >= 0.0)) throw UsageError("r0 must be non-negative");
    if (!(theta1_fixed > 0.0 && theta1_fixed < 1.0)) throw UsageError("theta1_fixed must lie in (0, 1)");
}

}  // namespace

SimplexSample sample_focal_polytopes(const ObservationList& obs, std::uint64_t n_accepted,
                                     RandomSeed seed, unsigned threads) {
    auto run = collect_accepted<PolytopeFocalSet>(
        n_accepted, simplex_chunk_size, threads, simplex_max_gap, [&](std::uint64_t chunk) {
            Stream stream = Stream::derive(seed, chunk);
            std::vector<Accepted<PolytopeFocalSet>> out;
            for (std::uint64_t i = 0; i < simplex_chunk_size; ++i) {
                auto s = propose(obs, stream);
                if (polytope_feasible(s)) out.push_back({i, std::move(s)});
            }
            return out;
        });
    return SimplexSample{std::move(run.items), run.proposals};
}

FeasibilityRate simplex_feasibility_rate(const ObservationList& obs, std::uint64_t n_proposals,
                                         RandomSeed seed, unsigned threads) {
    const auto t = run_chunked<FeasibleTally>(
        n_proposals, simplex_chunk_size, threads,
        [&](std::uint64_t chunk, std::uint64_t begin, std::uint64_t end) {
            Stream stream = Stream::derive(seed, chunk);
            FeasibleTally tally;
            for (std::uint64_t i = begin; i < end; ++i) {
                ++tally.proposals;
                if (polytope_feasible(propose(obs, stream))) ++tally.feasible;
            }
            return tally;
        });
    return FeasibilityRate{t.proposals, t.feasible};
}

std::vector<lp::ObjectiveRange> cell_ranges(std::span<const PolytopeFocalSet> sets, std::size_t k,
                                            unsigned threads) {
    std::vector<lp::ObjectiveRange> out(sets.size());
    detail::parallel_for(sets.size(), threads, [&](std::uint64_t i) {
        const auto& s = sets[i];
        if (k >= s.K) throw UsageError("category index out of range");
        const auto range = lp::objective_range(s.constraints(), s.K, unit(s.K, k));
        if (!range) throw NumericError("accepted polytope failed its feasibility re-check");
        out[i] = {std::clamp(range->min, 0.0, 1.0), std::clamp(range->max, 0.0, 1.0)};
    });
    return out;
}

PqrEstimate pqr_from_ranges(std::span<const lp::ObjectiveRange> ranges, double theta0) {
    std::uint64_t n_for = 0, n_against = 0;
    for (const auto& r : ranges) {
        if (r.max <= theta0) ++n_for;
        else if (r.min > theta0) ++n_against;
    }
    return PqrEstimate::from_tallies(n_for, n_against, ranges.size());
}

std::vector<PqrEstimate> pqr_cell_leq_simplex_curve(const ObservationList& obs, std::size_t k,
                                                    std::span<const double> theta0_grid,
                                                    std::uint64_t n_accepted, RandomSeed seed,
                                                    unsigned threads) {
    if (k >= obs.categories()) throw UsageError("category index out of range");
    for (double t : theta0_grid)
        if (!(t >= 0.0 && t <= 1.0)) throw UsageError("theta0 must lie in [0, 1]");
    const auto sample = sample_focal_polytopes(obs, n_accepted, seed, threads);
    const auto ranges = cell_ranges(sample.sets, k, threads);
    std::vector<PqrEstimate> out;
    out.reserve(theta0_grid.size());
    for (double t : theta0_grid) out.push_back(pqr_from_ranges(ranges, t));
    return out;
}

PqrEstimate pqr_cell_leq_simplex(const ObservationList& obs, std::size_t k, double theta0,
                                 std::uint64_t n_accepted, RandomSeed seed, unsigned threads) {
    const double grid[] = {theta0};
    return pqr_cell_leq_simplex_curve(obs, k, grid, n_accepted, seed, threads).front();
}

std::vector<PqrEstimate> pqr_conditional_ratio_simplex_curve(std::span<const PolytopeFocalSet> sets,
                                                             std::span<const double> r0_grid,
                                                             double theta1_fixed, unsigned threads) {
    for (const auto& s : sets)
        if (s.K != 3) throw UsageError("the conditional ratio assertion needs K = 3");
    for (double r0 : r0_grid)
        if (!(r0 >= 0.0)) throw UsageError("r0 must be non-negative");
    if (!(theta1_fixed > 0.0 && theta1_fixed < 1.0)) throw UsageError("theta1_fixed must lie in (0, 1)");

    // ranges[i][g]: range of theta_2 - r0 theta_3 for polytope i on the slice;
    // empty when the polytope misses the slice.
    std::vector<std::vector<lp::ObjectiveRange>> ranges(sets.size());
    detail::parallel_for(sets.size(), threads, [&](std::uint64_t i) {
        auto rows = sets[i].constraints();
        lp::LinearConstraint slice;
        slice.coefficients = {1.0, 0.0, 0.0};
        slice.bound = theta1_fixed;
        slice.sense = lp::Sense::equal;
        rows.push_back(slice);
        if (!lp::feasible(rows, 3)) return;
        for (double r0 : r0_grid) {
            // r0 = inf: the sign of f is the sign of -theta_3.
            const std::vector<double> f = std::isinf(r0) ? std::vector<double>{0.0, 0.0, -1.0}
                                                         : std::vector<double>{0.0, 1.0, -r0};
            const auto range = lp::objective_range(rows, 3, f);
            if (!range) throw NumericError("slice feasibility changed between LP solves");
            ranges[i].push_back(*range);
        }
    });

    std::vector<PqrEstimate> out;
    out.reserve(r0_grid.size());
    for (std::size_t g = 0; g < r0_grid.size(); ++g) {
        std::uint64_t n = 0, n_for = 0, n_against = 0;
        for (const auto& r : ranges) {
            if (r.empty()) continue;
            ++n;
            if (r[g].min > 0.0) ++n_against;
            else if (r[g].max <= 0.0) ++n_for;
        }
        if (n == 0)
            throw DegenerateError("no accepted polytope meets theta_1 = " + std::to_string(theta1_fixed));
        out.push_back(PqrEstimate::from_tallies(n_for, n_against, n));
    }
    return out;
}

std::vector<PqrEstimate> pqr_conditional_ratio_simplex_curve(const ObservationList& obs,
                                                             std::span<const double> r0_grid,
                                                             std::uint64_t n_accepted,
                                                             RandomSeed seed, double theta1_fixed,
                                                             unsigned threads) {
    for (double r0 : r0_grid) check_conditional(obs, r0, theta1_fixed);
    if (r0_grid.empty()) check_conditional(obs, 0.0, theta1_fixed);
    const auto sample = sample_focal_polytopes(obs, n_accepted, seed, threads);
    return pqr_conditional_ratio_simplex_curve(sample.sets, r0_grid, theta1_fixed, threads);
}

PqrEstimate pqr_conditional_ratio_simplex(const ObservationList& obs, double r0,
                                          std::uint64_t n_accepted, RandomSeed seed,
                                          double theta1_fixed, unsigned threads) {
    const double grid[] = {r0};
    return pqr_conditional_ratio_simplex_curve(obs, grid, n_accepted, seed, theta1_fixed, threads)
        .front();
}

double neutrality_lower_bound_check(std::size_t K, std::span<const double> theta_rest,
                                    std::uint64_t n_draws, RandomSeed seed) {
    if (K < 2) throw UsageError("K must be at least 2");
    if (theta_rest.size() != K - 1) throw UsageError("theta_rest must have K - 1 components");
    double sum = 0.0;
    for (double t : theta_rest) {
        if (!(t >= 0.0 && t <= 1.0)) throw UsageError("theta_rest components must lie in [0, 1]");
        sum += t;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw UsageError("theta_rest must sum to 1");
    if (n_draws == 0) throw UsageError("n_draws must be positive");

    std::vector<double> b(n_draws);
    const std::uint64_t chunks = (n_draws + focal_chunk_size - 1) / focal_chunk_size;
    for (std::uint64_t c = 0; c < chunks; ++c) {
        Stream stream = Stream::derive(seed, c);
        const std::uint64_t end = std::min(n_draws, (c + 1) * focal_chunk_size);
        for (std::uint64_t i = c * focal_chunk_size; i < end; ++i) {
            const double z1 = sample_exponential(stream);
            double m = std::numeric_limits<double>::infinity();
            for (double t : theta_rest) {
                const double zj = sample_exponential(stream);
                if (t > 0.0) m = std::min(m, zj / t);
            }
            const double a = z1 / m;
            b[i] = a / (1.0 + a);
        }
    }
    std::sort(b.begin(), b.end());
    return ks_distance(b, uniform_cdf);
}

double commonality_analytic(std::size_t K, double p1) {
    if (K < 3) throw UsageError("K must be at least 3");
    if (!(p1 > 0.0 && p1 < 1.0)) throw DomainError("p1 must lie in (0, 1)");
    const double w = 1.0 - p1;
    double series = 1.0;
    double power = 1.0;
    for (std::size_t i = 1; i + 2 <= K; ++i) {
        power *= w;
        series += power;
    }
    return 1.0 / (1.0 + static_cast<double>(K - 2) * w) / series;
}

CommonalityCheck commonality_vacuous_mass(std::size_t K, double p1, std::uint64_t n_draws,
                                          RandomSeed seed) {
    CommonalityCheck out;
    out.analytic = commonality_analytic(K, p1);
    if (n_draws == 0) throw UsageError("n_draws must be positive");
    const double ratio_cut = p1 / (1.0 - p1);
    std::vector<double> z(K);
    const std::uint64_t chunks = (n_draws + focal_chunk_size - 1) / focal_chunk_size;
    for (std::uint64_t c = 0; c < chunks; ++c) {
        Stream stream = Stream::derive(seed, c);
        const std::uint64_t end = std::min(n_draws, (c + 1) * focal_chunk_size);
        for (std::uint64_t i = c * focal_chunk_size; i < end; ++i) {
            double total = 0.0;
            for (double& v : z) {
                v = sample_exponential(stream);
                total += v;
            }
            if (z[0] / total > p1) continue;
            ++out.denominator;
            double worst = 0.0;
            for (std::size_t j = 1; j < K; ++j) worst = std::max(worst, z[0] / z[j]);
            if (worst <= ratio_cut) ++out.numerator;
        }
    }
    if (out.denominator == 0) throw DegenerateError("no draw met Z_1 / sum(Z) <= p1");
    const double den = static_cast<double>(out.denominator);
    out.empirical = static_cast<double>(out.numerator) / den;
    out.standard_error = std::sqrt(out.empirical * (1.0 - out.empirical) / den);
    return out;
}

}  // namespace dsinfer

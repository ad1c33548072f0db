#include "dsinfer/dsm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dsinfer/error.hpp"
#include "focal_loop.hpp"

namespace dsinfer {

using detail::FocalView;
using detail::TriTally;

CountVector::CountVector(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
    if (counts_.size() < 2) throw UsageError("a count vector needs at least 2 categories");
    for (auto c : counts_) total_ += c;
}

ShapeVector CountVector::posterior_shape() const {
    std::vector<double> alphas;
    alphas.reserve(counts_.size() + 1);
    alphas.push_back(1.0);
    for (auto c : counts_) alphas.push_back(static_cast<double>(c));
    return ShapeVector(std::move(alphas));
}

double DirichletFocalSet::upper(std::size_t k) const {
    double others = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j)
        if (j != k) others += z[j];
    return 1.0 - others;
}

bool DirichletFocalSet::contains(std::span<const double> theta) const {
    if (theta.size() != z.size()) throw UsageError("theta has the wrong dimension");
    for (std::size_t k = 0; k < z.size(); ++k)
        if (theta[k] < z[k]) return false;
    return true;
}

PqrEstimate PqrEstimate::from_tallies(std::uint64_t n_for, std::uint64_t n_against, std::uint64_t n) {
    if (n == 0) throw DegenerateError("no focal sets to estimate (p, q, r) from");
    const double dn = static_cast<double>(n);
    PqrEstimate e;
    e.draws = n;
    e.value.p = static_cast<double>(n_for) / dn;
    e.value.q = static_cast<double>(n_against) / dn;
    e.value.r = static_cast<double>(n - n_for - n_against) / dn;
    auto se = [dn](double x) { return std::sqrt(x * (1.0 - x) / dn); };
    e.se_p = se(e.value.p);
    e.se_q = se(e.value.q);
    e.se_r = se(e.value.r);
    return e;
}

namespace {

void check_theta0(double theta0) {
    if (!(theta0 >= 0.0 && theta0 <= 1.0)) throw UsageError("theta0 must lie in [0, 1]");
}

void check_cell(std::size_t k, std::size_t K) {
    if (k >= K)
        throw UsageError("category index " + std::to_string(k) + " out of range for K = " +
                         std::to_string(K));
}

// Shared by classify() on owned focal sets and on sampled views.
template <class Set>
Verdict classify_impl(const Set& s, const Assertion& assertion) {
    return std::visit(
        [&](const auto& a) -> Verdict {
            using A = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<A, CellLeq>) {
                if (s.upper(a.k) <= a.theta0) return Verdict::for_assertion;
                if (s.z(a.k) > a.theta0) return Verdict::against;
                return Verdict::unknown;
            } else if constexpr (std::is_same_v<A, CellPoint>) {
                if (s.z(a.k) <= a.theta0 && a.theta0 <= s.upper(a.k)) return Verdict::unknown;
                return Verdict::against;
            } else {
                // On the slice theta_1 = t the set is theta_3 in [Z_3, 1 - t - Z_2];
                // it is non-empty iff Z_1 < t < Z_0 + Z_1.
                const double t = a.theta1_fixed;
                if (!(s.z(0) < t && t < s.upper(0))) return Verdict::conflict;
                const double threshold = std::isinf(a.r0) ? 0.0 : (1.0 - t) / (1.0 + a.r0);
                if (s.z(2) >= threshold) return Verdict::for_assertion;
                if (1.0 - t - s.z(1) < threshold) return Verdict::against;
                return Verdict::unknown;
            }
        },
        assertion);
}

struct OwnedView {
    const DirichletFocalSet& set;
    double z(std::size_t k) const { return set.z[k]; }
    double upper(std::size_t k) const { return set.upper(k); }
};

void tally_verdict(Verdict v, TriTally& t) {
    if (v == Verdict::conflict) return;
    ++t.n;
    if (v == Verdict::for_assertion) ++t.n_for;
    if (v == Verdict::against) ++t.n_against;
}

}  // namespace

void validate(const Assertion& assertion, std::size_t K) {
    std::visit(
        [&](const auto& a) {
            using A = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<A, ConditionalRatio>) {
                if (K != 3) throw UsageError("the conditional ratio assertion needs K = 3");
                if (!(a.r0 >= 0.0)) throw UsageError("r0 must be non-negative");
                if (!(a.theta1_fixed > 0.0 && a.theta1_fixed < 1.0))
                    throw UsageError("theta1_fixed must lie in (0, 1)");
            } else {
                check_cell(a.k, K);
                check_theta0(a.theta0);
            }
        },
        assertion);
}

Verdict classify(const DirichletFocalSet& set, const Assertion& assertion) {
    validate(assertion, set.z.size());
    return classify_impl(OwnedView{set}, assertion);
}

Partition::Partition(std::vector<std::vector<std::size_t>> groups, std::size_t K)
    : groups_(std::move(groups)), K_(K) {
    std::vector<bool> seen(K, false);
    std::size_t covered = 0;
    for (const auto& g : groups_) {
        if (g.empty()) throw UsageError("partition groups must be non-empty");
        for (auto idx : g) {
            if (idx >= K) throw UsageError("partition index out of range");
            if (seen[idx]) throw UsageError("partition groups overlap");
            seen[idx] = true;
            ++covered;
        }
    }
    if (covered != K) throw UsageError("partition does not cover every category");
}

std::vector<DirichletFocalSet> ddsm_sample(const CountVector& counts, std::uint64_t n_draws,
                                           RandomSeed seed, unsigned threads) {
    struct Collect {
        std::vector<DirichletFocalSet> sets;
        Collect& operator+=(Collect&& o) {
            for (auto& s : o.sets) sets.push_back(std::move(s));
            return *this;
        }
        Collect& operator+=(Collect& o) { return *this += std::move(o); }
    };
    auto all = detail::tally_focal_sets<Collect>(counts, n_draws, seed, threads,
                                                 [](const FocalView& v, Collect& c) {
                                                     DirichletFocalSet s;
                                                     s.z0 = v.z0();
                                                     s.z.assign(v.full.begin() + 1, v.full.end());
                                                     c.sets.push_back(std::move(s));
                                                 });
    return std::move(all.sets);
}

double Theorem1Check::max_ks() const {
    return ks.empty() ? 0.0 : *std::max_element(ks.begin(), ks.end());
}

Theorem1Check theorem1_empirical_check(const CountVector& counts, std::uint64_t n_accepted,
                                       RandomSeed seed, Theorem1Mode mode) {
    const std::uint64_t total = counts.total();
    if (total == 0) throw UsageError("the max-of-uniforms check needs at least one observation");
    if (n_accepted == 0) throw UsageError("n_accepted must be positive");
    const std::size_t K = counts.size();

    double log_accept = -std::lgamma(static_cast<double>(total) + 1.0);
    for (auto c : counts.counts()) log_accept += std::lgamma(static_cast<double>(c) + 1.0);
    const bool tilted = mode == Theorem1Mode::tilted ||
                        (mode == Theorem1Mode::automatic && log_accept < std::log(1e-3));

    std::vector<std::vector<double>> samples(K + 1);
    for (auto& s : samples) s.reserve(n_accepted);
    std::vector<double> z(K);
    Stream stream = Stream::derive(seed, 0);
    const double rate = static_cast<double>(total);

    Theorem1Check out;
    out.tilted = tilted;
    while (out.accepted < n_accepted) {
        ++out.proposals;
        double sum = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            double zk = 0.0;
            if (!tilted) {
                for (std::uint64_t i = 0; i < counts[k]; ++i) zk = std::max(zk, stream.uniform());
            } else {
                // Gamma(N_k, rate) as a sum of N_k exponentials: density
                // proportional to z^(N_k - 1) exp(-rate z), the max-of-uniforms
                // law times an exponential tilt.
                for (std::uint64_t i = 0; i < counts[k]; ++i) zk -= std::log(stream.uniform_pos());
                zk /= rate;
            }
            z[k] = zk;
            sum += zk;
        }
        if (sum > 1.0) continue;
        // Undo the tilt: accept with probability exp(rate (sum - 1)) <= 1.
        if (tilted && stream.uniform() >= std::exp(rate * (sum - 1.0))) continue;
        ++out.accepted;
        samples[0].push_back(1.0 - sum);
        for (std::size_t k = 0; k < K; ++k) samples[k + 1].push_back(z[k]);
    }

    const double n = static_cast<double>(total);
    out.ks.resize(K + 1);
    for (std::size_t c = 0; c <= K; ++c) {
        auto& s = samples[c];
        const double a = c == 0 ? 1.0 : static_cast<double>(counts[c - 1]);
        const double b = c == 0 ? n : n + 1.0 - a;
        if (a == 0.0) {
            out.ks[c] = std::all_of(s.begin(), s.end(), [](double v) { return v == 0.0; }) ? 0.0 : 1.0;
            continue;
        }
        std::sort(s.begin(), s.end());
        out.ks[c] = ks_distance(s, [a, b](double x) { return beta_cdf(std::clamp(x, 0.0, 1.0), a, b); });
    }
    return out;
}

PqrTriple pqr_cell_leq(const CountVector& counts, std::size_t k, double theta0) {
    check_cell(k, counts.size());
    check_theta0(theta0);
    const double n = static_cast<double>(counts.total());
    const double nk = static_cast<double>(counts[k]);
    PqrTriple t;
    t.p = beta_cdf(theta0, nk + 1.0, n - nk);
    t.q = 1.0 - beta_cdf(theta0, nk, n + 1.0 - nk);
    t.r = std::max(0.0, 1.0 - t.p - t.q);
    return t;
}

PqrEstimate pqr_mc(const CountVector& counts, const Assertion& assertion, std::uint64_t n_draws,
                   RandomSeed seed, unsigned threads) {
    validate(assertion, counts.size());
    const auto t = detail::tally_focal_sets<TriTally>(
        counts, n_draws, seed, threads,
        [&](const FocalView& v, TriTally& tally) { tally_verdict(classify_impl(v, assertion), tally); });
    if (t.n == 0)
        throw DegenerateError("no sampled focal set meets the conditioning event");
    return PqrEstimate::from_tallies(t.n_for, t.n_against, t.n);
}

PqrEstimate pqr_cell_leq_mc(const CountVector& counts, std::size_t k, double theta0,
                            std::uint64_t n_draws, RandomSeed seed, unsigned threads) {
    return pqr_mc(counts, CellLeq{k, theta0}, n_draws, seed, threads);
}

PqrEstimate pqr_cell_point(const CountVector& counts, std::size_t k, double theta0,
                           std::uint64_t n_draws, RandomSeed seed, unsigned threads) {
    return pqr_mc(counts, CellPoint{k, theta0}, n_draws, seed, threads);
}

PqrEstimate pqr_vector_point(const CountVector& counts, std::span<const double> point,
                             std::uint64_t n_draws, RandomSeed seed, unsigned threads) {
    if (point.size() != counts.size()) throw UsageError("point has the wrong dimension");
    for (double x : point)
        if (!(x >= 0.0 && x <= 1.0)) throw UsageError("point coordinates must lie in [0, 1]");
    const auto t = detail::tally_focal_sets<TriTally>(
        counts, n_draws, seed, threads, [&](const FocalView& v, TriTally& tally) {
            ++tally.n;
            for (std::size_t k = 0; k < v.size(); ++k) {
                if (v.z(k) > point[k]) {
                    ++tally.n_against;
                    return;
                }
            }
        });
    return PqrEstimate::from_tallies(0, t.n_against, t.n);
}

PqrEstimate pqr_conditional_ratio(const CountVector& counts, double r0, std::uint64_t n_draws,
                                  RandomSeed seed, double theta1_fixed, unsigned threads) {
    return pqr_mc(counts, ConditionalRatio{r0, theta1_fixed}, n_draws, seed, threads);
}

std::vector<PqrEstimate> pqr_mc_batch(const CountVector& counts, std::span<const Assertion> assertions,
                                      std::uint64_t n_draws, RandomSeed seed, unsigned threads) {
    for (const auto& a : assertions) validate(a, counts.size());
    struct BatchTally {
        std::vector<TriTally> cells;
        BatchTally& operator+=(const BatchTally& o) {
            if (cells.empty()) cells.resize(o.cells.size());
            for (std::size_t i = 0; i < o.cells.size(); ++i) cells[i] += o.cells[i];
            return *this;
        }
    };
    const auto b = detail::tally_focal_sets<BatchTally>(
        counts, n_draws, seed, threads, [&](const FocalView& v, BatchTally& tally) {
            if (tally.cells.empty()) tally.cells.resize(assertions.size());
            for (std::size_t i = 0; i < assertions.size(); ++i)
                tally_verdict(classify_impl(v, assertions[i]), tally.cells[i]);
        });
    std::vector<PqrEstimate> out;
    out.reserve(assertions.size());
    for (std::size_t i = 0; i < assertions.size(); ++i) {
        if (b.cells.empty() || b.cells[i].n == 0)
            throw DegenerateError("no sampled focal set meets the conditioning event");
        out.push_back(PqrEstimate::from_tallies(b.cells[i].n_for, b.cells[i].n_against, b.cells[i].n));
    }
    return out;
}

std::vector<PqrEstimate> pqr_conditional_ratio_curve(const CountVector& counts,
                                                     std::span<const double> r0_grid,
                                                     std::uint64_t n_draws, RandomSeed seed,
                                                     double theta1_fixed, unsigned threads) {
    std::vector<Assertion> batch;
    batch.reserve(r0_grid.size());
    for (double r0 : r0_grid) batch.push_back(ConditionalRatio{r0, theta1_fixed});
    return pqr_mc_batch(counts, batch, n_draws, seed, threads);
}

bool IntervalFocalSet::contains(std::span<const double> theta) const {
    if (upper_terms > theta.size()) throw UsageError("theta has the wrong dimension");
    double lower = 0.0;
    for (std::size_t j = 0; j < lower_terms; ++j) lower += theta[j];
    const double upper = lower + theta[category];
    return lower <= u && u < upper;
}

IntervalFocalSet interval_dsm_focal(std::size_t K, std::size_t category, double u) {
    if (K < 2) throw UsageError("K must be at least 2");
    check_cell(category, K);
    if (!(u >= 0.0 && u < 1.0)) throw UsageError("u must lie in [0, 1)");
    return IntervalFocalSet{category, u, category, category + 1};
}

double permutation_pushforward(std::span<const double> theta, std::span<const std::size_t> order,
                               std::size_t category, double u) {
    const std::size_t K = theta.size();
    if (K < 2) throw UsageError("theta needs at least 2 components");
    if (order.size() != K) throw UsageError("permutation has the wrong length");
    std::vector<bool> seen(K, false);
    for (auto c : order) {
        if (c >= K || seen[c]) throw UsageError("order is not a permutation");
        seen[c] = true;
    }
    if (order[0] != category) throw UsageError("the permutation must place the observed category first");
    if (!(u >= 0.0 && u < 1.0)) throw UsageError("u must lie in [0, 1)");

    // Locate u in the natural-order partition.
    std::size_t cell = K;
    double start = 0.0;
    for (std::size_t c = 0; c < K; ++c) {
        if (theta[c] > 0.0 && u < start + theta[c]) {
            cell = c;
            break;
        }
        start += theta[c];
    }
    if (cell == K) {
        // u beyond the rounded total: last non-empty interval.
        start = 0.0;
        for (std::size_t c = 0; c < K; ++c) {
            if (theta[c] > 0.0) cell = c;
        }
        for (std::size_t c = 0; c < cell; ++c) start += theta[c];
    }
    double relocated = 0.0;
    for (auto c : order) {
        if (c == cell) break;
        relocated += theta[c];
    }
    return u + (relocated - start);
}

CountVector aggregate_counts(const CountVector& counts, const Partition& partition) {
    if (partition.categories() != counts.size()) throw UsageError("partition built for a different K");
    std::vector<std::uint64_t> agg;
    agg.reserve(partition.size());
    for (const auto& g : partition.groups()) {
        std::uint64_t s = 0;
        for (auto idx : g) s += counts[idx];
        agg.push_back(s);
    }
    return CountVector(std::move(agg));
}

}  // namespace dsinfer

#include "dsinfer/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "dsinfer/dsm.hpp"
#include "dsinfer/error.hpp"
#include "dsinfer/lp.hpp"
#include "dsinfer/stats.hpp"

namespace dsinfer {

const std::vector<std::string>& validator_suites() {
    static const std::vector<std::string> names = {"theorem1", "theorem2", "theorem3",
                                                   "rip",      "qmap",     "lp"};
    return names;
}

bool polytope_feasible_by_cycles(const PolytopeFocalSet& set) {
    const std::size_t K = set.K;
    const double inf = std::numeric_limits<double>::infinity();
    // d[a][b]: log of the tightest bound theta_b <= w theta_a.
    std::vector<double> d(K * K, inf);
    std::vector<bool> observed(K, false);
    for (std::size_t i = 0; i < set.n; ++i) {
        const std::size_t a = set.observations[i];
        observed[a] = true;
        for (std::size_t b = 0; b < K; ++b) {
            if (b == a) continue;
            const double w = std::log(set.draw(i, b)) - std::log(set.draw(i, a));
            d[a * K + b] = std::min(d[a * K + b], w);
        }
    }
    for (std::size_t a = 0; a < K; ++a) d[a * K + a] = std::min(d[a * K + a], 0.0);
    for (std::size_t m = 0; m < K; ++m)
        for (std::size_t a = 0; a < K; ++a)
            for (std::size_t b = 0; b < K; ++b)
                if (d[a * K + m] + d[m * K + b] < d[a * K + b]) d[a * K + b] = d[a * K + m] + d[m * K + b];
    for (std::size_t a = 0; a < K; ++a)
        if (observed[a] && d[a * K + a] < 0.0) return false;
    return true;
}

bool polytope_feasible_by_grid(const PolytopeFocalSet& set, std::size_t resolution) {
    if (set.K != 3) throw UsageError("the grid oracle is implemented for K = 3");
    const double h = 1.0 / static_cast<double>(resolution);
    for (std::size_t i = 0; i <= resolution; ++i) {
        for (std::size_t j = 0; i + j <= resolution; ++j) {
            const double theta[] = {h * static_cast<double>(i), h * static_cast<double>(j),
                                    h * static_cast<double>(resolution - i - j)};
            if (set.contains(theta, 1e-12)) return true;
        }
    }
    return false;
}

namespace {

using clock_type = std::chrono::steady_clock;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

std::string counts_label(const CountVector& c) {
    std::string s = "(";
    for (std::size_t k = 0; k < c.size(); ++k) s += (k ? "," : "") + std::to_string(c[k]);
    return s + ")";
}

// Appends one result, timing `fn` which fills statistic/passed/detail.
template <class Fn>
void record(std::vector<ValidatorResult>& out, const std::string& suite, std::string name,
            double threshold, Fn&& fn) {
    ValidatorResult r;
    r.suite = suite;
    r.name = std::move(name);
    r.threshold = threshold;
    const auto start = clock_type::now();
    fn(r);
    r.seconds = std::chrono::duration<double>(clock_type::now() - start).count();
    out.push_back(std::move(r));
}

RandomSeed sub_seed(RandomSeed seed, std::uint64_t tag) { return RandomSeed{Stream::derive(seed, tag)()}; }

void theorem1_suite(std::vector<ValidatorResult>& out, const ValidationBudget& b, RandomSeed seed) {
    const std::vector<CountVector> cases = {CountVector({1, 0, 0}), CountVector({2, 1, 1}),
                                            CountVector({25, 3, 4, 7})};
    for (std::size_t i = 0; i < cases.size(); ++i) {
        record(out, "theorem1", "max-of-uniforms " + counts_label(cases[i]), 0.01, [&](ValidatorResult& r) {
            const auto chk = theorem1_empirical_check(cases[i], b.draws, sub_seed(seed, i));
            r.statistic = chk.max_ks();
            r.passed = r.statistic < r.threshold;
            r.detail = std::string(chk.tilted ? "tilted" : "naive") + " proposal, acceptance " +
                       fmt(static_cast<double>(chk.accepted) / static_cast<double>(chk.proposals));
        });
    }
}

void theorem2_suite(std::vector<ValidatorResult>& out, const ValidationBudget& b, RandomSeed seed) {
    std::uint64_t tag = 0;
    auto check = [&](std::size_t K, std::vector<double> rest) {
        std::string label = "K=" + std::to_string(K) + " theta_rest=(";
        for (std::size_t j = 0; j < rest.size(); ++j) label += (j ? "," : "") + fmt(rest[j]);
        label += ")";
        const RandomSeed s = sub_seed(seed, tag++);
        record(out, "theorem2", label, 0.01, [&](ValidatorResult& r) {
            r.statistic = neutrality_lower_bound_check(K, rest, b.draws, s);
            r.passed = r.statistic < r.threshold;
            r.detail = "KS of B = A/(1+A) against Uniform(0,1)";
        });
    };
    check(2, {1.0});
    check(4, {0.5, 0.3, 0.2});
    check(6, std::vector<double>(5, 0.2));
    Stream rng = Stream::derive(seed, 1000);
    for (std::size_t K : {4, 6}) {
        for (int rep = 0; rep < 5; ++rep) {
            const auto p = sample_dirichlet(ShapeVector(std::vector<double>(K - 1, 1.0)), rng);
            check(K, std::vector<double>(p.coords().begin(), p.coords().end()));
        }
    }
}

void theorem3_suite(std::vector<ValidatorResult>& out, const ValidationBudget& b, RandomSeed seed) {
    std::uint64_t tag = 0;
    for (std::size_t K : {3, 4, 5}) {
        for (double p1 : {0.1, 0.5, 0.9}) {
            const RandomSeed s = sub_seed(seed, tag++);
            record(out, "theorem3", "K=" + std::to_string(K) + " p1=" + fmt(p1), 3.0, [&](ValidatorResult& r) {
                const auto c = commonality_vacuous_mass(K, p1, b.draws, s);
                r.statistic = std::abs(c.empirical - c.analytic) / c.standard_error;
                r.passed = r.statistic < r.threshold;
                r.detail = "empirical " + fmt(c.empirical) + " (SE " + fmt(c.standard_error) +
                           "), analytic " + fmt(c.analytic) + "; statistic in SE units";
            });
        }
    }
    record(out, "theorem3", "K=3 p1=0.5 analytic value 4/9", 1e-12, [&](ValidatorResult& r) {
        r.statistic = std::abs(commonality_analytic(3, 0.5) - 4.0 / 9.0);
        r.passed = r.statistic < r.threshold;
    });
    record(out, "theorem3", "small-p1 limit (K-1)^-2", 0.01, [&](ValidatorResult& r) {
        double worst = 0.0;
        for (std::size_t K : {3, 5, 10, 20}) {
            const double limit = 1.0 / static_cast<double>((K - 1) * (K - 1));
            worst = std::max(worst, std::abs(commonality_analytic(K, 1e-6) / limit - 1.0));
        }
        r.statistic = worst;
        r.passed = r.statistic < r.threshold;
        r.detail = "largest relative gap at p1 = 1e-6 over K in {3,5,10,20}";
    });
}

void rip_suite(std::vector<ValidatorResult>& out, const ValidationBudget& b, RandomSeed seed) {
    record(out, "rip", "closed-form invariance under 20 random mergers", 1e-9, [&](ValidatorResult& r) {
        Stream rng = Stream::derive(seed, 0);
        double worst = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            const std::size_t K = 3 + rng.below(6);
            std::vector<std::uint64_t> c(K);
            for (auto& v : c) v = rng.below(31);
            const CountVector counts(c);
            const std::size_t k = rng.below(K);
            const double theta0 = rng.uniform();
            // k stays alone; the rest are split into random groups.
            std::vector<std::vector<std::size_t>> groups{{k}};
            const std::size_t n_groups = 1 + rng.below(K - 1);
            std::vector<std::vector<std::size_t>> rest(n_groups);
            std::size_t next = 0;
            for (std::size_t j = 0; j < K; ++j) {
                if (j == k) continue;
                // Fill every group once before assigning at random.
                const std::size_t g = next < n_groups ? next++ : rng.below(n_groups);
                rest[g].push_back(j);
            }
            for (auto& g : rest)
                if (!g.empty()) groups.push_back(std::move(g));
            const Partition part(groups, K);
            const auto agg = aggregate_counts(counts, part);
            const auto a = pqr_cell_leq(counts, k, theta0);
            const auto m = pqr_cell_leq(agg, 0, theta0);
            worst = std::max({worst, std::abs(a.p - m.p), std::abs(a.q - m.q), std::abs(a.r - m.r)});
        }
        r.statistic = worst;
        r.passed = r.statistic <= r.threshold;
        r.detail = "largest |difference| in (p, q, r)";
    });
    record(out, "rip", "aggregated Dirichlet marginal (25,3,4,7) -> (25,7+3+4)", 0.01, [&](ValidatorResult& r) {
        const CountVector counts({25, 3, 4, 7});
        const auto sets = ddsm_sample(counts, b.draws, sub_seed(seed, 1));
        std::vector<double> merged;
        merged.reserve(sets.size());
        for (const auto& s : sets) merged.push_back(s.z[1] + s.z[2] + s.z[3]);
        std::sort(merged.begin(), merged.end());
        r.statistic = ks_distance(merged, [](double x) { return beta_cdf(std::clamp(x, 0.0, 1.0), 14.0, 26.0); });
        r.passed = r.statistic < r.threshold;
        r.detail = "KS of Z_2 + Z_3 + Z_4 against Beta(14, 26)";
    });
}

void qmap_suite(std::vector<ValidatorResult>& out, const ValidationBudget& b, RandomSeed seed) {
    for (std::uint64_t rep = 0; rep < 3; ++rep) {
        Stream rng = Stream::derive(seed, rep);
        const std::size_t K = 3 + rep;
        const auto theta = sample_dirichlet(ShapeVector(std::vector<double>(K, 1.0)), rng);
        const std::size_t X = rng.below(K);
        std::vector<std::size_t> order(K);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        std::iter_swap(order.begin(), std::find(order.begin(), order.end(), X));
        record(out, "qmap", "uniformity K=" + std::to_string(K), 0.006, [&](ValidatorResult& r) {
            std::vector<double> w(b.draws);
            std::uint64_t mismatches = 0;
            double start = 0.0;
            for (std::size_t c = 0; c < X; ++c) start += theta[c];
            for (auto& v : w) {
                const double u = rng.uniform();
                v = permutation_pushforward(theta.coords(), order, X, u);
                const bool in_x = u >= start && u < start + theta[X];
                const bool first = v < theta[X];
                if (in_x != first) ++mismatches;
            }
            std::sort(w.begin(), w.end());
            r.statistic = ks_distance(w, uniform_cdf);
            r.passed = r.statistic < r.threshold && mismatches == 0;
            r.detail = "KS of Q(U) against Uniform(0,1); " + std::to_string(mismatches) +
                       " draws broke the X-interval correspondence";
        });
    }
}

PolytopeFocalSet raw_proposal(const ObservationList& obs, Stream& s) {
    PolytopeFocalSet p;
    p.n = obs.size();
    p.K = obs.categories();
    p.observations.assign(obs.observations().begin(), obs.observations().end());
    p.z.resize(p.n * p.K);
    for (double& v : p.z) v = sample_exponential(s);
    return p;
}

void lp_suite(std::vector<ValidatorResult>& out, const ValidationBudget& b, RandomSeed seed) {
    const auto obs = ObservationList::from_counts(CountVector({2, 1, 1}));
    record(out, "lp", "feasibility vs cycle oracle, N=(2,1,1)", 0.0, [&](ValidatorResult& r) {
        Stream s = Stream::derive(seed, 0);
        std::uint64_t disagree = 0;
        for (std::uint64_t i = 0; i < 10 * b.lp_draws; ++i) {
            const auto p = raw_proposal(obs, s);
            if (lp::feasible(p.constraints(), p.K) != polytope_feasible_by_cycles(p)) ++disagree;
        }
        r.statistic = static_cast<double>(disagree);
        r.passed = disagree == 0;
        r.detail = std::to_string(10 * b.lp_draws) + " proposals compared";
    });
    record(out, "lp", "acceptance vs 1/200 grid oracle, N=(2,1,1)", 0.01, [&](ValidatorResult& r) {
        Stream s = Stream::derive(seed, 1);
        std::uint64_t lp_yes = 0, grid_yes = 0;
        for (std::uint64_t i = 0; i < b.lp_draws; ++i) {
            const auto p = raw_proposal(obs, s);
            lp_yes += lp::feasible(p.constraints(), p.K);
            grid_yes += polytope_feasible_by_grid(p);
        }
        const double n = static_cast<double>(b.lp_draws);
        r.statistic = std::abs(static_cast<double>(lp_yes) - static_cast<double>(grid_yes)) / n;
        r.passed = r.statistic <= r.threshold;
        r.detail = "LP rate " + fmt(static_cast<double>(lp_yes) / n) + ", grid rate " +
                   fmt(static_cast<double>(grid_yes) / n);
    });
    record(out, "lp", "min f = -max(-f) and witness feasibility", 1e-9, [&](ValidatorResult& r) {
        Stream s = Stream::derive(seed, 2);
        double worst = 0.0;
        for (int rep = 0; rep < 200; ++rep) {
            const auto p = raw_proposal(obs, s);
            auto rows = p.constraints();
            if (!lp::feasible(rows, p.K)) continue;
            std::vector<double> f(p.K);
            for (double& v : f) v = 2.0 * s.uniform() - 1.0;
            lp::LpProblem lo{p.K, rows, f, lp::Direction::minimize};
            std::vector<double> neg(f);
            for (double& v : neg) v = -v;
            lp::LpProblem hi{p.K, rows, neg, lp::Direction::maximize};
            const auto a = lp::solve(lo);
            const auto c = lp::solve(hi);
            worst = std::max({worst, std::abs(a.value + c.value), lp::max_violation(rows, a.witness),
                              lp::max_violation(rows, c.witness)});
        }
        r.statistic = worst;
        r.passed = r.statistic <= r.threshold;
    });
}

}  // namespace

std::vector<ValidatorResult> run_validators(std::span<const std::string> suites,
                                            const ValidationBudget& budget, RandomSeed seed) {
    if (budget.draws == 0 || budget.lp_draws == 0) throw UsageError("validation budgets must be positive");
    std::vector<ValidatorResult> out;
    for (const auto& name : suites) {
        const auto& known = validator_suites();
        const auto it = std::find(known.begin(), known.end(), name);
        if (it == known.end()) throw UsageError("unknown validator suite '" + name + "'");
        const RandomSeed s = sub_seed(seed, 100 + static_cast<std::uint64_t>(it - known.begin()));
        if (name == "theorem1") theorem1_suite(out, budget, s);
        else if (name == "theorem2") theorem2_suite(out, budget, s);
        else if (name == "theorem3") theorem3_suite(out, budget, s);
        else if (name == "rip") rip_suite(out, budget, s);
        else if (name == "qmap") qmap_suite(out, budget, s);
        else lp_suite(out, budget, s);
    }
    return out;
}

}  // namespace dsinfer

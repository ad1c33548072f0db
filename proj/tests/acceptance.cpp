// Exit gate: one PASS/FAIL line per acceptance criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "dsinfer/dsm.hpp"
#include "dsinfer/error.hpp"
#include "dsinfer/idm.hpp"
#include "dsinfer/independence.hpp"
#include "dsinfer/linkage.hpp"
#include "dsinfer/simplex_dsm.hpp"

using namespace dsinfer;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, const std::function<Outcome()>& body) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
}

std::string num(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.6g", x);
    return b;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace

int main() {
    criterion(1, "max-of-uniforms construction", [] {
        const auto t0 = Clock::now();
        double worst = 0.0;
        for (const auto& c : {CountVector({1, 0, 0}), CountVector({2, 1, 1}), CountVector({25, 3, 4, 7})})
            worst = std::max(worst, theorem1_empirical_check(c, 100000, RandomSeed{11}).max_ks());
        const double t = seconds_since(t0);
        return Outcome{worst < 0.01 && t < 30.0, "max KS " + num(worst) + ", " + num(t) + " s"};
    });

    criterion(2, "trinomial closed form and Monte Carlo", [] {
        const CountVector c({2, 1, 1});
        const auto e = pqr_cell_leq(c, 0, 0.5);
        const double err = std::max({std::abs(e.p - 0.3125), std::abs(e.q - 0.3125), std::abs(e.r - 0.375)});
        const auto mc = pqr_cell_leq_mc(c, 0, 0.5, 1000000, RandomSeed{12});
        const double z = std::max({std::abs(mc.value.p - e.p) / mc.se_p, std::abs(mc.value.q - e.q) / mc.se_q,
                                   std::abs(mc.value.r - e.r) / mc.se_r});
        return Outcome{err < 1e-9 && z < 3.0, "closed-form error " + num(err) + ", MC max |z| " + num(z)};
    });

    criterion(3, "(1,0,0) curves", [] {
        const CountVector c({1, 0, 0});
        double worst = 0.0;
        for (double t : linspace(0.01, 0.99, 99)) {
            const auto e = pqr_cell_leq(c, 0, t);
            worst = std::max({worst, std::abs(e.p), std::abs(e.p + e.r - t)});
        }
        std::vector<double> r0;
        for (int i = 0; i <= 40; ++i) r0.push_back(0.05 * std::pow(400.0, i / 40.0));
        const auto ratio = pqr_conditional_ratio_curve(c, r0, 20000, RandomSeed{13});
        double off = 0.0;
        for (const auto& e : ratio) off = std::max({off, e.value.p, e.value.q, 1.0 - e.value.r});
        return Outcome{worst < 1e-9 && off == 0.0,
                       "leq max error " + num(worst) + ", ratio max distance from (0,0,1) " + num(off)};
    });

    criterion(4, "IDM bounds equal Dirichlet-DSM (p, p+r)", [] {
        const std::vector<CountVector> cases = {CountVector({1, 0, 0}), CountVector({2, 1, 1}),
                                                CountVector({0, 3, 5}), CountVector({10, 10, 10}),
                                                CountVector({25, 1, 0})};
        double worst = 0.0;
        for (const auto& c : cases)
            for (std::size_t k = 0; k < 3; ++k)
                for (int i = 1; i <= 9; ++i) {
                    const auto b = idm_cell_leq_bounds(c, k, i / 10.0);
                    const auto d = pqr_cell_leq(c, k, i / 10.0);
                    worst = std::max({worst, std::abs(b.lower - d.p), std::abs(b.upper - d.p - d.r)});
                }
        return Outcome{worst < 1e-9, "max difference " + num(worst) + " over 135 cases"};
    });

    criterion(5, "linkage acceptance rates", [] {
        auto t0 = Clock::now();
        const auto a = linkage_acceptance_rate(CountVector({25, 3, 4, 7}), 1000000, RandomSeed{15});
        const double ta = seconds_since(t0);
        t0 = Clock::now();
        const auto b = linkage_acceptance_rate(CountVector({25, 6, 2, 7}), 1000000, RandomSeed{16});
        const double tb = seconds_since(t0);
        const bool ok = std::abs(a.rate() - 0.042) <= 0.005 && std::abs(b.rate() - 0.0160) <= 0.003 && ta < 10.0 &&
                        tb < 10.0;
        return Outcome{ok, "(25,3,4,7) " + num(a.rate()) + " in " + num(ta) + " s, (25,6,2,7) " + num(b.rate()) +
                               " in " + num(tb) + " s"};
    });

    criterion(6, "linkage draw throughput", [] {
        const auto t0 = Clock::now();
        const auto a = linkage_acceptance_rate(CountVector({25, 3, 4, 7}), 112500, RandomSeed{17});
        const double t = seconds_since(t0);
        return Outcome{a.proposals == 112500 && t < 5.0, "112500 draws in " + num(t) + " s"};
    });

    criterion(7, "commonality of the vacuous set", [] {
        double worst = 0.0;
        std::uint64_t s = 70;
        for (std::size_t K : {3, 4, 5})
            for (double p1 : {0.1, 0.5, 0.9}) {
                const auto c = commonality_vacuous_mass(K, p1, 100000, RandomSeed{s++});
                worst = std::max(worst, std::abs(c.empirical - c.analytic) / c.standard_error);
            }
        const double four_ninths = std::abs(commonality_analytic(3, 0.5) - 4.0 / 9.0);
        // Relative gap to (K-1)^-2 must shrink as p1 -> 0.
        bool trend = true;
        double last_gap = 0.0;
        for (std::size_t K : {3, 5, 10}) {
            double prev = INFINITY;
            for (double p1 : {0.1, 0.01, 0.001, 1e-5}) {
                const double gap = std::abs(commonality_analytic(K, p1) * double((K - 1) * (K - 1)) - 1.0);
                trend = trend && gap < prev;
                prev = gap;
            }
            last_gap = std::max(last_gap, prev);
        }
        trend = trend && last_gap < 1e-3;
        return Outcome{worst < 3.0 && four_ninths < 1e-12 && trend,
                       "max |z| " + num(worst) + ", |c(3,0.5) - 4/9| " + num(four_ninths) +
                           ", gap to (K-1)^-2 at p1=1e-5 " + num(last_gap)};
    });

    criterion(8, "conditional lower bound is uniform", [] {
        std::mt19937_64 rng(2024);
        std::exponential_distribution<double> ex(1.0);
        double worst = 0.0;
        std::uint64_t s = 80;
        for (std::size_t K : {2, 4, 6})
            for (int rep = 0; rep < 5; ++rep) {
                std::vector<double> rest(K - 1);
                for (auto& v : rest) v = ex(rng);
                const double sum = std::accumulate(rest.begin(), rest.end(), 0.0);
                for (auto& v : rest) v /= sum;
                worst = std::max(worst, neutrality_lower_bound_check(K, rest, 100000, RandomSeed{s++}));
            }
        return Outcome{worst < 0.01, "max KS " + num(worst) + " over 15 configurations"};
    });

    criterion(9, "representation invariance under mergers", [] {
        std::mt19937_64 rng(99);
        auto below = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
        double worst = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            const std::size_t K = 3 + below(6);
            std::vector<std::uint64_t> c(K);
            for (auto& v : c) v = below(40);
            const std::size_t k = below(K);
            const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            std::vector<std::size_t> others;
            for (std::size_t j = 0; j < K; ++j)
                if (j != k) others.push_back(j);
            std::shuffle(others.begin(), others.end(), rng);
            std::vector<std::vector<std::size_t>> groups{{k}};
            std::size_t pos = 0;
            while (pos < others.size()) {
                const std::size_t len = 1 + below(others.size() - pos);
                groups.emplace_back(others.begin() + long(pos), others.begin() + long(pos + len));
                pos += len;
            }
            const auto merged = aggregate_counts(CountVector(c), Partition(groups, K));
            const auto a = pqr_cell_leq(CountVector(c), k, t);
            const auto b = pqr_cell_leq(merged, 0, t);
            worst = std::max({worst, std::abs(a.p - b.p), std::abs(a.q - b.q), std::abs(a.r - b.r)});
        }
        return Outcome{worst < 1e-9, "max difference " + num(worst)};
    });

    criterion(10, "Simplex-DSM qualitative claims", [] {
        const CountVector c({2, 1, 1});
        const auto grid = linspace(0.0, 1.0, 21);
        const auto curve = pqr_cell_leq_simplex_curve(ObservationList::from_counts(c), 0, grid, 5000, RandomSeed{21});
        double worst = INFINITY;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto d = pqr_cell_leq(c, 0, grid[i]);
            worst = std::min(worst, curve[i].value.r - d.r + 3 * curve[i].se_r);
        }
        const std::vector<double> r0 = {0.1, 0.5, 1.0, 2.0, 10.0};
        const auto ratio =
            pqr_conditional_ratio_simplex_curve(ObservationList::from_counts(CountVector({1, 0, 0})), r0, 5000,
                                                RandomSeed{22});
        double min_r = 1.0;
        bool informative = false;
        for (const auto& e : ratio) {
            min_r = std::min(min_r, e.value.r);
            informative = informative || e.value.r < 1.0 - 3 * e.se_r;
        }
        return Outcome{worst >= 0.0 && informative,
                       "min of r_simplex - r_ddsm + 3 SE " + num(worst) + ", smallest (1,0,0) ratio r " + num(min_r)};
    });

    criterion(11, "independence test scaling", [] {
        BenchmarkConfig cfg;
        cfg.granularities = {2, 8};
        cfg.repetitions = 5;
        cfg.seed = RandomSeed{23};
        const auto rows = runtime_benchmark(cfg);
        const double ratio = rows[1].mean_seconds / rows[0].mean_seconds;
        std::string refusal;
        try {
            ContingencyTable t;
            t.granularity = 4;
            t.cells.assign(16, 1);
            t.total = 16;
            uniformity_plausibility_simplex(t, 10, RandomSeed{1});
        } catch (const UsageError& e) {
            refusal = e.what();
        }
        const bool ok = ratio < 10.0 && refusal.find("granularity") != std::string::npos;
        return Outcome{ok, "G=8 / G=2 runtime ratio " + num(ratio) + (refusal.empty() ? ", no refusal" : ", refused")};
    });

    criterion(12, "validate --all", [] {
        const auto t0 = Clock::now();
        std::ostringstream out, err;
        const int code = cli::run({"validate", "--all"}, out, err);
        const double t = seconds_since(t0);
        return Outcome{code == 0 && t < 300.0, "exit " + std::to_string(code) + " in " + num(t) + " s"};
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "dsinfer/error.hpp"
#include "dsinfer/linkage.hpp"
#include "oracles.hpp"

using namespace dsinfer;

TEST_SUITE("linkage") {

TEST_CASE("interval formula examples") {
    const double conflict[] = {0.5, 0.1, 0.1, 0.2};
    const auto a = phi_interval(conflict);
    CHECK(a.lo == doctest::Approx(0.8));
    CHECK(a.hi == doctest::Approx(0.6));
    CHECK_FALSE(a.accepted());
    const double ok[] = {0.6, 0.05, 0.05, 0.1};
    const auto b = phi_interval(ok);
    CHECK(b.lo == doctest::Approx(0.4));
    CHECK(b.hi == doctest::Approx(0.8));
    CHECK(b.accepted());
    CHECK_THROWS_AS(phi_interval(std::vector<double>{0.1, 0.2}), UsageError);
}

TEST_CASE("interval endpoints agree with a direct scan of the linkage curve") {
    // theta(phi) = ((2 + phi)/4, (1 - phi)/4, (1 - phi)/4, phi/4) must dominate Z.
    oracle::DirichletSampler dir(123);
    const int res = 10000;
    int accepted = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const auto d = dir({1.0, 6.0, 1.0, 1.0, 1.5});
        const double z[] = {d[1], d[2], d[3], d[4]};
        double lo = 2.0, hi = -1.0;
        for (int i = 0; i <= res; ++i) {
            const double phi = double(i) / res;
            if ((2 + phi) / 4 >= z[0] && (1 - phi) / 4 >= z[1] && (1 - phi) / 4 >= z[2] && phi / 4 >= z[3]) {
                lo = std::min(lo, phi);
                hi = std::max(hi, phi);
            }
        }
        const auto iv = phi_interval(z);
        if (hi >= lo) {
            ++accepted;
            REQUIRE(iv.accepted());
            CHECK(std::abs(iv.lo - lo) <= 1.0 / res);
            CHECK(std::abs(iv.hi - hi) <= 1.0 / res);
        } else if (iv.accepted()) {
            // Only an interval thinner than the scan resolution can slip through.
            CHECK(iv.hi - iv.lo < 1.0 / res);
        }
    }
    CHECK(accepted > 500);
}

TEST_CASE("acceptance rate for data only in cell 4 is 4^-n") {
    const auto r = linkage_acceptance_rate(CountVector({0, 0, 0, 2}), 200000, RandomSeed{1});
    CHECK(std::abs(r.rate() - 1.0 / 16.0) < 3 * r.standard_error());
    const auto r3 = linkage_acceptance_rate(CountVector({0, 0, 0, 3}), 200000, RandomSeed{2});
    CHECK(std::abs(r3.rate() - 1.0 / 64.0) < 3 * r3.standard_error());
}

TEST_CASE("acceptance rate against an independent sampler") {
    const auto r = linkage_acceptance_rate(CountVector({25, 3, 4, 7}), 300000, RandomSeed{4});
    oracle::DirichletSampler dir(77);
    const int n = 300000;
    int acc = 0;
    for (int i = 0; i < n; ++i) {
        const auto d = dir({1, 25, 3, 4, 7});
        acc += std::max(4 * d[1] - 2, 4 * d[4]) <= std::min(1 - 4 * d[2], 1 - 4 * d[3]);
    }
    const double ref = double(acc) / n;
    CHECK(std::abs(r.rate() - ref) < 4 * std::hypot(r.standard_error(), oracle::proportion_se(ref, n)));
}

TEST_CASE("acceptance report statistics") {
    AcceptanceReport r{1000, 40};
    CHECK(r.rate() == doctest::Approx(0.04));
    CHECK(r.standard_error() == doctest::Approx(std::sqrt(0.04 * 0.96 / 1000)));
    CHECK(r.wilson_lower() < 0.04);
    CHECK(r.wilson_upper() > 0.04);
    CHECK(r.wilson_lower() > 0.0);
    AcceptanceReport none{100, 0};
    CHECK(none.wilson_lower() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(none.wilson_upper() > 0.0);
}

TEST_CASE("accepted samples, envelopes and (p,q,r)") {
    const CountVector counts({25, 3, 4, 7});
    const auto s = sample_accepted_intervals(counts, 5000, RandomSeed{9});
    REQUIRE(s.intervals.size() == 5000);
    for (const auto& iv : s.intervals) {
        CHECK(iv.accepted());
        CHECK(iv.lo >= 0.0);
        CHECK(iv.hi <= 1.0);
    }
    const double rate = 5000.0 / double(s.proposals);
    CHECK(rate == doctest::Approx(0.042).epsilon(0.2));

    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
    const auto env = phi_cdf_envelope(s.intervals, grid);
    double pl = 0.0, pu = 0.0;
    for (const auto& e : env) {
        CHECK(e.lower <= e.upper);
        CHECK(e.lower >= pl);
        CHECK(e.upper >= pu);
        pl = e.lower;
        pu = e.upper;
    }
    CHECK(env.back().lower == 1.0);
    CHECK(env.back().upper == 1.0);
    CHECK(env.front().lower == 0.0);

    for (double p0 : {0.3, 0.55, 0.8}) {
        const auto leq = pqr_phi_leq(s.intervals, p0);
        const auto pt = pqr_phi_point(s.intervals, p0);
        CHECK(leq.value.p + leq.value.q + leq.value.r == doctest::Approx(1.0));
        CHECK(pt.value.p == 0.0);
        // The point and the one-sided assertion share the same undecided event.
        CHECK(pt.value.r == leq.value.r);
        const auto e = phi_cdf_envelope(s.intervals, std::vector<double>{p0}).front();
        CHECK(leq.value.p == doctest::Approx(e.lower));
        CHECK(leq.value.p + leq.value.r == doctest::Approx(e.upper));
    }
}

TEST_CASE("convenience overloads reuse the same accepted draws") {
    const CountVector counts({25, 3, 4, 7});
    const auto s = sample_accepted_intervals(counts, 2000, RandomSeed{10});
    const auto a = pqr_phi_leq(counts, 0.6, 2000, RandomSeed{10});
    const auto b = pqr_phi_leq(s.intervals, 0.6);
    CHECK(a.value.p == b.value.p);
    CHECK(a.value.q == b.value.q);
    const auto c = pqr_phi_point(counts, 0.6, 2000, RandomSeed{10}, 3);
    CHECK(c.value.r == pqr_phi_point(s.intervals, 0.6).value.r);
}

TEST_CASE("a point outside every accepted interval has r = 0") {
    const std::vector<PhiInterval> ivs = {{0.2, 0.3}, {0.25, 0.4}};
    const auto e = pqr_phi_point(ivs, 0.9);
    CHECK(e.value.r == 0.0);
    CHECK(e.value.q == 1.0);
}

TEST_CASE("degenerate and invalid input") {
    CHECK_THROWS_AS(pqr_phi_leq(std::vector<PhiInterval>{}, 0.5), DegenerateError);
    CHECK_THROWS_AS(linkage_acceptance_rate(CountVector({1, 2, 3}), 10, RandomSeed{1}), UsageError);
    CHECK_THROWS_AS(pqr_phi_leq(std::vector<PhiInterval>{{0.1, 0.2}}, 1.5), UsageError);
}

TEST_CASE("thread count does not change the acceptance tally") {
    const CountVector counts({25, 6, 2, 7});
    const auto a = linkage_acceptance_rate(counts, 50000, RandomSeed{3}, 1);
    const auto b = linkage_acceptance_rate(counts, 50000, RandomSeed{3}, 4);
    CHECK(a.accepted == b.accepted);
    const auto sa = sample_accepted_intervals(counts, 300, RandomSeed{3}, 1);
    const auto sb = sample_accepted_intervals(counts, 300, RandomSeed{3}, 2);
    CHECK(sa.proposals == sb.proposals);
    CHECK(sa.intervals.back().lo == sb.intervals.back().lo);
}

}  // TEST_SUITE

#include "dsinfer/linkage.hpp"

#include <algorithm>
#include <cmath>

#include "dsinfer/error.hpp"
#include "dsinfer/parallel.hpp"
#include "focal_loop.hpp"

namespace dsinfer {

namespace {

void check_counts(const CountVector& counts4) {
    if (counts4.size() != 4) throw UsageError("the linkage model needs K = 4 counts");
}

void check_phi0(double phi0) {
    if (!(phi0 >= 0.0 && phi0 <= 1.0)) throw UsageError("phi0 must lie in [0, 1]");
}

PhiInterval interval_of(const detail::FocalView& v) {
    const double z[] = {v.z(0), v.z(1), v.z(2), v.z(3)};
    return phi_interval(z);
}

struct AcceptTally {
    std::uint64_t proposals = 0;
    std::uint64_t accepted = 0;
    AcceptTally& operator+=(const AcceptTally& o) {
        proposals += o.proposals;
        accepted += o.accepted;
        return *this;
    }
};

}  // namespace

PhiInterval phi_interval(std::span<const double> z) {
    if (z.size() != 4) throw UsageError("the linkage interval needs four lower bounds");
    PhiInterval iv;
    iv.lo = std::max({4.0 * z[0] - 2.0, 4.0 * z[3], 0.0});
    iv.hi = std::min({1.0 - 4.0 * z[1], 1.0 - 4.0 * z[2], 1.0});
    return iv;
}

PhiInterval sample_phi_interval(const CountVector& counts4, RandomSeed seed) {
    check_counts(counts4);
    Stream stream = Stream::derive(seed, 0);
    std::vector<double> buf(5);
    sample_dirichlet(counts4.posterior_shape(), stream, buf);
    return interval_of(detail::FocalView{buf});
}

double AcceptanceReport::rate() const {
    return proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
}

double AcceptanceReport::standard_error() const {
    if (proposals == 0) return 0.0;
    const double r = rate();
    return std::sqrt(r * (1.0 - r) / static_cast<double>(proposals));
}

namespace {

std::pair<double, double> wilson(double rate, double n) {
    if (n == 0.0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double z2 = z * z;
    const double centre = (rate + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = z * std::sqrt(rate * (1.0 - rate) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace

double AcceptanceReport::wilson_lower() const {
    return wilson(rate(), static_cast<double>(proposals)).first;
}

double AcceptanceReport::wilson_upper() const {
    return wilson(rate(), static_cast<double>(proposals)).second;
}

AcceptanceReport linkage_acceptance_rate(const CountVector& counts4, std::uint64_t n_proposals,
                                         RandomSeed seed, unsigned threads) {
    check_counts(counts4);
    const auto t = detail::tally_focal_sets<AcceptTally>(
        counts4, n_proposals, seed, threads, [](const detail::FocalView& v, AcceptTally& tally) {
            ++tally.proposals;
            if (interval_of(v).accepted()) ++tally.accepted;
        });
    return AcceptanceReport{t.proposals, t.accepted};
}

LinkageSample sample_accepted_intervals(const CountVector& counts4, std::uint64_t n_accepted,
                                        RandomSeed seed, unsigned threads) {
    check_counts(counts4);
    const ShapeVector shape = counts4.posterior_shape();
    // Same chunk-to-stream mapping as tally_focal_sets, so proposal i here is
    // draw i of linkage_acceptance_rate.
    auto run = collect_accepted<PhiInterval>(
        n_accepted, focal_chunk_size, threads, 10'000'000, [&](std::uint64_t chunk) {
            Stream stream = Stream::derive(seed, chunk);
            std::vector<double> buf(shape.size());
            std::vector<Accepted<PhiInterval>> out;
            for (std::uint64_t i = 0; i < focal_chunk_size; ++i) {
                sample_dirichlet(shape, stream, buf);
                const auto iv = interval_of(detail::FocalView{buf});
                if (iv.accepted()) out.push_back({i, iv});
            }
            return out;
        });
    return LinkageSample{std::move(run.items), run.proposals};
}

std::vector<CdfEnvelopePoint> phi_cdf_envelope(std::span<const PhiInterval> intervals,
                                               std::span<const double> phi0_grid) {
    if (intervals.empty()) throw DegenerateError("no accepted phi intervals");
    std::vector<double> los, his;
    los.reserve(intervals.size());
    his.reserve(intervals.size());
    for (const auto& iv : intervals) {
        los.push_back(iv.lo);
        his.push_back(iv.hi);
    }
    std::sort(los.begin(), los.end());
    std::sort(his.begin(), his.end());
    const double n = static_cast<double>(intervals.size());
    std::vector<CdfEnvelopePoint> out;
    out.reserve(phi0_grid.size());
    for (double phi0 : phi0_grid) {
        check_phi0(phi0);
        CdfEnvelopePoint pt;
        pt.phi0 = phi0;
        pt.lower = static_cast<double>(std::upper_bound(his.begin(), his.end(), phi0) - his.begin()) / n;
        pt.upper = static_cast<double>(std::upper_bound(los.begin(), los.end(), phi0) - los.begin()) / n;
        pt.se_lower = std::sqrt(pt.lower * (1.0 - pt.lower) / n);
        pt.se_upper = std::sqrt(pt.upper * (1.0 - pt.upper) / n);
        out.push_back(pt);
    }
    return out;
}

PqrEstimate pqr_phi_leq(std::span<const PhiInterval> intervals, double phi0) {
    check_phi0(phi0);
    if (intervals.empty()) throw DegenerateError("no accepted phi intervals");
    std::uint64_t n_for = 0, n_against = 0;
    for (const auto& iv : intervals) {
        if (iv.hi <= phi0) ++n_for;
        else if (iv.lo > phi0) ++n_against;
    }
    return PqrEstimate::from_tallies(n_for, n_against, intervals.size());
}

PqrEstimate pqr_phi_point(std::span<const PhiInterval> intervals, double phi0) {
    check_phi0(phi0);
    if (intervals.empty()) throw DegenerateError("no accepted phi intervals");
    std::uint64_t inside = 0;
    for (const auto& iv : intervals)
        if (iv.lo <= phi0 && phi0 <= iv.hi) ++inside;
    return PqrEstimate::from_tallies(0, intervals.size() - inside, intervals.size());
}

PqrEstimate pqr_phi_leq(const CountVector& counts4, double phi0, std::uint64_t n_accepted,
                        RandomSeed seed, unsigned threads) {
    check_phi0(phi0);
    return pqr_phi_leq(sample_accepted_intervals(counts4, n_accepted, seed, threads).intervals, phi0);
}

PqrEstimate pqr_phi_point(const CountVector& counts4, double phi0, std::uint64_t n_accepted,
                          RandomSeed seed, unsigned threads) {
    check_phi0(phi0);
    return pqr_phi_point(sample_accepted_intervals(counts4, n_accepted, seed, threads).intervals, phi0);
}

}  // namespace dsinfer

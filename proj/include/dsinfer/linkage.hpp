#pragma once

// Dirichlet-DSM inference for the linkage model
//   theta = ((2 + phi)/4, (1 - phi)/4, (1 - phi)/4, phi/4),  0 < phi < 1.
// A posterior focal set {theta_k >= Z_k} meets the curve in the phi-interval
//   [max(4 Z_1 - 2, 4 Z_4), min(1 - 4 Z_2, 1 - 4 Z_3)],
// and is a conflict when that interval is empty.

#include <cstdint>
#include <span>
#include <vector>

#include "dsinfer/dsm.hpp"

namespace dsinfer {

struct PhiInterval {
    double lo = 0.0;
    double hi = 1.0;
    bool accepted() const { return lo <= hi; }
};

/// Interval cut out of the linkage curve by lower bounds z = (Z_1..Z_4),
/// intersected with [0, 1].
PhiInterval phi_interval(std::span<const double> z);

/// One posterior draw (accepted or not).
PhiInterval sample_phi_interval(const CountVector& counts4, RandomSeed seed);

struct AcceptanceReport {
    std::uint64_t proposals = 0;
    std::uint64_t accepted = 0;

    double rate() const;
    double standard_error() const;
    /// 95% Wilson score interval.
    double wilson_lower() const;
    double wilson_upper() const;
};

/// Acceptance over `n_proposals` Dirichlet-DSM draws. Draw i is the same
/// draw seen by every other Dirichlet-DSM loop with this seed.
AcceptanceReport linkage_acceptance_rate(const CountVector& counts4, std::uint64_t n_proposals,
                                         RandomSeed seed, unsigned threads = 1);

struct LinkageSample {
    std::vector<PhiInterval> intervals;
    std::uint64_t proposals = 0;
};

/// The first `n_accepted` non-conflicting intervals.
LinkageSample sample_accepted_intervals(const CountVector& counts4, std::uint64_t n_accepted,
                                        RandomSeed seed, unsigned threads = 1);

struct CdfEnvelopePoint {
    double phi0 = 0.0;
    double lower = 0.0;  // fraction with hi <= phi0
    double upper = 0.0;  // fraction with lo <= phi0
    double se_lower = 0.0;
    double se_upper = 0.0;
};

std::vector<CdfEnvelopePoint> phi_cdf_envelope(std::span<const PhiInterval> intervals,
                                               std::span<const double> phi0_grid);

/// {phi <= phi0}: p = frac(hi <= phi0), q = frac(lo > phi0).
PqrEstimate pqr_phi_leq(std::span<const PhiInterval> intervals, double phi0);

/// {phi = phi0}: p = 0, r = frac(lo <= phi0 <= hi).
PqrEstimate pqr_phi_point(std::span<const PhiInterval> intervals, double phi0);

PqrEstimate pqr_phi_leq(const CountVector& counts4, double phi0, std::uint64_t n_accepted,
                        RandomSeed seed, unsigned threads = 1);
PqrEstimate pqr_phi_point(const CountVector& counts4, double phi0, std::uint64_t n_accepted,
                          RandomSeed seed, unsigned threads = 1);

}  // namespace dsinfer

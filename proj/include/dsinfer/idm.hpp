#pragma once

// Imprecise Dirichlet Model bounds, the Jeffreys-prior baseline, and the IDM
// prior family for the linkage parameter phi.

#include <cstddef>
#include <span>
#include <vector>

#include "dsinfer/dsm.hpp"

namespace dsinfer {

/// Dirichlet prior weights alpha_k >= 0 with sum(alpha) <= s.
class IdmHyper {
public:
    explicit IdmHyper(std::vector<double> alphas, double s = 1.0);

    std::span<const double> alphas() const { return alphas_; }
    double operator[](std::size_t k) const { return alphas_[k]; }
    std::size_t size() const { return alphas_.size(); }
    double s() const { return s_; }

private:
    std::vector<double> alphas_;
    double s_;
};

struct ProbabilityBounds {
    double lower = 0.0;
    double upper = 1.0;
};

/// Lower/upper posterior probability of {theta_k <= theta0}: lower uses
/// alpha_k = s, upper alpha_k = 0. With s = 1 these coincide with the
/// Dirichlet-DSM p and p + r.
ProbabilityBounds idm_cell_leq_bounds(const CountVector& counts, std::size_t k, double theta0,
                                      double s = 1.0);

/// Posterior P(theta_k <= theta0) under the Jeffreys prior Dirichlet(1/2, ..., 1/2).
double jeffreys_prob(const CountVector& counts, std::size_t k, double theta0);

/// Jeffreys posterior P(theta_2 / theta_3 <= r0 | theta_1 = t) on K = 3; does
/// not depend on t.
double jeffreys_conditional_ratio(const CountVector& counts, double r0);

/// A density for phi tabulated on a strictly increasing grid in (0, 1).
struct PhiDensity {
    std::vector<double> grid;
    std::vector<double> density;

    /// Trapezoid integral of the tabulated density (1 after normalization).
    double integral() const;
    /// Cumulative integral up to phi0, with the density linear between nodes.
    double cdf(double phi0) const;
    double mean() const;
    /// Linear interpolation, 0 outside the grid.
    double at(double phi) const;
};

inline constexpr double linkage_grid_epsilon = 1e-6;
inline constexpr std::size_t linkage_default_grid_size = 4001;

/// Grid on [eps, 1 - eps]: `grid_size` uniform points plus geometric
/// refinement towards both ends.
std::vector<double> linkage_phi_grid(std::size_t grid_size, double eps = linkage_grid_epsilon);

/// IDM posterior for phi in the linkage model, alpha on the sum(alpha) = 1 face:
///   ((2+phi)/4)^(alpha_1 - 1 + N_1) ((1-phi)/4)^(alpha_2 + alpha_3 - 2 + N_2 + N_3)
///   (phi/4)^(alpha_4 - 1 + N_4),
/// trapezoid-normalized.
PhiDensity linkage_idm_posterior(const CountVector& counts4, const IdmHyper& alphas,
                                 std::size_t grid_size = linkage_default_grid_size);

/// The four vertices of the alpha face followed by the six edge midpoints.
std::vector<IdmHyper> default_alpha_grid();

struct IdmEnvelopePoint {
    double phi0 = 0.0;
    double lower = 0.0;
    double upper = 1.0;
    std::size_t lower_alpha = 0;  // index into the alpha grid attaining `lower`
    std::size_t upper_alpha = 0;  // index attaining `upper`
    std::vector<double> by_alpha;  // CDF at phi0 for every alpha in the grid
};

/// Min and max over `alpha_grid` of the posterior CDF at each phi0.
std::vector<IdmEnvelopePoint> linkage_idm_cdf_bounds(const CountVector& counts4,
                                                     std::span<const double> phi0_grid,
                                                     std::span<const IdmHyper> alpha_grid,
                                                     std::size_t grid_size = linkage_default_grid_size);

/// Single-point convenience form.
ProbabilityBounds linkage_idm_cdf_bounds(const CountVector& counts4, double phi0,
                                         std::span<const IdmHyper> alpha_grid,
                                         std::size_t grid_size = linkage_default_grid_size);

}  // namespace dsinfer

#include "dsinfer/idm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dsinfer/error.hpp"
#include "dsinfer/stats.hpp"

namespace dsinfer {

IdmHyper::IdmHyper(std::vector<double> alphas, double s) : alphas_(std::move(alphas)), s_(s) {
    if (!(s_ > 0.0) || !std::isfinite(s_)) throw DomainError("IDM prior strength s must be positive");
    double total = 0.0;
    for (double a : alphas_) {
        if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("IDM weights must be non-negative");
        total += a;
    }
    if (total > s_ + 1e-12) throw DomainError("IDM weights sum to more than s");
}

namespace {

void check_query(const CountVector& counts, std::size_t k, double theta0) {
    if (k >= counts.size()) throw UsageError("category index out of range");
    if (!(theta0 >= 0.0 && theta0 <= 1.0)) throw UsageError("theta0 must lie in [0, 1]");
}

void check_linkage(const CountVector& counts4, const IdmHyper& alphas) {
    if (counts4.size() != 4) throw UsageError("the linkage model needs K = 4 counts");
    if (alphas.size() != 4) throw UsageError("the linkage IDM needs four alpha weights");
    if (alphas.s() != 1.0) throw UsageError("the linkage IDM family uses s = 1");
    double total = 0.0;
    for (double a : alphas.alphas()) total += a;
    if (std::abs(total - 1.0) > 1e-12) throw UsageError("linkage alpha weights must sum to 1");
}

}  // namespace

ProbabilityBounds idm_cell_leq_bounds(const CountVector& counts, std::size_t k, double theta0,
                                      double s) {
    check_query(counts, k, theta0);
    if (!(s > 0.0)) throw DomainError("IDM prior strength s must be positive");
    const double n = static_cast<double>(counts.total());
    const double nk = static_cast<double>(counts[k]);
    return {beta_cdf(theta0, nk + s, n - nk), beta_cdf(theta0, nk, n + s - nk)};
}

double jeffreys_prob(const CountVector& counts, std::size_t k, double theta0) {
    check_query(counts, k, theta0);
    const double n = static_cast<double>(counts.total());
    const double nk = static_cast<double>(counts[k]);
    const double K = static_cast<double>(counts.size());
    return beta_cdf(theta0, nk + 0.5, n - nk + 0.5 * (K - 1.0));
}

double jeffreys_conditional_ratio(const CountVector& counts, double r0) {
    if (counts.size() != 3) throw UsageError("the conditional ratio assertion needs K = 3");
    if (!(r0 >= 0.0)) throw UsageError("r0 must be non-negative");
    if (std::isinf(r0)) return 1.0;
    // theta_2 / (theta_2 + theta_3) ~ Beta(N_2 + 1/2, N_3 + 1/2) given theta_1.
    return beta_cdf(r0 / (1.0 + r0), static_cast<double>(counts[1]) + 0.5,
                    static_cast<double>(counts[2]) + 0.5);
}

double PhiDensity::integral() const {
    double s = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        s += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
    return s;
}

double PhiDensity::cdf(double phi0) const {
    if (grid.empty() || phi0 <= grid.front()) return 0.0;
    double s = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double a = grid[i - 1];
        const double b = grid[i];
        if (phi0 >= b) {
            s += 0.5 * (density[i] + density[i - 1]) * (b - a);
            continue;
        }
        const double t = phi0 - a;
        const double slope = (density[i] - density[i - 1]) / (b - a);
        s += t * (density[i - 1] + 0.5 * slope * t);
        return std::min(s, 1.0);
    }
    return std::min(s, 1.0);
}

double PhiDensity::mean() const {
    double s = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        s += 0.5 * (grid[i] * density[i] + grid[i - 1] * density[i - 1]) * (grid[i] - grid[i - 1]);
    return s;
}

double PhiDensity::at(double phi) const {
    if (grid.empty() || phi < grid.front() || phi > grid.back()) return 0.0;
    const auto it = std::lower_bound(grid.begin(), grid.end(), phi);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin());
    if (i == 0) return density.front();
    const double w = (phi - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return density[i - 1] + w * (density[i] - density[i - 1]);
}

std::vector<double> linkage_phi_grid(std::size_t grid_size, double eps) {
    if (grid_size < 3) throw UsageError("grid_size must be at least 3");
    if (!(eps > 0.0 && eps < 0.01)) throw UsageError("grid epsilon must lie in (0, 0.01)");
    const double lo = eps, hi = 1.0 - eps;
    const double h = (hi - lo) / static_cast<double>(grid_size - 1);
    std::vector<double> g;
    g.reserve(grid_size + 200);
    for (std::size_t i = 0; i < grid_size; ++i) g.push_back(lo + h * static_cast<double>(i));
    g.back() = hi;
    // Geometric nodes between eps and the first uniform step, mirrored at 1.
    for (double d = eps * 1.25; d < h; d *= 1.25) {
        g.push_back(d);
        g.push_back(1.0 - d);
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end(), [](double a, double b) { return b - a < 1e-15; }), g.end());
    return g;
}

PhiDensity linkage_idm_posterior(const CountVector& counts4, const IdmHyper& alphas,
                                 std::size_t grid_size) {
    check_linkage(counts4, alphas);
    const double e1 = alphas[0] - 1.0 + static_cast<double>(counts4[0]);
    const double e23 = alphas[1] + alphas[2] - 2.0 + static_cast<double>(counts4[1] + counts4[2]);
    const double e4 = alphas[3] - 1.0 + static_cast<double>(counts4[3]);

    PhiDensity d;
    d.grid = linkage_phi_grid(grid_size);
    d.density.resize(d.grid.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d.grid.size(); ++i) {
        const double phi = d.grid[i];
        const double lg = e1 * std::log((2.0 + phi) / 4.0) + e23 * std::log((1.0 - phi) / 4.0) +
                          e4 * std::log(phi / 4.0);
        d.density[i] = lg;
        top = std::max(top, lg);
    }
    for (double& v : d.density) v = std::exp(v - top);
    const double z = d.integral();
    if (!(z > 0.0) || !std::isfinite(z)) throw NumericError("linkage posterior failed to normalize");
    for (double& v : d.density) v /= z;
    return d;
}

std::vector<IdmHyper> default_alpha_grid() {
    std::vector<IdmHyper> grid;
    for (std::size_t v = 0; v < 4; ++v) {
        std::vector<double> a(4, 0.0);
        a[v] = 1.0;
        grid.emplace_back(std::move(a));
    }
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            std::vector<double> a(4, 0.0);
            a[i] = a[j] = 0.5;
            grid.emplace_back(std::move(a));
        }
    }
    return grid;
}

std::vector<IdmEnvelopePoint> linkage_idm_cdf_bounds(const CountVector& counts4,
                                                     std::span<const double> phi0_grid,
                                                     std::span<const IdmHyper> alpha_grid,
                                                     std::size_t grid_size) {
    if (alpha_grid.empty()) throw UsageError("the alpha grid is empty");
    for (double p : phi0_grid)
        if (!(p >= 0.0 && p <= 1.0)) throw UsageError("phi0 must lie in [0, 1]");
    std::vector<IdmEnvelopePoint> out(phi0_grid.size());
    for (std::size_t g = 0; g < phi0_grid.size(); ++g) {
        out[g].phi0 = phi0_grid[g];
        out[g].lower = std::numeric_limits<double>::infinity();
        out[g].upper = -std::numeric_limits<double>::infinity();
    }
    for (std::size_t a = 0; a < alpha_grid.size(); ++a) {
        const auto d = linkage_idm_posterior(counts4, alpha_grid[a], grid_size);
        for (std::size_t g = 0; g < phi0_grid.size(); ++g) {
            const double phi0 = phi0_grid[g];
            const double c = phi0 >= 1.0 ? 1.0 : d.cdf(phi0);
            auto& pt = out[g];
            pt.by_alpha.push_back(c);
            if (c < pt.lower) {
                pt.lower = c;
                pt.lower_alpha = a;
            }
            if (c > pt.upper) {
                pt.upper = c;
                pt.upper_alpha = a;
            }
        }
    }
    return out;
}

ProbabilityBounds linkage_idm_cdf_bounds(const CountVector& counts4, double phi0,
                                         std::span<const IdmHyper> alpha_grid, std::size_t grid_size) {
    const double grid[] = {phi0};
    const auto pt = linkage_idm_cdf_bounds(counts4, grid, alpha_grid, grid_size).front();
    return {pt.lower, pt.upper};
}

}  // namespace dsinfer

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dsinfer/rng.hpp"

namespace dsinfer {

/// Dirichlet concentration parameters. Entries are non-negative and at least
/// one is positive; a zero entry yields an exactly-zero coordinate.
class ShapeVector {
public:
    explicit ShapeVector(std::vector<double> alphas);

    std::span<const double> alphas() const { return alphas_; }
    std::size_t size() const { return alphas_.size(); }
    double operator[](std::size_t i) const { return alphas_[i]; }
    double total() const;

private:
    std::vector<double> alphas_;
};

/// A point of the probability simplex.
class SimplexPoint {
public:
    explicit SimplexPoint(std::vector<double> coords);

    std::span<const double> coords() const { return coords_; }
    std::size_t size() const { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }

private:
    std::vector<double> coords_;
};

double sample_uniform(Stream& s);
double sample_exponential(Stream& s);
double sample_normal(Stream& s);

/// Gamma(shape, 1). Marsaglia-Tsang for shape >= 1; for shape < 1 a draw at
/// shape + 1 is scaled by U^(1/shape).
double sample_gamma(double shape, Stream& s);

double sample_beta(double a, double b, Stream& s);

/// Writes one Dirichlet(alphas) draw into `out` (same length as alphas).
void sample_dirichlet(const ShapeVector& alphas, Stream& s, std::span<double> out);
SimplexPoint sample_dirichlet(const ShapeVector& alphas, Stream& s);

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double x, double a, double b);

/// CDF at x of Beta(a, b) where a or b may be zero: Beta(0, b) is a point
/// mass at 0 and Beta(a, 0) a point mass at 1. Both zero is a domain error.
double beta_cdf(double x, double a, double b);

/// Kolmogorov-Smirnov sup distance between the empirical CDF of sorted
/// `samples` and `cdf`.
double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf);

inline double uniform_cdf(double x) { return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : x); }

}  // namespace dsinfer

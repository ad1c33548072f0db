#pragma once

// Reference computations that do not go through the library's own numerics.

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

/// Beta(a, b) CDF, with Beta(0, b) a point mass at 0 and Beta(a, 0) at 1.
inline double beta_cdf(double x, double a, double b) {
    if (a == 0.0) return x >= 0.0 ? 1.0 : 0.0;
    if (b == 0.0) return x >= 1.0 ? 1.0 : 0.0;
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::ibeta(a, b, x);
}

template <class F>
double simpson(F f, double a, double b, int intervals) {
    if (intervals % 2) ++intervals;
    const double h = (b - a) / intervals;
    double s = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Dirichlet draws from the standard library, as a sampler independent of
/// the one under test.
class DirichletSampler {
public:
    explicit DirichletSampler(std::uint64_t seed) : gen_(seed) {}

    std::vector<double> operator()(const std::vector<double>& alphas) {
        std::vector<double> out(alphas.size());
        double total = 0.0;
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            out[i] = alphas[i] > 0.0 ? std::gamma_distribution<double>(alphas[i], 1.0)(gen_) : 0.0;
            total += out[i];
        }
        for (double& v : out) v /= total;
        return out;
    }

private:
    std::mt19937_64 gen_;
};

/// Binomial standard error of a proportion.
inline double proportion_se(double p, double n) { return std::sqrt(std::max(p * (1.0 - p), 1e-300) / n); }

}  // namespace oracle

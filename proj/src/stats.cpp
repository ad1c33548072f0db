#include "dsinfer/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "dsinfer/error.hpp"

namespace dsinfer {

ShapeVector::ShapeVector(std::vector<double> alphas) : alphas_(std::move(alphas)) {
    if (alphas_.empty()) throw DomainError("shape vector is empty");
    bool any_positive = false;
    for (double a : alphas_) {
        if (!std::isfinite(a) || a < 0.0)
            throw DomainError("shape parameters must be finite and non-negative");
        any_positive = any_positive || a > 0.0;
    }
    if (!any_positive) throw DomainError("at least one shape parameter must be positive");
}

double ShapeVector::total() const { return std::accumulate(alphas_.begin(), alphas_.end(), 0.0); }

SimplexPoint::SimplexPoint(std::vector<double> coords) : coords_(std::move(coords)) {
    double sum = 0.0;
    for (double c : coords_) {
        if (!(c >= 0.0 && c <= 1.0)) throw DomainError("simplex coordinate outside [0, 1]");
        sum += c;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw DomainError("simplex coordinates do not sum to 1");
}

double sample_uniform(Stream& s) { return s.uniform(); }

double sample_exponential(Stream& s) { return -std::log(s.uniform_pos()); }

double sample_normal(Stream& s) {
    // Marsaglia polar method; the second variate is discarded so the stream
    // carries no hidden state between calls.
    for (;;) {
        const double u = 2.0 * s.uniform() - 1.0;
        const double v = 2.0 * s.uniform() - 1.0;
        const double r2 = u * u + v * v;
        if (r2 > 0.0 && r2 < 1.0) return u * std::sqrt(-2.0 * std::log(r2) / r2);
    }
}

double sample_gamma(double shape, Stream& s) {
    if (!std::isfinite(shape) || shape <= 0.0)
        throw DomainError("gamma shape must be positive and finite, got " + std::to_string(shape));
    if (shape < 1.0) {
        const double g = sample_gamma(shape + 1.0, s);
        return g * std::exp(std::log(s.uniform_pos()) / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = sample_normal(s);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = s.uniform_pos();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double sample_beta(double a, double b, Stream& s) {
    const double x = sample_gamma(a, s);
    const double y = sample_gamma(b, s);
    return x / (x + y);
}

void sample_dirichlet(const ShapeVector& alphas, Stream& s, std::span<double> out) {
    if (out.size() != alphas.size()) throw UsageError("dirichlet output size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        out[i] = alphas[i] > 0.0 ? sample_gamma(alphas[i], s) : 0.0;
        sum += out[i];
    }
    if (!(sum > 0.0)) throw NumericError("dirichlet gamma draws underflowed");
    for (double& v : out) v /= sum;
}

SimplexPoint sample_dirichlet(const ShapeVector& alphas, Stream& s) {
    std::vector<double> out(alphas.size());
    sample_dirichlet(alphas, s, out);
    return SimplexPoint(std::move(out));
}

namespace {

double beta_continued_fraction(double x, double a, double b) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    constexpr int max_iter = 100000;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw NumericError("incomplete beta continued fraction did not converge");
}

// lgamma(z) - Stirling's approximation, for z >= 10.
double stirling_correction(double z) {
    const double r = 1.0 / (z * z);
    return (1.0 / 12 - r * (1.0 / 360 - r * (1.0 / 1260 - r * (1.0 / 1680 - r * (1.0 / 1188 - r * 691.0 / 360360))))) / z;
}

// log of x^a (1-x)^b / B(a, b). For large shapes the lgamma terms cancel
// badly, so expand around the mode a / (a + b) instead.
double log_beta_front(double x, double a, double b) {
    // lgamma(a + b) - lgamma(big) for big >= 10, without the cancellation.
    const auto lgamma_ratio = [](double small, double big) {
        return (small + big - 0.5) * std::log1p(small / big) + small * std::log(big) - small +
               stirling_correction(small + big) - stirling_correction(big);
    };
    if (a < 10.0 && b < 10.0)
        return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    if (a < 10.0) return lgamma_ratio(a, b) - std::lgamma(a) + a * std::log(x) + b * std::log1p(-x);
    if (b < 10.0) return lgamma_ratio(b, a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double s = a + b;
    const double d = x - a / s;
    return a * std::log1p(d * s / a) + b * std::log1p(-d * s / b) +
           0.5 * std::log(a * b / (2.0 * std::numbers::pi * s)) - stirling_correction(a) - stirling_correction(b) +
           stirling_correction(s);
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta: x outside [0, 1]");
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("incomplete beta: shape parameters must be positive");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front = std::exp(log_beta_front(x, a, b));
    double result;
    if (x > a / (a + b))
        result = 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
    else
        result = front * beta_continued_fraction(x, a, b) / a;
    return std::clamp(result, 0.0, 1.0);
}

double beta_cdf(double x, double a, double b) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("beta cdf: x outside [0, 1]");
    if (!(a >= 0.0) || !(b >= 0.0) || (a == 0.0 && b == 0.0))
        throw DomainError("beta cdf: invalid shape parameters");
    if (a == 0.0) return 1.0;
    if (b == 0.0) return x >= 1.0 ? 1.0 : 0.0;
    return regularized_incomplete_beta(x, a, b);
}

double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw UsageError("ks_distance needs at least one sample");
    if (!std::is_sorted(samples.begin(), samples.end()))
        throw UsageError("ks_distance expects sorted samples");
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

}  // namespace dsinfer

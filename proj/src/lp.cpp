#include "dsinfer/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dsinfer/error.hpp"

namespace dsinfer::lp {

namespace {

constexpr double cost_tolerance = 1e-11;
constexpr int max_iterations = 100000;

void check_dimensions(std::span<const LinearConstraint> constraints, std::size_t dimension) {
    if (dimension < 2 || dimension > max_dimension)
        throw UsageError("LP dimension must be in [2, " + std::to_string(max_dimension) + "], got " +
                         std::to_string(dimension));
    for (const auto& c : constraints) {
        if (c.coefficients.size() != dimension)
            throw UsageError("LP constraint has " + std::to_string(c.coefficients.size()) +
                             " coefficients, expected " + std::to_string(dimension));
        if (!std::isfinite(c.bound)) throw UsageError("LP constraint bound is not finite");
    }
}

// Dense tableau: rows_ x (cols_ + 1), last column is the right-hand side. The
// objective (reduced costs, rhs = -value) is kept in a separate row.
class Tableau {
public:
    Tableau(std::span<const LinearConstraint> constraints, std::size_t dimension)
        : dim_(dimension) {
        rows_ = constraints.size() + 1;
        std::size_t n_slack = 0;
        std::size_t n_art = 1;  // the simplex row
        for (const auto& c : constraints) {
            if (c.sense == Sense::less_equal) {
                ++n_slack;
                if (c.bound < 0.0) ++n_art;
            } else {
                ++n_art;
            }
        }
        first_art_ = dim_ + n_slack;
        cols_ = first_art_ + n_art;
        a_.assign(rows_ * (cols_ + 1), 0.0);
        basis_.assign(rows_, 0);
        allowed_.assign(cols_, true);

        std::size_t slack = dim_;
        std::size_t art = first_art_;
        // Row 0: sum(theta) = 1.
        for (std::size_t j = 0; j < dim_; ++j) at(0, j) = 1.0;
        rhs(0) = 1.0;
        basis_[0] = art++;
        at(0, basis_[0]) = 1.0;

        for (std::size_t r = 0; r < constraints.size(); ++r) {
            const auto& c = constraints[r];
            const std::size_t row = r + 1;
            double scale = 0.0;
            for (double v : c.coefficients) scale = std::max(scale, std::abs(v));
            scale = scale > 0.0 ? 1.0 / scale : 1.0;
            const double sign = c.bound < 0.0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < dim_; ++j) at(row, j) = sign * scale * c.coefficients[j];
            rhs(row) = sign * scale * c.bound;
            if (c.sense == Sense::less_equal) {
                at(row, slack) = sign;
                if (sign > 0.0) {
                    basis_[row] = slack;
                } else {
                    basis_[row] = art;
                    at(row, art++) = 1.0;
                }
                ++slack;
            } else {
                basis_[row] = art;
                at(row, art++) = 1.0;
            }
        }
    }

    // Phase 1; returns false when the region is empty.
    bool make_feasible() {
        obj_.assign(cols_ + 1, 0.0);
        for (std::size_t j = first_art_; j < cols_; ++j) obj_[j] = 1.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (!is_art(basis_[i])) continue;
            for (std::size_t j = 0; j <= cols_; ++j) obj_[j] -= at(i, j);
        }
        iterate();
        if (-obj_[cols_] > feasibility_tolerance) return false;

        // Pivot remaining (zero-level) artificials out; rows where that is
        // impossible are linearly redundant and dropped.
        for (std::size_t i = 0; i < rows_;) {
            if (!is_art(basis_[i])) {
                ++i;
                continue;
            }
            std::size_t pick = cols_;
            for (std::size_t j = 0; j < first_art_; ++j) {
                if (std::abs(at(i, j)) > pivot_tolerance) {
                    pick = j;
                    break;
                }
            }
            if (pick < cols_) {
                pivot(i, pick);
                ++i;
            } else {
                drop_row(i);
            }
        }
        for (std::size_t j = first_art_; j < cols_; ++j) allowed_[j] = false;
        return true;
    }

    // Phase 2 for min(cost . theta); the tableau must be feasible.
    std::vector<double> minimize(std::span<const double> cost) {
        obj_.assign(cols_ + 1, 0.0);
        for (std::size_t j = 0; j < dim_; ++j) obj_[j] = cost[j];
        for (std::size_t i = 0; i < rows_; ++i) {
            const std::size_t b = basis_[i];
            const double cb = b < dim_ ? cost[b] : 0.0;
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) obj_[j] -= cb * at(i, j);
        }
        iterate();
        return witness();
    }

    std::vector<double> witness() const {
        std::vector<double> theta(dim_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            if (basis_[i] < dim_) theta[basis_[i]] = std::max(0.0, a_[i * (cols_ + 1) + cols_]);
        return theta;
    }

private:
    double& at(std::size_t i, std::size_t j) { return a_[i * (cols_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, cols_); }
    bool is_art(std::size_t col) const { return col >= first_art_; }

    void pivot(std::size_t r, std::size_t s) {
        const std::size_t w = cols_ + 1;
        double* prow = &a_[r * w];
        const double inv = 1.0 / prow[s];
        for (std::size_t j = 0; j < w; ++j) prow[j] *= inv;
        prow[s] = 1.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == r) continue;
            double* row = &a_[i * w];
            const double f = row[s];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < w; ++j) row[j] -= f * prow[j];
            row[s] = 0.0;
        }
        const double f = obj_[s];
        if (f != 0.0) {
            for (std::size_t j = 0; j < w; ++j) obj_[j] -= f * prow[j];
            obj_[s] = 0.0;
        }
        basis_[r] = s;
    }

    void drop_row(std::size_t r) {
        const std::size_t w = cols_ + 1;
        a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r * w),
                 a_.begin() + static_cast<std::ptrdiff_t>((r + 1) * w));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        --rows_;
    }

    // Bland's rule for the entering column. Near-ties in the ratio test go to
    // the largest pivot element, or to the lowest-index basic variable once
    // the run has gone on long enough to suspect cycling.
    void iterate() {
        const int bland_after = 50 * static_cast<int>(rows_ + cols_);
        for (int iter = 0; iter < max_iterations; ++iter) {
            const bool strict_bland = iter > bland_after;
            std::size_t s = cols_;
            for (std::size_t j = 0; j < cols_; ++j) {
                if (allowed_[j] && obj_[j] < -cost_tolerance) {
                    s = j;
                    break;
                }
            }
            if (s == cols_) return;
            std::size_t r = rows_;
            double best = 0.0;
            for (std::size_t i = 0; i < rows_; ++i) {
                const double coef = at(i, s);
                if (coef <= pivot_tolerance) continue;
                const double ratio = std::max(0.0, rhs(i)) / coef;
                const double tie = 1e-12 * (1.0 + best);
                if (r == rows_ || ratio < best - tie) {
                    r = i;
                    best = ratio;
                } else if (ratio <= best + tie &&
                           (strict_bland ? basis_[i] < basis_[r] : coef > at(r, s))) {
                    r = i;
                    best = std::min(best, ratio);
                }
            }
            if (r == rows_) throw NumericError("LP unbounded over the simplex (numerical breakdown)");
            pivot(r, s);
        }
        throw NumericError("LP iteration limit reached");
    }

    std::size_t dim_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t first_art_ = 0;
    std::vector<double> a_;
    std::vector<double> obj_;
    std::vector<std::size_t> basis_;
    std::vector<bool> allowed_;
};

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void verify_witness(std::span<const LinearConstraint> constraints, std::span<const double> theta) {
    const double v = max_violation(constraints, theta);
    if (v > feasibility_tolerance)
        throw NumericError("LP witness violates constraints by " + std::to_string(v));
}

}  // namespace

double max_violation(std::span<const LinearConstraint> constraints, std::span<const double> theta) {
    double worst = 0.0;
    double sum = 0.0;
    for (double t : theta) {
        worst = std::max(worst, -t);
        sum += t;
    }
    worst = std::max(worst, std::abs(sum - 1.0));
    for (const auto& c : constraints) {
        const double lhs = dot(c.coefficients, theta);
        const double excess = lhs - c.bound;
        worst = std::max(worst, c.sense == Sense::equal ? std::abs(excess) : excess);
    }
    return worst;
}

LpResult solve(const LpProblem& problem) {
    check_dimensions(problem.constraints, problem.dimension);
    if (problem.objective.size() != problem.dimension)
        throw UsageError("LP objective length does not match dimension");
    Tableau t(problem.constraints, problem.dimension);
    LpResult result;
    if (!t.make_feasible()) return result;
    std::vector<double> cost = problem.objective;
    if (problem.direction == Direction::maximize)
        for (double& c : cost) c = -c;
    result.witness = t.minimize(cost);
    verify_witness(problem.constraints, result.witness);
    result.status = Status::optimal;
    result.value = dot(problem.objective, result.witness);
    return result;
}

bool feasible(std::span<const LinearConstraint> constraints, std::size_t dimension) {
    check_dimensions(constraints, dimension);
    Tableau t(constraints, dimension);
    if (!t.make_feasible()) return false;
    verify_witness(constraints, t.witness());
    return true;
}

std::optional<ObjectiveRange> objective_range(std::span<const LinearConstraint> constraints,
                                              std::size_t dimension,
                                              std::span<const double> objective) {
    check_dimensions(constraints, dimension);
    if (objective.size() != dimension) throw UsageError("LP objective length does not match dimension");
    Tableau feasible_tableau(constraints, dimension);
    if (!feasible_tableau.make_feasible()) return std::nullopt;

    Tableau low = feasible_tableau;
    const auto argmin = low.minimize(objective);
    verify_witness(constraints, argmin);

    std::vector<double> negated(objective.begin(), objective.end());
    for (double& c : negated) c = -c;
    Tableau high = std::move(feasible_tableau);
    const auto argmax = high.minimize(negated);
    verify_witness(constraints, argmax);

    return ObjectiveRange{dot(objective, argmin), dot(objective, argmax)};
}

}  // namespace dsinfer::lp

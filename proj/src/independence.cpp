#include "dsinfer/independence.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <string>

#include "dsinfer/error.hpp"
#include "dsinfer/simplex_dsm.hpp"
#include "dsinfer/stats.hpp"
#include "focal_loop.hpp"

namespace dsinfer {

PairedSample::PairedSample(std::vector<std::pair<double, double>> pairs) : pairs_(std::move(pairs)) {
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        const auto [x, y] = pairs_[i];
        if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
            throw UsageError("pair " + std::to_string(i + 1) + " lies outside [0, 1]^2");
    }
}

namespace {

bool parse_double(std::string_view s, double& out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '"' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    const bool has_hard = line.find_first_of(",;\t") != std::string_view::npos;
    const char* seps = has_hard ? ",;\t" : " ";
    while (start <= line.size()) {
        const std::size_t end = line.find_first_of(seps, start);
        const auto field = line.substr(start, end == std::string_view::npos ? end : end - start);
        if (has_hard || !field.empty()) fields.push_back(field);
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return fields;
}

}  // namespace

PairedSample read_paired_csv(std::istream& in) {
    std::vector<std::pair<double, double>> pairs;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto fields = split_fields(line);
        double x = 0.0, y = 0.0;
        const bool ok = fields.size() == 2 && parse_double(fields[0], x) && parse_double(fields[1], y);
        if (!ok) {
            if (first) {
                first = false;
                continue;
            }
            throw UsageError("line " + std::to_string(line_no) + ": expected two numeric columns");
        }
        first = false;
        if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
            throw UsageError("line " + std::to_string(line_no) + ": values must lie in [0, 1]");
        pairs.emplace_back(x, y);
    }
    return PairedSample(std::move(pairs));
}

PairedSample simulate_uniform_pairs(std::size_t n, RandomSeed seed) {
    Stream s = Stream::derive(seed, 0);
    std::vector<std::pair<double, double>> pairs(n);
    for (auto& p : pairs) {
        p.first = s.uniform();
        p.second = s.uniform();
    }
    return PairedSample(std::move(pairs));
}

PairedSample simulate_diagonal_pairs(std::size_t n, RandomSeed seed) {
    Stream s = Stream::derive(seed, 0);
    std::vector<std::pair<double, double>> pairs(n);
    for (auto& p : pairs) {
        p.first = s.uniform();
        p.second = p.first;
    }
    return PairedSample(std::move(pairs));
}

std::size_t bin_index(double x, std::size_t granularity) {
    if (granularity < 1) throw UsageError("granularity must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw UsageError("coordinate outside [0, 1]");
    const double g = static_cast<double>(granularity);
    auto i = static_cast<std::size_t>(std::floor(x * g));
    // x * g can round across a bin edge; compare against the edges directly.
    while (i > 0 && x < static_cast<double>(i) / g) --i;
    while (i + 1 < granularity && x >= static_cast<double>(i + 1) / g) ++i;
    return std::min(i, granularity - 1);
}

ContingencyTable discretize(const PairedSample& sample, std::size_t granularity) {
    if (granularity < 2) throw UsageError("granularity must be at least 2");
    ContingencyTable t;
    t.granularity = granularity;
    t.cells.assign(granularity * granularity, 0);
    for (const auto& [x, y] : sample.pairs())
        ++t.cells[bin_index(x, granularity) * granularity + bin_index(y, granularity)];
    t.total = sample.size();
    return t;
}

std::vector<std::pair<double, double>> cell_plausibilities(const CountVector& counts, double c) {
    if (!(c >= 0.0 && c <= 1.0)) throw UsageError("threshold must lie in [0, 1]");
    const double n = static_cast<double>(counts.total());
    std::vector<std::pair<double, double>> out;
    out.reserve(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double nk = static_cast<double>(counts[k]);
        // Pl(theta_k <= c) = P(Z_k <= c); Pl(theta_k >= c) = P(Z_k + Z_0 >= c).
        const double below = beta_cdf(c, nk, n + 1.0 - nk);
        double above = 1.0;
        if (c > 0.0) {
            // P(Z_k + Z_0 < c) equals the CDF at c for the continuous law and
            // is 0 for the point mass at 1 that arises when nk == n.
            above = nk == n ? 1.0 : 1.0 - beta_cdf(c, nk + 1.0, n - nk);
        }
        out.emplace_back(below, above);
    }
    return out;
}

namespace {

void decide(UniformityResult& res, const CountVector& counts) {
    const double K = static_cast<double>(counts.size());
    const auto pl = cell_plausibilities(counts, 1.0 / K);
    for (std::size_t k = 0; k < pl.size(); ++k) {
        const double m = std::min(pl[k].first, pl[k].second);
        if (m < res.min_marginal_plausibility) {
            res.min_marginal_plausibility = m;
            res.min_marginal_cell = k;
        }
    }
    if (res.rule == DecisionRule::marginal)
        res.reject = res.min_marginal_plausibility < res.level / (2.0 * K);
    else
        res.reject = res.r < res.level;
}

void check_level(double level) {
    if (!(level > 0.0 && level < 1.0)) throw UsageError("level must lie in (0, 1)");
}

}  // namespace

UniformityResult uniformity_plausibility(const ContingencyTable& table, std::uint64_t n_draws,
                                         RandomSeed seed, double level, DecisionRule rule,
                                         unsigned threads) {
    check_level(level);
    if (n_draws == 0) throw UsageError("n_draws must be positive");
    const CountVector counts = table.flatten();
    const double u = 1.0 / static_cast<double>(counts.size());
    // Stick-breaking over the non-empty cells, largest count first, so most
    // draws settle after one or two Beta variates instead of K + 1 gammas.
    // Empty cells have Z_k = 0 and never exceed u.
    std::vector<double> order;
    for (std::size_t k = 0; k < counts.size(); ++k)
        if (counts[k] > 0) order.push_back(static_cast<double>(counts[k]));
    std::sort(order.begin(), order.end(), std::greater<>());
    const double shape_total = static_cast<double>(counts.total()) + 1.0;
    const auto t = run_chunked<detail::TriTally>(
        n_draws, focal_chunk_size, threads, [&](std::uint64_t chunk, std::uint64_t begin, std::uint64_t end) {
            Stream stream = Stream::derive(seed, chunk);
            detail::TriTally tally;
            for (std::uint64_t i = begin; i < end; ++i) {
                ++tally.n;
                double mass = 1.0;
                double rest = shape_total;
                for (double a : order) {
                    if (mass <= u) break;
                    const double z = mass * sample_beta(a, rest - a, stream);
                    if (z > u) {
                        ++tally.n_against;
                        break;
                    }
                    mass -= z;
                    rest -= a;
                }
            }
            return tally;
        });
    const auto est = PqrEstimate::from_tallies(0, t.n_against, t.n);
    UniformityResult res;
    res.r = est.value.r;
    res.se_r = est.se_r;
    res.draws = est.draws;
    res.level = level;
    res.rule = rule;
    decide(res, counts);
    return res;
}

UniformityResult uniformity_plausibility_simplex(const ContingencyTable& table,
                                                 std::uint64_t n_accepted, RandomSeed seed,
                                                 double level) {
    check_level(level);
    if (table.granularity > simplex_max_granularity)
        throw UsageError("the Simplex-DSM independence test is limited to granularity <= " +
                         std::to_string(simplex_max_granularity) + " (got " +
                         std::to_string(table.granularity) +
                         "); its rejection sampler does not finish in practical time beyond that");
    if (n_accepted == 0) throw UsageError("n_draws must be positive");
    const CountVector counts = table.flatten();
    if (counts.total() == 0) {
        UniformityResult res;
        res.level = level;
        res.rule = DecisionRule::point;
        return res;
    }
    const auto obs = ObservationList::from_counts(counts);
    const auto sample = sample_focal_polytopes(obs, n_accepted, seed);
    const std::vector<double> uniform(counts.size(), 1.0 / static_cast<double>(counts.size()));
    std::uint64_t inside = 0;
    for (const auto& s : sample.sets)
        if (s.contains(uniform, lp::feasibility_tolerance)) ++inside;
    const auto est = PqrEstimate::from_tallies(0, sample.sets.size() - inside, sample.sets.size());
    UniformityResult res;
    res.r = est.value.r;
    res.se_r = est.se_r;
    res.draws = est.draws;
    res.level = level;
    res.rule = DecisionRule::point;
    res.reject = res.r < level;
    return res;
}

std::string to_string(BenchmarkMethod m) { return m == BenchmarkMethod::ddsm ? "ddsm" : "simplex"; }

std::vector<BenchmarkRow> runtime_benchmark(const BenchmarkConfig& config) {
    if (config.repetitions == 0) throw UsageError("repetitions must be positive");
    for (auto m : config.methods) {
        for (auto g : config.granularities) {
            if (g < 2) throw UsageError("granularity must be at least 2");
            if (m == BenchmarkMethod::simplex && g > simplex_max_granularity)
                throw UsageError("the Simplex-DSM benchmark is limited to granularity <= " +
                                 std::to_string(simplex_max_granularity) + " (requested " +
                                 std::to_string(g) +
                                 "); its rejection sampler does not finish in practical time beyond that");
        }
    }
    using clock = std::chrono::steady_clock;
    std::vector<BenchmarkRow> rows;
    for (auto m : config.methods) {
        for (auto g : config.granularities) {
            BenchmarkRow row;
            row.method = m;
            row.granularity = g;
            row.n = m == BenchmarkMethod::ddsm ? config.n : config.simplex_n;
            row.draws = m == BenchmarkMethod::ddsm ? config.n_draws : config.simplex_draws;
            row.repetitions = config.repetitions;
            std::vector<double> times;
            double r_sum = 0.0;
            for (unsigned rep = 0; rep < config.repetitions; ++rep) {
                Stream seeds = Stream::derive(config.seed, rep);
                const RandomSeed data_seed{seeds()};
                const RandomSeed test_seed{seeds()};
                const auto start = clock::now();
                const auto table = discretize(simulate_uniform_pairs(row.n, data_seed), g);
                const auto res = m == BenchmarkMethod::ddsm
                                     ? uniformity_plausibility(table, row.draws, test_seed)
                                     : uniformity_plausibility_simplex(table, row.draws, test_seed);
                times.push_back(std::chrono::duration<double>(clock::now() - start).count());
                r_sum += res.r;
                if (res.reject) ++row.rejections;
            }
            double mean = 0.0;
            for (double t : times) mean += t;
            mean /= static_cast<double>(times.size());
            row.mean_seconds = mean;
            row.mean_r = r_sum / static_cast<double>(times.size());
            if (times.size() < 2) {
                row.sd_seconds = std::numeric_limits<double>::quiet_NaN();
            } else {
                double ss = 0.0;
                for (double t : times) ss += (t - mean) * (t - mean);
                row.sd_seconds = std::sqrt(ss / static_cast<double>(times.size() - 1));
            }
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace dsinfer

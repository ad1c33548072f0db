#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>

#include "CLI11.hpp"
#include "dsinfer/dsm.hpp"
#include "dsinfer/error.hpp"
#include "dsinfer/idm.hpp"
#include "dsinfer/independence.hpp"
#include "dsinfer/linkage.hpp"
#include "dsinfer/simplex_dsm.hpp"
#include "dsinfer/validate.hpp"
#include "json.hpp"
#include "report.hpp"
#include "version.hpp"

namespace dsinfer::cli {

namespace {

using json = nlohmann::ordered_json;

// ---- argument parsing helpers ---------------------------------------------

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto end = s.find(sep, start);
        out.push_back(trim(s.substr(start, end == std::string_view::npos ? end : end - start)));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

double parse_number(const std::string& s, const std::string& what) {
    if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    std::string_view t = s;
    if (!t.empty() && t.front() == '+') t.remove_prefix(1);
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() || std::isnan(v))
        throw UsageError("bad number '" + s + "' in " + what);
    return v;
}

std::vector<std::uint64_t> parse_counts(const std::string& s) {
    std::vector<std::uint64_t> out;
    for (const auto& field : split(s, ',')) {
        std::uint64_t v = 0;
        const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size())
            throw UsageError("bad count '" + field + "' in --counts (expected non-negative integers)");
        out.push_back(v);
    }
    return out;
}

/// "a,b,c", "linspace:a:b:n" or "logspace:a:b:n" (geometric from a to b).
std::vector<double> parse_grid(const std::string& s, const std::string& what) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) {
        std::vector<double> out;
        for (const auto& f : split(s, ',')) out.push_back(parse_number(f, what));
        return out;
    }
    const auto parts = split(s, ':');
    if (parts.size() != 4 || (parts[0] != "linspace" && parts[0] != "logspace"))
        throw UsageError(what + ": expected a list, linspace:a:b:n or logspace:a:b:n");
    const double a = parse_number(parts[1], what);
    const double b = parse_number(parts[2], what);
    const double nd = parse_number(parts[3], what);
    if (!(nd >= 1.0) || nd != std::floor(nd) || nd > 1e6) throw UsageError(what + ": bad point count");
    const auto n = static_cast<std::size_t>(nd);
    if (!std::isfinite(a) || !std::isfinite(b)) throw UsageError(what + ": endpoints must be finite");
    std::vector<double> out(n);
    if (parts[0] == "logspace" && !(a > 0.0 && b > 0.0)) throw UsageError(what + ": logspace needs positive ends");
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        out[i] = parts[0] == "linspace" ? a + (b - a) * t : a * std::pow(b / a, t);
    }
    if (n > 1) out.back() = b;
    return out;
}

std::vector<std::string> parse_names(const std::string& s, const std::vector<std::string>& allowed,
                                     const std::string& what) {
    std::vector<std::string> out;
    for (const auto& f : split(s, ',')) {
        if (std::find(allowed.begin(), allowed.end(), f) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            throw UsageError("unknown " + what + " '" + f + "' (expected one of: " + list + ")");
        }
        if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
    }
    return out;
}

std::string join_counts(const CountVector& c) {
    std::string s;
    for (std::size_t k = 0; k < c.size(); ++k) s += (k ? "," : "") + std::to_string(c[k]);
    return s;
}

// ---- common options ---------------------------------------------------------

struct Common {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string format = "csv";
    std::string output;
    std::string config;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "Root random seed")->capture_default_str();
    sub->add_option("--threads", c.threads, "Worker threads (results do not depend on it)")
        ->capture_default_str()
        ->check(CLI::Range(1u, 1024u));
    sub->add_option("--format", c.format, "Output format")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output,-o", c.output, "Write the report to this file instead of stdout");
    sub->add_option("--config", c.config,
                    "JSON file of option values (flags given on the command line take precedence)");
}

json common_json(const Common& c) {
    return json{{"seed", c.seed}, {"threads", c.threads}, {"format", c.format}};
}

// ---- trinomial --------------------------------------------------------------

struct TrinomialOptions {
    std::string counts = "1,0,0";
    std::string theta0_grid = "linspace:0.01:0.99:99";
    std::string r0_grid = "logspace:0.05:20:41";
    std::string methods = "ddsm,ddsm_mc,simplex,idm,jeffreys";
    std::uint64_t draws = 100000;
    std::uint64_t simplex_draws = 5000;
    double theta1_fixed = 0.5;
};

const std::vector<std::string> trinomial_methods = {"ddsm", "ddsm_mc", "simplex", "idm", "jeffreys"};

void add_trinomial(CLI::App* sub, TrinomialOptions& o) {
    sub->add_option("--counts", o.counts, "Three cell counts, e.g. 2,1,1")->capture_default_str();
    sub->add_option("--theta0-grid", o.theta0_grid, "Grid for {theta_k <= theta0}")->capture_default_str();
    sub->add_option("--r0-grid", o.r0_grid, "Grid for {theta_2/theta_3 <= r0 | theta_1}")->capture_default_str();
    sub->add_option("--methods", o.methods, "Comma list of ddsm, ddsm_mc, simplex, idm, jeffreys")
        ->capture_default_str();
    sub->add_option("--draws", o.draws, "Dirichlet-DSM Monte-Carlo draws")->capture_default_str();
    sub->add_option("--simplex-draws", o.simplex_draws, "Accepted Simplex-DSM polytopes")->capture_default_str();
    sub->add_option("--theta1-fixed", o.theta1_fixed, "Conditioning value of theta_1")->capture_default_str();
}

json trinomial_json(const TrinomialOptions& o) {
    return json{{"counts", o.counts},   {"theta0-grid", o.theta0_grid}, {"r0-grid", o.r0_grid},
                {"methods", o.methods}, {"draws", o.draws},             {"simplex-draws", o.simplex_draws},
                {"theta1-fixed", o.theta1_fixed}};
}

const char* leq_name(std::size_t k) {
    static const char* names[] = {"theta1_leq", "theta2_leq", "theta3_leq"};
    return names[k];
}

constexpr const char* ratio_name = "ratio23_given_theta1";

void add_pqr_row(Table& t, const std::string& method, const std::string& assertion, double x,
                 const PqrEstimate& e) {
    t.add({method, assertion, x, e.value.p, e.value.q, e.value.r, e.value.p + e.value.r, e.se_p, e.se_q,
           e.se_r, e.draws});
}

void add_exact_row(Table& t, const std::string& method, const std::string& assertion, double x, double p,
                   double q, double r) {
    t.add({method, assertion, x, p, q, r, p + r, 0.0, 0.0, 0.0, std::uint64_t{0}});
}

Report run_trinomial(const Common& c, const TrinomialOptions& o) {
    const CountVector counts(parse_counts(o.counts));
    if (counts.size() != 3) throw UsageError("trinomial needs exactly three counts");
    const auto theta0 = parse_grid(o.theta0_grid, "--theta0-grid");
    const auto r0 = parse_grid(o.r0_grid, "--r0-grid");
    for (double t : theta0)
        if (!(t >= 0.0 && t <= 1.0)) throw UsageError("--theta0-grid values must lie in [0, 1]");
    for (double r : r0)
        if (!(r >= 0.0)) throw UsageError("--r0-grid values must be non-negative");
    const auto methods = parse_names(o.methods, trinomial_methods, "method");
    if (o.draws == 0 || o.simplex_draws == 0) throw UsageError("draw counts must be positive");
    if (!(o.theta1_fixed > 0.0 && o.theta1_fixed < 1.0)) throw UsageError("--theta1-fixed must lie in (0, 1)");
    const RandomSeed seed{c.seed};

    Report rep;
    rep.command = "trinomial";
    Table curves("curves", {"method", "assertion", "x", "p", "q", "r", "p_plus_r", "se_p", "se_q", "se_r",
                            "draws"});
    Table sampler("simplex_sampler", {"proposals", "accepted", "acceptance_rate"});

    for (const auto& m : methods) {
        if (m == "ddsm") {
            for (std::size_t k = 0; k < 3; ++k) {
                for (double t : theta0) {
                    const auto v = pqr_cell_leq(counts, k, t);
                    add_exact_row(curves, m, leq_name(k), t, v.p, v.q, v.r);
                }
            }
            const auto ratio = pqr_conditional_ratio_curve(counts, r0, o.draws, seed, o.theta1_fixed, c.threads);
            for (std::size_t i = 0; i < r0.size(); ++i) add_pqr_row(curves, m, ratio_name, r0[i], ratio[i]);
        } else if (m == "ddsm_mc") {
            std::vector<Assertion> batch;
            for (std::size_t k = 0; k < 3; ++k)
                for (double t : theta0) batch.push_back(CellLeq{k, t});
            const auto est = pqr_mc_batch(counts, batch, o.draws, seed, c.threads);
            for (std::size_t i = 0; i < batch.size(); ++i) {
                const auto& a = std::get<CellLeq>(batch[i]);
                add_pqr_row(curves, m, leq_name(a.k), a.theta0, est[i]);
            }
        } else if (m == "simplex") {
            if (counts.total() == 0) throw UsageError("the Simplex-DSM needs at least one observation");
            const auto obs = ObservationList::from_counts(counts);
            const auto sample = sample_focal_polytopes(obs, o.simplex_draws, seed, c.threads);
            sampler.add({sample.proposals, std::uint64_t{sample.sets.size()}, sample.acceptance_rate()});
            for (std::size_t k = 0; k < 3; ++k) {
                const auto ranges = cell_ranges(sample.sets, k, c.threads);
                for (double t : theta0) add_pqr_row(curves, m, leq_name(k), t, pqr_from_ranges(ranges, t));
            }
            const auto ratio = pqr_conditional_ratio_simplex_curve(sample.sets, r0, o.theta1_fixed, c.threads);
            for (std::size_t i = 0; i < r0.size(); ++i) add_pqr_row(curves, m, ratio_name, r0[i], ratio[i]);
        } else if (m == "idm") {
            for (std::size_t k = 0; k < 3; ++k) {
                for (double t : theta0) {
                    const auto b = idm_cell_leq_bounds(counts, k, t);
                    add_exact_row(curves, m, leq_name(k), t, b.lower, 1.0 - b.upper, b.upper - b.lower);
                }
            }
        } else {
            for (std::size_t k = 0; k < 3; ++k) {
                for (double t : theta0) {
                    const double p = jeffreys_prob(counts, k, t);
                    add_exact_row(curves, m, leq_name(k), t, p, 1.0 - p, 0.0);
                }
            }
            for (double r : r0) {
                const double p = jeffreys_conditional_ratio(counts, r);
                add_exact_row(curves, m, ratio_name, r, p, 1.0 - p, 0.0);
            }
        }
    }
    rep.tables.push_back(std::move(curves));
    if (!sampler.rows.empty()) rep.tables.push_back(std::move(sampler));
    return rep;
}

// ---- linkage ----------------------------------------------------------------

struct LinkageOptions {
    std::string counts = "25,3,4,7";
    std::string phi_grid = "linspace:0.01:0.99:99";
    std::uint64_t proposals = 1000000;
    std::uint64_t accepted = 100000;
    std::size_t grid_size = linkage_default_grid_size;
    std::string alpha_grid;
};

void add_linkage(CLI::App* sub, LinkageOptions& o) {
    sub->add_option("--counts", o.counts, "Four cell counts")->capture_default_str();
    sub->add_option("--phi-grid", o.phi_grid, "phi0 values for the CDF and (p,q,r) curves")->capture_default_str();
    sub->add_option("--proposals", o.proposals, "Draws for the acceptance-rate report")->capture_default_str();
    sub->add_option("--accepted", o.accepted, "Accepted intervals behind the curves")->capture_default_str();
    sub->add_option("--grid-size", o.grid_size, "Uniform phi nodes for the IDM posterior")->capture_default_str();
    sub->add_option("--alpha-grid", o.alpha_grid,
                    "IDM weights as 'a1,a2,a3,a4;...' (must include the four vertices); "
                    "default: vertices and edge midpoints");
}

json linkage_json(const LinkageOptions& o) {
    return json{{"counts", o.counts},       {"phi-grid", o.phi_grid},   {"proposals", o.proposals},
                {"accepted", o.accepted},   {"grid-size", o.grid_size}, {"alpha-grid", o.alpha_grid}};
}

std::vector<IdmHyper> parse_alpha_grid(const std::string& s) {
    if (s.empty()) return default_alpha_grid();
    std::vector<IdmHyper> grid;
    for (const auto& item : split(s, ';')) {
        std::vector<double> a;
        for (const auto& f : split(item, ',')) a.push_back(parse_number(f, "--alpha-grid"));
        if (a.size() != 4) throw UsageError("--alpha-grid entries need four weights");
        double total = 0.0;
        for (double v : a) total += v;
        if (std::abs(total - 1.0) > 1e-12) throw UsageError("--alpha-grid weights must sum to 1");
        grid.emplace_back(std::move(a));
    }
    return grid;
}

std::size_t find_vertex(const std::vector<IdmHyper>& grid, std::size_t v) {
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i][v] == 1.0) return i;
    throw UsageError("--alpha-grid must include the vertex alpha_" + std::to_string(v + 1) + " = 1");
}

std::string alpha_label(const IdmHyper& a) {
    std::string s = "(";
    for (std::size_t k = 0; k < 4; ++k) s += (k ? "," : "") + format_double(a[k]);
    return s + ")";
}

Report run_linkage(const Common& c, const LinkageOptions& o) {
    const CountVector counts(parse_counts(o.counts));
    if (counts.size() != 4) throw UsageError("linkage needs exactly four counts");
    const auto phi = parse_grid(o.phi_grid, "--phi-grid");
    for (double p : phi)
        if (!(p >= 0.0 && p <= 1.0)) throw UsageError("--phi-grid values must lie in [0, 1]");
    if (o.proposals == 0 || o.accepted == 0) throw UsageError("draw counts must be positive");
    const auto alphas = parse_alpha_grid(o.alpha_grid);
    const std::size_t v2 = find_vertex(alphas, 1), v3 = find_vertex(alphas, 2), v4 = find_vertex(alphas, 3);
    find_vertex(alphas, 0);
    const RandomSeed seed{c.seed};

    Report rep;
    rep.command = "linkage";

    Table acc("acceptance", {"method", "counts", "proposals", "accepted", "rate", "se", "wilson_lower",
                             "wilson_upper", "seconds", "note"});
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = linkage_acceptance_rate(counts, o.proposals, seed, c.threads);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    acc.add({std::string("ddsm"), join_counts(counts), report.proposals, report.accepted, report.rate(),
             report.standard_error(), report.wilson_lower(), report.wilson_upper(), secs, std::string()});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    acc.add({std::string("simplex"), join_counts(counts), std::uint64_t{0}, std::uint64_t{0}, nan, nan, nan, nan,
             nan, std::string("not reproduced: needs the external Gibbs sampler for the Simplex-DSM")});

    const auto sample = sample_accepted_intervals(counts, o.accepted, seed, c.threads);
    const auto env = phi_cdf_envelope(sample.intervals, phi);
    const auto idm = linkage_idm_cdf_bounds(counts, phi, alphas, o.grid_size);

    Table cdf("cdf", {"phi0", "ddsm_lower", "ddsm_upper", "se_lower", "se_upper", "idm_lower", "idm_upper",
                      "idm_lower_alpha", "idm_upper_alpha", "lower_at_alpha4_vertex",
                      "upper_at_alpha2_or_alpha3_vertex"});
    for (std::size_t g = 0; g < phi.size(); ++g) {
        const auto& e = env[g];
        const auto& b = idm[g];
        const bool low_v = std::abs(b.by_alpha[v4] - b.lower) <= 1e-9;
        const bool up_v = std::abs(b.by_alpha[v2] - b.upper) <= 1e-9 || std::abs(b.by_alpha[v3] - b.upper) <= 1e-9;
        cdf.add({e.phi0, e.lower, e.upper, e.se_lower, e.se_upper, b.lower, b.upper, alpha_label(alphas[b.lower_alpha]),
                 alpha_label(alphas[b.upper_alpha]), low_v, up_v});
    }

    Table pqr("pqr", {"method", "assertion", "phi0", "p", "q", "r", "se_p", "se_q", "se_r"});
    for (double p0 : phi) {
        const auto leq = pqr_phi_leq(sample.intervals, p0);
        const auto pt = pqr_phi_point(sample.intervals, p0);
        pqr.add({std::string("ddsm"), std::string("phi_leq"), p0, leq.value.p, leq.value.q, leq.value.r, leq.se_p,
                 leq.se_q, leq.se_r});
        pqr.add({std::string("ddsm"), std::string("phi_point"), p0, pt.value.p, pt.value.q, pt.value.r, pt.se_p,
                 pt.se_q, pt.se_r});
    }
    for (std::size_t g = 0; g < phi.size(); ++g) {
        const auto& b = idm[g];
        pqr.add({std::string("idm"), std::string("phi_leq"), phi[g], b.lower, 1.0 - b.upper, b.upper - b.lower, 0.0,
                 0.0, 0.0});
        // A continuous posterior gives every single point probability zero.
        pqr.add({std::string("idm"), std::string("phi_point"), phi[g], 0.0, 1.0, 0.0, 0.0, 0.0, 0.0});
    }

    Table ag("alpha_grid", {"index", "alpha1", "alpha2", "alpha3", "alpha4"});
    for (std::size_t i = 0; i < alphas.size(); ++i)
        ag.add({std::uint64_t{i}, alphas[i][0], alphas[i][1], alphas[i][2], alphas[i][3]});

    rep.tables.push_back(std::move(acc));
    rep.tables.push_back(std::move(cdf));
    rep.tables.push_back(std::move(pqr));
    rep.tables.push_back(std::move(ag));
    return rep;
}

// ---- validate ---------------------------------------------------------------

struct ValidateOptions {
    std::vector<std::string> suites;
    bool all = false;
    std::uint64_t draws = ValidationBudget{}.draws;
    std::uint64_t lp_draws = ValidationBudget{}.lp_draws;
};

void add_validate(CLI::App* sub, ValidateOptions& o) {
    sub->add_option("--suite", o.suites, "Validator suite to run (repeatable): theorem1, theorem2, theorem3, "
                                         "rip, qmap, lp");
    sub->add_flag("--all", o.all, "Run every suite (the default when no --suite is given)");
    sub->add_option("--draws", o.draws, "Monte-Carlo draws per check")->capture_default_str();
    sub->add_option("--lp-draws", o.lp_draws, "Proposals for the LP oracle checks")->capture_default_str();
}

json validate_json(const ValidateOptions& o) {
    std::string suites;
    for (const auto& s : o.suites) suites += (suites.empty() ? "" : ",") + s;
    return json{{"suite", suites}, {"all", o.all}, {"draws", o.draws}, {"lp-draws", o.lp_draws}};
}

Report run_validate(const Common& c, const ValidateOptions& o, bool& all_passed) {
    std::vector<std::string> suites;
    for (const auto& s : o.suites)
        for (const auto& part : split(s, ','))
            if (!part.empty()) suites.push_back(part);
    if (o.all || suites.empty()) suites = validator_suites();
    suites = parse_names([&] {
        std::string j;
        for (const auto& s : suites) j += (j.empty() ? "" : ",") + s;
        return j;
    }(), validator_suites(), "suite");

    const auto results = run_validators(suites, ValidationBudget{o.draws, o.lp_draws}, RandomSeed{c.seed});
    Report rep;
    rep.command = "validate";
    Table t("results", {"suite", "name", "passed", "statistic", "threshold", "seconds", "detail"});
    std::uint64_t passed = 0;
    double seconds = 0.0;
    for (const auto& r : results) {
        t.add({r.suite, r.name, r.passed, r.statistic, r.threshold, r.seconds, r.detail});
        passed += r.passed;
        seconds += r.seconds;
    }
    Table s("summary", {"checks", "passed", "failed", "seconds"});
    s.add({std::uint64_t{results.size()}, passed, std::uint64_t{results.size() - passed}, seconds});
    rep.tables.push_back(std::move(t));
    rep.tables.push_back(std::move(s));
    all_passed = passed == results.size();
    return rep;
}

// ---- independence -------------------------------------------------------------

struct IndependenceOptions {
    std::string input;
    std::string simulate;
    std::size_t n = 400;
    std::size_t granularity = 2;
    std::uint64_t draws = 100000;
    double level = 0.05;
    std::string rule = "marginal";
    std::string method = "ddsm";
};

void add_independence(CLI::App* sub, IndependenceOptions& o) {
    sub->add_option("--input", o.input, "CSV of (x, y) pairs in [0,1]^2; '-' reads stdin");
    sub->add_option("--simulate", o.simulate, "Generate the data instead: uniform or diagonal")
        ->check(CLI::IsMember({"", "uniform", "diagonal"}));
    sub->add_option("--n", o.n, "Pairs to simulate")->capture_default_str();
    sub->add_option("--granularity", o.granularity, "Bins per axis")->capture_default_str();
    sub->add_option("--draws", o.draws, "Posterior draws (accepted polytopes for simplex)")->capture_default_str();
    sub->add_option("--level", o.level, "Test level")->capture_default_str();
    sub->add_option("--rule", o.rule, "Decision rule: marginal or point")
        ->capture_default_str()
        ->check(CLI::IsMember({"marginal", "point"}));
    sub->add_option("--method", o.method, "ddsm or simplex")
        ->capture_default_str()
        ->check(CLI::IsMember({"ddsm", "simplex"}));
}

json independence_json(const IndependenceOptions& o) {
    return json{{"input", o.input}, {"simulate", o.simulate}, {"n", o.n},         {"granularity", o.granularity},
                {"draws", o.draws}, {"level", o.level},       {"rule", o.rule},   {"method", o.method}};
}

Report run_independence(const Common& c, const IndependenceOptions& o, std::istream* stdin_stream) {
    if (o.input.empty() == o.simulate.empty())
        throw UsageError("give exactly one of --input and --simulate");
    PairedSample sample;
    if (!o.input.empty()) {
        if (o.input == "-") {
            sample = read_paired_csv(*stdin_stream);
        } else {
            std::ifstream in(o.input);
            if (!in) throw UsageError("cannot open '" + o.input + "'");
            sample = read_paired_csv(in);
        }
    } else {
        const RandomSeed data_seed{Stream::derive(RandomSeed{c.seed}, 1)()};
        sample = o.simulate == "uniform" ? simulate_uniform_pairs(o.n, data_seed)
                                         : simulate_diagonal_pairs(o.n, data_seed);
    }
    const auto table = discretize(sample, o.granularity);
    const RandomSeed seed{c.seed};
    const auto res = o.method == "ddsm"
                         ? uniformity_plausibility(table, o.draws, seed, o.level,
                                                   o.rule == "point" ? DecisionRule::point : DecisionRule::marginal,
                                                   c.threads)
                         : uniformity_plausibility_simplex(table, o.draws, seed, o.level);

    Report rep;
    rep.command = "independence";
    Table cells("contingency", {"x_bin", "y_bin", "count"});
    for (std::size_t i = 0; i < table.granularity; ++i)
        for (std::size_t j = 0; j < table.granularity; ++j)
            cells.add({std::uint64_t{i + 1}, std::uint64_t{j + 1}, table.at(i, j)});
    Table r("result", {"method", "granularity", "K", "n", "r", "se_r", "draws", "min_marginal_plausibility",
                       "min_marginal_x_bin", "min_marginal_y_bin", "level", "rule", "reject"});
    const std::size_t G = table.granularity;
    r.add({o.method, std::uint64_t{G}, std::uint64_t{G * G}, table.total, res.r, res.se_r, res.draws,
           o.method == "ddsm" ? res.min_marginal_plausibility : std::numeric_limits<double>::quiet_NaN(),
           std::uint64_t{res.min_marginal_cell / G + 1}, std::uint64_t{res.min_marginal_cell % G + 1}, res.level,
           std::string(res.rule == DecisionRule::point ? "point" : "marginal"), res.reject});
    rep.tables.push_back(std::move(cells));
    rep.tables.push_back(std::move(r));
    return rep;
}

// ---- benchmark ----------------------------------------------------------------

struct BenchmarkOptions {
    std::string granularities = "2,3,4,5,6,7,8";
    std::string methods = "ddsm";
    BenchmarkConfig cfg;
};

void add_benchmark(CLI::App* sub, BenchmarkOptions& o) {
    sub->add_option("--granularities", o.granularities, "Bins per axis to time")->capture_default_str();
    sub->add_option("--methods", o.methods, "ddsm and/or simplex (simplex only up to granularity 3)")
        ->capture_default_str();
    sub->add_option("--n", o.cfg.n, "Pairs per Dirichlet-DSM run")->capture_default_str();
    sub->add_option("--draws", o.cfg.n_draws, "Dirichlet-DSM posterior draws")->capture_default_str();
    sub->add_option("--simplex-n", o.cfg.simplex_n, "Pairs per Simplex-DSM run")->capture_default_str();
    sub->add_option("--simplex-draws", o.cfg.simplex_draws, "Accepted Simplex-DSM polytopes")->capture_default_str();
    sub->add_option("--repetitions", o.cfg.repetitions, "Timed repetitions per cell")->capture_default_str();
}

json benchmark_json(const BenchmarkOptions& o) {
    return json{{"granularities", o.granularities}, {"methods", o.methods},
                {"n", o.cfg.n},                     {"draws", o.cfg.n_draws},
                {"simplex-n", o.cfg.simplex_n},     {"simplex-draws", o.cfg.simplex_draws},
                {"repetitions", o.cfg.repetitions}};
}

Report run_benchmark(const Common& c, BenchmarkOptions o) {
    o.cfg.granularities.clear();
    for (double g : parse_grid(o.granularities, "--granularities")) {
        if (!(g >= 2.0) || g != std::floor(g) || g > 64.0)
            throw UsageError("--granularities entries must be integers in [2, 64]");
        o.cfg.granularities.push_back(static_cast<std::size_t>(g));
    }
    o.cfg.methods.clear();
    for (const auto& m : parse_names(o.methods, {"ddsm", "simplex"}, "method"))
        o.cfg.methods.push_back(m == "ddsm" ? BenchmarkMethod::ddsm : BenchmarkMethod::simplex);
    o.cfg.seed = RandomSeed{c.seed};
    const auto rows = runtime_benchmark(o.cfg);

    Report rep;
    rep.command = "benchmark";
    Table t("runtime", {"method", "granularity", "K", "n", "draws", "repetitions", "mean_seconds", "sd_seconds",
                        "mean_r", "rejections"});
    for (const auto& r : rows)
        t.add({to_string(r.method), std::uint64_t{r.granularity}, std::uint64_t{r.granularity * r.granularity},
               std::uint64_t{r.n}, r.draws, std::uint64_t{r.repetitions}, r.mean_seconds, r.sd_seconds, r.mean_r,
               std::uint64_t{r.rejections}});
    Table s("scaling", {"method", "from_granularity", "to_granularity", "runtime_ratio"});
    for (auto m : o.cfg.methods) {
        const BenchmarkRow* first = nullptr;
        const BenchmarkRow* last = nullptr;
        for (const auto& r : rows) {
            if (r.method != m) continue;
            if (!first || r.granularity < first->granularity) first = &r;
            if (!last || r.granularity > last->granularity) last = &r;
        }
        if (first && last && first != last)
            s.add({to_string(m), std::uint64_t{first->granularity}, std::uint64_t{last->granularity},
                   last->mean_seconds / first->mean_seconds});
    }
    rep.tables.push_back(std::move(t));
    rep.tables.push_back(std::move(s));
    return rep;
}

// ---- config files -------------------------------------------------------------

std::string config_value_string(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    if (v.is_array()) {
        std::string s;
        for (const auto& e : v) s += (s.empty() ? "" : ",") + config_value_string(e, key);
        return s;
    }
    throw UsageError("config value for '" + key + "' must be a string, number, boolean or array");
}

/// Applies a JSON config file to `sub` as option defaults, so anything given
/// on the command line still wins.
void apply_config(CLI::App* sub, const std::string& path, const std::string& command) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw UsageError("config file must hold a JSON object");
    if (doc.contains("config") && doc["config"].is_object()) doc = doc["config"];  // a previous report
    if (doc.contains("command")) {
        if (doc["command"] != command)
            throw UsageError("config file is for '" + doc["command"].dump() + "', not '" + command + "'");
    }
    const nlohmann::json options = doc.contains("options") ? doc["options"] : doc;
    if (!options.is_object()) throw UsageError("config 'options' must be an object");
    for (const auto& [key, value] : options.items()) {
        if (key == "command" || key == "config") continue;
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt) throw UsageError("config file: unknown option '" + key + "' for " + command);
        opt->default_str(config_value_string(value, key))->force_callback();
    }
}

std::string find_config_path(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return {};
}

int exit_for(const Error& e) {
    if (dynamic_cast<const ResourceError*>(&e)) return exit_resource;
    if (dynamic_cast<const NumericError*>(&e) || dynamic_cast<const DegenerateError*>(&e)) return exit_numeric;
    return exit_usage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dempster-Shafer inference for multinomial data", tool_name};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);

    Common common;
    TrinomialOptions trin;
    LinkageOptions link;
    ValidateOptions val;
    IndependenceOptions indep;
    BenchmarkOptions bench;

    auto* s_trin = app.add_subcommand("trinomial", "(p,q,r) curves for a three-cell multinomial");
    auto* s_link = app.add_subcommand("linkage", "Linkage-model acceptance rate, CDF envelopes and (p,q,r)");
    auto* s_val = app.add_subcommand("validate", "Run the Monte-Carlo validator suites");
    auto* s_ind = app.add_subcommand("independence", "Dirichlet-DSM independence test on paired data");
    auto* s_bench = app.add_subcommand("benchmark", "Time the independence test across granularities");
    for (auto* s : {s_trin, s_link, s_val, s_ind, s_bench}) add_common(s, common);
    add_trinomial(s_trin, trin);
    add_linkage(s_link, link);
    add_validate(s_val, val);
    add_independence(s_ind, indep);
    add_benchmark(s_bench, bench);

    try {
        const std::string config_path = find_config_path(args);
        if (!config_path.empty()) {
            const auto cmd = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
                return app.get_subcommand_no_throw(a) != nullptr;
            });
            if (cmd == args.end()) throw UsageError("--config needs a subcommand");
            apply_config(app.get_subcommand(*cmd), config_path, *cmd);
        }

        std::vector<const char*> argv{tool_name};
        for (const auto& a : args) argv.push_back(a.c_str());
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e, out, err);
            return code == 0 ? exit_ok : exit_usage;
        }

        Report rep;
        json opts;
        int status = exit_ok;
        if (*s_trin) {
            rep = run_trinomial(common, trin);
            opts = trinomial_json(trin);
        } else if (*s_link) {
            rep = run_linkage(common, link);
            opts = linkage_json(link);
        } else if (*s_val) {
            bool ok = true;
            rep = run_validate(common, val, ok);
            opts = validate_json(val);
            if (!ok) status = exit_numeric;
        } else if (*s_ind) {
            rep = run_independence(common, indep, &std::cin);
            opts = independence_json(indep);
        } else {
            rep = run_benchmark(common, bench);
            opts = benchmark_json(bench);
        }
        json all = common_json(common);
        for (auto& [k, v] : opts.items()) all[k] = v;
        if (rep.command == "benchmark") all["threads"] = 1;  // timed on one thread regardless
        rep.config = json{{"command", rep.command}, {"options", all}};

        std::ostringstream buf;
        if (common.format == "json") write_json(rep, buf);
        else write_csv(rep, buf);
        if (common.output.empty()) {
            out << buf.str();
        } else {
            std::ofstream f(common.output);
            if (!f) throw UsageError("cannot write '" + common.output + "'");
            f << buf.str();
            if (!f) throw UsageError("failed writing '" + common.output + "'");
        }
        if (status != exit_ok) err << "error: one or more validators failed\n";
        return status;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_numeric;
    }
}

}  // namespace dsinfer::cli

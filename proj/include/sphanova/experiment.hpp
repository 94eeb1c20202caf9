#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sphanova/angular_model.hpp"
#include "sphanova/anova.hpp"
#include "sphanova/chi2.hpp"
#include "sphanova/ks.hpp"
#include "sphanova/sampler.hpp"
#include "sphanova/score.hpp"

namespace sphanova {

struct TestSpec {
    Method method = Method::PseudoFvML;
    std::vector<AngularModel> scores;  // one per group for rank tests

    std::string name() const {
        if (method != Method::Rank) return std::string(to_string(method));
        std::string s = "rank(";
        for (std::size_t i = 0; i < scores.size(); ++i) s += (i ? "," : "") + ("K_" + scores[i].label());
        return s + ")";
    }
};

struct ExperimentConfig {
    int k = 3;
    std::vector<std::size_t> sizes;
    UnitVector theta0{1.0, 0.0, 0.0};
    std::vector<AngularModel> models;
    std::size_t alternative_group = 1;  // 0-based index of the rotated group
    std::vector<int> xi{0};
    std::vector<TestSpec> tests;
    std::size_t replications = 1000;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    unsigned threads = 0;  // 0: hardware concurrency

    std::size_t m() const noexcept { return sizes.size(); }

    void validate() const {
        if (m() < 2) throw Error(Errc::InvalidConfig, "need at least two groups");
        if (k < 2) throw Error(Errc::InvalidConfig, "k must be >= 2");
        if (theta0.dim() != k) throw Error(Errc::InvalidConfig, "theta0 has the wrong dimension");
        if (models.size() != m()) throw Error(Errc::InvalidConfig, "one model per group required");
        for (auto n : sizes)
            if (n == 0) throw Error(Errc::InvalidConfig, "group sizes must be positive");
        if (replications < 1) throw Error(Errc::InvalidConfig, "replications must be >= 1");
        if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::InvalidConfig, "alpha must lie in (0, 1)");
        if (alternative_group >= m()) throw Error(Errc::InvalidConfig, "alternative group out of range");
        if (xi.empty()) throw Error(Errc::InvalidConfig, "xi grid is empty");
        if (tests.empty()) throw Error(Errc::InvalidConfig, "no tests configured");
        for (const auto& t : tests) {
            if (t.method == Method::Rank && t.scores.size() != m())
                throw Error(Errc::InvalidConfig, "rank test needs one score per group");
        }
        for (const auto& md : models) {
            const auto v = check_positive(md);
            if (!v.ok) throw Error(Errc::InvalidConfig, v.message);
        }
    }
};

struct CellReport {
    std::string test;
    int xi = 0;
    std::size_t rejections = 0;
    std::size_t failures = 0;
    std::size_t valid = 0;
    double frequency = 0.0;
    double standard_error = 0.0;
    double elapsed_seconds = 0.0;  // time spent computing this test at this xi, summed over replications
    std::vector<double> statistics;  // per replication, NaN on failure
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<CellReport> cells;  // test-major, xi-minor
    double elapsed_seconds = 0.0;
    bool valid = true;  // false when some cell failed in more than 1% of replications

    const CellReport& cell(std::size_t test, std::size_t xi_index) const {
        return cells.at(test * config.xi.size() + xi_index);
    }
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["m"] = c.m();
    j["k"] = c.k;
    j["sizes"] = c.sizes;
    j["theta0"] = std::vector<double>(c.theta0.vec().begin(), c.theta0.vec().end());
    for (const auto& md : c.models) j["models"].push_back(md.spec());
    j["alternative"] = {{"group", c.alternative_group}, {"xi", c.xi}};
    for (const auto& t : c.tests) {
        nlohmann::json tj{{"method", std::string(to_string(t.method))}};
        for (const auto& s : t.scores) tj["scores"].push_back(s.spec());
        j["tests"].push_back(tj);
    }
    j["replications"] = c.replications;
    j["seed"] = c.seed;
    j["alpha"] = c.alpha;
    j["threads"] = c.threads;
    return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    try {
        ExperimentConfig c;
        c.k = j.at("k").get<int>();
        c.sizes = j.at("sizes").get<std::vector<std::size_t>>();
        if (j.contains("m") && j.at("m").get<std::size_t>() != c.sizes.size())
            throw Error(Errc::InvalidConfig, "m does not match the number of sizes");
        const auto th = j.at("theta0").get<std::vector<double>>();
        c.theta0 = UnitVector::normalize(Eigen::Map<const Vector>(th.data(), static_cast<Eigen::Index>(th.size())));
        for (const auto& s : j.at("models")) c.models.push_back(parse_model_spec(s.get<std::string>()));
        if (j.contains("alternative")) {
            const auto& a = j.at("alternative");
            c.alternative_group = a.value("group", std::size_t{1});
            c.xi = a.value("xi", std::vector<int>{0});
        }
        for (const auto& t : j.at("tests")) {
            TestSpec spec;
            const auto method = t.at("method").get<std::string>();
            if (method == "pseudo") spec.method = Method::PseudoFvML;
            else if (method == "rank") spec.method = Method::Rank;
            else throw Error(Errc::InvalidConfig, "unknown test method '" + method + "'");
            if (t.contains("scores"))
                for (const auto& s : t.at("scores")) spec.scores.push_back(parse_model_spec(s.get<std::string>()));
            c.tests.push_back(std::move(spec));
        }
        c.replications = j.value("replications", std::size_t{1000});
        c.seed = j.value("seed", std::uint64_t{1});
        c.alpha = j.value("alpha", 0.05);
        c.threads = j.value("threads", 0u);
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidConfig, e.what());
    }
}

inline nlohmann::json to_json(const ExperimentReport& r) {
    nlohmann::json j;
    j["config"] = to_json(r.config);
    j["elapsed_seconds"] = r.elapsed_seconds;
    j["valid"] = r.valid;
    for (const auto& c : r.cells)
        j["cells"].push_back({{"test", c.test},
                              {"xi", c.xi},
                              {"rejections", c.rejections},
                              {"failures", c.failures},
                              {"frequency", c.frequency},
                              {"standard_error", c.standard_error},
                              {"elapsed_seconds", c.elapsed_seconds}});
    return j;
}

/// Rows: tests; columns: xi.
inline std::string format_table(const ExperimentReport& r) {
    std::size_t width = 4;
    for (const auto& t : r.config.tests) width = std::max(width, t.name().size());
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(width)) << "test";
    for (int xi : r.config.xi) os << "  " << std::right << std::setw(8) << ("xi=" + std::to_string(xi));
    os << '\n';
    for (std::size_t t = 0; t < r.config.tests.size(); ++t) {
        os << std::left << std::setw(static_cast<int>(width)) << r.config.tests[t].name();
        for (std::size_t x = 0; x < r.config.xi.size(); ++x)
            os << "  " << std::right << std::setw(8) << std::fixed << std::setprecision(4) << r.cell(t, x).frequency;
        os << '\n';
    }
    return os.str();
}

namespace detail {

struct PreparedTest {
    Method method;
    std::vector<ScoreFunction> scores;
};

inline double run_one(const PreparedTest& t, const MultiSample& ms) {
    if (t.method == Method::PseudoFvML) return pseudo_fvml_test(ms).statistic;
    if (t.method == Method::Rank) return rank_test(ms, t.scores).statistic;
    return reference_quadratic_form(ms, std::nullopt, PseudoMode{}).statistic;
}

} // namespace detail

/// Replication r draws every group from stream (seed, r); the alternative
/// group is drawn at theta0 once and rotated by O_xi for each xi, so all xi
/// share the same underlying draws. Reports do not depend on the thread count.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::size_t m = cfg.m(), M = cfg.replications, nx = cfg.xi.size(), nt = cfg.tests.size();

    std::vector<TildeLaw> laws;
    for (const auto& md : cfg.models) laws.emplace_back(md, cfg.k);
    std::vector<detail::PreparedTest> tests;
    for (const auto& t : cfg.tests) {
        detail::PreparedTest p{t.method, {}};
        for (const auto& s : t.scores) p.scores.push_back(score_from_model(s, cfg.k));
        tests.push_back(std::move(p));
    }
    std::vector<Matrix> rotations;
    for (int xi : cfg.xi) rotations.push_back(rotation_xi(xi, cfg.k).mat());

    const int df = static_cast<int>((m - 1) * static_cast<std::size_t>(cfg.k - 1));
    const double critical = chi2_quantile(1.0 - cfg.alpha, df);

    // stats[(t * nx + x) * M + r], NaN marks a failed replication
    std::vector<double> stats(nt * nx * M, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> seconds(nt * nx * M, 0.0);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < M; r = next++) {
            RngStream rng(cfg.seed, r);
            std::vector<Matrix> groups;
            for (std::size_t i = 0; i < m; ++i)
                groups.push_back(sample_rotsym(cfg.theta0, laws[i], static_cast<Eigen::Index>(cfg.sizes[i]), rng));
            const Matrix base = groups[cfg.alternative_group];
            for (std::size_t x = 0; x < nx; ++x) {
                groups[cfg.alternative_group] = rotations[x] * base;
                groups[cfg.alternative_group].colwise().normalize();
                const MultiSample ms(groups);
                for (std::size_t t = 0; t < nt; ++t) {
                    const auto t0 = std::chrono::steady_clock::now();
                    const std::size_t slot = (t * nx + x) * M + r;
                    try {
                        stats[slot] = detail::run_one(tests[t], ms);
                    } catch (const Error&) {
                    }
                    seconds[slot] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                }
            }
        }
    };
    unsigned nthreads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    nthreads = static_cast<unsigned>(std::min<std::size_t>(nthreads, M));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    }

    ExperimentReport rep{cfg, {}, 0.0, true};
    for (std::size_t t = 0; t < nt; ++t) {
        for (std::size_t x = 0; x < nx; ++x) {
            CellReport c;
            c.test = cfg.tests[t].name();
            c.xi = cfg.xi[x];
            const auto first = stats.begin() + static_cast<std::ptrdiff_t>((t * nx + x) * M);
            c.statistics.assign(first, first + static_cast<std::ptrdiff_t>(M));
            for (std::size_t r = 0; r < M; ++r) {
                const double s = c.statistics[r];
                c.elapsed_seconds += seconds[(t * nx + x) * M + r];
                if (std::isnan(s)) { ++c.failures; continue; }
                ++c.valid;
                if (s > critical) ++c.rejections;
            }
            if (c.valid > 0) {
                c.frequency = static_cast<double>(c.rejections) / static_cast<double>(c.valid);
                c.standard_error = std::sqrt(c.frequency * (1.0 - c.frequency) / static_cast<double>(c.valid));
            }
            if (static_cast<double>(c.failures) > 0.01 * static_cast<double>(M)) rep.valid = false;
            rep.cells.push_back(std::move(c));
        }
    }
    rep.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

struct NullCheck {
    std::string test;
    int df = 0;
    std::size_t failures = 0;
    ks::Result ks;
    std::vector<std::size_t> pit_histogram;  // counts of chi2_cdf(statistic) over equal-width bins
};

/// Runs the design at xi = 0 only and compares each test's statistics with
/// the chi-square law of (m-1)(k-1) degrees of freedom.
inline std::vector<NullCheck> null_distribution_check(ExperimentConfig cfg, std::size_t replications,
                                                      std::size_t bins = 10) {
    if (bins < 1) throw Error(Errc::InvalidConfig, "bins must be >= 1");
    cfg.xi = {0};
    cfg.replications = replications;
    const ExperimentReport rep = run_experiment(cfg);
    const int df = static_cast<int>((cfg.m() - 1) * static_cast<std::size_t>(cfg.k - 1));
    std::vector<NullCheck> out;
    for (const auto& c : rep.cells) {
        NullCheck nc{c.test, df, c.failures, {}, std::vector<std::size_t>(bins, 0)};
        std::vector<double> s;
        for (double v : c.statistics)
            if (!std::isnan(v)) s.push_back(v);
        nc.ks = ks::test(s, [df](double x) { return chi2_cdf(x, df); });
        for (double v : s) {
            const auto b = static_cast<std::size_t>(chi2_cdf(v, df) * static_cast<double>(bins));
            ++nc.pit_histogram[std::min(b, bins - 1)];
        }
        out.push_back(std::move(nc));
    }
    return out;
}

/// The two-sample design with n = (100, 150), k = 3, theta0 = (√3/2, 1/2, 0)
/// and group 2 rotated by O_xi, xi = 0..3, for one density pair.
inline ExperimentConfig two_sample_design(AngularModel first, AngularModel second, std::vector<TestSpec> tests,
                                          std::size_t replications = 1000, std::uint64_t seed = 1) {
    ExperimentConfig c;
    c.k = 3;
    c.sizes = {100, 150};
    c.theta0 = UnitVector{std::sqrt(3.0) / 2.0, 0.5, 0.0};
    c.models = {std::move(first), std::move(second)};
    c.alternative_group = 1;
    c.xi = {0, 1, 2, 3};
    c.tests = std::move(tests);
    c.replications = replications;
    c.seed = seed;
    return c;
}

} // namespace sphanova

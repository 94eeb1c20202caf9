// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "../reference_values.hpp"
#include "../test_support.hpp"
#include "sphanova/cli.hpp"

using namespace sphanova;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (char c : line) {
        if (c == '"') quoted = !quoted;
        else if (c == ',' && !quoted) out.emplace_back();
        else out.back() += c;
    }
    return out;
}

Outcome efficiency_table() {
    const auto t0 = Clock::now();
    std::ostringstream out, err;
    const int code = cli::dispatch({"are", "--table1"}, out, err);
    const double secs = seconds_since(t0);
    if (code != 0) return {false, "are --table1 exited with " + std::to_string(code)};
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    double worst = 0.0;
    std::size_t cells = 0, row = 0;
    for (; std::getline(in, line); ++row) {
        const auto f = csv_fields(line);
        if (row >= 9 || f.size() != 8) return {false, "unexpected table shape at line: " + line};
        for (std::size_t j = 0; j < 7; ++j, ++cells)
            worst = std::max(worst, std::abs(std::stod(f[j + 1]) - reference_values::kAreTable[row][j]));
    }
    const bool ok = cells == 63 && worst <= 0.002 && secs < 10.0;
    return {ok, fmt("%zu cells, max |diff| = %.5f, %.2f s", cells, worst, secs)};
}

Outcome cross_moment_identity() {
    double worst = 0.0;
    for (int k : {2, 3, 4})
        for (double kappa : {0.5, 1.0, 2.0, 6.0, 15.0}) {
            const auto c = law_constants(TildeLaw(AngularModel::fvml(kappa), k));
            worst = std::max(worst, std::abs(c.C - (k - 1) * c.E));
        }
    return {worst < 1e-8, fmt("max |C - (k-1)E| = %.3g", worst)};
}

Outcome chi2_constant() {
    const double q = chi2_quantile(0.95, 2);
    return {std::abs(q - 5.991465) <= 1e-5, fmt("chi2_quantile(0.95, 2) = %.7f", q)};
}

Outcome rejection_frequencies() {
    const auto t0 = Clock::now();
    const auto fv15 = AngularModel::fvml(15), fv2 = AngularModel::fvml(2), l2 = AngularModel::lin(2),
               l11 = AngularModel::lin(1.1);
    const std::vector<TestSpec> tests{{Method::PseudoFvML, {}}, {Method::Rank, {fv15, fv2}}, {Method::Rank, {l2, l11}},
                                      {Method::Rank, {l2, fv2}}, {Method::Rank, {fv15, l11}}};
    const std::vector<std::pair<AngularModel, AngularModel>> pairs{{fv15, fv2}, {l2, l11}, {l2, fv2}, {fv15, l11}};
    bool ok = true;
    double worst_null = 0.0, pseudo3 = 0.0, rank2 = 0.0;
    std::size_t max_failures = 0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto rep = run_experiment(two_sample_design(pairs[p].first, pairs[p].second, tests, 1000, 20240601));
        std::cout << "    design (" << pairs[p].first.label() << ", " << pairs[p].second.label() << ")\n";
        std::istringstream table(format_table(rep));
        for (std::string l; std::getline(table, l);) std::cout << "      " << l << '\n';
        ok = ok && rep.valid;
        for (std::size_t t = 0; t < tests.size(); ++t) {
            worst_null = std::max(worst_null, std::abs(rep.cell(t, 0).frequency - 0.05));
            for (std::size_t x = 0; x < 4; ++x) max_failures = std::max(max_failures, rep.cell(t, x).failures);
        }
        if (p == 0) {
            pseudo3 = rep.cell(0, 3).frequency;
            rank2 = rep.cell(1, 2).frequency;
        }
    }
    const double secs = seconds_since(t0);
    ok = ok && worst_null <= 0.02 && std::abs(pseudo3 - 0.9888) <= 0.03 && std::abs(rank2 - 0.8276) <= 0.04 &&
         secs < 300.0;
    return {ok, fmt("max |null - 0.05| = %.4f, pseudo xi=3: %.4f (0.9888), rank xi=2: %.4f (0.8276), "
                    "max failures/cell = %zu, %.1f s",
                    worst_null, pseudo3, rank2, max_failures, secs)};
}

Outcome closed_form_oracle() {
    const std::vector<AngularModel> pool{AngularModel::fvml(2), AngularModel::fvml(6), AngularModel::lin(2),
                                         AngularModel::log(2.5), AngularModel::logis(1, 1)};
    std::mt19937_64 gen(8128);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const int m = 2 + rep % 2, k = 2 + (rep / 2) % 3;
        RngStream rng(4096, static_cast<std::uint64_t>(rep));
        const UnitVector th(testing_support::random_unit(k, gen));
        std::vector<TildeLaw> laws;
        std::vector<ScoreFunction> scores;
        std::vector<Eigen::Index> sizes;
        for (int i = 0; i < m; ++i) {
            const auto& md = pool[static_cast<std::size_t>((rep + i) % 5)];
            laws.emplace_back(md, k);
            scores.push_back(score_from_model(md, k));
            sizes.push_back(60 + 20 * ((rep + i) % 4));
        }
        const auto ms = testing_support::null_sample(laws, sizes, th, rng);
        try {
            worst = std::max(worst, std::abs(pseudo_fvml_test(ms).statistic -
                                             reference_quadratic_form(ms, std::nullopt, PseudoMode{}).statistic));
            worst = std::max(worst, std::abs(rank_test(ms, scores).statistic -
                                             reference_quadratic_form(ms, std::nullopt, RankMode{scores}).statistic));
        } catch (const Error& e) {
            return {false, fmt("dataset %d: %s", rep, e.what())};
        }
    }
    return {worst < 1e-8, fmt("100 datasets, max |closed - reference| = %.3g", worst)};
}

Outcome null_calibration() {
    ExperimentConfig cfg;
    cfg.k = 3;
    cfg.sizes = {200, 200, 200};
    cfg.theta0 = UnitVector{0.0, 0.0, 1.0};
    const auto fv2 = AngularModel::fvml(2);
    cfg.models = {fv2, fv2, fv2};
    cfg.alternative_group = 0;
    cfg.tests = {{Method::PseudoFvML, {}}, {Method::Rank, {fv2, fv2, fv2}}};
    cfg.seed = 777;
    const auto checks = null_distribution_check(cfg, 2000);
    bool ok = true;
    std::string detail;
    for (const auto& c : checks) {
        ok = ok && c.ks.p_value > 0.01 && c.failures == 0;
        detail += fmt("%s: D = %.4f, p = %.3f, failures = %zu; ", c.test.c_str(), c.ks.statistic, c.ks.p_value, c.failures);
    }
    return {ok, detail};
}

Matrix monotone_projection_change(const Matrix& x, const Vector& th) {
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double t = x.col(j).dot(th);
        const Vector s = (x.col(j) - t * th).normalized();
        const double nt = t * t * t;
        out.col(j) = (nt * th + std::sqrt(1.0 - nt * nt) * s).normalized();
    }
    return out;
}

Outcome invariances() {
    std::mt19937_64 gen(99);
    const auto fv2 = AngularModel::fvml(2), l2 = AngularModel::lin(2), fv15 = AngularModel::fvml(15);
    const std::vector<ScoreFunction> sc{score_from_model(fv2, 3), score_from_model(l2, 3), score_from_model(fv15, 3)};
    double rot = 0.0, mono = 0.0, relabel = 0.0;
    for (std::uint64_t r = 0; r < 20; ++r) {
        RngStream rng(2024, r);
        const auto ms = testing_support::null_sample({TildeLaw(fv2, 3), TildeLaw(l2, 3), TildeLaw(fv15, 3)}, {80, 100, 60},
                                                     UnitVector{0.0, 0.6, 0.8}, rng);
        const double q = pseudo_fvml_test(ms).statistic, qk = rank_test(ms, sc).statistic;

        const auto rms = ms.rotated(testing_support::random_rotation(3, gen));
        rot = std::max({rot, std::abs(q - pseudo_fvml_test(rms).statistic), std::abs(qk - rank_test(rms, sc).statistic)});

        const MultiSample perm({ms.group(1), ms.group(2), ms.group(0)});
        const std::vector<ScoreFunction> psc{sc[1], sc[2], sc[0]};
        relabel = std::max({relabel, std::abs(q - pseudo_fvml_test(perm).statistic),
                            std::abs(qk - rank_test(perm, psc).statistic)});

        const UnitVector th = spherical_mean(ms);
        const MultiSample moved({monotone_projection_change(ms.group(0), th.vec()), ms.group(1), ms.group(2)});
        try {
            mono = std::max(mono, std::abs(rank_test(ms, sc, th).statistic - rank_test(moved, sc, th).statistic));
        } catch (const Error& e) {
            return {false, std::string("monotone transform: ") + e.what()};
        }
    }
    const bool ok = rot <= 1e-10 && relabel <= 1e-10 && mono <= 1e-12;
    return {ok, fmt("rotation %.3g, relabeling %.3g, monotone projection transform (rank) %.3g", rot, relabel, mono)};
}

Outcome estimator_consistency() {
    double worst = 0.0;
    for (double kappa : {2.0, 6.0}) {
        RngStream rng(515, static_cast<std::uint64_t>(kappa));
        const Matrix x = sample_rotsym(UnitVector{1.0, 0.0, 0.0}, TildeLaw(AngularModel::fvml(kappa), 3), 10000, rng);
        const Vector proj = x.transpose() * spherical_mean(x).vec();
        const double e = proj.mean(), b = 1.0 - proj.squaredNorm() / 10000.0;
        worst = std::max(worst, std::abs(e / b - kappa / 2.0));
    }
    const TildeLaw law(AngularModel::fvml(2), 3);
    const ScoreFunction k = score_from_model(AngularModel::fvml(2), 3);
    const double oracle = j_cross(k, law);
    int close = 0;
    for (std::uint64_t r = 0; r < 100; ++r) {
        RngStream rng(616, r);
        const Matrix x = sample_rotsym(UnitVector{0.0, 0.6, 0.8}, law, 2000, rng);
        try {
            close += std::abs(cross_info_estimate(x, spherical_mean(x), k).j_hat - oracle) <= 0.1 * oracle;
        } catch (const Error&) {
        }
    }
    return {worst <= 0.02 && close >= 90,
            fmt("max |D_hat - kappa/(k-1)| = %.4f; j_hat within 10%% in %d/100", worst, close)};
}

Outcome sampler_fidelity() {
    const std::vector<AngularModel> models{AngularModel::fvml(1),    AngularModel::fvml(2),       AngularModel::fvml(6),
                                           AngularModel::fvml(15),   AngularModel::lin(1.1),      AngularModel::lin(2),
                                           AngularModel::lin(4),     AngularModel::log(2.5),      AngularModel::log(4),
                                           AngularModel::logis(1, 1), AngularModel::logis(2, 1)};
    bool ok = true;
    double lowest = 1.0;
    std::string worst;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const TildeLaw law(models[i], 3);
        RngStream rng(3141, i);
        const UnitVector th{0.0, 0.0, 1.0};
        const Matrix x = sample_rotsym(th, law, 10000, rng);
        std::vector<double> t(static_cast<std::size_t>(x.cols()));
        for (Eigen::Index j = 0; j < x.cols(); ++j) t[static_cast<std::size_t>(j)] = x.col(j).dot(th.vec());
        const auto r = ks::test(t, [&](double v) { return law.cdf(v); });
        ok = ok && r.p_value > 0.01;
        if (r.p_value < lowest) {
            lowest = r.p_value;
            worst = models[i].label();
        }
    }
    return {ok, fmt("%zu families, lowest KS p = %.3f (%s)", models.size(), lowest, worst.c_str())};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"ARE table", efficiency_table},
        {"FvML cross-moment identity", cross_moment_identity},
        {"chi-square 95% quantile, 2 df", chi2_constant},
        {"two-sample rejection frequencies", rejection_frequencies},
        {"closed forms vs reference quadratic form", closed_form_oracle},
        {"null chi-square calibration", null_calibration},
        {"invariances", invariances},
        {"estimator consistency", estimator_consistency},
        {"sampler fidelity", sampler_fidelity},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    return failed ? 1 : 0;
}

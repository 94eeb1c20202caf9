#pragma once

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sphanova/anova.hpp"
#include "sphanova/data_io.hpp"
#include "sphanova/efficiency.hpp"
#include "sphanova/experiment.hpp"
#include "sphanova/sampler.hpp"

namespace sphanova::cli {

enum ExitCode : int { Ok = 0, DomainFailure = 1, UsageFailure = 2 };

namespace detail {

inline AngularModel checked_model(const std::string& spec) {
    AngularModel m = parse_model_spec(spec);
    const auto v = check_positive(m);
    if (!v.ok) throw Error(*v.issue, v.message);
    return m;
}

inline Vector parse_vector(const std::string& text) {
    std::vector<double> xs;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) xs.push_back(sphanova::detail::parse_double(tok, text));
    Vector v(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) v(static_cast<Eigen::Index>(i)) = xs[i];
    return v;
}

inline nlohmann::json result_json(const TestResult& r, const MultiSample& ms, double alpha) {
    nlohmann::json j;
    j["method"] = std::string(to_string(r.method));
    j["statistic"] = r.statistic;
    j["df"] = r.df;
    j["p_value"] = r.p_value;
    j["alpha"] = alpha;
    j["critical_value"] = chi2_quantile(1.0 - alpha, r.df);
    j["reject"] = r.reject(alpha);
    j["theta_hat"] = std::vector<double>(r.theta_hat.vec().begin(), r.theta_hat.vec().end());
    if (!r.scores.empty()) j["scores"] = r.scores;
    for (std::size_t i = 0; i < r.per_group.size(); ++i) {
        const auto& g = r.per_group[i];
        nlohmann::json gj{{"label", ms.label(i)}, {"n", g.n}, {"B_hat", g.B_hat}, {"E_hat", g.E_hat}};
        if (std::isfinite(g.D_hat)) gj["D_hat"] = g.D_hat;
        if (std::isfinite(g.J_hat)) gj["J_hat"] = g.J_hat;
        j["groups"].push_back(gj);
    }
    return j;
}

inline std::string csv_field(const std::string& s) {
    return s.find(',') == std::string::npos ? s : '"' + s + '"';
}

inline void print_csv_table(std::ostream& out, const AreTable& t) {
    out << "truth";
    for (const auto& s : t.scores) out << ',' << csv_field("K_" + s.label());
    out << '\n';
    out << std::fixed << std::setprecision(6);
    for (std::size_t i = 0; i < t.truths.size(); ++i) {
        out << csv_field(t.truths[i].label());
        for (Eigen::Index j = 0; j < t.values.cols(); ++j) out << ',' << t.values(static_cast<Eigen::Index>(i), j);
        out << '\n';
    }
    out << std::defaultfloat;
}

} // namespace detail

/// Runs one command line (without the program name). Output goes to `out`,
/// diagnostics to `err`; the return value is the process exit code.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Location tests for rotationally symmetric directional data", "sphanova"};
    app.require_subcommand(1);

    // test
    auto* test = app.add_subcommand("test", "Run an m-sample location test on grouped unit vectors");
    std::string data_path, data_format, method = "pseudo", scores_text;
    double alpha = 0.05;
    test->add_option("--data", data_path, "CSV or JSON data file")->required();
    test->add_option("--format", data_format, "csv or json (default: from extension)")
        ->check(CLI::IsMember({"csv", "json"}));
    test->add_option("--method", method, "pseudo or rank")->check(CLI::IsMember({"pseudo", "rank"}));
    test->add_option("--scores", scores_text, "comma-separated score models, one per group (or one for all)");
    test->add_option("--alpha", alpha, "level")->check(CLI::Range(0.0, 1.0));

    // are
    auto* are = app.add_subcommand("are", "Asymptotic relative efficiency of rank tests");
    std::string score_spec, truth_spec;
    int k = 3;
    bool want_table = false;
    are->add_option("--score", score_spec, "score model, e.g. fvml:kappa=2");
    are->add_option("--truth", truth_spec, "true angular model");
    are->add_option("--k", k, "dimension")->check(CLI::Range(2, 1000));
    are->add_flag("--table1", want_table, "print the 9 x 7 ARE table as CSV");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo rejection frequencies");
    std::string config_path, out_path;
    unsigned threads = 0;
    sim->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out_path, "write the JSON report here instead of stdout");
    sim->add_option("--threads", threads, "worker threads (0: all cores)");

    // sample
    auto* smp = app.add_subcommand("sample", "Draw from a rotationally symmetric law, CSV output");
    std::string model_spec, theta_text, group_label = "1";
    long long n = 0;
    std::uint64_t seed = 0;
    bool no_header = false;
    smp->add_option("--model", model_spec, "angular model, e.g. fvml:kappa=2")->required();
    smp->add_option("--theta", theta_text, "location, e.g. 0,0,1")->required();
    smp->add_option("--n", n, "sample size")->required()->check(CLI::PositiveNumber);
    smp->add_option("--seed", seed, "random seed")->required();
    smp->add_option("--group", group_label, "group label written in the first column");
    smp->add_flag("--no-header", no_header, "omit the CSV header");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? Ok : UsageFailure;
    }

    try {
        if (test->parsed()) {
            const DataFormat fmt = data_format.empty() ? format_from_path(data_path)
                                   : data_format == "json" ? DataFormat::Json : DataFormat::Csv;
            const ParsedData pd = parse_data(data_path, fmt);
            const MultiSample& ms = pd.sample;
            TestResult r;
            if (method == "pseudo") {
                if (!scores_text.empty()) {
                    err << "--scores is only used with --method rank\n";
                    return UsageFailure;
                }
                r = pseudo_fvml_test(ms);
            } else {
                if (scores_text.empty()) {
                    err << "--scores is required with --method rank\n";
                    return UsageFailure;
                }
                const auto specs = split_model_list(scores_text);
                if (specs.size() != 1 && specs.size() != ms.groups()) {
                    err << "--scores: got " << specs.size() << " score models for " << ms.groups() << " groups\n";
                    return UsageFailure;
                }
                std::vector<ScoreFunction> scores;
                for (std::size_t i = 0; i < ms.groups(); ++i)
                    scores.push_back(score_from_model(detail::checked_model(specs[specs.size() == 1 ? 0 : i]),
                                                      static_cast<int>(ms.dim())));
                r = rank_test(ms, scores);
            }
            out << std::setw(2) << detail::result_json(r, ms, alpha) << '\n';
            err << to_string(r.method) << ": Q = " << std::setprecision(8) << r.statistic << ", df = " << r.df
                << ", p = " << std::setprecision(6) << r.p_value << " -> "
                << (r.reject(alpha) ? "reject" : "do not reject") << " at alpha = " << alpha << '\n';
            if (pd.renormalized) err << pd.renormalized << " row(s) renormalized on input\n";
            return Ok;
        }

        if (are->parsed()) {
            if (want_table) {
                if (!score_spec.empty() || !truth_spec.empty()) {
                    err << "--table1 cannot be combined with --score/--truth\n";
                    return UsageFailure;
                }
                detail::print_csv_table(out, table1(k));
                return Ok;
            }
            if (score_spec.empty() || truth_spec.empty()) {
                err << (score_spec.empty() ? "--score" : "--truth") << " is required (or use --table1)\n";
                return UsageFailure;
            }
            const double v = are_homogeneous(detail::checked_model(score_spec), detail::checked_model(truth_spec), k);
            out << std::setprecision(10) << v << '\n';
            return Ok;
        }

        if (sim->parsed()) {
            std::ifstream in(config_path);
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw Error(Errc::InvalidConfig, e.what());
            }
            ExperimentConfig cfg = config_from_json(j);
            if (sim->count("--threads")) cfg.threads = threads;
            const ExperimentReport rep = run_experiment(cfg);
            const std::string table = format_table(rep);
            if (out_path.empty()) {
                out << std::setw(2) << to_json(rep) << '\n';
                err << table;
            } else {
                std::ofstream f(out_path);
                if (!f) throw Error(Errc::InvalidConfig, "cannot write '" + out_path + "'");
                f << std::setw(2) << to_json(rep) << '\n';
                out << table;
            }
            if (!rep.valid) err << "warning: more than 1% of replications failed in some cell\n";
            return rep.valid ? Ok : DomainFailure;
        }

        if (smp->parsed()) {
            const AngularModel model = detail::checked_model(model_spec);
            const UnitVector theta = UnitVector::normalize(detail::parse_vector(theta_text));
            const TildeLaw law(model, static_cast<int>(theta.dim()));
            RngStream rng(seed, 0);
            const Matrix x = sample_rotsym(theta, law, static_cast<Eigen::Index>(n), rng);
            if (!no_header) write_csv_header(out, theta.dim());
            write_csv_rows(out, group_label, x);
            return Ok;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return DomainFailure;
    }
    return UsageFailure;
}

inline int dispatch(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

} // namespace sphanova::cli

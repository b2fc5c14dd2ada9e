#include "projcred/app.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "projcred/bounds.hpp"
#include "projcred/checks.hpp"
#include "projcred/error.hpp"
#include "projcred/posterior.hpp"

namespace projcred {

namespace fs = std::filesystem;

std::string format_exact(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    out.close();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

SweepResult run_sweep(const ExperimentDesign& design, int n, const RunConfig& config,
                      std::ostream& progress) {
    const auto start = std::chrono::steady_clock::now();
    progress << "[" << design.name << "] n=" << n << ": " << config.budget.freq_reps
             << " frequentist replicates" << std::endl;
    FrequentistRun freq =
        frequentist_samples(design, n, config.budget.freq_reps, config.seed, config.workers);
    progress << "[" << design.name << "] n=" << n << ": " << config.budget.realizations
             << " realizations x " << config.budget.draws << " posterior draws" << std::endl;
    RealizationQuantiles rq =
        posterior_quantile_realizations(design, n, config.budget.realizations, config.budget.draws,
                                        QuantileGrid{}, config.seed, config.workers);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    progress << "[" << design.name << "] n=" << n << " done in " << secs << " s" << std::endl;
    return SweepResult{n, std::move(freq), std::move(rq)};
}

std::string qq_csv(const std::vector<QqPoint>& points) {
    std::string s = "alpha,gamma_true,gamma_posterior_median\n";
    for (const auto& pt : points) {
        s += format_exact(pt.alpha) + "," + format_17(pt.gamma_true) + "," +
             format_17(pt.gamma_posterior_median) + "\n";
    }
    return s;
}

std::string coverage_csv(const std::vector<std::pair<int, std::vector<CoverageRow>>>& rows) {
    std::string s = "n,level,coverage,iqr\n";
    for (const auto& [n, table] : rows) {
        for (const auto& row : table) {
            s += std::to_string(n) + "," + format_exact(row.level) + "," + format_17(row.coverage) +
                 "," + format_17(row.iqr) + "\n";
        }
    }
    return s;
}

std::vector<std::string> cmd_qq(const RunConfig& config, std::ostream& progress) {
    const ExperimentDesign design = make_design(config);
    std::vector<std::string> written;
    for (int n : config.n_grid) {
        const SweepResult sweep = run_sweep(design, n, config, progress);
        const fs::path path = fs::path(config.out_dir) / ("qq_" + std::to_string(n) + ".csv");
        write_file(path, qq_csv(qq_points(sweep.freq.distribution, sweep.posterior)));
        written.push_back(path.string());
    }
    return written;
}

std::vector<std::string> cmd_coverage(const RunConfig& config, std::ostream& progress) {
    const ExperimentDesign design = make_design(config);
    std::vector<std::pair<int, std::vector<CoverageRow>>> rows;
    for (int n : config.n_grid) {
        const SweepResult sweep = run_sweep(design, n, config, progress);
        rows.emplace_back(n, coverage_table(sweep.freq.distribution, sweep.posterior, config.levels));
    }
    const fs::path path = fs::path(config.out_dir) / "coverage.csv";
    write_file(path, coverage_csv(rows));
    return {path.string()};
}

std::vector<std::string> cmd_bounds(const RunConfig& config, std::ostream& progress) {
    const ExperimentDesign design = make_design(config);
    const ConcentrationCase dcase = concentration_case_from_string(config.bounds.delta_case);
    const SymMatrix truth = design.truth();
    TruthStats stats;
    try {
        stats = truth_stats(truth, config.bounds.radius);
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
    if (dcase == ConcentrationCase::bounded && !config.bounds.radius) {
        throw ConfigError("bounds: delta case 'bounded' needs bounds.radius");
    }
    Rng rng = make_stream(config.seed, StreamKind::moments);
    progress << "[" << design.name << "] third moments from " << config.bounds.moment_draws
             << " draws" << std::endl;
    const auto moments = moment3_estimates(design, config.bounds.moment_draws, rng);
    const double g_norm = config.g_scale;

    std::string s =
        "n,delta_case,delta_hat,diamond1,diamond2,diamond3,diamond,overline_delta,"
        "overline_diamond,denominator,moment_u,moment_v,p,b,g_norm,m,gap,width,flag\n";
    for (int n : config.n_grid) {
        const double nd = static_cast<double>(n);
        const double dh = delta_hat(dcase, nd, design.dim(), stats);
        const BoundReport r =
            bound_report(design.spectrum, design.selection, g_norm, config.b, nd, dh, moments);
        s += std::to_string(n) + "," + config.bounds.delta_case + "," + format_17(dh) + "," +
             format_17(r.diamond1) + "," + format_17(r.diamond2) + "," + format_17(r.diamond3) + "," +
             format_17(r.diamond) + "," + format_17(r.overline_delta) + "," +
             format_17(r.overline_diamond) + "," + format_17(r.denominator) + "," +
             format_17(r.moment_u) + "," + format_17(r.moment_v) + "," +
             std::to_string(r.inputs.p) + "," + format_exact(r.inputs.b) + "," +
             format_exact(r.inputs.g_norm) + "," + format_exact(r.inputs.m) + "," +
             format_17(r.inputs.gap) + "," + format_17(r.inputs.width) + "," +
             (r.degenerate ? "degenerate" : "ok") + "\n";
    }
    const fs::path path = fs::path(config.out_dir) / "bounds.csv";
    write_file(path, s);
    return {path.string()};
}

bool cmd_selfcheck(const SelfcheckOptions& options, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    bool all_ok = true;
    auto report = [&](const std::string& name, const std::string& failure) {
        out << (failure.empty() ? "PASS " : "FAIL ") << name;
        if (!failure.empty()) out << ": " << failure;
        out << "\n";
        all_ok = all_ok && failure.empty();
    };
    auto first_failure = [&](StreamKind kind, std::uint64_t tag, int count, auto&& check) {
        for (int i = 0; i < count; ++i) {
            Rng rng = make_stream(options.seed, kind, tag, static_cast<std::uint64_t>(i));
            std::string f = check(rng);
            if (!f.empty()) return "instance " + std::to_string(i) + ": " + f;
        }
        return std::string{};
    };
    const int count = options.instances;
    std::uniform_int_distribution<int> dim_dist(2, 30);

    report("eigendecomposition invariants",
           first_failure(StreamKind::selfcheck, 1, count, [&](Rng& rng) {
               return checks::check_eigh(checks::random_symmetric(dim_dist(rng), rng));
           }));
    report("norm ordering", first_failure(StreamKind::selfcheck, 2, count, [&](Rng& rng) {
               return checks::check_norm_chain(checks::random_symmetric(dim_dist(rng), rng));
           }));
    report("projector algebra", first_failure(StreamKind::selfcheck, 3, count, [&](Rng& rng) {
               const Eigen::Index p = dim_dist(rng);
               const EigenDecomposition eig = eigh(checks::random_symmetric(p, rng));
               const Eigen::Index first = std::uniform_int_distribution<Eigen::Index>(0, p - 1)(rng);
               const Eigen::Index last = std::uniform_int_distribution<Eigen::Index>(first, p - 1)(rng);
               Projector proj = projector(eig, IndexRange{first, last + 1});
               if (options.inject_fault) {
                   SymMatrix m = proj.matrix();
                   m.set(0, 0, m(0, 0) + 1e-3);
                   proj = Projector(m, proj.rank());
               }
               return checks::check_projector(proj);
           }));
    report("Weyl inequality", first_failure(StreamKind::selfcheck, 4, count, [&](Rng& rng) {
               const Eigen::Index p = dim_dist(rng);
               const SymMatrix a = checks::random_symmetric(p, rng);
               return checks::check_weyl(a, checks::random_symmetric(p, rng) * 0.1);
           }));
    report("projector perturbation bounds",
           first_failure(StreamKind::selfcheck, 5, count / 2, [&](Rng& rng) {
               return checks::check_perturbation(checks::random_perturbation_case(rng));
           }));

    {
        // Wishart moment: E[Sigma^{-1}] = degrees * scale^{-1}.
        const PosteriorParams params(SymMatrix::identity(5), 50.0);
        Rng rng = make_stream(options.seed, StreamKind::selfcheck, 6);
        Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(5, 5);
        constexpr int draws = 2000;
        for (int i = 0; i < draws; ++i) mean += sample_sigma(params, rng).dense().inverse();
        mean /= draws;
        const Eigen::MatrixXd expected = 50.0 * Eigen::MatrixXd::Identity(5, 5);
        const double rel = (mean - expected).norm() / expected.norm();
        report("inverse-Wishart precision mean",
               rel <= 0.05 ? std::string{} : "relative error " + std::to_string(rel));
    }
    report("quantile monotonicity", first_failure(StreamKind::selfcheck, 7, 20, [&](Rng& rng) {
               std::vector<double> x(500);
               std::exponential_distribution<double> e(1.0);
               for (double& v : x) v = e(rng);
               const EmpiricalDistribution dist(x);
               const QuantileGrid grid;
               for (std::size_t k = 1; k < grid.size(); ++k) {
                   if (dist.quantile(grid.alphas()[k]) < dist.quantile(grid.alphas()[k - 1])) {
                       return std::string("quantile decreased at alpha ") +
                              std::to_string(grid.alphas()[k]);
                   }
               }
               return std::string{};
           }));
    {
        std::string failure = checks::check_whitening(build_experiment1(options.seed).spectrum,
                                                      build_experiment1(options.seed).selection);
        if (failure.empty()) {
            const ExperimentDesign exp2 = build_experiment2(options.seed);
            failure = checks::check_whitening(exp2.spectrum, exp2.selection);
        }
        report("whitening of target coordinates", failure);
    }

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << (all_ok ? "selfcheck passed" : "selfcheck FAILED") << " in " << secs << " s\n";
    return all_ok;
}

namespace {

struct CommonFlags {
    std::string config_path;
    std::string experiment;
    std::uint64_t seed = 0;
    int workers = -1;
    std::string out;
    std::string scale;
    std::vector<int> n;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON run configuration");
    cmd->add_option("--experiment", f.experiment, "exp1 or exp2")
        ->check(CLI::IsMember({"exp1", "exp2", "custom"}));
    cmd->add_option("--seed", f.seed, "master seed (64-bit)");
    cmd->add_option("--workers", f.workers, "worker threads (0 = all cores)");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--scale", f.scale, "full (3000/50/3000) or desk (1000/20/1000)")
        ->check(CLI::IsMember({"full", "desk"}));
    cmd->add_option("--n", f.n, "sample sizes (overrides the n grid)");
}

RunConfig resolve(const CLI::App* cmd, const CommonFlags& f) {
    RunConfig c = f.config_path.empty() ? RunConfig{} : load_config(f.config_path);
    if (!f.experiment.empty()) c.experiment = f.experiment;
    if (cmd->count("--seed") > 0) c.seed = f.seed;
    if (cmd->count("--workers") > 0) c.workers = f.workers;
    if (!f.out.empty()) c.out_dir = f.out;
    if (!f.scale.empty()) c.budget = budget_for(f.scale == "full" ? Scale::full : Scale::desk);
    if (!f.n.empty()) c.n_grid = f.n;
    c.validate();
    return c;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Pseudo-Bayesian credible sets for spectral projectors"};
    app.require_subcommand(1);

    CommonFlags qq_flags;
    CommonFlags cov_flags;
    CommonFlags bounds_flags;
    auto* qq = app.add_subcommand("qq", "write qq_<n>.csv for every n");
    add_common(qq, qq_flags);
    auto* coverage = app.add_subcommand("coverage", "write coverage.csv");
    add_common(coverage, cov_flags);
    auto* bounds = app.add_subcommand("bounds", "write bounds.csv with error-term diagnostics");
    add_common(bounds, bounds_flags);
    std::string delta_case;
    double radius = 0.0;
    bounds->add_option("--delta-case", delta_case, "gaussian, subgaussian, bounded or logconcave")
        ->check(CLI::IsMember({"gaussian", "subgaussian", "bounded", "logconcave"}));
    bounds->add_option("--radius", radius, "support radius R for the bounded case");

    SelfcheckOptions self_opts;
    auto* selfcheck = app.add_subcommand("selfcheck", "run the fast invariant suite");
    selfcheck->add_option("--seed", self_opts.seed, "seed of the random instances");
    selfcheck->add_option("--instances", self_opts.instances, "random instances per check");
    selfcheck->add_flag("--inject-fault", self_opts.inject_fault,
                        "corrupt one projector to exercise the failure path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        std::vector<std::string> written;
        if (qq->parsed()) {
            written = cmd_qq(resolve(qq, qq_flags), std::cerr);
        } else if (coverage->parsed()) {
            written = cmd_coverage(resolve(coverage, cov_flags), std::cerr);
        } else if (bounds->parsed()) {
            RunConfig c = resolve(bounds, bounds_flags);
            if (!delta_case.empty()) c.bounds.delta_case = delta_case;
            if (bounds->count("--radius") > 0) c.bounds.radius = radius;
            c.validate();
            written = cmd_bounds(c, std::cerr);
        } else if (selfcheck->parsed()) {
            return cmd_selfcheck(self_opts, std::cout) ? exit_ok : exit_check_failed;
        }
        for (const auto& path : written) std::cout << path << "\n";
        return exit_ok;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return exit_config;
    } catch (const NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return exit_numeric;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return exit_io;
    }
}

}  // namespace projcred

#pragma once

// Batch front end.  Four subcommands sharing one config format:
//
//   halflap thresholds --config run.json [--out dir] [--seed n]
//   halflap solve      --config run.json [--out dir] [--seed n]
//   halflap sweep      --config run.json [--jobs k] [--out dir] [--seed n]
//   halflap verify     --config run.json [--out dir] [--seed n]
//
// Exit codes: 0 success, 1 runtime failure, 2 config error.  Reports embed
// the resolved config and the version string; wall times go to stderr so
// reruns stay byte-identical.

#include <atomic>
#include <chrono>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "report.hpp"
#include "verify.hpp"

namespace halflap {

namespace detail {

inline void warn_weight(const Weight& weight) {
    if (!weight.warning().empty()) std::cerr << "warning: " << weight.warning() << "\n";
}

inline std::filesystem::path out_path(const RunConfig& config, const std::string& name) {
    return std::filesystem::path(config.output_dir) / name;
}

inline void write_report(const RunConfig& config, const std::string& name,
                         const nlohmann::ordered_json& body) {
    const auto path = out_path(config, name);
    write_text_atomic(path, body.dump(2) + "\n");
    std::cout << "wrote " << path.string() << "\n";
}

inline nlohmann::ordered_json report_skeleton(const RunConfig& config) {
    nlohmann::ordered_json j;
    j["version"] = version_string;
    j["config"] = config.resolved;
    return j;
}

} // namespace detail

inline int cmd_thresholds(const RunConfig& config) {
    if (!find_sign_witness(config.nonlinearity))
        throw no_witness_error("no sign witness: F(t) is never positive on the scan range");

    nlohmann::ordered_json j = detail::report_skeleton(config);
    if (config.domain.has_spectral_basis()) {
        const EnergyModel model = make_model(config);
        detail::warn_weight(model.weight());
        j["certificate"] = to_json(compute_certificate(model));
    } else {
        // Balls carry no eigenbasis: no lambda_1, no non-existence bound, no
        // variational estimate — only the cone bound and the radius criterion.
        const Weight weight = make_weight(config, nullptr);
        nlohmann::ordered_json cert;
        cert["domain"] = config.domain.describe();
        cert["dimension_hypothesis_met"] = config.domain.meets_dimension_hypothesis();
        cert["cf"] = to_json(estimate_cf(config.nonlinearity));
        cert["beta_essinf"] = weight.essinf();
        cert["beta_sup"] = weight.sup_norm();
        cert["lambda_zero"] = to_json(lambda_zero(config.nonlinearity, weight, config.domain));
        cert["zeta"] = to_json(zeta_info(config.domain.dim, config.domain.radius));
        cert["theorem_ball_check"] =
            to_json(check_theorem_ball(config.nonlinearity, config.domain.dim, config.domain.radius));
        cert["hypothesis_spot_check"] = to_json(spot_check_hypotheses(config.nonlinearity));
        j["certificate"] = cert;
    }
    detail::write_report(config, "certificate.json", j);
    return 0;
}

inline int cmd_solve(const RunConfig& config) {
    if (!config.lambda)
        throw config_error("solve needs a scalar \"lambda\" (got a sweep or nothing)");
    if (!config.domain.has_spectral_basis())
        throw config_error("solve needs an interval or rectangle domain");

    const EnergyModel model = make_model(config);
    detail::warn_weight(model.weight());
    SolverConfig solver = config.solver;
    solver.seed = config.seed;
    const SolveReport result = solve_both(model, solver);

    nlohmann::ordered_json j = detail::report_skeleton(config);
    j["report"] = to_json(result);
    nlohmann::ordered_json files = nlohmann::ordered_json::object();
    if (result.minimizer.kind != PointKind::trivial) {
        files["minimizer_coefficients"] = "minimizer_coefficients.csv";
        files["minimizer_samples"] = "minimizer_samples.csv";
        write_text_atomic(detail::out_path(config, "minimizer_coefficients.csv"),
                          field_coefficients_csv(result.minimizer.u));
        write_text_atomic(detail::out_path(config, "minimizer_samples.csv"),
                          field_samples_csv(model, result.minimizer.u));
    }
    if (result.mountain_pass_point) {
        files["mountain_pass_coefficients"] = "mountain_pass_coefficients.csv";
        files["mountain_pass_samples"] = "mountain_pass_samples.csv";
        write_text_atomic(detail::out_path(config, "mountain_pass_coefficients.csv"),
                          field_coefficients_csv(result.mountain_pass_point->u));
        write_text_atomic(detail::out_path(config, "mountain_pass_samples.csv"),
                          field_samples_csv(model, result.mountain_pass_point->u));
    }
    j["files"] = files;
    detail::write_report(config, "solve_report.json", j);

    std::cout << "minimizer: kind=" << to_string(result.minimizer.kind)
              << " energy=" << fmt17(result.minimizer.energy)
              << " residual=" << fmt17(result.minimizer.grad_norm) << "\n";
    if (result.mountain_pass_point)
        std::cout << "mountain pass: kind=" << to_string(result.mountain_pass_point->kind)
                  << " energy=" << fmt17(result.mountain_pass_point->energy)
                  << " residual=" << fmt17(result.mountain_pass_point->grad_norm)
                  << " separation=" << fmt17(result.separation) << "\n";
    return 0;
}

namespace detail {

struct SweepRow {
    double lambda = 0.0;
    std::string outcome; // trivial | minimizer_only | two_solutions | stationary | error
    bool nonexist_certified = false;
    bool has_min = false, has_mp = false;
    CriticalPoint minimizer, mountain_pass_point;
    double separation = 0.0;
    bool distinct = false;
    std::string note;
};

inline SweepRow run_sweep_row(const EnergyModel& prepared, double lambda,
                              const SolverConfig& solver) {
    SweepRow row;
    row.lambda = lambda;
    try {
        const EnergyModel model = prepared.with_lambda(lambda);
        row.nonexist_certified = check_nonexistence(model).certified;
        row.minimizer = minimize(model, warm_start(model), solver);
        row.has_min = true;
        switch (row.minimizer.kind) {
            case PointKind::trivial: row.outcome = "trivial"; break;
            case PointKind::stationary: row.outcome = "stationary"; break;
            case PointKind::mountain_pass: row.outcome = "stationary"; break;
            case PointKind::minimizer: {
                try {
                    row.mountain_pass_point = mountain_pass(model, row.minimizer.u, solver);
                    row.has_mp = true;
                    row.separation =
                        h_half_distance(row.minimizer.u, row.mountain_pass_point.u);
                    row.distinct = row.separation > solver.separation_tol;
                    const bool second = row.mountain_pass_point.kind == PointKind::mountain_pass &&
                                        row.mountain_pass_point.converged && row.distinct;
                    row.outcome = second ? "two_solutions" : "minimizer_only";
                    if (!second) row.note = "mountain pass point not distinct or not converged";
                } catch (const std::exception& e) {
                    row.outcome = "minimizer_only";
                    row.note = e.what();
                }
                break;
            }
        }
    } catch (const std::exception& e) {
        row.outcome = "error";
        row.note = e.what();
    }
    return row;
}

inline nlohmann::ordered_json to_json(const SweepRow& row) {
    nlohmann::ordered_json j;
    j["lambda"] = row.lambda;
    j["outcome"] = row.outcome;
    j["nonexist_certified"] = row.nonexist_certified;
    j["minimizer"] = row.has_min ? halflap::to_json(row.minimizer) : nlohmann::ordered_json(nullptr);
    j["mountain_pass"] =
        row.has_mp ? halflap::to_json(row.mountain_pass_point) : nlohmann::ordered_json(nullptr);
    if (row.has_mp) {
        j["separation"] = row.separation;
        j["distinct"] = row.distinct;
    }
    if (!row.note.empty()) j["note"] = row.note;
    return j;
}

} // namespace detail

inline int cmd_sweep(const RunConfig& config, int jobs) {
    if (!config.sweep) throw config_error("sweep needs a \"lambda_sweep\" block");
    if (!config.domain.has_spectral_basis())
        throw config_error("sweep needs an interval or rectangle domain");

    const EnergyModel base = make_model(config);
    detail::warn_weight(base.weight());
    const EnergyModel prepared =
        base.nonlinearity().cf()
            ? base
            : base.with_nonlinearity(base.nonlinearity().with_cf(estimate_cf(base.nonlinearity())));
    SolverConfig solver = config.solver;
    solver.seed = config.seed;

    const std::vector<double> lambdas = config.sweep->values();
    std::vector<detail::SweepRow> rows(lambdas.size());
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(lambdas.size())));
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= lambdas.size()) return;
            rows[i] = detail::run_sweep_row(prepared, lambdas[i], solver);
            char name[48];
            std::snprintf(name, sizeof name, "rows/row_%04zu.json", i);
            nlohmann::ordered_json rj = detail::report_skeleton(config);
            rj["row"] = detail::to_json(rows[i]);
            write_text_atomic(detail::out_path(config, name), rj.dump(2) + "\n");
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    std::string csv;
    csv += "# ";
    csv += version_string;
    csv += "\n# config: " + config.resolved.dump() + "\n";
    csv += "# columns: lambda, outcome, nonexist_certified, min_energy, min_residual, min_h_norm, "
           "min_iterations, mp_energy, mp_residual, mp_h_norm, mp_iterations, separation, "
           "distinct, note\n";
    std::size_t succeeded = 0;
    for (const auto& row : rows) {
        if (row.outcome != "error") ++succeeded;
        csv += fmt17(row.lambda);
        csv += "," + row.outcome;
        csv += row.nonexist_certified ? ",1" : ",0";
        if (row.has_min) {
            csv += "," + fmt17(row.minimizer.energy) + "," + fmt17(row.minimizer.grad_norm) + "," +
                   fmt17(row.minimizer.h_norm) + "," + std::to_string(row.minimizer.iterations);
        } else {
            csv += ",,,,";
        }
        if (row.has_mp) {
            csv += "," + fmt17(row.mountain_pass_point.energy) + "," +
                   fmt17(row.mountain_pass_point.grad_norm) + "," +
                   fmt17(row.mountain_pass_point.h_norm) + "," +
                   std::to_string(row.mountain_pass_point.iterations) + "," +
                   fmt17(row.separation) + (row.distinct ? ",1" : ",0");
        } else {
            csv += ",,,,,,";
        }
        std::string note = row.note;
        for (char& c : note)
            if (c == ',' || c == '\n') c = ';';
        csv += "," + note + "\n";
    }
    write_text_atomic(detail::out_path(config, "sweep.csv"), csv);
    std::cout << "wrote " << detail::out_path(config, "sweep.csv").string() << " (" << succeeded
              << "/" << rows.size() << " rows succeeded)\n";
    return succeeded > 0 ? 0 : 1;
}

inline int cmd_verify(const RunConfig& config) {
    const VerificationReport result = run_verification(config);
    nlohmann::ordered_json j = detail::report_skeleton(config);
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& check : result.checks) {
        checks.push_back({{"name", check.name},
                          {"pass", check.pass},
                          {"measured", check.measured},
                          {"tolerance", check.tolerance},
                          {"detail", check.detail}});
        std::printf("[%s] %-28s measured=%-12.3e tol=%-10.1e %s\n", check.pass ? "PASS" : "FAIL",
                    check.name.c_str(), check.measured, check.tolerance, check.detail.c_str());
    }
    j["checks"] = checks;
    j["all_pass"] = result.all_pass;
    detail::write_report(config, "verify_report.json", j);
    return result.all_pass ? 0 : 1;
}

inline int run_cli(int argc, char** argv) {
    CLI::App app{"spectral square-root-Laplacian thresholds and variational solvers"};
    app.set_version_flag("--version", std::string(version_string));
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    int jobs = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_option("--seed", seed, "RNG seed (overrides the config)");
        return sub;
    };
    CLI::App* sub_thresholds =
        add_common(app.add_subcommand("thresholds", "emit the threshold certificate"));
    CLI::App* sub_solve =
        add_common(app.add_subcommand("solve", "find both critical points at one lambda"));
    CLI::App* sub_sweep = add_common(app.add_subcommand("sweep", "solve across a lambda range"));
    sub_sweep->add_option("--jobs", jobs, "concurrent sweep rows")->check(CLI::PositiveNumber);
    CLI::App* sub_verify = add_common(app.add_subcommand("verify", "run the invariant suite"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const auto started = std::chrono::steady_clock::now();
    int rc = 1;
    try {
        RunConfig config = load_config(config_path);
        CLI::App* active = sub_thresholds->parsed()  ? sub_thresholds
                           : sub_solve->parsed()     ? sub_solve
                           : sub_sweep->parsed()     ? sub_sweep
                                                     : sub_verify;
        if (active->count("--out") > 0) config.output_dir = out_dir;
        if (active->count("--seed") > 0) config.seed = seed;
        config.resolved = resolved_json(config);

        if (active == sub_thresholds) rc = cmd_thresholds(config);
        else if (active == sub_solve) rc = cmd_solve(config);
        else if (active == sub_sweep) rc = cmd_sweep(config, jobs);
        else rc = cmd_verify(config);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    std::cerr << "elapsed_ms=" << elapsed.count() << "\n";
    return rc;
}

} // namespace halflap

#pragma once

// Report serialization: JSON documents (ordered keys, embedded config and
// version), CSV with 17 significant digits, and atomic file writes.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "solvers.hpp"
#include "version.hpp"

namespace halflap {

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Write via a temporary in the same directory plus rename, so readers never
/// observe a half-written file.
inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline nlohmann::ordered_json to_json(const CfEstimate& cf) {
    return {{"value", cf.value}, {"argmax", cf.argmax}, {"t_max", cf.t_max}, {"grid", cf.grid}};
}

inline nlohmann::ordered_json to_json(const NonexistenceCheck& check) {
    return {{"certified", check.certified},
            {"lambda", check.lambda},
            {"bound", check.bound},
            {"product", check.product},
            {"margin", check.margin}};
}

inline nlohmann::ordered_json to_json(const ConeParams& cone) {
    return {{"x0", cone.x0}, {"tau", cone.tau}, {"sigma", cone.sigma}, {"height", cone.height}};
}

inline nlohmann::ordered_json to_json(const LambdaZeroResult& result) {
    return {{"lambda0", result.lambda0},
            {"cone", to_json(result.cone)},
            {"denominator_margin", result.denominator_margin},
            {"psi_lower_bound", result.psi_lower_bound}};
}

inline nlohmann::ordered_json to_json(const LambdaStarEstimate& estimate) {
    return {{"upper", estimate.upper},
            {"lower", estimate.lower},
            {"witness_kind", estimate.witness_kind},
            {"trials_used", estimate.trials_used}};
}

inline nlohmann::ordered_json to_json(const HypothesisSpotCheck& check) {
    return {{"sup_near_zero", check.sup_near_zero},
            {"near_zero_range", check.near_zero_range},
            {"sup_near_infinity", check.sup_near_infinity},
            {"near_infinity_range", check.near_infinity_range}};
}

inline nlohmann::ordered_json to_json(const ThresholdCertificate& cert) {
    nlohmann::ordered_json j;
    j["domain"] = cert.domain;
    j["dimension_hypothesis_met"] = cert.dimension_hypothesis_met;
    j["lambda1"] = cert.lambda1;
    j["cf"] = to_json(cert.cf);
    j["beta_essinf"] = cert.beta_essinf;
    j["beta_sup"] = cert.beta_sup;
    j["lambda_nonexist"] = cert.lambda_nonexist;
    j["lambda_zero"] = to_json(cert.lambda0);
    j["lambda_star_bracket"] = {{"low", cert.lambda_nonexist}, {"high", cert.lambda0.lambda0}};
    j["lambda_star_estimate"] = to_json(cert.lambda_star);
    j["hypothesis_spot_check"] = to_json(cert.hypotheses);
    return j;
}

inline nlohmann::ordered_json to_json(const ZetaInfo& info) {
    return {{"value", info.value}, {"min_z", info.min_z}, {"sigma_star", info.sigma_star}};
}

inline nlohmann::ordered_json to_json(const BallTheoremCheck& check) {
    return {{"verifiable", check.verifiable},
            {"condition_holds", check.condition_holds},
            {"min_ratio", check.min_ratio},
            {"t0", check.t0},
            {"zeta", check.zeta_value}};
}

/// Critical-point summary; coefficients and samples live in the CSV files.
inline nlohmann::ordered_json to_json(const CriticalPoint& point) {
    return {{"kind", to_string(point.kind)},
            {"energy", point.energy},
            {"residual", point.grad_norm},
            {"h_norm", point.h_norm},
            {"iterations", point.iterations},
            {"converged", point.converged}};
}

inline nlohmann::ordered_json to_json(const SolveReport& report) {
    nlohmann::ordered_json j;
    j["nonexistence"] = to_json(report.nonexistence);
    j["minimizer"] = to_json(report.minimizer);
    if (report.mountain_pass_point) {
        j["mountain_pass"] = to_json(*report.mountain_pass_point);
        j["separation"] = report.separation;
        j["distinct"] = report.distinct;
    } else {
        j["mountain_pass"] = nullptr;
    }
    return j;
}

/// Mode-index columns plus the coefficient, one row per mode.
inline std::string field_coefficients_csv(const Field& u) {
    const auto& basis = *u.basis;
    std::string out;
    out += "# ";
    out += version_string;
    out += "\n";
    out += basis.domain.dim == 1 ? "# columns: mode_1, coefficient\n"
                                 : "# columns: mode_1, mode_2, coefficient\n";
    for (std::size_t j = 0; j < basis.size(); ++j) {
        out += std::to_string(basis.modes[j][0]);
        if (basis.domain.dim == 2) {
            out += ",";
            out += std::to_string(basis.modes[j][1]);
        }
        out += ",";
        out += fmt17(u.coeffs[j]);
        out += "\n";
    }
    return out;
}

/// Grid samples (x..., value), one row per quadrature node.
inline std::string field_samples_csv(const EnergyModel& model, const Field& u) {
    const auto& grid = model.grid();
    const auto values = model.sample(u);
    std::string out;
    out += "# ";
    out += version_string;
    out += "\n";
    out += grid.domain.dim == 1 ? "# columns: x_1, value\n" : "# columns: x_1, x_2, value\n";
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const double* x = grid.node(m);
        for (int d = 0; d < grid.domain.dim; ++d) {
            out += fmt17(x[d]);
            out += ",";
        }
        out += fmt17(values[m]);
        out += "\n";
    }
    return out;
}

} // namespace halflap

#pragma once

// Run-configuration file: a single JSON document per run.
//
//   {
//     "domain":       {"kind": "rectangle", "lengths": [3.141592653589793, 3.141592653589793]},
//     "modes":        64,
//     "quad_points":  128,
//     "nonlinearity": {"name": "log-square"},
//     "beta":         {"kind": "constant", "value": 1.0},
//     "lambda":       31.4,                 // or "lambda_sweep": {min, max, count, scale}
//     "solver":       {"grad_tol": 1e-8},   // optional, defaults below
//     "output_dir":   "out",
//     "seed":         1
//   }
//
// Custom nonlinearities reference a CSV table (t, f(t)); tabulated weights
// reference a CSV of (x..., value) rows on a full tensor grid, interpolated
// linearly and clamped outside the tabulated range.  Relative paths resolve
// against the config file's directory.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "solvers.hpp"
#include "version.hpp"

namespace halflap {

struct SweepSpec {
    double min = 0.0;
    double max = 0.0;
    int count = 0;
    bool log_scale = false;

    [[nodiscard]] std::vector<double> values() const {
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(count));
        if (count == 1) {
            out.push_back(min);
            return out;
        }
        for (int i = 0; i < count; ++i) {
            const double s = static_cast<double>(i) / (count - 1);
            out.push_back(log_scale ? min * std::pow(max / min, s) : min + (max - min) * s);
        }
        return out;
    }
};

struct RunConfig {
    Domain domain = Domain::interval(1.0);
    int modes = 0;
    int quad_points = 0;
    Nonlinearity nonlinearity = Nonlinearity::log_square();
    std::optional<double> lambda;
    std::optional<SweepSpec> sweep;
    SolverConfig solver;
    std::string output_dir = "out";
    std::uint64_t seed = 0;

    // The weight is grid-dependent; keep the spec and materialize per grid.
    bool beta_constant = true;
    double beta_value = 1.0;
    std::string beta_table_path; // resolved absolute path when tabulated
    double beta_declared_essinf = 0.0;
    double beta_declared_sup = 0.0;

    nlohmann::ordered_json resolved; // full effective config, echoed in reports
};

namespace detail {

// Numeric CSV rows; '#' comments and an optional non-numeric header are skipped.
inline std::vector<std::vector<double>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open CSV file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first_content = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
                    ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first_content) {
                first_content = false;
                continue; // header row
            }
            throw config_error("non-numeric CSV row in " + path + ": " + line);
        }
        if (!row.empty()) {
            rows.push_back(std::move(row));
            first_content = false;
        }
    }
    if (rows.empty()) throw config_error("CSV file has no data rows: " + path);
    return rows;
}

// Piecewise-linear interpolant on a 1-D or tensor-product 2-D table, clamped
// to the tabulated range.
class TableInterpolant {
public:
    TableInterpolant(const std::vector<std::vector<double>>& rows, int dim, const std::string& path)
        : dim_(dim) {
        for (const auto& row : rows)
            if (static_cast<int>(row.size()) != dim + 1)
                throw config_error("weight table " + path + ": expected " + std::to_string(dim + 1) +
                                   " columns per row");
        if (dim == 1) {
            std::vector<std::pair<double, double>> pts;
            pts.reserve(rows.size());
            for (const auto& row : rows) pts.emplace_back(row[0], row[1]);
            std::sort(pts.begin(), pts.end());
            for (const auto& [x, v] : pts) {
                xs_.push_back(x);
                values_.push_back(v);
            }
            if (xs_.size() < 2 || xs_.front() == xs_.back())
                throw config_error("weight table " + path + ": need at least two distinct abscissae");
        } else {
            std::map<double, std::size_t> xs, ys;
            for (const auto& row : rows) {
                xs.emplace(row[0], 0);
                ys.emplace(row[1], 0);
            }
            std::size_t k = 0;
            for (auto& [x, idx] : xs) {
                idx = k++;
                xs_.push_back(x);
            }
            k = 0;
            for (auto& [y, idx] : ys) {
                idx = k++;
                ys_.push_back(y);
            }
            if (xs_.size() < 2 || ys_.size() < 2)
                throw config_error("weight table " + path + ": need a 2-D tensor grid");
            if (rows.size() != xs_.size() * ys_.size())
                throw config_error("weight table " + path + ": rows do not form a full tensor grid");
            values_.assign(rows.size(), 0.0);
            std::vector<bool> seen(rows.size(), false);
            for (const auto& row : rows) {
                const std::size_t i = xs.at(row[0]), j = ys.at(row[1]);
                if (seen[i * ys_.size() + j])
                    throw config_error("weight table " + path + ": duplicate grid point");
                seen[i * ys_.size() + j] = true;
                values_[i * ys_.size() + j] = row[2];
            }
        }
    }

    [[nodiscard]] double operator()(const double* x) const {
        if (dim_ == 1) return interp1(xs_, x[0], [&](std::size_t i) { return values_[i]; });
        return interp1(xs_, x[0], [&](std::size_t i) {
            return interp1(ys_, x[1], [&](std::size_t j) { return values_[i * ys_.size() + j]; });
        });
    }

private:
    template <class ValueAt>
    static double interp1(const std::vector<double>& axis, double x, ValueAt&& value_at) {
        if (x <= axis.front()) return value_at(0);
        if (x >= axis.back()) return value_at(axis.size() - 1);
        const auto it = std::upper_bound(axis.begin(), axis.end(), x);
        const std::size_t hi = static_cast<std::size_t>(it - axis.begin());
        const std::size_t lo = hi - 1;
        const double span = axis[hi] - axis[lo];
        const double frac = span > 0.0 ? (x - axis[lo]) / span : 0.0;
        return (1.0 - frac) * value_at(lo) + frac * value_at(hi);
    }

    int dim_;
    std::vector<double> xs_, ys_, values_;
};

template <class T>
T get_field(const nlohmann::json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw config_error(where + ": missing required key \"" + key + "\"");
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw config_error(where + ": key \"" + key + "\" has the wrong type (" + e.what() + ")");
    }
}

template <class T>
T get_field_or(const nlohmann::json& obj, const std::string& key, T fallback,
               const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw config_error(where + ": key \"" + key + "\" has the wrong type (" + e.what() + ")");
    }
}

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> known,
                                const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw config_error(where + ": unknown key \"" + key + "\"");
    }
}

inline Domain parse_domain(const nlohmann::json& j) {
    if (!j.is_object()) throw config_error("domain: expected an object");
    reject_unknown_keys(j, {"kind", "lengths", "radius", "dim"}, "domain");
    const auto kind = get_field<std::string>(j, "kind", "domain");
    try {
        if (kind == "interval") {
            const auto lengths = get_field<std::vector<double>>(j, "lengths", "domain");
            if (lengths.size() != 1) throw config_error("domain: interval takes one length");
            return Domain::interval(lengths[0]);
        }
        if (kind == "rectangle") {
            const auto lengths = get_field<std::vector<double>>(j, "lengths", "domain");
            if (lengths.size() != 2) throw config_error("domain: rectangle takes two lengths");
            return Domain::rectangle(lengths[0], lengths[1]);
        }
        if (kind == "ball") {
            const int dim = get_field<int>(j, "dim", "domain");
            const double radius = get_field<double>(j, "radius", "domain");
            return Domain::ball(dim, radius);
        }
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("domain: ") + e.what());
    }
    throw config_error("domain: unknown kind \"" + kind + "\" (interval|rectangle|ball)");
}

inline Nonlinearity parse_nonlinearity(const nlohmann::json& j,
                                       const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw config_error("nonlinearity: expected an object");
    reject_unknown_keys(j, {"name", "table", "flags"}, "nonlinearity");
    const auto name = get_field<std::string>(j, "name", "nonlinearity");
    NonlinearityFlags flags{true, true, true};
    if (j.contains("flags")) {
        const auto& fj = j.at("flags");
        reject_unknown_keys(fj, {"superlinear_at_zero", "sublinear_at_infinity", "sign_condition"},
                            "nonlinearity.flags");
        flags.superlinear_at_zero =
            get_field_or<bool>(fj, "superlinear_at_zero", true, "nonlinearity.flags");
        flags.sublinear_at_infinity =
            get_field_or<bool>(fj, "sublinear_at_infinity", true, "nonlinearity.flags");
        flags.sign_condition = get_field_or<bool>(fj, "sign_condition", true, "nonlinearity.flags");
    }
    if (name == "custom") {
        const auto rel = get_field<std::string>(j, "table", "nonlinearity");
        const auto path = (base_dir / rel).lexically_normal().string();
        const auto rows = read_csv(path);
        std::vector<double> ts, fs;
        for (const auto& row : rows) {
            if (row.size() != 2)
                throw config_error("nonlinearity table " + path + ": expected two columns (t, f)");
            ts.push_back(row[0]);
            fs.push_back(row[1]);
        }
        try {
            return Nonlinearity::from_table("custom:" + rel, ts, fs, flags);
        } catch (const std::invalid_argument& e) {
            throw config_error("nonlinearity table " + path + ": " + e.what());
        }
    }
    if (j.contains("table")) throw config_error("nonlinearity: \"table\" is only for name=custom");
    try {
        return builtin(name);
    } catch (const std::invalid_argument&) {
        throw config_error("nonlinearity: unknown name \"" + name + "\" (log-square|zero|custom)");
    }
}

} // namespace detail

inline nlohmann::ordered_json resolved_json(const RunConfig& config) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json dj;
    dj["kind"] = config.domain.kind == DomainKind::interval    ? "interval"
                 : config.domain.kind == DomainKind::rectangle ? "rectangle"
                                                               : "ball";
    if (config.domain.kind == DomainKind::ball) {
        dj["dim"] = config.domain.dim;
        dj["radius"] = config.domain.radius;
    } else {
        dj["lengths"] = config.domain.lengths;
    }
    j["domain"] = dj;
    if (config.modes > 0) j["modes"] = config.modes;
    if (config.quad_points > 0) j["quad_points"] = config.quad_points;
    j["nonlinearity"] = {{"name", config.nonlinearity.name()}};
    nlohmann::ordered_json bj;
    bj["kind"] = config.beta_constant ? "constant" : "table";
    if (config.beta_constant)
        bj["value"] = config.beta_value;
    else {
        bj["path"] = config.beta_table_path;
        bj["essinf"] = config.beta_declared_essinf;
        bj["sup"] = config.beta_declared_sup;
    }
    j["beta"] = bj;
    if (config.lambda) j["lambda"] = *config.lambda;
    if (config.sweep)
        j["lambda_sweep"] = {{"min", config.sweep->min},
                             {"max", config.sweep->max},
                             {"count", config.sweep->count},
                             {"scale", config.sweep->log_scale ? "log" : "linear"}};
    j["solver"] = {{"max_iters", config.solver.max_iters},
                   {"grad_tol", config.solver.grad_tol},
                   {"initial_step", config.solver.initial_step},
                   {"backtrack", config.solver.backtrack},
                   {"armijo_c", config.solver.armijo_c},
                   {"path_points", config.solver.path_points},
                   {"redistribute_every", config.solver.redistribute_every},
                   {"separation_tol", config.solver.separation_tol},
                   {"trivial_norm_factor", config.solver.trivial_norm_factor},
                   {"restarts", config.solver.restarts}};
    j["output_dir"] = config.output_dir;
    j["seed"] = config.seed;
    return j;
}

inline RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw config_error("config: top level must be an object");
    detail::reject_unknown_keys(j,
                                {"domain", "modes", "quad_points", "nonlinearity", "beta", "lambda",
                                 "lambda_sweep", "solver", "output_dir", "seed"},
                                "config");
    RunConfig config;
    config.domain = detail::parse_domain(detail::get_field<nlohmann::json>(j, "domain", "config"));

    const bool needs_basis = config.domain.has_spectral_basis();
    config.modes = detail::get_field_or<int>(j, "modes", needs_basis ? 0 : -1, "config");
    config.quad_points = detail::get_field_or<int>(j, "quad_points", needs_basis ? 0 : -1, "config");
    if (needs_basis) {
        if (config.modes < 1) throw config_error("config: \"modes\" must be a positive integer");
        if (config.quad_points < 2) throw config_error("config: \"quad_points\" must be at least 2");
    } else {
        config.modes = std::max(config.modes, 0);
        config.quad_points = std::max(config.quad_points, 0);
    }

    config.nonlinearity = detail::parse_nonlinearity(
        detail::get_field<nlohmann::json>(j, "nonlinearity", "config"), base_dir);

    const auto bj = detail::get_field<nlohmann::json>(j, "beta", "config");
    if (!bj.is_object()) throw config_error("beta: expected an object");
    detail::reject_unknown_keys(bj, {"kind", "value", "path", "essinf", "sup"}, "beta");
    const auto bkind = detail::get_field<std::string>(bj, "kind", "beta");
    if (bkind == "constant") {
        config.beta_constant = true;
        config.beta_value = detail::get_field<double>(bj, "value", "beta");
        if (!(config.beta_value > 0.0)) throw config_error("beta: constant value must be positive");
    } else if (bkind == "table") {
        config.beta_constant = false;
        const auto rel = detail::get_field<std::string>(bj, "path", "beta");
        config.beta_table_path = (base_dir / rel).lexically_normal().string();
        config.beta_declared_essinf = detail::get_field_or<double>(bj, "essinf", 0.0, "beta");
        config.beta_declared_sup = detail::get_field_or<double>(bj, "sup", 0.0, "beta");
        if (!config.domain.has_spectral_basis())
            throw config_error("beta: tabulated weights need an interval or rectangle domain");
    } else {
        throw config_error("beta: unknown kind \"" + bkind + "\" (constant|table)");
    }

    if (j.contains("lambda") && j.contains("lambda_sweep"))
        throw config_error("config: give either \"lambda\" or \"lambda_sweep\", not both");
    if (j.contains("lambda")) {
        config.lambda = detail::get_field<double>(j, "lambda", "config");
        if (!(*config.lambda >= 0.0)) throw config_error("config: \"lambda\" must be >= 0");
    }
    if (j.contains("lambda_sweep")) {
        const auto sj = j.at("lambda_sweep");
        detail::reject_unknown_keys(sj, {"min", "max", "count", "scale"}, "lambda_sweep");
        SweepSpec sweep;
        sweep.min = detail::get_field<double>(sj, "min", "lambda_sweep");
        sweep.max = detail::get_field<double>(sj, "max", "lambda_sweep");
        sweep.count = detail::get_field<int>(sj, "count", "lambda_sweep");
        const auto scale = detail::get_field_or<std::string>(sj, "scale", "linear", "lambda_sweep");
        if (scale == "log")
            sweep.log_scale = true;
        else if (scale != "linear")
            throw config_error("lambda_sweep: scale must be \"linear\" or \"log\"");
        if (sweep.count < 1) throw config_error("lambda_sweep: count must be >= 1");
        if (!(sweep.min <= sweep.max)) throw config_error("lambda_sweep: min must be <= max");
        if (!(sweep.min >= 0.0)) throw config_error("lambda_sweep: min must be >= 0");
        if (sweep.log_scale && !(sweep.min > 0.0))
            throw config_error("lambda_sweep: log scale needs min > 0");
        config.sweep = sweep;
    }

    if (j.contains("solver")) {
        const auto sj = j.at("solver");
        if (!sj.is_object()) throw config_error("solver: expected an object");
        detail::reject_unknown_keys(sj,
                                    {"max_iters", "grad_tol", "initial_step", "backtrack",
                                     "armijo_c", "path_points", "redistribute_every",
                                     "separation_tol", "trivial_norm_factor", "restarts"},
                                    "solver");
        auto& s = config.solver;
        s.max_iters = detail::get_field_or<int>(sj, "max_iters", s.max_iters, "solver");
        s.grad_tol = detail::get_field_or<double>(sj, "grad_tol", s.grad_tol, "solver");
        s.initial_step = detail::get_field_or<double>(sj, "initial_step", s.initial_step, "solver");
        s.backtrack = detail::get_field_or<double>(sj, "backtrack", s.backtrack, "solver");
        s.armijo_c = detail::get_field_or<double>(sj, "armijo_c", s.armijo_c, "solver");
        s.path_points = detail::get_field_or<int>(sj, "path_points", s.path_points, "solver");
        s.redistribute_every =
            detail::get_field_or<int>(sj, "redistribute_every", s.redistribute_every, "solver");
        s.separation_tol =
            detail::get_field_or<double>(sj, "separation_tol", s.separation_tol, "solver");
        s.trivial_norm_factor =
            detail::get_field_or<double>(sj, "trivial_norm_factor", s.trivial_norm_factor, "solver");
        s.restarts = detail::get_field_or<int>(sj, "restarts", s.restarts, "solver");
        if (s.max_iters < 1) throw config_error("solver: max_iters must be >= 1");
        if (!(s.grad_tol > 0.0)) throw config_error("solver: grad_tol must be positive");
        if (!(s.initial_step > 0.0)) throw config_error("solver: initial_step must be positive");
        if (!(s.backtrack > 0.0 && s.backtrack < 1.0))
            throw config_error("solver: backtrack must lie in (0,1)");
        if (!(s.armijo_c > 0.0 && s.armijo_c < 1.0))
            throw config_error("solver: armijo_c must lie in (0,1)");
        if (s.path_points < 3) throw config_error("solver: path_points must be >= 3");
        if (s.redistribute_every < 1)
            throw config_error("solver: redistribute_every must be >= 1");
        if (!(s.separation_tol > 0.0)) throw config_error("solver: separation_tol must be positive");
        if (s.restarts < 0) throw config_error("solver: restarts must be >= 0");
    }

    config.output_dir = detail::get_field_or<std::string>(j, "output_dir", "out", "config");
    if (config.output_dir.empty()) throw config_error("config: output_dir must not be empty");
    config.seed = detail::get_field_or<std::uint64_t>(j, "seed", 0, "config");

    config.resolved = resolved_json(config);
    return config;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config parse failure in " + path + ": " + e.what());
    }
    return parse_config(j, std::filesystem::path(path).parent_path());
}

/// Materialize the weight on a grid (or grid-free for thresholds on balls).
inline Weight make_weight(const RunConfig& config, const QuadratureGrid* grid) {
    if (config.beta_constant) {
        if (grid) return Weight::constant(config.beta_value, grid->size());
        return Weight::constant(config.beta_value);
    }
    if (!grid) throw config_error("beta: tabulated weights need a quadrature grid");
    detail::TableInterpolant table(detail::read_csv(config.beta_table_path), config.domain.dim,
                                   config.beta_table_path);
    try {
        return Weight::from_function([&](const double* x) { return table(x); }, *grid,
                                     config.beta_declared_essinf, config.beta_declared_sup);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("beta: ") + e.what());
    }
}

/// Build the energy model for spectral domains; lambda falls back to 0 for
/// threshold-only runs.
inline EnergyModel make_model(const RunConfig& config) {
    if (!config.domain.has_spectral_basis())
        throw unsupported_domain("ball domains carry no eigenbasis; only thresholds are available");
    auto basis = build_basis(config.domain, config.modes);
    QuadratureGrid grid = build_quadrature(config.domain, config.quad_points);
    Weight weight = make_weight(config, &grid);
    return EnergyModel(std::move(basis), std::move(grid), std::move(weight), config.nonlinearity,
                       config.lambda.value_or(0.0));
}

} // namespace halflap

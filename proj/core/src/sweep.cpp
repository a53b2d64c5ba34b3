#include "eitsim/sweep.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "eitsim/linearization.hpp"
#include "eitsim/spectra.hpp"
#include "parallel.hpp"

namespace eitsim {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& value, const std::string& key, int line) {
    const std::string v = trim(value);
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) {
        throw ConfigError("config line " + std::to_string(line) + ": value of '" +
                          key + "' is not a number: '" + v + "'");
    }
    return x;
}

long parse_integer(const std::string& value, const std::string& key, int line) {
    const double x = parse_double(value, key, line);
    const long n = std::lround(x);
    if (static_cast<double>(n) != x) {
        throw ConfigError("config line " + std::to_string(line) + ": value of '" +
                          key + "' is not an integer");
    }
    return n;
}

std::string format_g9(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

/// Per-point oracle seed; folds the row index in so rows decorrelate while
/// the whole table stays a pure function of the config.
std::uint64_t row_seed(std::uint64_t base, int index) {
    return base + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(index + 1);
}

}  // namespace

void SweepConfig::require_sweep() const {
    if (!variable.has_value()) {
        throw ConfigError("config: sweep_variable is required for sweep runs");
    }
    if (sweep_points < 1 ||
        (sweep_points == 1 && sweep_min != sweep_max)) {
        throw ConfigError("config: sweep_points must be >= 2 (or 1 with "
                          "sweep_min == sweep_max)");
    }
    if (!(sweep_min <= sweep_max)) {
        throw ConfigError("config: sweep_min must not exceed sweep_max");
    }
}

SweepConfig parse_sweep_config(const std::string& text) {
    SweepConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string entry = trim(raw);
        if (entry.empty()) continue;
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line) +
                              ": expected 'key = value'");
        }
        const std::string key = trim(entry.substr(0, eq));
        const std::string value = trim(entry.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line) + ": empty key");
        }
        if (!seen.insert(key).second) {
            throw ConfigError("config line " + std::to_string(line) +
                              ": duplicate key '" + key + "'");
        }

        if (key == "Gamma1") cfg.base.Gamma1 = parse_double(value, key, line);
        else if (key == "Gamma2") cfg.base.Gamma2 = parse_double(value, key, line);
        else if (key == "gamma1") cfg.base.gamma1 = parse_double(value, key, line);
        else if (key == "gamma2") cfg.base.gamma2 = parse_double(value, key, line);
        else if (key == "gamma12") cfg.base.gamma12 = parse_double(value, key, line);
        else if (key == "g1") cfg.base.g1 = parse_double(value, key, line);
        else if (key == "g2") cfg.base.g2 = parse_double(value, key, line);
        else if (key == "deltaL1") cfg.base.deltaL1 = parse_double(value, key, line);
        else if (key == "deltaL2") cfg.base.deltaL2 = parse_double(value, key, line);
        else if (key == "alpha1_in") cfg.base.alpha1_in = parse_double(value, key, line);
        else if (key == "alpha2_in") cfg.base.alpha2_in = parse_double(value, key, line);
        else if (key == "N_atoms") cfg.base.N_atoms = parse_double(value, key, line);
        else if (key == "Omega_analysis")
            cfg.base.Omega_analysis = parse_double(value, key, line);
        else if (key == "sweep_variable") {
            if (value == "deltaL2") cfg.variable = SweepVariable::kProbeDetuning;
            else if (value == "Omega_analysis")
                cfg.variable = SweepVariable::kAnalysisFrequency;
            else if (value == "drive") cfg.variable = SweepVariable::kDriveScale;
            else
                throw ConfigError("config line " + std::to_string(line) +
                                  ": sweep_variable must be deltaL2, "
                                  "Omega_analysis or drive");
        } else if (key == "sweep_min") cfg.sweep_min = parse_double(value, key, line);
        else if (key == "sweep_max") cfg.sweep_max = parse_double(value, key, line);
        else if (key == "sweep_points") {
            cfg.sweep_points = static_cast<int>(parse_integer(value, key, line));
        } else if (key == "oracle") {
            const long v = parse_integer(value, key, line);
            if (v != 0 && v != 1) {
                throw ConfigError("config line " + std::to_string(line) +
                                  ": oracle must be 0 or 1");
            }
            cfg.oracle = v == 1;
        } else if (key == "oracle_seed") {
            cfg.oracle_options.seed =
                static_cast<std::uint64_t>(parse_integer(value, key, line));
        } else if (key == "oracle_trajectories") {
            cfg.oracle_options.trajectories =
                static_cast<int>(parse_integer(value, key, line));
        } else if (key == "oracle_segments") {
            cfg.oracle_options.segments_per_trajectory =
                static_cast<int>(parse_integer(value, key, line));
        } else if (key == "out") {
            cfg.out = value;
        } else {
            throw ConfigError("config line " + std::to_string(line) +
                              ": unknown key '" + key + "'");
        }
    }
    try {
        cfg.base.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("config: ") + err.what());
    }
    return cfg;
}

SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_sweep_config(buf.str());
}

SweepResult run_sweep(const SweepConfig& cfg) {
    cfg.require_sweep();
    SweepResult result;
    const int n = cfg.sweep_points;
    result.rows.resize(n);
    // Points are independent; each worker fills its own row and the oracle
    // seed is derived from the row index, so the output is schedule-free.
    detail::parallel_for_indexed(n, [&](int i) {
        const double t = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
        const double value = cfg.sweep_min + (cfg.sweep_max - cfg.sweep_min) * t;
        PhysicalParams p = cfg.base;
        SweepRow& row = result.rows[i];
        switch (*cfg.variable) {
            case SweepVariable::kProbeDetuning:
                p.deltaL2 = value;
                row.sweep_value = value / p.Gamma();
                break;
            case SweepVariable::kAnalysisFrequency:
                p.Omega_analysis = value;
                row.sweep_value = value / p.Gamma();
                break;
            case SweepVariable::kDriveScale:
                p.alpha1_in *= value;
                p.alpha2_in *= value;
                row.sweep_value = value;
                break;
        }
        row.ss = solve_steady_state(p);
        row.converged = row.ss.converged;
        if (!row.converged) return;
        const LinearModel m = build_linear_model(p, row.ss);
        row.stable = m.stable;
        if (row.stable) {
            row.covariance = output_quadrature_covariance(m, p.Omega_analysis);
            row.report = classify(row.covariance, p.Omega_analysis);
            if (cfg.oracle && p.Omega_analysis > 0.0) {
                OracleOptions opt = cfg.oracle_options;
                opt.seed = row_seed(cfg.oracle_options.seed, i);
                row.oracle = simulate_quadrature_covariance(m, p.Omega_analysis, opt);
            }
        }
    });
    result.all_unstable = true;
    for (const SweepRow& row : result.rows) {
        if (!row.converged) result.any_nonconverged = true;
        if (row.stable) result.all_unstable = false;
    }
    return result;
}

BistabilityResult run_bistability(const SweepConfig& cfg) {
    cfg.require_sweep();
    if (*cfg.variable != SweepVariable::kDriveScale) {
        throw ConfigError("config: bistability runs sweep the drive "
                          "(sweep_variable = drive)");
    }
    // The config range is dimensionless (relative to the configured drive);
    // the continuation itself runs over the absolute common input amplitude.
    const double base_amp =
        std::max(std::abs(cfg.base.alpha1_in), std::abs(cfg.base.alpha2_in));
    if (base_amp == 0.0) {
        throw ConfigError("config: bistability needs a nonzero drive to scale");
    }
    const BistabilityBranch branch =
        continuation_sweep(cfg.base, cfg.sweep_min * base_amp,
                           cfg.sweep_max * base_amp, cfg.sweep_points);
    BistabilityResult result;
    result.turning_indices = branch.turning_indices;
    result.rows.reserve(branch.samples.size());
    for (const BranchSample& sample : branch.samples) {
        const double scale = sample.drive / base_amp;
        PhysicalParams p = cfg.base;
        p.alpha1_in *= scale;
        p.alpha2_in *= scale;
        BistabilityRow row;
        row.drive = scale;
        row.alpha1_abs = std::abs(sample.state.alpha1);
        row.alpha2_abs = std::abs(sample.state.alpha2);
        row.turning_point = sample.turning_point;
        const LinearModel m = build_linear_model(p, sample.state);
        row.stable = m.stable;
        if (row.stable) {
            row.covariance = output_quadrature_covariance(m, p.Omega_analysis);
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

std::string sweep_csv(const SweepResult& result, bool with_oracle) {
    std::string out =
        "sweep_value, stable, C_amp, C_phase, V1_amp, V1_phase, V2_amp, "
        "V2_phase, reid_product, eta0, eta_pi2, dgcz_sum, entangled_reid, "
        "entangled_dgcz";
    if (with_oracle) {
        out += ", oracle_V1_amp, oracle_V1_phase, oracle_V2_amp, oracle_V2_phase"
               ", oracle_cov_amp, oracle_cov_phase"
               ", oracle_se_V1_amp, oracle_se_V1_phase, oracle_se_V2_amp"
               ", oracle_se_V2_phase, oracle_se_cov_amp, oracle_se_cov_phase";
    }
    out += "\n";
    for (const SweepRow& row : result.rows) {
        out += format_g9(row.sweep_value);
        out += row.stable ? ", 1" : ", 0";
        if (row.report.has_value()) {
            const EntanglementReport& r = *row.report;
            const Eigen::Matrix4d& v = row.covariance;
            for (double x : {r.c_amp, r.c_phase, v(0, 0), v(1, 1), v(2, 2), v(3, 3),
                             r.reid, r.eta0, r.eta_pi2, r.dgcz}) {
                out += ", " + format_g9(x);
            }
            out += r.entangled_reid ? ", 1" : ", 0";
            out += r.entangled_dgcz ? ", 1" : ", 0";
        } else {
            for (int k = 0; k < 12; ++k) out += ", ";
        }
        if (with_oracle) {
            if (row.oracle.has_value()) {
                const Eigen::Matrix4d& v = row.oracle->V;
                const Eigen::Matrix4d& se = row.oracle->std_error;
                for (const Eigen::Matrix4d* m : {&v, &se}) {
                    for (double x : {(*m)(0, 0), (*m)(1, 1), (*m)(2, 2), (*m)(3, 3),
                                     (*m)(0, 2), (*m)(1, 3)}) {
                        out += ", " + format_g9(x);
                    }
                }
            } else {
                for (int k = 0; k < 12; ++k) out += ", ";
            }
        }
        out += "\n";
    }
    return out;
}

std::string bistability_csv(const BistabilityResult& result) {
    std::string out =
        "drive, alpha1_abs, alpha2_abs, stable, turning_point, "
        "V1_amp, V1_phase, V2_amp, V2_phase, V1_min, V2_min\n";
    for (const BistabilityRow& row : result.rows) {
        out += format_g9(row.drive);
        out += ", " + format_g9(row.alpha1_abs);
        out += ", " + format_g9(row.alpha2_abs);
        out += row.stable ? ", 1" : ", 0";
        out += row.turning_point ? ", 1" : ", 0";
        if (row.covariance.has_value()) {
            const Eigen::Matrix4d& v = *row.covariance;
            for (double x : {v(0, 0), v(1, 1), v(2, 2), v(3, 3)}) {
                out += ", " + format_g9(x);
            }
            // Rotated single-mode minima: the squeezing diagnostic near the
            // turning points.
            const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> e1(
                v.topLeftCorner<2, 2>());
            const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> e2(
                v.bottomRightCorner<2, 2>());
            out += ", " + format_g9(e1.eigenvalues()[0]);
            out += ", " + format_g9(e2.eigenvalues()[0]);
        } else {
            for (int k = 0; k < 6; ++k) out += ", ";
        }
        out += "\n";
    }
    return out;
}

PointReport point_report(const SweepConfig& cfg) {
    const PhysicalParams& p = cfg.base;
    PointReport rep;
    nlohmann::ordered_json doc;
    doc["parameters"] = {
        {"Gamma1", p.Gamma1},       {"Gamma2", p.Gamma2},
        {"gamma1", p.gamma1},       {"gamma2", p.gamma2},
        {"gamma12", p.gamma12},     {"g1", p.g1},
        {"g2", p.g2},               {"deltaL1", p.deltaL1},
        {"deltaL2", p.deltaL2},     {"alpha1_in", p.alpha1_in.real()},
        {"alpha2_in", p.alpha2_in.real()},
        {"N_atoms", p.N_atoms},     {"Omega_analysis", p.Omega_analysis},
    };
    const SteadyState ss = solve_steady_state(p);
    doc["steady_state"] = {
        {"converged", ss.converged},
        {"residual", ss.residual},
        {"alpha1", {ss.alpha1.real(), ss.alpha1.imag()}},
        {"alpha2", {ss.alpha2.real(), ss.alpha2.imag()}},
        {"s1", {ss.s1.real(), ss.s1.imag()}},
        {"s2", {ss.s2.real(), ss.s2.imag()}},
        {"s12", {ss.s12.real(), ss.s12.imag()}},
        {"p0", ss.p0},
        {"p1", ss.p1},
        {"p2", ss.p2},
    };
    rep.converged = ss.converged;
    if (!ss.converged) {
        rep.json = doc.dump(2) + "\n";
        return rep;
    }

    const LinearModel m = build_linear_model(p, ss);
    rep.stable = m.stable;
    doc["stability"] = {{"stable", m.stable}, {"abscissa", m.abscissa}};
    if (m.stable) {
        const Eigen::Matrix4d v = output_quadrature_covariance(m, p.Omega_analysis);
        doc["covariance"] = nlohmann::ordered_json::array();
        for (int i = 0; i < 4; ++i) {
            doc["covariance"].push_back({v(i, 0), v(i, 1), v(i, 2), v(i, 3)});
        }
        const EntanglementReport r = classify(v, p.Omega_analysis);
        doc["criteria"] = {
            {"omega_over_Gamma", r.omega / p.Gamma()},
            {"C_amp", r.c_amp},
            {"C_phase", r.c_phase},
            {"reid_product", r.reid},
            {"eta0", r.eta0},
            {"eta_pi2", r.eta_pi2},
            {"dgcz_sum", r.dgcz},
            {"entangled_reid", r.entangled_reid},
            {"entangled_dgcz", r.entangled_dgcz},
            {"depth_reid", r.depth_reid},
            {"depth_dgcz", r.depth_dgcz},
        };
    }
    rep.json = doc.dump(2) + "\n";
    return rep;
}

}  // namespace eitsim

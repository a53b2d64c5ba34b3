#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eitsim/criteria.hpp"
#include "eitsim/model.hpp"
#include "eitsim/oracle.hpp"
#include "eitsim/params.hpp"

namespace eitsim {

/// Parameter-file or option error; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SweepVariable {
    kProbeDetuning,      ///< deltaL2, config value in rad/s, reported in Gamma units
    kAnalysisFrequency,  ///< Omega_analysis, same units as above
    kDriveScale,         ///< common multiplier on both input amplitudes
};

/// Flat key = value run description.  Physical keys default to
/// lambda_defaults(); sweep keys have no defaults and are required by the
/// sweep and bistability runners.
struct SweepConfig {
    PhysicalParams base = PhysicalParams::lambda_defaults();
    std::optional<SweepVariable> variable;
    double sweep_min = 0.0;
    double sweep_max = 0.0;
    int sweep_points = 0;
    bool oracle = false;
    OracleOptions oracle_options;
    std::string out;  ///< output path; empty = standard output

    void require_sweep() const;  ///< throws ConfigError unless a valid sweep is set
};

/// Parses the flat config format: one `key = value` per line, `#` comments,
/// keys exactly the field names above (physical rates in rad/s).  Unknown or
/// duplicate keys and malformed values throw ConfigError.
SweepConfig parse_sweep_config(const std::string& text);
SweepConfig load_sweep_config(const std::string& path);

struct SweepRow {
    double sweep_value = 0.0;  ///< in output units (Gamma or dimensionless scale)
    bool converged = false;
    bool stable = false;
    SteadyState ss;
    std::optional<EntanglementReport> report;    ///< stable points only
    Eigen::Matrix4d covariance;                  ///< valid when report is set
    std::optional<OracleEstimate> oracle;        ///< when requested, stable points
};

struct SweepResult {
    std::vector<SweepRow> rows;
    bool any_nonconverged = false;
    bool all_unstable = false;
};

/// One independent steady-state solve, linearization and covariance per
/// sweep point.  Unstable points keep stable=false with no spectra; they are
/// reported, never silently used.
SweepResult run_sweep(const SweepConfig& cfg);

struct BistabilityRow {
    double drive = 0.0;  ///< common drive scale (dimensionless)
    double alpha1_abs = 0.0;
    double alpha2_abs = 0.0;
    bool stable = false;
    bool turning_point = false;
    std::optional<Eigen::Matrix4d> covariance;  ///< stable samples only
};

struct BistabilityResult {
    std::vector<BistabilityRow> rows;
    std::vector<std::size_t> turning_indices;
};

/// Drive-scale continuation over [sweep_min, sweep_max] with sweep_points
/// samples; quadrature variances evaluated on dynamically stable samples at
/// the base analysis frequency.
BistabilityResult run_bistability(const SweepConfig& cfg);

/// CSV renderers.  Fixed column set, floats at 9 significant digits,
/// booleans as 1/0, spectra fields left empty on unstable rows; oracle
/// columns appended only when present in the result.
std::string sweep_csv(const SweepResult& result, bool with_oracle);
std::string bistability_csv(const BistabilityResult& result);

/// Single-point JSON report at the base parameters (steady state, stability,
/// covariance and criteria at the base analysis frequency).
struct PointReport {
    std::string json;
    bool converged = false;
    bool stable = false;
};
PointReport point_report(const SweepConfig& cfg);

}  // namespace eitsim

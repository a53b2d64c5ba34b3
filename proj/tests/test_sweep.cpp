#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <string>

#include "eitsim/sweep.hpp"

using namespace eitsim;

namespace {

std::string defaults_config_text() {
    PhysicalParams d = PhysicalParams::lambda_defaults();
    std::string text;
    text += "Gamma1 = " + std::to_string(d.Gamma1) + "\n";
    text += "Gamma2 = " + std::to_string(d.Gamma2) + "\n";
    return text;
}

int count_fields(const std::string& line) {
    int n = 1;
    for (char c : line) n += c == ',';
    return n;
}

}  // namespace

TEST_SUITE("sweep") {

    TEST_CASE("parser applies keys over defaults and validates") {
        const SweepConfig cfg = parse_sweep_config(
            "# comment line\n"
            "deltaL1 = 0.5e6   # trailing comment\n"
            "sweep_variable = deltaL2\n"
            "sweep_min = -1e6\n"
            "sweep_max = 1e6\n"
            "sweep_points = 3\n"
            "oracle = 1\n"
            "oracle_seed = 42\n");
        CHECK(cfg.base.deltaL1 == 0.5e6);
        CHECK(cfg.base.Gamma1 == PhysicalParams::lambda_defaults().Gamma1);
        CHECK(cfg.variable == SweepVariable::kProbeDetuning);
        CHECK(cfg.sweep_points == 3);
        CHECK(cfg.oracle);
        CHECK(cfg.oracle_options.seed == 42);
        CHECK_NOTHROW(cfg.require_sweep());
    }

    TEST_CASE("parser rejects malformed input") {
        CHECK_THROWS_AS(parse_sweep_config("no_such_key = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_sweep_config("g1 = banana\n"), ConfigError);
        CHECK_THROWS_AS(parse_sweep_config("g1 = 1e6\ng1 = 2e6\n"), ConfigError);
        CHECK_THROWS_AS(parse_sweep_config("just a line\n"), ConfigError);
        CHECK_THROWS_AS(parse_sweep_config("sweep_variable = alpha\n"), ConfigError);
        CHECK_THROWS_AS(parse_sweep_config("oracle = 2\n"), ConfigError);
        CHECK_THROWS_AS(parse_sweep_config("gamma1 = -1e6\n"), ConfigError);
        // Sweep description required before running.
        CHECK_THROWS_AS(run_sweep(parse_sweep_config("")), ConfigError);
        SweepConfig bad = parse_sweep_config(
            "sweep_variable = drive\nsweep_min = 2\nsweep_max = 1\nsweep_points = 5\n");
        CHECK_THROWS_AS(bad.require_sweep(), ConfigError);
    }

    TEST_CASE("single decoupled point lands on the exact boundary row") {
        SweepConfig cfg = parse_sweep_config(
            "g1 = 0\ng2 = 0\n"
            "sweep_variable = deltaL2\nsweep_min = 0\nsweep_max = 0\nsweep_points = 1\n");
        const SweepResult result = run_sweep(cfg);
        REQUIRE(result.rows.size() == 1);
        const SweepRow& row = result.rows[0];
        REQUIRE(row.stable);
        REQUIRE(row.report.has_value());
        CHECK(std::abs(row.report->c_amp) <= 1e-9);
        CHECK(std::abs(row.report->c_phase) <= 1e-9);
        CHECK(std::abs(row.report->reid - 1.0) <= 1e-9);
        CHECK(std::abs(row.report->dgcz - 4.0) <= 1e-9);
        // Exactly at the boundary the strict verdicts are roundoff coin
        // flips; what must hold is their definition.
        CHECK(row.report->entangled_reid == (row.report->reid < 1.0));
        CHECK(row.report->entangled_dgcz == (row.report->dgcz < 4.0));
        const std::string csv = sweep_csv(result, false);
        const std::size_t eol = csv.find('\n');
        CHECK(csv.substr(0, eol) ==
              "sweep_value, stable, C_amp, C_phase, V1_amp, V1_phase, V2_amp, "
              "V2_phase, reid_product, eta0, eta_pi2, dgcz_sum, entangled_reid, "
              "entangled_dgcz");
        CHECK(count_fields(csv.substr(eol + 1)) == 14);
    }

    TEST_CASE("detuning sweep decorrelates in the wings") {
        const double g = PhysicalParams::lambda_defaults().Gamma();
        SweepConfig cfg = parse_sweep_config(
            "sweep_variable = deltaL2\n"
            "sweep_min = " + std::to_string(-10.0 * g) + "\n" +
            "sweep_max = " + std::to_string(10.0 * g) + "\n" +
            "sweep_points = 21\n");
        const SweepResult result = run_sweep(cfg);
        REQUIRE(result.rows.size() == 21);
        CHECK_FALSE(result.any_nonconverged);
        CHECK_FALSE(result.all_unstable);
        CHECK(result.rows.front().sweep_value == doctest::Approx(-10.0));
        CHECK(result.rows.back().sweep_value == doctest::Approx(10.0));
        const SweepRow& wing = result.rows.front();
        const SweepRow& center = result.rows[10];
        REQUIRE(wing.report.has_value());
        REQUIRE(center.report.has_value());
        // The wing decays from the absorption hump near |delta| ~ 4 Gamma;
        // ten linewidths out the residual correlation sits well below it
        // and keeps falling.
        double hump = 0.0;
        for (const SweepRow& r : result.rows) {
            if (r.report) hump = std::max(hump, std::abs(r.report->c_amp));
        }
        CHECK(std::abs(wing.report->c_amp) <= 0.35 * hump);
        CHECK(std::abs(result.rows[0].report->c_amp) <
              std::abs(result.rows[2].report->c_amp));
        CHECK(std::abs(result.rows[2].report->c_amp) <
              std::abs(result.rows[4].report->c_amp));
        CHECK(std::abs(wing.report->dgcz - 4.0) <= 0.08);
        CHECK(std::abs(center.report->c_amp) > std::abs(wing.report->c_amp));
    }

    TEST_CASE("oracle columns and byte-identical reruns") {
        SweepConfig cfg = parse_sweep_config(
            "sweep_variable = Omega_analysis\n"
            "sweep_min = 3e6\nsweep_max = 6e6\nsweep_points = 2\n"
            "oracle = 1\noracle_seed = 7\n"
            "oracle_trajectories = 2\noracle_segments = 3\n");
        cfg.oracle_options.cycles_per_segment = 10.0;
        const SweepResult a = run_sweep(cfg);
        const SweepResult b = run_sweep(cfg);
        const std::string csv_a = sweep_csv(a, true);
        const std::string csv_b = sweep_csv(b, true);
        CHECK(csv_a == csv_b);
        REQUIRE(a.rows.size() == 2);
        REQUIRE(a.rows[0].oracle.has_value());
        REQUIRE(a.rows[1].oracle.has_value());
        // Different rows draw different noise.
        CHECK(a.rows[0].oracle->V != a.rows[1].oracle->V);
        const std::size_t eol = csv_a.find('\n');
        CHECK(count_fields(csv_a.substr(0, eol)) == 26);
        // Changing the seed changes the oracle bytes.
        cfg.oracle_options.seed = 8;
        CHECK(sweep_csv(run_sweep(cfg), true) != csv_a);
    }

    TEST_CASE("monotone branch bistability table") {
        SweepConfig cfg = parse_sweep_config(
            "sweep_variable = drive\n"
            "sweep_min = 0.25\nsweep_max = 1.5\nsweep_points = 24\n");
        const BistabilityResult result = run_bistability(cfg);
        REQUIRE(result.rows.size() >= 24);
        CHECK(result.turning_indices.empty());
        for (std::size_t i = 1; i < result.rows.size(); ++i) {
            CHECK(result.rows[i].drive > result.rows[i - 1].drive);
            CHECK(result.rows[i].alpha1_abs >= result.rows[i - 1].alpha1_abs - 1e-9);
        }
        for (const BistabilityRow& row : result.rows) {
            CHECK(row.stable);
            CHECK_FALSE(row.turning_point);
            REQUIRE(row.covariance.has_value());
        }
        const std::string csv = bistability_csv(result);
        const std::size_t eol = csv.find('\n');
        CHECK(csv.substr(0, eol) ==
              "drive, alpha1_abs, alpha2_abs, stable, turning_point, "
              "V1_amp, V1_phase, V2_amp, V2_phase, V1_min, V2_min");
        CHECK(count_fields(csv.substr(eol + 1, csv.find('\n', eol + 1) - eol - 1)) == 11);
        // Drive sweeps through run_sweep share the drive-scale semantics.
        const SweepResult plain = run_sweep(cfg);
        CHECK(plain.rows.front().sweep_value == doctest::Approx(0.25));
    }

    TEST_CASE("bistability requires a drive sweep") {
        SweepConfig cfg = parse_sweep_config(
            "sweep_variable = deltaL2\nsweep_min = 0\nsweep_max = 1\nsweep_points = 2\n");
        CHECK_THROWS_AS(run_bistability(cfg), ConfigError);
    }

    TEST_CASE("point report is valid json with criteria") {
        SweepConfig cfg = parse_sweep_config(defaults_config_text());
        const PointReport rep = point_report(cfg);
        CHECK(rep.converged);
        CHECK(rep.stable);
        const nlohmann::json doc = nlohmann::json::parse(rep.json);
        CHECK(doc["steady_state"]["converged"].get<bool>());
        CHECK(doc["stability"]["stable"].get<bool>());
        CHECK(doc["criteria"]["reid_product"].get<double>() > 0.0);
        CHECK(doc["covariance"].size() == 4);
        const double p0 = doc["steady_state"]["p0"].get<double>();
        CHECK(p0 >= 0.0);
        CHECK(p0 <= 1.0);
    }
}

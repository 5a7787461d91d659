#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hisac/ao_driver.hpp"
#include "hisac/baseline.hpp"
#include "hisac/em_core.hpp"
#include "hisac/sinr.hpp"

namespace hisac {

/// Position as written in a scenario file: degrees and metres.
struct PointSpec {
    double theta_deg = 30.0;
    double psi_deg = 0.0;
    double range_m = 10.0;

    FarFieldPoint to_point() const { return FarFieldPoint::from_degrees(range_m, theta_deg, psi_deg); }
    bool operator==(const PointSpec&) const = default;
};

/// Reference link used to turn SNR levels into noise powers: 100 mA^2 into a
/// 0.25 m^2 aperture at 10 m. Fixed so that sweeping P_T or A_T keeps the noise.
inline constexpr double kReferencePower = 1e-4;  // A^2
inline constexpr double kReferenceArea = 0.25;   // m^2
inline constexpr double kReferenceRange = 10.0;  // m

struct NoiseConfig {
    /// Interference-free sensing SNR of the reference link, dB.
    double sensing_snr_db = 31.5;
    /// Interference-free single-user comm SNR of the reference link, dB.
    double comm_snr_db = 31.5;
    /// Physical overrides (sigma_r^2, sigma_c^2); when set they win over the SNR levels.
    std::optional<double> sigma_r_sq;
    std::optional<double> sigma_c_sq;

    bool operator==(const NoiseConfig&) const = default;
};

struct ScenarioConfig {
    double lx = 0.5;              // m
    double ly = 0.5;              // m
    double carrier_hz = 2.4e9;
    std::vector<PointSpec> users;
    std::vector<PointSpec> targets;
    double power_ma2 = 100.0;     // mA^2
    double gamma_c_db = 5.0;
    NoiseConfig noise;
    double eps1 = 0.01;
    double eps2 = 0.01;
    int max_iters = 20;
    double tol_sdp = 1e-7;
    std::uint64_t seed = 1;

    /// Users (30, 180), (30, 270), targets (30, 90), (30, 45), all at 10 m.
    static ScenarioConfig default_scenario();

    /// Throws InvalidArgument naming the first violated rule.
    void validate() const;

    ApertureSpec aperture() const;
    NoiseModel noise_model() const;
    double power() const { return power_ma2 * 1e-6; }  // A^2
    double gamma_c() const { return from_db(gamma_c_db); }
    AoOptions ao_options() const;
    std::vector<FarFieldPoint> user_points() const;
    std::vector<FarFieldPoint> target_points() const;

    bool operator==(const ScenarioConfig&) const = default;
};

/// JSON text of a config; load_scenario_text(to_text(c)) == c.
std::string scenario_to_text(const ScenarioConfig& config);
/// Parses and validates; missing keys take their defaults. A missing target
/// list is an error, a missing user list means no users.
ScenarioConfig load_scenario_text(const std::string& text);
ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioConfig& config, const std::filesystem::path& path);

/// Builds one array's design input. `label` is "his" or "discrete".
ArrayDesign design_input(const ScenarioConfig& config, const std::string& label);
/// Runs the joint optimisation for one array of the scenario.
ArrayDesign solve_design(const ScenarioConfig& config, const std::string& label);

enum class SweepVariable { power, aperture, gamma_c, delta_theta };

const char* to_string(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string& name);

/// Grid values are mA^2 (P_T), m^2 (A_T, kept square), dB (Gamma_c) or degrees
/// (delta_theta, applied to the first user's polar angle).
struct SweepSpec {
    SweepVariable variable = SweepVariable::power;
    std::vector<double> grid;
    bool baseline = false;

    /// Nonempty, finite and strictly monotone.
    void validate() const;
};

/// Config for one grid point; delta_theta leaves the config unchanged (the
/// perturbation is applied at evaluation time).
ScenarioConfig apply_sweep_value(const ScenarioConfig& base, SweepVariable variable, double value);

struct DesignSummary {
    bool ok = false;
    std::string error;
    double min_sense_sinr = 0.0;          // linear
    std::vector<double> sense_sinr;       // per target, linear
    std::vector<double> comm_sinr;        // per user, linear
    std::string status;
    int outer_iterations = 0;
    int sdp_calls = 0;
    std::vector<IterationRecord> trace;
};

struct PointResult {
    double value = 0.0;
    ScenarioConfig config;
    DesignSummary his;
    std::optional<DesignSummary> discrete;
    std::optional<GainReport> gain;

    bool ok() const { return his.ok && (!discrete || discrete->ok); }
};

struct PatternSet {
    double theta_deg = 30.0;
    std::vector<double> psi_deg;
    std::vector<double> tx_db;                   // HIS transmit cut
    std::vector<std::vector<double>> rx_db;      // HIS receive cut per target
    std::vector<double> discrete_tx_db;          // empty without a baseline
    std::vector<std::vector<double>> discrete_rx_db;
};

struct ReportBundle {
    ScenarioConfig base;
    std::optional<SweepSpec> sweep;   // empty for a single solve
    std::vector<PointResult> points;
    std::optional<PatternSet> patterns;

    bool ok() const;
};

struct RunOptions {
    /// 0 means std::thread::hardware_concurrency().
    unsigned threads = 0;
    std::size_t pattern_points = 720;
    double theta_cut_deg = 30.0;
};

/// One grid point per sweep value, in grid order. Failures are recorded per
/// point and do not stop the sweep.
ReportBundle run_sweep(const ScenarioConfig& config, const SweepSpec& sweep, const RunOptions& options = {});

/// Single solve of the config, with beampattern cuts (and the baseline when asked).
ReportBundle run_solve(const ScenarioConfig& config, bool baseline, const RunOptions& options = {});

/// Writes sweep.csv and summary.json, plus beampattern_tx.csv and
/// beampattern_rx_target{l}.csv when the bundle carries patterns. Returns the paths.
std::vector<std::filesystem::path> emit_reports(const ReportBundle& bundle, const std::filesystem::path& out_dir);

/// CSV header of sweep.csv for a scenario with the given user/target counts.
std::string sweep_csv_header(std::size_t users, std::size_t targets, bool baseline);

} // namespace hisac

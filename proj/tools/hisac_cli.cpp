// hisac: command-line front end for scenario solves, sweeps, beampattern cuts
// and the surface-noise Monte Carlo check.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hisac/em_core.hpp"
#include "hisac/scenario.hpp"

namespace {

struct Globals {
    std::string config;
    std::string out = "hisac-out";
    std::optional<std::uint64_t> seed;
    std::optional<double> eps1;
    std::optional<double> eps2;
    std::optional<double> tol_sdp;
    unsigned threads = 0;
};

hisac::ScenarioConfig load_config(const Globals& g)
{
    hisac::ScenarioConfig c = g.config.empty() ? hisac::ScenarioConfig::default_scenario() : hisac::load_scenario(g.config);
    if (g.seed) c.seed = *g.seed;
    if (g.eps1) c.eps1 = *g.eps1;
    if (g.eps2) c.eps2 = *g.eps2;
    if (g.tol_sdp) c.tol_sdp = *g.tol_sdp;
    c.validate();
    return c;
}

std::vector<double> parse_grid(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
            throw hisac::InvalidArgument("bad grid value '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

void print_point(const hisac::DesignSummary& s, const char* label)
{
    if (!s.ok) {
        std::printf("  %-8s failed: %s\n", label, s.error.c_str());
        return;
    }
    std::printf("  %-8s min sensing SINR %.3f dB, %d outer iterations, %d SDP solves (%s)\n", label,
                hisac::to_db(s.min_sense_sinr), s.outer_iterations, s.sdp_calls, s.status.c_str());
}

int finish(const hisac::ReportBundle& bundle, const Globals& g)
{
    for (const auto& p : bundle.points) {
        if (bundle.sweep) std::printf("%s = %g\n", hisac::to_string(bundle.sweep->variable), p.value);
        print_point(p.his, "his");
        if (p.discrete) print_point(*p.discrete, "discrete");
        if (p.gain) std::printf("  gain     sensing %.3f dB, tx peak %.3f dB\n", p.gain->sensing_db, p.gain->tx_peak_db);
    }
    const auto files = hisac::emit_reports(bundle, g.out);
    for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
    return bundle.ok() ? 0 : 1;
}

int noise_check(const hisac::ScenarioConfig& c, std::size_t samples, const Globals& g)
{
    const hisac::ApertureSpec ap = c.aperture();
    const hisac::WavenumberGrid grid = hisac::truncation_grid(ap);
    const hisac::NoiseModel nm = c.noise_model();
    const hisac::CMatrix cov = hisac::project_noise_samples(ap, grid, nm.sigma_r_sq, samples, c.seed);
    double off = 0.0, diag = 0.0;
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
        for (Eigen::Index j = 0; j < cov.cols(); ++j) {
            const double v = std::abs(cov(i, j)) / nm.sigma_r_sq;
            if (i == j) {
                diag = std::max(diag, std::abs(cov(i, i).real() / nm.sigma_r_sq - 1.0));
            } else {
                off = std::max(off, v);
            }
        }
    }
    std::printf("N = %zu, samples = %zu, seed = %llu\n", grid.size(), samples,
                static_cast<unsigned long long>(c.seed));
    std::printf("max |off-diagonal| / sigma_r^2 = %.5f\n", off);
    std::printf("max |diagonal / sigma_r^2 - 1| = %.5f\n", diag);
    std::filesystem::create_directories(g.out);
    const auto path = std::filesystem::path(g.out) / "noise_check.json";
    std::ofstream out(path, std::ios::binary);
    out << nlohmann::json{{"n", grid.size()},
                          {"samples", samples},
                          {"seed", c.seed},
                          {"sigma_r_sq", nm.sigma_r_sq},
                          {"max_offdiag_rel", off},
                          {"max_diag_dev_rel", diag}}
               .dump(2)
        << "\n";
    std::printf("wrote %s\n", path.string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Holographic-surface ISAC beamforming: solve, sweep, beampattern, noise-check"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "Scenario file (JSON); defaults to the built-in two-user two-target scenario");
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--eps1", g.eps1, "Bisection tolerance (linear SINR)");
    app.add_option("--eps2", g.eps2, "Outer-loop tolerance (linear SINR)");
    app.add_option("--tol-sdp", g.tol_sdp, "SDP solver tolerance");
    app.add_option("--threads", g.threads, "Worker threads for sweeps (0 = all cores)");

    auto* solve = app.add_subcommand("solve", "Optimise one scenario and write reports");
    bool solve_baseline = false;
    solve->add_flag("--baseline", solve_baseline, "Also run the half-wavelength discrete array");

    auto* sweep = app.add_subcommand("sweep", "Sweep one scenario parameter");
    std::string var;
    std::string grid_text;
    bool sweep_baseline = false;
    sweep->add_option("--var", var, "P_T (mA^2), A_T (m^2), Gamma_c (dB) or delta_theta (deg)")->required();
    sweep->add_option("--grid", grid_text, "Comma-separated, strictly monotone values")->required();
    sweep->add_flag("--baseline", sweep_baseline, "Also run the half-wavelength discrete array");

    auto* pattern = app.add_subcommand("beampattern", "Transmit and receive cuts of the optimised design");
    double theta_cut = 30.0;
    std::size_t points = 720;
    bool pattern_baseline = false;
    pattern->add_option("--theta-cut", theta_cut, "Polar angle of the azimuth cut (deg)")->capture_default_str();
    pattern->add_option("--points", points, "Azimuth samples over [0, 360)")->capture_default_str();
    pattern->add_flag("--baseline", pattern_baseline, "Include the discrete array's cuts");

    auto* noise = app.add_subcommand("noise-check", "Monte Carlo covariance of projected surface noise");
    std::size_t samples = 100000;
    noise->add_option("--samples", samples, "Monte Carlo samples")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        const hisac::ScenarioConfig config = load_config(g);
        hisac::RunOptions run;
        run.threads = g.threads;
        if (*solve) return finish(hisac::run_solve(config, solve_baseline, run), g);
        if (*sweep) {
            hisac::SweepSpec spec;
            spec.variable = hisac::parse_sweep_variable(var);
            spec.grid = parse_grid(grid_text);
            spec.baseline = sweep_baseline;
            return finish(hisac::run_sweep(config, spec, run), g);
        }
        if (*pattern) {
            if (points < 2) throw hisac::InvalidArgument("--points must be at least 2");
            run.theta_cut_deg = theta_cut;
            run.pattern_points = points;
            return finish(hisac::run_solve(config, pattern_baseline, run), g);
        }
        if (*noise) return noise_check(config, samples, g);
    } catch (const hisac::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

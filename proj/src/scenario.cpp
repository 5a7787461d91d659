#include "hisac/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hisac/log.hpp"

namespace hisac {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "hisac-scenario";
constexpr int kVersion = 1;

[[noreturn]] void field_error(const std::string& field, const std::string& what)
{
    throw InvalidArgument("scenario field '" + field + "': " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object()) field_error(where.empty() ? "<root>" : where, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!ok.count(it.key())) {
            field_error(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
        }
    }
}

double get_number(const json& obj, const char* key, const std::string& where, double fallback)
{
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number()) field_error(where.empty() ? key : where + "." + key, "expected a number");
    return it->get<double>();
}

PointSpec parse_point(const json& j, const std::string& where)
{
    check_keys(j, where, {"theta_deg", "psi_deg", "range_m"});
    PointSpec p;
    p.theta_deg = get_number(j, "theta_deg", where, p.theta_deg);
    p.psi_deg = get_number(j, "psi_deg", where, p.psi_deg);
    p.range_m = get_number(j, "range_m", where, p.range_m);
    return p;
}

std::vector<PointSpec> parse_points(const json& root, const char* key, bool required)
{
    const auto it = root.find(key);
    if (it == root.end()) {
        if (required) field_error(key, "missing (at least one entry is required)");
        return {};
    }
    if (!it->is_array()) field_error(key, "expected an array");
    std::vector<PointSpec> out;
    for (std::size_t i = 0; i < it->size(); ++i) {
        out.push_back(parse_point((*it)[i], std::string(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
}

json point_json(const PointSpec& p)
{
    return json{{"theta_deg", p.theta_deg}, {"psi_deg", p.psi_deg}, {"range_m", p.range_m}};
}

std::string line_of(const std::string& text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void check_point(const PointSpec& p, const std::string& where)
{
    if (!std::isfinite(p.theta_deg) || p.theta_deg < 0.0 || p.theta_deg >= 90.0) {
        field_error(where + ".theta_deg", "must lie in [0, 90)");
    }
    if (!std::isfinite(p.psi_deg)) field_error(where + ".psi_deg", "must be finite");
    if (!(p.range_m > 0.0) || !std::isfinite(p.range_m)) field_error(where + ".range_m", "must be positive");
}

void check_positive(double v, const char* field)
{
    if (!(v > 0.0) || !std::isfinite(v)) field_error(field, "must be positive and finite");
}

std::vector<FarFieldPoint> to_points(const std::vector<PointSpec>& specs)
{
    std::vector<FarFieldPoint> out;
    for (const auto& s : specs) out.push_back(s.to_point());
    return out;
}

ChannelSet channel_for(const ArrayDesign& d, const ScenarioConfig& config,
                       const std::vector<FarFieldPoint>& users, const std::vector<FarFieldPoint>& targets)
{
    const ApertureSpec ap = config.aperture();
    if (d.label == "his") return make_channel_set(ap, truncation_grid(ap), users, targets);
    return make_discrete_channel_set(DiscreteArraySpec::from_aperture(ap), users, targets);
}

DesignSummary summarize(const ArrayDesign& d)
{
    DesignSummary s;
    s.ok = true;
    const auto& bf = d.result.beamformers;
    const auto& ch = d.problem.channel;
    s.min_sense_sinr = min_sense_sinr(bf, ch, d.problem.noise);
    for (std::size_t l = 0; l < ch.num_targets(); ++l) {
        s.sense_sinr.push_back(sense_sinr(bf.W, bf.Q.col(static_cast<Eigen::Index>(l)), ch, d.problem.noise, l));
    }
    for (std::size_t k = 0; k < ch.num_users(); ++k) s.comm_sinr.push_back(comm_sinr(bf, ch, d.problem.noise, k));
    s.status = to_string(d.result.status);
    s.outer_iterations = static_cast<int>(d.result.trace.size());
    s.sdp_calls = d.result.total_sdp_calls();
    s.trace = d.result.trace;
    return s;
}

// Same design seen through a channel in which the first user sits delta degrees
// further from broadside.
ArrayDesign perturbed(const ArrayDesign& d, const ScenarioConfig& config, double delta_deg)
{
    if (delta_deg == 0.0 || config.users.empty()) return d;
    ScenarioConfig actual = config;
    actual.users[0].theta_deg += delta_deg;
    check_point(actual.users[0], "users[0] (perturbed)");
    ArrayDesign out = d;
    out.users = actual.user_points();
    out.problem.channel = channel_for(d, config, out.users, out.targets);
    return out;
}

DesignSummary failed(const std::string& what)
{
    DesignSummary s;
    s.ok = false;
    s.error = what;
    s.status = "failed";
    return s;
}

PointResult run_point(const ScenarioConfig& base, const SweepSpec& sweep, double value, const RunOptions& options)
{
    PointResult p;
    p.value = value;
    const double delta = sweep.variable == SweepVariable::delta_theta ? value : 0.0;
    std::optional<ArrayDesign> his, disc;
    try {
        p.config = apply_sweep_value(base, sweep.variable, value);
        his = perturbed(solve_design(p.config, "his"), p.config, delta);
        p.his = summarize(*his);
    } catch (const std::exception& e) {
        p.his = failed(e.what());
    }
    if (sweep.baseline) {
        try {
            disc = perturbed(solve_design(p.config, "discrete"), p.config, delta);
            p.discrete = summarize(*disc);
        } catch (const std::exception& e) {
            p.discrete = failed(e.what());
        }
        if (his && disc) {
            try {
                p.gain = compare_gain(*his, *disc, options.theta_cut_deg, options.pattern_points);
            } catch (const std::exception& e) {
                p.discrete->ok = false;
                p.discrete->error = e.what();
            }
        }
    }
    return p;
}

std::vector<double> cut_db(const std::vector<PatternSample>& samples)
{
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.power_db);
    return out;
}

void fill_patterns(const ArrayDesign& d, const CutSpec& cut, std::vector<double>& tx,
                   std::vector<std::vector<double>>& rx)
{
    tx = cut_db(transmit_cut(d.result.beamformers.W, d.model, cut));
    rx.clear();
    for (Eigen::Index l = 0; l < d.result.beamformers.Q.cols(); ++l) {
        rx.push_back(cut_db(receive_cut(d.result.beamformers.Q.col(l), d.model, cut)));
    }
}

} // namespace

ScenarioConfig ScenarioConfig::default_scenario()
{
    ScenarioConfig c;
    c.users = {{30.0, 180.0, 10.0}, {30.0, 270.0, 10.0}};
    c.targets = {{30.0, 90.0, 10.0}, {30.0, 45.0, 10.0}};
    return c;
}

void ScenarioConfig::validate() const
{
    check_positive(lx, "aperture.lx_m");
    check_positive(ly, "aperture.ly_m");
    check_positive(carrier_hz, "aperture.carrier_hz");
    if (targets.empty()) field_error("targets", "at least one target is required");
    for (std::size_t i = 0; i < users.size(); ++i) check_point(users[i], "users[" + std::to_string(i) + "]");
    for (std::size_t i = 0; i < targets.size(); ++i) check_point(targets[i], "targets[" + std::to_string(i) + "]");
    check_positive(power_ma2, "power_ma2");
    if (!std::isfinite(gamma_c_db)) field_error("gamma_c_db", "must be finite");
    if (!std::isfinite(noise.sensing_snr_db)) field_error("noise.sensing_snr_db", "must be finite");
    if (!std::isfinite(noise.comm_snr_db)) field_error("noise.comm_snr_db", "must be finite");
    if (noise.sigma_r_sq) check_positive(*noise.sigma_r_sq, "noise.sigma_r_sq");
    if (noise.sigma_c_sq) check_positive(*noise.sigma_c_sq, "noise.sigma_c_sq");
    check_positive(eps1, "solver.eps1");
    check_positive(eps2, "solver.eps2");
    if (max_iters < 1) field_error("solver.max_iters", "must be at least 1");
    check_positive(tol_sdp, "solver.tol_sdp");
}

ApertureSpec ScenarioConfig::aperture() const { return ApertureSpec::from_carrier(lx, ly, carrier_hz); }

NoiseModel ScenarioConfig::noise_model() const
{
    const ApertureSpec ap = aperture();
    const double e_ref = kReferenceArea / std::pow(4.0 * std::numbers::pi * kReferenceRange, 2);
    const double equiv = std::pow(ap.kappa * ap.z0, 2);
    const double sigma_R_sq = noise.sigma_r_sq ? *noise.sigma_r_sq / equiv
                                               : kReferencePower * e_ref * e_ref / from_db(noise.sensing_snr_db);
    const double sigma_c_equiv = noise.sigma_c_sq ? *noise.sigma_c_sq / equiv
                                                  : kReferencePower * e_ref / from_db(noise.comm_snr_db);
    return NoiseModel::equivalent(sigma_c_equiv, sigma_R_sq, ap);
}

AoOptions ScenarioConfig::ao_options() const
{
    AoOptions o;
    o.eps1 = eps1;
    o.eps2 = eps2;
    o.max_iters = max_iters;
    o.tx.sdp.tol = tol_sdp;
    return o;
}

std::vector<FarFieldPoint> ScenarioConfig::user_points() const { return to_points(users); }
std::vector<FarFieldPoint> ScenarioConfig::target_points() const { return to_points(targets); }

std::string scenario_to_text(const ScenarioConfig& c)
{
    json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["aperture"] = {{"lx_m", c.lx}, {"ly_m", c.ly}, {"carrier_hz", c.carrier_hz}};
    j["users"] = json::array();
    for (const auto& u : c.users) j["users"].push_back(point_json(u));
    j["targets"] = json::array();
    for (const auto& t : c.targets) j["targets"].push_back(point_json(t));
    j["power_ma2"] = c.power_ma2;
    j["gamma_c_db"] = c.gamma_c_db;
    json noise = {{"sensing_snr_db", c.noise.sensing_snr_db}, {"comm_snr_db", c.noise.comm_snr_db}};
    if (c.noise.sigma_r_sq) noise["sigma_r_sq"] = *c.noise.sigma_r_sq;
    if (c.noise.sigma_c_sq) noise["sigma_c_sq"] = *c.noise.sigma_c_sq;
    j["noise"] = noise;
    j["solver"] = {{"eps1", c.eps1}, {"eps2", c.eps2}, {"max_iters", c.max_iters}, {"tol_sdp", c.tol_sdp}};
    j["seed"] = c.seed;
    return j.dump(2) + "\n";
}

ScenarioConfig load_scenario_text(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument("scenario parse error at " + line_of(text, e.byte) + ": " + e.what());
    }
    check_keys(root, "",
               {"format", "version", "aperture", "users", "targets", "power_ma2", "gamma_c_db", "noise", "solver",
                "seed"});
    if (root.contains("format") && root["format"] != kFormat) field_error("format", "expected \"hisac-scenario\"");
    if (root.contains("version") && root["version"] != kVersion) field_error("version", "unsupported version");

    ScenarioConfig c;
    if (root.contains("aperture")) {
        const json& a = root["aperture"];
        check_keys(a, "aperture", {"lx_m", "ly_m", "carrier_hz"});
        c.lx = get_number(a, "lx_m", "aperture", c.lx);
        c.ly = get_number(a, "ly_m", "aperture", c.ly);
        c.carrier_hz = get_number(a, "carrier_hz", "aperture", c.carrier_hz);
    }
    c.users = parse_points(root, "users", false);
    c.targets = parse_points(root, "targets", true);
    c.power_ma2 = get_number(root, "power_ma2", "", c.power_ma2);
    c.gamma_c_db = get_number(root, "gamma_c_db", "", c.gamma_c_db);
    if (root.contains("noise")) {
        const json& n = root["noise"];
        check_keys(n, "noise", {"sensing_snr_db", "comm_snr_db", "sigma_r_sq", "sigma_c_sq"});
        c.noise.sensing_snr_db = get_number(n, "sensing_snr_db", "noise", c.noise.sensing_snr_db);
        c.noise.comm_snr_db = get_number(n, "comm_snr_db", "noise", c.noise.comm_snr_db);
        if (n.contains("sigma_r_sq")) c.noise.sigma_r_sq = get_number(n, "sigma_r_sq", "noise", 0.0);
        if (n.contains("sigma_c_sq")) c.noise.sigma_c_sq = get_number(n, "sigma_c_sq", "noise", 0.0);
    }
    if (root.contains("solver")) {
        const json& s = root["solver"];
        check_keys(s, "solver", {"eps1", "eps2", "max_iters", "tol_sdp"});
        c.eps1 = get_number(s, "eps1", "solver", c.eps1);
        c.eps2 = get_number(s, "eps2", "solver", c.eps2);
        if (s.contains("max_iters")) {
            if (!s["max_iters"].is_number_integer()) field_error("solver.max_iters", "expected an integer");
            c.max_iters = s["max_iters"].get<int>();
        }
        c.tol_sdp = get_number(s, "tol_sdp", "solver", c.tol_sdp);
    }
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned()) field_error("seed", "expected a nonnegative integer");
        c.seed = root["seed"].get<std::uint64_t>();
    }
    c.validate();
    return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open scenario file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return load_scenario_text(ss.str());
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(path.string() + ": " + e.what());
    }
}

void save_scenario(const ScenarioConfig& config, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << scenario_to_text(config);
    if (!out) throw Error("write failed for " + path.string());
}

ArrayDesign design_input(const ScenarioConfig& config, const std::string& label)
{
    config.validate();
    const ApertureSpec ap = config.aperture();
    ArrayDesign d;
    d.label = label;
    d.users = config.user_points();
    d.targets = config.target_points();
    if (label == "his") {
        const WavenumberGrid grid = truncation_grid(ap);
        d.problem.channel = make_channel_set(ap, grid, d.users, d.targets);
        d.model = his_channel_model(ap, grid);
    } else if (label == "discrete") {
        const DiscreteArraySpec spec = DiscreteArraySpec::from_aperture(ap);
        d.problem.channel = make_discrete_channel_set(spec, d.users, d.targets);
        d.model = discrete_channel_model(spec);
    } else {
        throw InvalidArgument("unknown array '" + label + "' (expected his or discrete)");
    }
    d.problem.noise = config.noise_model();
    d.problem.power = config.power();
    d.problem.gamma_c = config.gamma_c();
    return d;
}

ArrayDesign solve_design(const ScenarioConfig& config, const std::string& label)
{
    ArrayDesign d = design_input(config, label);
    d.result = optimize(d.problem, config.ao_options());
    return d;
}

const char* to_string(SweepVariable v)
{
    switch (v) {
    case SweepVariable::power: return "P_T";
    case SweepVariable::aperture: return "A_T";
    case SweepVariable::gamma_c: return "Gamma_c";
    case SweepVariable::delta_theta: return "delta_theta";
    }
    return "?";
}

SweepVariable parse_sweep_variable(const std::string& name)
{
    for (auto v : {SweepVariable::power, SweepVariable::aperture, SweepVariable::gamma_c, SweepVariable::delta_theta}) {
        if (name == to_string(v)) return v;
    }
    throw InvalidArgument("unknown sweep variable '" + name + "' (expected P_T, A_T, Gamma_c or delta_theta)");
}

void SweepSpec::validate() const
{
    if (grid.empty()) throw InvalidArgument("sweep grid is empty");
    for (double v : grid) {
        if (!std::isfinite(v)) throw InvalidArgument("sweep grid values must be finite");
    }
    if (grid.size() > 1) {
        const bool up = grid[1] > grid[0];
        for (std::size_t i = 1; i < grid.size(); ++i) {
            if (up ? !(grid[i] > grid[i - 1]) : !(grid[i] < grid[i - 1])) {
                throw InvalidArgument("sweep grid must be strictly monotone");
            }
        }
    }
    if (variable == SweepVariable::power || variable == SweepVariable::aperture) {
        for (double v : grid) {
            if (!(v > 0.0)) throw InvalidArgument(std::string(to_string(variable)) + " grid values must be positive");
        }
    }
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, SweepVariable variable, double value)
{
    ScenarioConfig c = base;
    switch (variable) {
    case SweepVariable::power:
        c.power_ma2 = value;
        break;
    case SweepVariable::aperture:
        c.lx = std::sqrt(value);
        c.ly = c.lx;
        break;
    case SweepVariable::gamma_c:
        c.gamma_c_db = value;
        break;
    case SweepVariable::delta_theta:
        if (c.users.empty()) throw InvalidArgument("delta_theta sweep needs at least one user");
        break;
    }
    c.validate();
    return c;
}

bool ReportBundle::ok() const
{
    return std::all_of(points.begin(), points.end(), [](const PointResult& p) { return p.ok(); });
}

ReportBundle run_sweep(const ScenarioConfig& config, const SweepSpec& sweep, const RunOptions& options)
{
    config.validate();
    sweep.validate();
    ReportBundle bundle;
    bundle.base = config;
    bundle.sweep = sweep;
    bundle.points.resize(sweep.grid.size());

    unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(sweep.grid.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t i = next++; i < sweep.grid.size(); i = next++) {
            bundle.points[i] = run_point(config, sweep, sweep.grid[i], options);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return bundle;
}

ReportBundle run_solve(const ScenarioConfig& config, bool baseline, const RunOptions& options)
{
    config.validate();
    ReportBundle bundle;
    bundle.base = config;
    PointResult p;
    p.config = config;
    p.value = 0.0;
    std::optional<ArrayDesign> his, disc;
    try {
        his = solve_design(config, "his");
        p.his = summarize(*his);
    } catch (const std::exception& e) {
        p.his = failed(e.what());
    }
    if (baseline) {
        try {
            disc = solve_design(config, "discrete");
            p.discrete = summarize(*disc);
        } catch (const std::exception& e) {
            p.discrete = failed(e.what());
        }
        if (his && disc) p.gain = compare_gain(*his, *disc, options.theta_cut_deg, options.pattern_points);
    }
    if (his) {
        CutSpec cut;
        cut.theta_deg = options.theta_cut_deg;
        cut.psi_deg = azimuth_sweep(options.pattern_points);
        cut.range = config.targets.front().range_m;
        PatternSet ps;
        ps.theta_deg = cut.theta_deg;
        ps.psi_deg = cut.psi_deg;
        fill_patterns(*his, cut, ps.tx_db, ps.rx_db);
        if (disc) fill_patterns(*disc, cut, ps.discrete_tx_db, ps.discrete_rx_db);
        bundle.patterns = std::move(ps);
    }
    bundle.points.push_back(std::move(p));
    return bundle;
}

} // namespace hisac

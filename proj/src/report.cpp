#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hisac/scenario.hpp"

namespace hisac {

using nlohmann::json;

namespace {

constexpr const char* kReportFormat = "hisac-report";
constexpr int kReportVersion = 1;
constexpr const char* kGeneratorVersion = "0.1.0";

std::string num(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string db(double linear) { return num(to_db(linear)); }

json db_json(double linear)
{
    if (!(linear > 0.0)) return nullptr;
    return to_db(linear);
}

std::string csv_quoted(const std::string& s)
{
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += (ch == '\n' || ch == '\r') ? ' ' : ch;
    }
    return out + "\"";
}

void append_design_header(std::ostringstream& os, const char* prefix, std::size_t users, std::size_t targets)
{
    os << ',' << prefix << "_ok," << prefix << "_min_sense_db";
    for (std::size_t l = 0; l < targets; ++l) os << ',' << prefix << "_sense_db_" << l;
    for (std::size_t k = 0; k < users; ++k) os << ',' << prefix << "_comm_db_" << k;
    os << ',' << prefix << "_iterations," << prefix << "_sdp_calls";
}

void append_design_row(std::ostringstream& os, const DesignSummary& s, std::size_t users, std::size_t targets)
{
    os << ',' << (s.ok ? 1 : 0);
    if (!s.ok) {
        for (std::size_t i = 0; i < 3 + users + targets; ++i) os << ',';
        return;
    }
    os << ',' << db(s.min_sense_sinr);
    for (double v : s.sense_sinr) os << ',' << db(v);
    for (double v : s.comm_sinr) os << ',' << db(v);
    os << ',' << s.outer_iterations << ',' << s.sdp_calls;
}

json trace_json(const std::vector<IterationRecord>& trace)
{
    json out = json::array();
    for (const auto& r : trace) {
        out.push_back({{"iter", r.iter},
                       {"gamma_r_star", r.gamma_r_star},
                       {"gamma_transmit", r.gamma_transmit},
                       {"min_comm_sinr", r.min_comm_sinr},
                       {"bracket_start", r.bracket_start},
                       {"bracket_end", r.bracket_end},
                       {"bracket_calls", r.bracket_calls},
                       {"bisection_calls", r.bisection_calls},
                       {"reverted", r.reverted}});
    }
    return out;
}

json summary_json(const DesignSummary& s)
{
    json j;
    j["ok"] = s.ok;
    j["status"] = s.status;
    if (!s.ok) {
        j["error"] = s.error;
        return j;
    }
    j["min_sense_sinr"] = s.min_sense_sinr;
    j["min_sense_sinr_db"] = db_json(s.min_sense_sinr);
    j["sense_sinr"] = s.sense_sinr;
    j["comm_sinr"] = s.comm_sinr;
    json sdb = json::array(), cdb = json::array();
    for (double v : s.sense_sinr) sdb.push_back(db_json(v));
    for (double v : s.comm_sinr) cdb.push_back(db_json(v));
    j["sense_sinr_db"] = sdb;
    j["comm_sinr_db"] = cdb;
    j["outer_iterations"] = s.outer_iterations;
    j["sdp_calls"] = s.sdp_calls;
    j["trace"] = trace_json(s.trace);
    return j;
}

json gain_json(const GainReport& g)
{
    return {{"sensing_db", g.sensing_db},
            {"comm_margin_db", g.comm_margin_db},
            {"tx_peak_db", g.tx_peak_db},
            {"rx_peak_db", g.rx_peak_db}};
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    out.close();
    if (!out) throw Error("write failed for " + path.string());
}

std::string pattern_csv(const std::vector<double>& psi, const std::vector<double>& his,
                        const std::vector<double>& discrete)
{
    std::ostringstream os;
    os << "psi_deg,power_db";
    if (!discrete.empty()) os << ",discrete_power_db";
    os << '\n';
    for (std::size_t i = 0; i < psi.size(); ++i) {
        os << num(psi[i]) << ',' << num(his[i]);
        if (!discrete.empty()) os << ',' << num(discrete[i]);
        os << '\n';
    }
    return os.str();
}

bool has_baseline(const ReportBundle& b)
{
    if (b.sweep) return b.sweep->baseline;
    return !b.points.empty() && b.points.front().discrete.has_value();
}

} // namespace

std::string sweep_csv_header(std::size_t users, std::size_t targets, bool baseline)
{
    std::ostringstream os;
    os << "value";
    append_design_header(os, "his", users, targets);
    if (baseline) {
        append_design_header(os, "discrete", users, targets);
        os << ",gain_sense_db";
        for (std::size_t k = 0; k < users; ++k) os << ",gain_comm_db_" << k;
        os << ",gain_tx_peak_db";
        for (std::size_t l = 0; l < targets; ++l) os << ",gain_rx_peak_db_" << l;
    }
    os << ",error";
    return os.str();
}

std::vector<std::filesystem::path> emit_reports(const ReportBundle& bundle, const std::filesystem::path& out_dir)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create " + out_dir.string() + ": " + ec.message());

    const std::size_t users = bundle.base.users.size();
    const std::size_t targets = bundle.base.targets.size();
    const bool baseline = has_baseline(bundle);
    std::vector<std::filesystem::path> written;

    std::ostringstream csv;
    csv << sweep_csv_header(users, targets, baseline) << '\n';
    for (const auto& p : bundle.points) {
        csv << num(p.value);
        append_design_row(csv, p.his, users, targets);
        std::string error = p.his.error;
        if (baseline) {
            append_design_row(csv, p.discrete ? *p.discrete : DesignSummary{}, users, targets);
            if (p.gain) {
                csv << ',' << num(p.gain->sensing_db);
                for (double v : p.gain->comm_margin_db) csv << ',' << num(v);
                csv << ',' << num(p.gain->tx_peak_db);
                for (double v : p.gain->rx_peak_db) csv << ',' << num(v);
            } else {
                for (std::size_t i = 0; i < 2 + users + targets; ++i) csv << ',';
            }
            if (p.discrete && !p.discrete->ok) {
                error += (error.empty() ? "" : "; ") + std::string("discrete: ") + p.discrete->error;
            }
        }
        csv << ',' << (error.empty() ? "" : csv_quoted(error)) << '\n';
    }
    written.push_back(out_dir / "sweep.csv");
    write_file(written.back(), csv.str());

    json summary;
    summary["format"] = kReportFormat;
    summary["version"] = kReportVersion;
    summary["generator"] = {{"name", "hisac"}, {"version", kGeneratorVersion}};
    summary["scenario"] = json::parse(scenario_to_text(bundle.base));
    if (bundle.sweep) {
        summary["sweep"] = {{"variable", to_string(bundle.sweep->variable)},
                            {"grid", bundle.sweep->grid},
                            {"baseline", bundle.sweep->baseline}};
    } else {
        summary["sweep"] = nullptr;
    }
    summary["ok"] = bundle.ok();
    json points = json::array();
    for (const auto& p : bundle.points) {
        json pj;
        pj["value"] = p.value;
        pj["config"] = json::parse(scenario_to_text(p.config));
        pj["his"] = summary_json(p.his);
        if (p.discrete) pj["discrete"] = summary_json(*p.discrete);
        if (p.gain) pj["gain"] = gain_json(*p.gain);
        points.push_back(std::move(pj));
    }
    summary["points"] = std::move(points);

    if (bundle.patterns) {
        const PatternSet& ps = *bundle.patterns;
        written.push_back(out_dir / "beampattern_tx.csv");
        write_file(written.back(), pattern_csv(ps.psi_deg, ps.tx_db, ps.discrete_tx_db));
        for (std::size_t l = 0; l < ps.rx_db.size(); ++l) {
            written.push_back(out_dir / ("beampattern_rx_target" + std::to_string(l) + ".csv"));
            const std::vector<double> none;
            write_file(written.back(),
                       pattern_csv(ps.psi_deg, ps.rx_db[l], l < ps.discrete_rx_db.size() ? ps.discrete_rx_db[l] : none));
        }
        summary["beampattern_theta_deg"] = ps.theta_deg;
    }
    json files = json::array();
    for (const auto& f : written) files.push_back(f.filename().string());
    files.push_back("summary.json");
    summary["files"] = files;
    written.push_back(out_dir / "summary.json");
    write_file(written.back(), summary.dump(2) + "\n");
    return written;
}

} // namespace hisac

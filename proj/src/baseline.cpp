#include "hisac/baseline.hpp"

#include <cmath>
#include <numbers>

namespace hisac {

namespace {

bool same_point(const FarFieldPoint& a, const FarFieldPoint& b)
{
    return a.r == b.r && a.theta == b.theta && a.psi == b.psi;
}

bool same_points(const std::vector<FarFieldPoint>& a, const std::vector<FarFieldPoint>& b)
{
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!same_point(a[i], b[i])) return false;
    }
    return true;
}

void check_same_scenario(const ArrayDesign& a, const ArrayDesign& b)
{
    const bool ok = same_points(a.users, b.users) && same_points(a.targets, b.targets) &&
                    a.problem.power == b.problem.power && a.problem.gamma_c == b.problem.gamma_c &&
                    a.problem.noise.sigma_c_equiv == b.problem.noise.sigma_c_equiv &&
                    a.problem.noise.sigma_R_sq == b.problem.noise.sigma_R_sq;
    if (!ok) {
        throw InvalidArgument("designs '" + a.label + "' and '" + b.label + "' come from different scenarios");
    }
}

double cut_range(const ArrayDesign& d)
{
    return d.targets.empty() ? 10.0 : d.targets.front().r;
}

} // namespace

DiscreteArraySpec DiscreteArraySpec::from_aperture(const ApertureSpec& aperture)
{
    DiscreteArraySpec s;
    s.dx = std::max(1, static_cast<int>(std::lround(2.0 * aperture.lx / aperture.lambda)));
    s.dy = std::max(1, static_cast<int>(std::lround(2.0 * aperture.ly / aperture.lambda)));
    s.spacing_x = aperture.lx / s.dx;
    s.spacing_y = aperture.ly / s.dy;
    s.area = aperture.area;
    s.e_a = aperture.area / (std::numbers::pi * s.size());
    s.kappa = aperture.kappa;
    return s;
}

CVector discrete_channel_vector(const DiscreteArraySpec& spec, const FarFieldPoint& point)
{
    CVector h(spec.size());
    const double st = std::sin(point.theta);
    const double cx = st * std::cos(point.psi);
    const double cy = st * std::sin(point.psi);
    const cplx common = std::polar(std::sqrt(spec.e_a) / (4.0 * std::numbers::pi * point.r), spec.kappa * point.r);
    for (int i = 0; i < spec.dx; ++i) {
        const double x = (i - 0.5 * (spec.dx - 1)) * spec.spacing_x;
        for (int j = 0; j < spec.dy; ++j) {
            const double y = (j - 0.5 * (spec.dy - 1)) * spec.spacing_y;
            h(i * spec.dy + j) = common * std::polar(1.0, -spec.kappa * (x * cx + y * cy));
        }
    }
    return h;
}

ChannelModel discrete_channel_model(const DiscreteArraySpec& spec)
{
    return [spec](const FarFieldPoint& p) { return discrete_channel_vector(spec, p); };
}

ChannelSet make_discrete_channel_set(const DiscreteArraySpec& spec, const std::vector<FarFieldPoint>& users,
                                     const std::vector<FarFieldPoint>& targets)
{
    std::vector<CVector> f, g;
    for (const auto& p : users) f.push_back(discrete_channel_vector(spec, p));
    for (const auto& p : targets) g.push_back(discrete_channel_vector(spec, p));
    return ChannelSet::from_vectors(std::move(f), std::move(g));
}

GainReport compare_gain(const ArrayDesign& his, const ArrayDesign& other, double theta_cut_deg,
                        std::size_t cut_points)
{
    check_same_scenario(his, other);
    GainReport report;
    report.sensing_db = to_db(his.result.gamma_r_star) - to_db(other.result.gamma_r_star);
    for (std::size_t k = 0; k < his.users.size(); ++k) {
        const double a = comm_sinr(his.result.beamformers, his.problem.channel, his.problem.noise, k);
        const double b = comm_sinr(other.result.beamformers, other.problem.channel, other.problem.noise, k);
        report.comm_margin_db.push_back(to_db(a) - to_db(b));
    }
    CutSpec cut;
    cut.theta_deg = theta_cut_deg;
    cut.psi_deg = azimuth_sweep(cut_points);
    cut.range = cut_range(his);
    const double tx_a = pattern_peak(transmit_cut(his.result.beamformers.W, his.model, cut));
    const double tx_b = pattern_peak(transmit_cut(other.result.beamformers.W, other.model, cut));
    report.tx_peak_db = to_db(tx_a) - to_db(tx_b);
    for (std::size_t l = 0; l < his.targets.size(); ++l) {
        const auto e = static_cast<Eigen::Index>(l);
        const double ra = pattern_peak(receive_cut(his.result.beamformers.Q.col(e), his.model, cut));
        const double rb = pattern_peak(receive_cut(other.result.beamformers.Q.col(e), other.model, cut));
        report.rx_peak_db.push_back(to_db(ra) - to_db(rb));
    }
    return report;
}

} // namespace hisac

#include "hisac/sinr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hisac {

namespace {

double equivalence_factor(const ApertureSpec& aperture)
{
    const double kz = aperture.kappa * aperture.z0;
    return kz * kz;
}

void check_user(const ChannelSet& channel, std::size_t k)
{
    if (k >= channel.num_users()) {
        throw InvalidArgument("user index " + std::to_string(k) + " out of range");
    }
}

void check_target(const ChannelSet& channel, std::size_t l)
{
    if (l >= channel.num_targets()) {
        throw InvalidArgument("target index " + std::to_string(l) + " out of range");
    }
}

void check_filter(const CVector& q)
{
    if (std::abs(q.norm() - 1.0) > 1e-9) {
        throw InvalidArgument("receive filter must have unit norm");
    }
}

double ratio(double signal, double interference, double noise)
{
    const double denom = interference + noise;
    if (!(denom > 0.0)) {
        throw InvalidArgument("SINR denominator is not positive; check the noise model");
    }
    return std::max(signal, 0.0) / denom;
}

double quad(const CVector& v, const CMatrix& R)
{
    return (v.adjoint() * R * v)(0).real();
}

} // namespace

NoiseModel NoiseModel::physical(double sigma_c_sq, double sigma_r_sq, const ApertureSpec& aperture)
{
    if (sigma_c_sq < 0.0 || sigma_r_sq < 0.0) {
        throw InvalidArgument("noise powers must be nonnegative");
    }
    const double f = equivalence_factor(aperture);
    return NoiseModel{sigma_c_sq, sigma_r_sq, sigma_c_sq / f, sigma_r_sq / f};
}

NoiseModel NoiseModel::equivalent(double sigma_c_equiv, double sigma_R_sq, const ApertureSpec& aperture)
{
    if (sigma_c_equiv < 0.0 || sigma_R_sq < 0.0) {
        throw InvalidArgument("noise powers must be nonnegative");
    }
    const double f = equivalence_factor(aperture);
    return NoiseModel{sigma_c_equiv * f, sigma_R_sq * f, sigma_c_equiv, sigma_R_sq};
}

CovariancePack CovariancePack::from_beamformers(const CMatrix& W, std::size_t num_users)
{
    if (static_cast<Eigen::Index>(num_users) > W.cols()) {
        throw InvalidArgument("more users than beamformer columns");
    }
    CovariancePack pack;
    pack.total = W * W.adjoint();
    pack.per_user.reserve(num_users);
    for (std::size_t k = 0; k < num_users; ++k) {
        const auto w = W.col(static_cast<Eigen::Index>(k));
        pack.per_user.emplace_back(w * w.adjoint());
    }
    return pack;
}

double CovariancePack::residual_min_eigenvalue() const
{
    CMatrix residual = total;
    for (const auto& r : per_user) residual -= r;
    const CMatrix sym = 0.5 * (residual + residual.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(sym, Eigen::EigenvaluesOnly);
    return eig.eigenvalues()(0);
}

double comm_sinr(const CovariancePack& pack, const ChannelSet& channel, const NoiseModel& noise,
                 std::size_t k)
{
    check_user(channel, k);
    if (pack.num_users() != channel.num_users()) {
        throw InvalidArgument("covariance pack and channel disagree on the number of users");
    }
    const CVector& f = channel.user_vectors[k];
    const double signal = quad(f, pack.per_user[k]);
    const double total = quad(f, pack.total);
    return ratio(signal, std::max(total - signal, 0.0), noise.sigma_c_equiv);
}

double comm_sinr(const BeamformerSet& bf, const ChannelSet& channel, const NoiseModel& noise,
                 std::size_t k)
{
    check_user(channel, k);
    if (bf.num_users != channel.num_users()) {
        throw InvalidArgument("beamformer set and channel disagree on the number of users");
    }
    const CVector& f = channel.user_vectors[k];
    const CVector proj = bf.W.adjoint() * f;
    const double signal = std::norm(proj(static_cast<Eigen::Index>(k)));
    double interference = 0.0;
    for (Eigen::Index j = 0; j < proj.size(); ++j) {
        if (j != static_cast<Eigen::Index>(k)) interference += std::norm(proj(j));
    }
    return ratio(signal, interference, noise.sigma_c_equiv);
}

double sense_sinr(const CovariancePack& pack, const CVector& q, const ChannelSet& channel,
                  const NoiseModel& noise, std::size_t l)
{
    check_target(channel, l);
    check_filter(q);
    double signal = 0.0;
    double interference = 0.0;
    for (std::size_t m = 0; m < channel.num_targets(); ++m) {
        const CVector& g = channel.target_vectors[m];
        const double term = std::norm(q.dot(g)) * quad(g, pack.total);
        (m == l ? signal : interference) += term;
    }
    return ratio(signal, interference, noise.sigma_R_sq);
}

double sense_sinr(const CMatrix& W, const CVector& q, const ChannelSet& channel,
                  const NoiseModel& noise, std::size_t l)
{
    check_target(channel, l);
    check_filter(q);
    double signal = 0.0;
    double interference = 0.0;
    for (std::size_t m = 0; m < channel.num_targets(); ++m) {
        // q^H G_m W = (q^H g_m) g_m^H W
        const CVector& g = channel.target_vectors[m];
        const double term = (q.dot(g) * (W.adjoint() * g).adjoint()).squaredNorm();
        (m == l ? signal : interference) += term;
    }
    return ratio(signal, interference, noise.sigma_R_sq);
}

double min_sense_sinr(const BeamformerSet& bf, const ChannelSet& channel, const NoiseModel& noise)
{
    if (channel.num_targets() == 0) {
        throw InvalidArgument("no targets to evaluate");
    }
    if (static_cast<std::size_t>(bf.Q.cols()) != channel.num_targets()) {
        throw InvalidArgument("one receive filter per target is required");
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < channel.num_targets(); ++l) {
        best = std::min(best, sense_sinr(bf.W, bf.Q.col(static_cast<Eigen::Index>(l)), channel, noise, l));
    }
    return best;
}

ChannelModel his_channel_model(const ApertureSpec& aperture, const WavenumberGrid& grid)
{
    return [aperture, grid](const FarFieldPoint& p) { return channel_vector(aperture, grid, p); };
}

std::vector<double> azimuth_sweep(std::size_t points)
{
    if (points < 2) {
        throw InvalidArgument("an azimuth sweep needs at least two points");
    }
    std::vector<double> psi(points);
    for (std::size_t i = 0; i < points; ++i) {
        psi[i] = 360.0 * static_cast<double>(i) / static_cast<double>(points);
    }
    return psi;
}

namespace {

template <typename PowerFn>
std::vector<PatternSample> run_cut(const CutSpec& cut, PowerFn power)
{
    if (cut.psi_deg.size() < 2) {
        throw InvalidArgument("a beampattern cut needs at least two azimuth samples");
    }
    std::vector<PatternSample> out;
    out.reserve(cut.psi_deg.size());
    double peak = 0.0;
    for (double psi : cut.psi_deg) {
        const auto p = FarFieldPoint::from_degrees(cut.range, cut.theta_deg, psi);
        PatternSample s;
        s.psi_deg = psi;
        s.power = power(p);
        peak = std::max(peak, s.power);
        out.push_back(s);
    }
    double ref = 1.0;
    switch (cut.normalization) {
    case PatternNormalization::none: ref = 1.0; break;
    case PatternNormalization::peak: ref = peak; break;
    case PatternNormalization::reference:
        if (!(cut.reference_power > 0.0)) {
            throw InvalidArgument("reference normalization needs a positive reference power");
        }
        ref = cut.reference_power;
        break;
    }
    if (!(peak > 0.0) || !(ref > 0.0)) {
        for (auto& s : out) s.power_db = kPatternFloorDb;
        return out;
    }
    const double floor_db = to_db(peak / ref) + kPatternFloorDb;
    for (auto& s : out) {
        s.power_db = s.power > 0.0 ? std::max(to_db(s.power / ref), floor_db) : floor_db;
    }
    return out;
}

} // namespace

std::vector<PatternSample> transmit_cut(const CMatrix& W, const ChannelModel& model, const CutSpec& cut)
{
    return run_cut(cut, [&](const FarFieldPoint& p) {
        const CVector f = model(p);
        return (f.adjoint() * W).squaredNorm();
    });
}

std::vector<PatternSample> receive_cut(const CVector& q, const ChannelModel& model, const CutSpec& cut)
{
    return run_cut(cut, [&](const FarFieldPoint& p) { return std::norm(q.dot(model(p))); });
}

double pattern_peak(const std::vector<PatternSample>& samples)
{
    double peak = 0.0;
    for (const auto& s : samples) peak = std::max(peak, s.power);
    return peak;
}

} // namespace hisac

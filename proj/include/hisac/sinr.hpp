#pragma once

#include <functional>
#include <vector>

#include "hisac/em_core.hpp"
#include "hisac/types.hpp"

namespace hisac {

/// Physical noise powers together with their equivalent (current-domain) values.
struct NoiseModel {
    double sigma_c_sq = 0.0;      // user noise power
    double sigma_r_sq = 0.0;      // receive-surface noise power
    double sigma_c_equiv = 0.0;   // sigma_c_sq / (kappa^2 Z0^2)
    double sigma_R_sq = 0.0;      // sigma_r_sq / (kappa^2 Z0^2)

    /// From physical powers; the equivalents follow from kappa and Z0 of the aperture.
    static NoiseModel physical(double sigma_c_sq, double sigma_r_sq, const ApertureSpec& aperture);
    /// From equivalent powers, back-computing the physical ones.
    static NoiseModel equivalent(double sigma_c_equiv, double sigma_R_sq, const ApertureSpec& aperture);
};

/// Transmit matrix W = [W_c | W_r] and receive filters Q = [q_1 .. q_M].
struct BeamformerSet {
    CMatrix W;
    CMatrix Q;
    std::size_t num_users = 0;

    auto comm_block() const { return W.leftCols(static_cast<Eigen::Index>(num_users)); }
    auto sensing_block() const { return W.rightCols(W.cols() - static_cast<Eigen::Index>(num_users)); }
    double transmit_power() const { return W.squaredNorm(); }
};

/// Total covariance R and per-user covariances R_k.
struct CovariancePack {
    CMatrix total;
    std::vector<CMatrix> per_user;

    std::size_t num_users() const { return per_user.size(); }
    /// R = W W^H and R_k = w_k w_k^H for the first `num_users` columns.
    static CovariancePack from_beamformers(const CMatrix& W, std::size_t num_users);
    /// Smallest eigenvalue of R - sum R_k.
    double residual_min_eigenvalue() const;
};

double comm_sinr(const CovariancePack& pack, const ChannelSet& channel, const NoiseModel& noise,
                 std::size_t k);
double comm_sinr(const BeamformerSet& bf, const ChannelSet& channel, const NoiseModel& noise,
                 std::size_t k);

/// Sensing SINR for target l with receive filter q (unit norm within 1e-9).
double sense_sinr(const CovariancePack& pack, const CVector& q, const ChannelSet& channel,
                  const NoiseModel& noise, std::size_t l);
double sense_sinr(const CMatrix& W, const CVector& q, const ChannelSet& channel,
                  const NoiseModel& noise, std::size_t l);

/// Minimum over targets of sense_sinr with the filters in bf.Q.
double min_sense_sinr(const BeamformerSet& bf, const ChannelSet& channel, const NoiseModel& noise);

/// Channel vector as a function of position; lets cuts run on any array model.
using ChannelModel = std::function<CVector(const FarFieldPoint&)>;

ChannelModel his_channel_model(const ApertureSpec& aperture, const WavenumberGrid& grid);

enum class PatternNormalization { none, peak, reference };

struct PatternSample {
    double psi_deg = 0.0;
    double power = 0.0;     // linear
    double power_db = 0.0;  // after normalization and flooring
};

inline constexpr double kPatternFloorDb = -120.0;

struct CutSpec {
    double theta_deg = 30.0;
    std::vector<double> psi_deg;
    double range = 10.0;
    PatternNormalization normalization = PatternNormalization::none;
    double reference_power = 0.0;   // linear; used by PatternNormalization::reference
};

/// Uniform azimuth sweep over [0, 360) degrees.
std::vector<double> azimuth_sweep(std::size_t points);

/// ||f(theta, psi)^H W||^2 along the cut.
std::vector<PatternSample> transmit_cut(const CMatrix& W, const ChannelModel& model, const CutSpec& cut);
/// |q^H g(theta, psi)|^2 along the cut.
std::vector<PatternSample> receive_cut(const CVector& q, const ChannelModel& model, const CutSpec& cut);

double pattern_peak(const std::vector<PatternSample>& samples);

} // namespace hisac

#pragma once

#include <optional>
#include <vector>

#include "hisac/conic.hpp"
#include "hisac/em_core.hpp"
#include "hisac/sinr.hpp"

namespace hisac {

struct TxOptions {
    SdpOptions sdp;
    /// Solve in the span of the user and target channels (exact, much smaller).
    bool compress = true;
    /// Gamma_c-sized bracket steps before switching to halving/doubling.
    int max_walk = 24;
};

/// Feasibility subproblem at a fixed sensing level. Its variables are Y, Y_1..Y_K
/// with R = power * basis * Y * basis^H, tr(Y) <= 1, and the sensing rows are
/// divided by sigma_R^2 so that t = slack_scale * t_sdp.
struct Subproblem {
    SdpProblem sdp;
    CMatrix basis;
    double power = 0.0;
    double slack_scale = 1.0;
    std::size_t num_users = 0;
};

Subproblem build_subproblem(double gamma_r, const ChannelSet& channel, const CMatrix& Q,
                            const NoiseModel& noise, double power, double gamma_c,
                            const TxOptions& options = {});

/// Maps the SDP blocks back to full-dimension covariances.
CovariancePack expand_solution(const Subproblem& sub, const SdpSolution& sol);

struct IndicatorResult {
    double t = 0.0;             // physical slack
    double t_normalized = 0.0;  // t / sigma_R^2, compared against the solver tolerance
    bool feasible = false;
    CovariancePack pack;
    int iterations = 0;
};

IndicatorResult evaluate_indicator(double gamma_r, const ChannelSet& channel, const CMatrix& Q,
                                   const NoiseModel& noise, double power, double gamma_c,
                                   const TxOptions& options = {});

double indicator_t(double gamma_r, const ChannelSet& channel, const CMatrix& Q, const NoiseModel& noise,
                   double power, double gamma_c, const TxOptions& options = {});

struct ProbeRecord {
    double gamma_r = 0.0;
    double t = 0.0;
    bool feasible = false;
    int iterations = 0;
};

struct BisectionBracket {
    double gamma_start = 0.0;
    double gamma_end = 0.0;
    std::vector<ProbeRecord> history;
    bool used_fallback = false;
    /// Covariances from the feasible solve at gamma_start, when one was made.
    std::optional<CovariancePack> start_pack;

    int sdp_calls() const { return static_cast<int>(history.size()); }
};

/// Raised when a probe fails; carries every probe made so far.
class ProbeFailure : public SolverFailure {
public:
    ProbeFailure(const std::string& what, std::vector<ProbeRecord> history)
        : SolverFailure(what), history_(std::move(history)) {}
    const std::vector<ProbeRecord>& history() const { return history_; }

private:
    std::vector<ProbeRecord> history_;
};

/// Sensing SINR that the weakest target would reach with all power and no
/// interference: power * min_l ||g_l||^4 / sigma_R^2.
double interference_free_bound(const ChannelSet& channel, const NoiseModel& noise, double power);

/// Plain bracket [0, interference_free_bound]; no solves.
BisectionBracket plain_bracket(const ChannelSet& channel, const NoiseModel& noise, double power);

/// Adaptive bracket of width gamma_c starting from bound - K * gamma_c.
BisectionBracket abs_bracket(const ChannelSet& channel, const CMatrix& Q, const NoiseModel& noise,
                             double power, double gamma_c, const TxOptions& options = {});

/// Same stepping rule from an explicit start (used by later outer iterations).
BisectionBracket abs_bracket_from(double gamma_start, const ChannelSet& channel, const CMatrix& Q,
                                  const NoiseModel& noise, double power, double gamma_c,
                                  const TxOptions& options = {});

struct BisectionResult {
    CovariancePack pack;
    double gamma_r_star = 0.0;
    std::vector<ProbeRecord> history;  // bisection probes only

    int sdp_calls() const { return static_cast<int>(history.size()); }
};

BisectionResult bisect_transmit(const BisectionBracket& bracket, const ChannelSet& channel, const CMatrix& Q,
                                const NoiseModel& noise, double power, double gamma_c, double eps1,
                                const TxOptions& options = {});

/// Rank-one communication beamformers w_k = R_k f_k / sqrt(f_k^H R_k f_k).
CMatrix extract_rank_one(const CovariancePack& pack, const ChannelSet& channel);

/// Factor of R - W_c W_c^H with one column per significant eigenvalue.
CMatrix factor_sensing_cov(const CovariancePack& pack, const CMatrix& comm_beams);

/// [W_c | W_r] from a covariance pack.
CMatrix reconstruct_beamformers(const CovariancePack& pack, const ChannelSet& channel);

} // namespace hisac

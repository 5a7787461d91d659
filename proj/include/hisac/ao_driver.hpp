#pragma once

#include <vector>

#include "hisac/em_core.hpp"
#include "hisac/sinr.hpp"
#include "hisac/tx_beamform.hpp"

namespace hisac {

/// Everything the joint design needs: channels, noise, power budget (A^2) and
/// the linear communication threshold.
struct IsacProblem {
    ChannelSet channel;
    NoiseModel noise;
    double power = 0.0;
    double gamma_c = 1.0;
};

struct AoOptions {
    double eps1 = 0.01;
    double eps2 = 0.01;
    int max_iters = 20;
    /// false: bisect every round from the plain interference-free bracket.
    bool adaptive_bracket = true;
    TxOptions tx;
};

struct IterationRecord {
    int iter = 0;
    double gamma_r_star = 0.0;     // min sensing SINR after the receive update
    double gamma_transmit = 0.0;   // min sensing SINR with the previous filters
    double min_comm_sinr = 0.0;
    double bracket_start = 0.0;
    double bracket_end = 0.0;
    int bracket_calls = 0;
    int bisection_calls = 0;
    double wall_seconds = 0.0;
    bool reverted = false;

    int sdp_calls() const { return bracket_calls + bisection_calls; }
};

enum class AoStatus { converged, max_iter };

const char* to_string(AoStatus status);

struct OptimizationResult {
    BeamformerSet beamformers;
    CovariancePack covariances;
    double gamma_r_star = 0.0;
    std::vector<IterationRecord> trace;
    AoStatus status = AoStatus::max_iter;

    int total_sdp_calls() const;
};

/// Alternates transmit design (bracket, bisection, reconstruction) with
/// per-target receive filters until the min sensing SINR settles within eps2.
OptimizationResult optimize(const IsacProblem& problem, const AoOptions& options = {});

} // namespace hisac

#include "hisac/ao_driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "hisac/rx_beamform.hpp"

namespace hisac {

namespace {

double min_comm(const BeamformerSet& bf, const IsacProblem& p)
{
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < p.channel.num_users(); ++k) {
        worst = std::min(worst, comm_sinr(bf, p.channel, p.noise, k));
    }
    return worst;
}

} // namespace

const char* to_string(AoStatus status)
{
    return status == AoStatus::converged ? "converged" : "max_iter";
}

int OptimizationResult::total_sdp_calls() const
{
    int total = 0;
    for (const auto& r : trace) total += r.sdp_calls();
    return total;
}

OptimizationResult optimize(const IsacProblem& problem, const AoOptions& options)
{
    if (problem.channel.num_targets() == 0) throw InvalidArgument("at least one target is required");
    if (!(options.eps1 > 0.0) || !(options.eps2 > 0.0)) throw InvalidArgument("tolerances must be positive");
    if (options.max_iters < 1) throw InvalidArgument("max_iters must be at least 1");

    const auto& ch = problem.channel;
    OptimizationResult result;
    CMatrix q = matched_filters(ch);
    double previous = 0.0;

    for (int iter = 1; iter <= options.max_iters; ++iter) {
        const auto t0 = std::chrono::steady_clock::now();
        IterationRecord rec;
        rec.iter = iter;

        BisectionBracket bracket;
        if (!options.adaptive_bracket) {
            bracket = plain_bracket(ch, problem.noise, problem.power);
        } else if (iter == 1) {
            bracket = abs_bracket(ch, q, problem.noise, problem.power, problem.gamma_c, options.tx);
        } else {
            bracket = abs_bracket_from(previous, ch, q, problem.noise, problem.power, problem.gamma_c, options.tx);
        }
        const BisectionResult bis = bisect_transmit(bracket, ch, q, problem.noise, problem.power, problem.gamma_c,
                                                    options.eps1, options.tx);
        rec.bracket_start = bracket.gamma_start;
        rec.bracket_end = bracket.gamma_end;
        rec.bracket_calls = bracket.sdp_calls();
        rec.bisection_calls = bis.sdp_calls();

        BeamformerSet bf;
        bf.W = reconstruct_beamformers(bis.pack, ch);
        bf.num_users = ch.num_users();
        bf.Q = q;
        rec.gamma_transmit = min_sense_sinr(bf, ch, problem.noise);
        bf.Q = receive_filters(bf.W, ch, problem.noise);
        const double current = min_sense_sinr(bf, ch, problem.noise);
        // the first round compares against the transmit-only value
        const double reference = iter == 1 ? rec.gamma_transmit : previous;

        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (iter > 1 && current < previous) {
            // keep the better previous design rather than accept a descent step
            rec.gamma_r_star = previous;
            rec.min_comm_sinr = result.trace.back().min_comm_sinr;
            rec.reverted = true;
            result.trace.push_back(rec);
            result.status = AoStatus::converged;
            return result;
        }
        rec.gamma_r_star = current;
        rec.min_comm_sinr = ch.num_users() > 0 ? min_comm(bf, problem) : 0.0;
        result.trace.push_back(rec);
        result.beamformers = std::move(bf);
        result.covariances = bis.pack;
        result.gamma_r_star = current;
        q = result.beamformers.Q;

        if (std::abs(current - reference) < options.eps2) {
            result.status = AoStatus::converged;
            return result;
        }
        previous = current;
    }
    result.status = AoStatus::max_iter;
    return result;
}

} // namespace hisac

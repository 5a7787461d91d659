#include "hisac/tx_beamform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hisac/log.hpp"

namespace hisac {

namespace {

// A solve that ran out of iterations this close to optimality is still usable.
constexpr double kNearOptimal = 1e-5;

CMatrix channel_basis(const ChannelSet& channel)
{
    const auto n = static_cast<Eigen::Index>(channel.dimension());
    const auto k = static_cast<Eigen::Index>(channel.num_users());
    const auto m = static_cast<Eigen::Index>(channel.num_targets());
    CMatrix stacked(n, k + m);
    for (Eigen::Index i = 0; i < m; ++i) stacked.col(i) = channel.target_vectors[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i < k; ++i) stacked.col(m + i) = channel.user_vectors[static_cast<std::size_t>(i)];
    Eigen::JacobiSVD<CMatrix> svd(stacked, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > 1e-10 * s(0)) ++rank;
    return svd.matrixU().leftCols(rank);
}

void check_inputs(double gamma_r, const ChannelSet& channel, const CMatrix& Q, const NoiseModel& noise,
                  double power, double gamma_c)
{
    if (!(gamma_r > 0.0) || !std::isfinite(gamma_r)) throw InvalidArgument("sensing level must be positive");
    if (!(gamma_c > 0.0) || !std::isfinite(gamma_c)) throw InvalidArgument("communication threshold must be positive");
    if (!(power > 0.0)) throw InvalidArgument("power budget must be positive");
    if (channel.num_targets() == 0) throw InvalidArgument("at least one target is required");
    if (static_cast<std::size_t>(Q.cols()) != channel.num_targets() ||
        static_cast<std::size_t>(Q.rows()) != channel.dimension()) {
        throw InvalidArgument("receive filters do not match the channel set");
    }
    for (Eigen::Index l = 0; l < Q.cols(); ++l) {
        if (std::abs(Q.col(l).norm() - 1.0) > 1e-9) throw InvalidArgument("receive filters must have unit norm");
    }
    if (!(noise.sigma_R_sq > 0.0)) throw InvalidArgument("sensing noise power must be positive");
    if (channel.num_users() > 0 && !(noise.sigma_c_equiv > 0.0)) {
        throw InvalidArgument("user noise power must be positive");
    }
}

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

} // namespace

Subproblem build_subproblem(double gamma_r, const ChannelSet& channel, const CMatrix& Q,
                            const NoiseModel& noise, double power, double gamma_c, const TxOptions& options)
{
    check_inputs(gamma_r, channel, Q, noise, power, gamma_c);
    Subproblem sub;
    sub.power = power;
    sub.slack_scale = noise.sigma_R_sq;
    sub.num_users = channel.num_users();
    const auto n = static_cast<Eigen::Index>(channel.dimension());
    sub.basis = options.compress ? channel_basis(channel) : CMatrix::Identity(n, n);
    const auto d = static_cast<int>(sub.basis.cols());

    const std::size_t users = channel.num_users();
    const std::size_t targets = channel.num_targets();
    std::vector<CVector> gb, fb;
    for (const auto& g : channel.target_vectors) gb.emplace_back(sub.basis.adjoint() * g);
    for (const auto& f : channel.user_vectors) fb.emplace_back(sub.basis.adjoint() * f);

    auto& sdp = sub.sdp;
    sdp.block_dims.assign(users + 1, d);
    sdp.slack_objective = 1.0;

    const double sense_scale = power / noise.sigma_R_sq;
    for (std::size_t l = 0; l < targets; ++l) {
        const CVector q = Q.col(static_cast<Eigen::Index>(l));
        // (1/Gamma) U_ll - sum_{m != l} U_lm, written without the cancelling pair
        CMatrix coeff = CMatrix::Zero(d, d);
        for (std::size_t m = 0; m < targets; ++m) {
            const double w = std::norm(q.dot(channel.target_vectors[m]));
            const double s = (m == l) ? 1.0 / gamma_r : -1.0;
            coeff += (s * w) * (gb[m] * gb[m].adjoint());
        }
        LinearConstraint row;
        row.terms.push_back({0, hermitian_part(sense_scale * coeff)});
        row.slack_coeff = -1.0;
        row.sense = ConstraintSense::greater_equal;
        row.rhs = 1.0;
        row.label = "sense " + std::to_string(l);
        sdp.constraints.push_back(std::move(row));
    }
    const double comm_scale = users > 0 ? power / noise.sigma_c_equiv : 0.0;
    for (std::size_t k = 0; k < users; ++k) {
        const CMatrix fk = comm_scale * (fb[k] * fb[k].adjoint());
        LinearConstraint row;
        row.terms.push_back({k + 1, hermitian_part((1.0 + 1.0 / gamma_c) * fk)});
        row.terms.push_back({0, hermitian_part(-fk)});
        row.sense = ConstraintSense::greater_equal;
        row.rhs = 1.0;
        row.label = "user " + std::to_string(k);
        sdp.constraints.push_back(std::move(row));
    }
    if (users > 0) {
        PsdCoupling coupling;
        coupling.terms.push_back({0, 1.0});
        for (std::size_t k = 0; k < users; ++k) coupling.terms.push_back({k + 1, -1.0});
        coupling.label = "R - sum R_k";
        sdp.couplings.push_back(std::move(coupling));
    }
    sdp.budgets.push_back({{0}, 1.0});
    return sub;
}

CovariancePack expand_solution(const Subproblem& sub, const SdpSolution& sol)
{
    if (sol.blocks.size() != sub.num_users + 1) {
        throw InvalidArgument("solution does not match the subproblem");
    }
    auto lift = [&](const CMatrix& y) {
        return hermitian_part(sub.power * (sub.basis * y * sub.basis.adjoint()));
    };
    CovariancePack pack;
    pack.total = lift(sol.blocks[0]);
    for (std::size_t k = 0; k < sub.num_users; ++k) pack.per_user.push_back(lift(sol.blocks[k + 1]));
    return pack;
}

IndicatorResult evaluate_indicator(double gamma_r, const ChannelSet& channel, const CMatrix& Q,
                                   const NoiseModel& noise, double power, double gamma_c,
                                   const TxOptions& options)
{
    const Subproblem sub = build_subproblem(gamma_r, channel, Q, noise, power, gamma_c, options);
    const SdpSolution sol = solve_sdp(sub.sdp, options.sdp);
    std::ostringstream where;
    where << "sensing level " << gamma_r;
    switch (sol.status) {
    case SdpStatus::optimal:
        break;
    case SdpStatus::infeasible:
        throw InfeasibleScenario("communication constraints cannot all be met at threshold " +
                                 std::to_string(gamma_c) + " with the given power budget");
    case SdpStatus::unbounded:
        throw SolverFailure("transmit subproblem reported unbounded at " + where.str());
    case SdpStatus::max_iter:
    case SdpStatus::stalled:
        if (std::max({sol.primal_residual, sol.dual_residual, sol.gap}) > kNearOptimal) {
            throw SolverFailure(std::string("transmit subproblem ") + to_string(sol.status) + " at " +
                                where.str());
        }
        break;
    }
    IndicatorResult r;
    r.t_normalized = sol.t;
    r.t = sol.t * sub.slack_scale;
    r.feasible = sol.t >= -options.sdp.tol;
    r.pack = expand_solution(sub, sol);
    r.iterations = sol.iterations;
    return r;
}

double indicator_t(double gamma_r, const ChannelSet& channel, const CMatrix& Q, const NoiseModel& noise,
                   double power, double gamma_c, const TxOptions& options)
{
    return evaluate_indicator(gamma_r, channel, Q, noise, power, gamma_c, options).t;
}

double interference_free_bound(const ChannelSet& channel, const NoiseModel& noise, double power)
{
    if (channel.num_targets() == 0) throw InvalidArgument("at least one target is required");
    if (!(noise.sigma_R_sq > 0.0)) throw InvalidArgument("sensing noise power must be positive");
    double weakest = std::numeric_limits<double>::infinity();
    for (const auto& g : channel.target_vectors) weakest = std::min(weakest, g.squaredNorm());
    return power * weakest * weakest / noise.sigma_R_sq;
}

BisectionBracket plain_bracket(const ChannelSet& channel, const NoiseModel& noise, double power)
{
    BisectionBracket b;
    b.gamma_start = 0.0;
    b.gamma_end = interference_free_bound(channel, noise, power);
    return b;
}

namespace {

class Prober {
public:
    Prober(const ChannelSet& channel, const CMatrix& Q, const NoiseModel& noise, double power, double gamma_c,
           const TxOptions& options, std::vector<ProbeRecord>& history)
        : channel_(channel), q_(Q), noise_(noise), power_(power), gamma_c_(gamma_c), options_(options),
          history_(history) {}

    IndicatorResult operator()(double gamma_r)
    {
        IndicatorResult r;
        try {
            r = evaluate_indicator(gamma_r, channel_, q_, noise_, power_, gamma_c_, options_);
        } catch (const ProbeFailure&) {
            throw;
        } catch (const SolverFailure& e) {
            throw ProbeFailure(e.what(), history_);
        }
        history_.push_back({gamma_r, r.t, r.feasible, r.iterations});
        return r;
    }

private:
    const ChannelSet& channel_;
    const CMatrix& q_;
    const NoiseModel& noise_;
    double power_;
    double gamma_c_;
    const TxOptions& options_;
    std::vector<ProbeRecord>& history_;
};

} // namespace

BisectionBracket abs_bracket_from(double gamma_start, const ChannelSet& channel, const CMatrix& Q,
                                  const NoiseModel& noise, double power, double gamma_c, const TxOptions& options)
{
    if (!(gamma_c > 0.0)) throw InvalidArgument("communication threshold must be positive");
    if (!(gamma_start > 0.0)) {
        warn("adaptive bracket start is not positive; falling back to the plain bracket");
        BisectionBracket b = plain_bracket(channel, noise, power);
        b.used_fallback = true;
        return b;
    }
    BisectionBracket b;
    Prober probe(channel, Q, noise, power, gamma_c, options, b.history);
    const double step = gamma_c;

    IndicatorResult first = probe(gamma_start);
    if (first.feasible) {
        double lo = gamma_start;
        CovariancePack lo_pack = std::move(first.pack);
        for (int walk = 0; walk < options.max_walk; ++walk) {
            const double hi = lo + step;
            IndicatorResult r = probe(hi);
            if (!r.feasible) {
                b.gamma_start = lo;
                b.gamma_end = hi;
                b.start_pack = std::move(lo_pack);
                return b;
            }
            lo = hi;
            lo_pack = std::move(r.pack);
        }
        // still feasible after the walk: double the stride until the level fails
        double stride = 2.0 * step;
        double hi = lo + stride;
        for (;;) {
            IndicatorResult r = probe(hi);
            if (!r.feasible) break;
            lo = hi;
            lo_pack = std::move(r.pack);
            stride *= 2.0;
            hi = lo + stride;
        }
        while (hi - lo > step) {
            const double mid = 0.5 * (lo + hi);
            IndicatorResult r = probe(mid);
            if (r.feasible) {
                lo = mid;
                lo_pack = std::move(r.pack);
            } else {
                hi = mid;
            }
        }
        b.gamma_start = lo;
        b.gamma_end = lo + step;
        b.start_pack = std::move(lo_pack);
        return b;
    }

    double hi = gamma_start;
    for (int walk = 0; walk < options.max_walk; ++walk) {
        const double lo = hi - step;
        if (!(lo > 0.0)) {
            b.gamma_start = 0.0;
            b.gamma_end = hi;
            return b;
        }
        IndicatorResult r = probe(lo);
        if (r.feasible) {
            b.gamma_start = lo;
            b.gamma_end = hi;
            b.start_pack = std::move(r.pack);
            return b;
        }
        hi = lo;
    }
    // still infeasible after the walk: halve the level until it becomes feasible
    double lo = 0.0;
    std::optional<CovariancePack> lo_pack;
    for (double trial = 0.5 * hi; trial > step; trial *= 0.5) {
        IndicatorResult r = probe(trial);
        if (r.feasible) {
            lo = trial;
            lo_pack = std::move(r.pack);
            break;
        }
        hi = trial;
    }
    while (hi - lo > step) {
        const double mid = 0.5 * (lo + hi);
        IndicatorResult r = probe(mid);
        if (r.feasible) {
            lo = mid;
            lo_pack = std::move(r.pack);
        } else {
            hi = mid;
        }
    }
    b.gamma_start = lo;
    b.gamma_end = lo_pack ? lo + step : hi;
    b.start_pack = std::move(lo_pack);
    return b;
}

BisectionBracket abs_bracket(const ChannelSet& channel, const CMatrix& Q, const NoiseModel& noise,
                             double power, double gamma_c, const TxOptions& options)
{
    const double start = interference_free_bound(channel, noise, power) -
                         static_cast<double>(channel.num_users()) * gamma_c;
    return abs_bracket_from(start, channel, Q, noise, power, gamma_c, options);
}

BisectionResult bisect_transmit(const BisectionBracket& bracket, const ChannelSet& channel, const CMatrix& Q,
                                const NoiseModel& noise, double power, double gamma_c, double eps1,
                                const TxOptions& options)
{
    if (!(eps1 > 0.0)) throw InvalidArgument("bisection tolerance must be positive");
    if (!(bracket.gamma_start >= 0.0) || !(bracket.gamma_end >= bracket.gamma_start)) {
        throw InvalidArgument("invalid bisection bracket");
    }
    BisectionResult res;
    Prober probe(channel, Q, noise, power, gamma_c, options, res.history);
    double lo = bracket.gamma_start;
    double hi = bracket.gamma_end;
    std::optional<CovariancePack> pack = bracket.start_pack;
    while (hi - lo > eps1) {
        const double mid = 0.5 * (lo + hi);
        IndicatorResult r = probe(mid);
        if (r.feasible) {
            lo = mid;
            pack = std::move(r.pack);
        } else {
            hi = mid;
        }
    }
    if (!pack) {
        // nothing feasible was probed: take the covariances at the lower end itself
        const double level = lo > 0.0 ? lo : std::max(1e-6 * hi, std::numeric_limits<double>::min());
        pack = probe(level).pack;
    }
    res.gamma_r_star = lo;
    res.pack = std::move(*pack);
    return res;
}

CMatrix extract_rank_one(const CovariancePack& pack, const ChannelSet& channel)
{
    if (pack.num_users() != channel.num_users()) {
        throw InvalidArgument("covariance pack and channel disagree on the number of users");
    }
    const auto n = static_cast<Eigen::Index>(channel.dimension());
    CMatrix wc(n, static_cast<Eigen::Index>(channel.num_users()));
    const double scale = std::max(pack.total.trace().real(), 0.0);
    for (std::size_t k = 0; k < channel.num_users(); ++k) {
        const CVector& f = channel.user_vectors[k];
        const CVector rf = pack.per_user[k] * f;
        const double gain = f.dot(rf).real();
        if (!(gain > 1e-14 * scale * f.squaredNorm())) {
            throw DegenerateUser(k, "user " + std::to_string(k) + " receives no signal power from its covariance");
        }
        wc.col(static_cast<Eigen::Index>(k)) = rf / std::sqrt(gain);
    }
    return wc;
}

CMatrix factor_sensing_cov(const CovariancePack& pack, const CMatrix& comm_beams)
{
    const CMatrix residual = hermitian_part(pack.total - comm_beams * comm_beams.adjoint());
    const double trace = pack.total.trace().real();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(residual);
    const RVector& ev = eig.eigenvalues();
    if (ev.size() > 0 && ev(0) < -1e-8 * trace) {
        std::ostringstream os;
        os << "sensing residual is indefinite (min eigenvalue " << ev(0) << ", trace " << trace << ")";
        throw SolverFailure(os.str());
    }
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = ev.size() - 1; i >= 0; --i) {
        if (ev(i) > 1e-12 * trace) keep.push_back(i);
    }
    CMatrix wr(residual.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        wr.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(keep[c]) * std::sqrt(ev(keep[c]));
    }
    return wr;
}

CMatrix reconstruct_beamformers(const CovariancePack& pack, const ChannelSet& channel)
{
    const CMatrix wc = extract_rank_one(pack, channel);
    const CMatrix wr = factor_sensing_cov(pack, wc);
    CMatrix w(wc.rows(), wc.cols() + wr.cols());
    w << wc, wr;
    return w;
}

} // namespace hisac

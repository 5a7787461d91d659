#include "hisac/rx_beamform.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace hisac {

namespace {

void check(const CMatrix& W, const ChannelSet& channel, const NoiseModel& noise, std::size_t l)
{
    if (l >= channel.num_targets()) {
        throw InvalidArgument("target index " + std::to_string(l) + " out of range");
    }
    if (static_cast<std::size_t>(W.rows()) != channel.dimension()) {
        throw InvalidArgument("beamformer rows do not match the channel dimension");
    }
    if (!(noise.sigma_R_sq > 0.0)) {
        throw InvalidArgument("sensing noise power must be positive");
    }
}

// Returns the per-target transmit gains g_m^H W W^H g_m.
RVector target_gains(const CMatrix& W, const ChannelSet& channel)
{
    RVector p(static_cast<Eigen::Index>(channel.num_targets()));
    for (std::size_t m = 0; m < channel.num_targets(); ++m) {
        p(static_cast<Eigen::Index>(m)) = (W.adjoint() * channel.target_vectors[m]).squaredNorm();
    }
    return p;
}

// Interference-plus-noise matrix, divided by sigma_R^2.
CMatrix scaled_interference(const RVector& gains, const ChannelSet& channel, const NoiseModel& noise, std::size_t l)
{
    const auto n = static_cast<Eigen::Index>(channel.dimension());
    CMatrix c = CMatrix::Identity(n, n);
    for (std::size_t m = 0; m < channel.num_targets(); ++m) {
        if (m == l) continue;
        const CVector& g = channel.target_vectors[m];
        c += (gains(static_cast<Eigen::Index>(m)) / noise.sigma_R_sq) * (g * g.adjoint());
    }
    return 0.5 * (c + c.adjoint());
}

// Own-target gain at roundoff level relative to ||W||^2 ||g_l||^2.
bool no_power(double own, const CMatrix& W, const ChannelSet& channel, std::size_t l)
{
    return !(own > 1e-24 * W.squaredNorm() * channel.target_vectors[l].squaredNorm());
}

ReceiveFilter degenerate_filter(const ChannelSet& channel, std::size_t l)
{
    const CVector& g = channel.target_vectors[l];
    ReceiveFilter r;
    r.q = canonical_phase(g / g.norm());
    r.sinr = 0.0;
    r.degenerate = true;
    return r;
}

} // namespace

CVector canonical_phase(const CVector& v)
{
    if (v.size() == 0) return v;
    Eigen::Index idx = 0;
    v.cwiseAbs().maxCoeff(&idx);
    const cplx a = v(idx);
    if (std::abs(a) == 0.0) return v;
    return v * (std::abs(a) / a);
}

ReceiveFilter receive_filter(const CMatrix& W, const ChannelSet& channel, const NoiseModel& noise, std::size_t l)
{
    check(W, channel, noise, l);
    const RVector gains = target_gains(W, channel);
    const double own = gains(static_cast<Eigen::Index>(l));
    if (no_power(own, W, channel, l)) {
        return degenerate_filter(channel, l);
    }
    const CVector& g = channel.target_vectors[l];
    const CMatrix c = scaled_interference(gains, channel, noise, l);
    const CMatrix b = (own / noise.sigma_R_sq) * (g * g.adjoint());
    Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> ges(b, c, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (ges.info() != Eigen::Success) {
        throw SolverFailure("generalized eigensolve failed for target " + std::to_string(l));
    }
    const Eigen::Index top = ges.eigenvalues().size() - 1;
    ReceiveFilter r;
    const CVector v = ges.eigenvectors().col(top);
    r.q = canonical_phase(v / v.norm());
    r.sinr = ges.eigenvalues()(top);
    return r;
}

ReceiveFilter receive_filter_closed_form(const CMatrix& W, const ChannelSet& channel, const NoiseModel& noise,
                                         std::size_t l)
{
    check(W, channel, noise, l);
    const RVector gains = target_gains(W, channel);
    const double own = gains(static_cast<Eigen::Index>(l));
    if (no_power(own, W, channel, l)) {
        return degenerate_filter(channel, l);
    }
    const CVector& g = channel.target_vectors[l];
    const CMatrix c = scaled_interference(gains, channel, noise, l);
    Eigen::LLT<CMatrix> llt(c);
    if (llt.info() != Eigen::Success) {
        throw SolverFailure("interference-plus-noise matrix is not positive definite");
    }
    const CVector cg = llt.solve(g);
    ReceiveFilter r;
    r.q = canonical_phase(cg / cg.norm());
    r.sinr = (own / noise.sigma_R_sq) * g.dot(cg).real();
    return r;
}

CMatrix receive_filters(const CMatrix& W, const ChannelSet& channel, const NoiseModel& noise)
{
    const auto n = static_cast<Eigen::Index>(channel.dimension());
    CMatrix q(n, static_cast<Eigen::Index>(channel.num_targets()));
    for (std::size_t l = 0; l < channel.num_targets(); ++l) {
        q.col(static_cast<Eigen::Index>(l)) = receive_filter(W, channel, noise, l).q;
    }
    return q;
}

CMatrix matched_filters(const ChannelSet& channel)
{
    const auto n = static_cast<Eigen::Index>(channel.dimension());
    CMatrix q(n, static_cast<Eigen::Index>(channel.num_targets()));
    for (std::size_t l = 0; l < channel.num_targets(); ++l) {
        const CVector& g = channel.target_vectors[l];
        const double norm = g.norm();
        if (!(norm > 0.0)) throw InvalidArgument("target " + std::to_string(l) + " has a zero channel");
        q.col(static_cast<Eigen::Index>(l)) = g / norm;
    }
    return q;
}

} // namespace hisac

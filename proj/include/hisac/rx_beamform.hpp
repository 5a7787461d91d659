#pragma once

#include "hisac/em_core.hpp"
#include "hisac/sinr.hpp"

namespace hisac {

struct ReceiveFilter {
    CVector q;          // unit norm, largest-magnitude entry real and nonnegative
    double sinr = 0.0;  // linear
    bool degenerate = false;  // no transmit power reaches target l
};

/// Principal generalized eigenvector of (B, C) with B = G_l W W^H G_l^H and
/// C = sum_m G_m W W^H G_m^H - B + sigma_R^2 I.
ReceiveFilter receive_filter(const CMatrix& W, const ChannelSet& channel, const NoiseModel& noise, std::size_t l);

/// Rank-one closed form q ~ C^{-1} g_l, sinr = (g_l^H W W^H g_l) g_l^H C^{-1} g_l.
ReceiveFilter receive_filter_closed_form(const CMatrix& W, const ChannelSet& channel, const NoiseModel& noise,
                                         std::size_t l);

/// One filter per target, as the columns of Q.
CMatrix receive_filters(const CMatrix& W, const ChannelSet& channel, const NoiseModel& noise);

/// Matched filters g_l / ||g_l||.
CMatrix matched_filters(const ChannelSet& channel);

/// Rotates v so that its largest-magnitude entry is real and nonnegative.
CVector canonical_phase(const CVector& v);

} // namespace hisac

#pragma once

#include <vector>

#include "hisac/conic.hpp"

namespace hisac::detail {

/// One symmetric coefficient of a constraint row on a PSD block.
struct BlockCoeff {
    int block = 0;
    RMatrix mat;
};

/// Real standard form
///   min  sum <C_b, X_b> + c_lp' x_lp + c_free' x_free
///   s.t. sum <A_ib, X_b> + A_lp(i,:) x_lp + A_free(i,:) x_free = b_i
///        X_b PSD, x_lp >= 0, x_free free.
struct RealSdp {
    std::vector<int> psd_dims;
    int lp_dim = 0;
    int free_dim = 0;
    std::vector<RMatrix> c_psd;
    RVector c_lp;
    RVector c_free;
    std::vector<std::vector<BlockCoeff>> rows;
    RMatrix a_lp;    // m x lp_dim
    RMatrix a_free;  // m x free_dim
    RVector b;

    int num_rows() const { return static_cast<int>(rows.size()); }
};

struct RealSdpResult {
    std::vector<RMatrix> x_psd;
    RVector x_lp;
    RVector x_free;
    RVector y;
    std::vector<RMatrix> z_psd;
    RVector z_lp;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    int iterations = 0;
    SdpStatus status = SdpStatus::max_iter;
};

/// Infeasible-start primal-dual interior-point method with the HKM direction and
/// Mehrotra predictor-corrector steps.
RealSdpResult solve_real_sdp(const RealSdp& problem, const SdpOptions& options);

} // namespace hisac::detail

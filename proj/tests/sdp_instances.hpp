#pragma once

// Random SDP instances shared by the solver tests and the acceptance suite.

#include <random>

#include "hisac/conic.hpp"
#include "oracles.hpp"

namespace sdp_instances {

using hisac::CMatrix;
using hisac::cplx;
using hisac::ConstraintSense;
using hisac::SdpProblem;

inline CMatrix random_hermitian(std::mt19937_64& rng, int n)
{
    std::normal_distribution<double> normal;
    CMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = cplx(normal(rng), normal(rng));
    return 0.5 * (a + a.adjoint());
}

inline CMatrix random_psd(std::mt19937_64& rng, int n, int rank)
{
    std::normal_distribution<double> normal;
    CMatrix v(n, rank);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < rank; ++j) v(i, j) = cplx(normal(rng), normal(rng));
    return v * v.adjoint() / static_cast<double>(n);
}

inline SdpProblem to_problem(const oracle::TraceLmi& p)
{
    SdpProblem prob;
    const int n = static_cast<int>(p.c.rows());
    prob.block_dims = {n};
    prob.objective = {{0, p.c}};
    for (std::size_t i = 0; i < p.a.size(); ++i) {
        prob.constraints.push_back({{{0, p.a[i]}}, 0.0, ConstraintSense::greater_equal, p.b[i], "row"});
    }
    prob.budgets.push_back({{0}, p.budget});
    return prob;
}

inline oracle::TraceLmi random_instance(std::mt19937_64& rng, int n, int m)
{
    oracle::TraceLmi p;
    p.c = random_hermitian(rng, n);
    p.budget = 1.0 + static_cast<double>(rng() % 3);
    const CMatrix x0 = CMatrix::Identity(n, n) * (p.budget / (2.0 * n));
    std::uniform_real_distribution<double> slack(0.05, 0.3);
    double min_slack = 1.0;
    for (int i = 0; i < m; ++i) {
        const CMatrix a = random_psd(rng, n, 1 + static_cast<int>(rng() % 2)) - 0.2 * CMatrix::Identity(n, n);
        const double s = slack(rng);
        p.a.push_back(a);
        p.b.push_back((a * x0).trace().real() - s);
        min_slack = std::min(min_slack, s);
    }
    const double upper = p.budget * std::max(0.0, oracle::lambda_max(p.c)) - (p.c * x0).trace().real();
    p.y_max = upper / min_slack + 1.0;
    return p;
}

} // namespace sdp_instances

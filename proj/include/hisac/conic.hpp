#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hisac/types.hpp"

namespace hisac {

/// tr(coeff * X[block]) with a Hermitian coefficient.
struct TraceTerm {
    std::size_t block = 0;
    CMatrix coeff;
};

enum class ConstraintSense { greater_equal, less_equal, equal };

/// sum_j tr(A_j X_j) + slack_coeff * t  (sense)  rhs
struct LinearConstraint {
    std::vector<TraceTerm> terms;
    double slack_coeff = 0.0;
    ConstraintSense sense = ConstraintSense::greater_equal;
    double rhs = 0.0;
    std::string label;
};

/// sum_j weight_j X_j must be PSD; all referenced blocks share one dimension.
struct PsdCoupling {
    std::vector<std::pair<std::size_t, double>> terms;
    std::string label;
};

/// sum over `blocks` of tr(X_j) <= bound.
struct TraceBudget {
    std::vector<std::size_t> blocks;
    double bound = 0.0;
};

/// Maximise  sum tr(C_j X_j) + slack_objective * t  over Hermitian PSD blocks X_j
/// and one free scalar t, subject to linear trace constraints, PSD couplings and
/// trace budgets.
struct SdpProblem {
    std::vector<int> block_dims;
    std::vector<TraceTerm> objective;
    double slack_objective = 0.0;
    std::vector<LinearConstraint> constraints;
    std::vector<PsdCoupling> couplings;
    std::vector<TraceBudget> budgets;

    bool uses_slack() const;
    /// Throws InvalidArgument on inconsistent dimensions or non-Hermitian data.
    void validate() const;
};

enum class SdpStatus { optimal, infeasible, unbounded, max_iter, stalled };

const char* to_string(SdpStatus status);

struct SdpSolution {
    std::vector<CMatrix> blocks;
    double t = 0.0;
    double primal_objective = 0.0;  // in the maximisation sense
    double dual_objective = 0.0;
    double primal_residual = 0.0;   // relative
    double dual_residual = 0.0;     // relative
    double gap = 0.0;               // relative complementarity gap
    int iterations = 0;
    SdpStatus status = SdpStatus::max_iter;
};

struct SdpOptions {
    double tol = 1e-7;
    int max_iter = 200;
};

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

/// Evaluates sum_j tr(A_j X_j) for one constraint or objective term list.
double evaluate_terms(const std::vector<TraceTerm>& terms, const std::vector<CMatrix>& blocks);

/// Largest violation of any constraint of `problem` at (blocks, t), relative to 1 + |rhs|.
/// PSD violations count the negated smallest eigenvalue.
double max_violation(const SdpProblem& problem, const std::vector<CMatrix>& blocks, double t);

/// Real symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix and its inverse.
RMatrix embed_hermitian(const CMatrix& a);
CMatrix recover_hermitian(const RMatrix& x);

/// Writes the problem as JSON for offline cross-checking with external solvers.
void dump_problem(const SdpProblem& problem, std::ostream& os);

} // namespace hisac

#include "hisac/conic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "conic_ipm.hpp"

namespace hisac {

namespace {

bool is_hermitian(const CMatrix& a)
{
    return (a - a.adjoint()).norm() <= 1e-12 * (1.0 + a.norm());
}

void check_terms(const std::vector<TraceTerm>& terms, const std::vector<int>& dims, const char* what)
{
    for (const auto& term : terms) {
        if (term.block >= dims.size()) {
            throw InvalidArgument(std::string(what) + " refers to a missing block");
        }
        const int n = dims[term.block];
        if (term.coeff.rows() != n || term.coeff.cols() != n) {
            throw InvalidArgument(std::string(what) + " coefficient has the wrong dimension");
        }
        if (!term.coeff.allFinite() || !is_hermitian(term.coeff)) {
            throw InvalidArgument(std::string(what) + " coefficient must be finite and Hermitian");
        }
    }
}

CMatrix entry_selector(int n, int p, int q, bool imaginary)
{
    // Hermitian E with tr(E X) = Re X(p,q) or Im X(p,q)
    CMatrix e = CMatrix::Zero(n, n);
    if (p == q) {
        e(p, p) = 1.0;
    } else if (!imaginary) {
        e(p, q) = 0.5;
        e(q, p) = 0.5;
    } else {
        e(q, p) = cplx(0.0, -0.5);
        e(p, q) = cplx(0.0, 0.5);
    }
    return e;
}

double min_eigenvalue(const CMatrix& a)
{
    const CMatrix s = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(s, Eigen::EigenvaluesOnly);
    return eig.eigenvalues()(0);
}

struct Lowered {
    detail::RealSdp real;
    std::size_t user_blocks = 0;
    bool has_slack = false;
};

Lowered lower(const SdpProblem& prob)
{
    Lowered out;
    auto& rp = out.real;
    out.user_blocks = prob.block_dims.size();
    out.has_slack = prob.uses_slack();

    for (int n : prob.block_dims) rp.psd_dims.push_back(2 * n);
    for (const auto& c : prob.couplings) {
        rp.psd_dims.push_back(2 * prob.block_dims[c.terms.front().first]);
    }
    for (int n : rp.psd_dims) rp.c_psd.emplace_back(RMatrix::Zero(n, n));
    // maximisation becomes minimisation of the negated objective
    for (const auto& term : prob.objective) {
        rp.c_psd[term.block] -= 0.5 * embed_hermitian(term.coeff);
    }

    int lp = 0;
    for (const auto& c : prob.constraints) {
        if (c.sense != ConstraintSense::equal) ++lp;
    }
    lp += static_cast<int>(prob.budgets.size());
    rp.lp_dim = lp;
    rp.c_lp = RVector::Zero(lp);
    rp.free_dim = out.has_slack ? 1 : 0;
    rp.c_free = RVector::Constant(rp.free_dim, -prob.slack_objective);

    struct Row {
        std::vector<detail::BlockCoeff> psd;
        int lp_index = -1;
        double lp_coeff = 0.0;
        double free_coeff = 0.0;
        double rhs = 0.0;
    };
    std::vector<Row> rows;
    auto add_terms = [](Row& row, const std::vector<TraceTerm>& terms) {
        for (const auto& term : terms) {
            const RMatrix e = 0.5 * embed_hermitian(term.coeff);
            auto it = std::find_if(row.psd.begin(), row.psd.end(),
                                   [&](const auto& c) { return c.block == static_cast<int>(term.block); });
            if (it == row.psd.end()) {
                row.psd.push_back({static_cast<int>(term.block), e});
            } else {
                it->mat += e;
            }
        }
    };

    int slot = 0;
    for (const auto& c : prob.constraints) {
        Row row;
        add_terms(row, c.terms);
        row.free_coeff = c.slack_coeff;
        row.rhs = c.rhs;
        if (c.sense == ConstraintSense::greater_equal) {
            row.lp_index = slot++;
            row.lp_coeff = -1.0;
        } else if (c.sense == ConstraintSense::less_equal) {
            row.lp_index = slot++;
            row.lp_coeff = 1.0;
        }
        rows.push_back(std::move(row));
    }
    for (const auto& budget : prob.budgets) {
        Row row;
        std::vector<TraceTerm> terms;
        for (auto b : budget.blocks) {
            const int n = prob.block_dims[b];
            terms.push_back({b, CMatrix::Identity(n, n)});
        }
        add_terms(row, terms);
        row.lp_index = slot++;
        row.lp_coeff = 1.0;
        row.rhs = budget.bound;
        rows.push_back(std::move(row));
    }
    for (std::size_t ci = 0; ci < prob.couplings.size(); ++ci) {
        const auto& coupling = prob.couplings[ci];
        const std::size_t slack_block = out.user_blocks + ci;
        const int n = prob.block_dims[coupling.terms.front().first];
        for (int p = 0; p < n; ++p) {
            for (int q = p; q < n; ++q) {
                for (int part = 0; part < (p == q ? 1 : 2); ++part) {
                    const CMatrix e = entry_selector(n, p, q, part == 1);
                    std::vector<TraceTerm> terms;
                    for (const auto& [block, weight] : coupling.terms) {
                        terms.push_back({block, weight * e});
                    }
                    terms.push_back({slack_block, -e});
                    Row row;
                    add_terms(row, terms);
                    rows.push_back(std::move(row));
                }
            }
        }
    }

    const auto m = static_cast<Eigen::Index>(rows.size());
    rp.a_lp = RMatrix::Zero(m, rp.lp_dim);
    rp.a_free = RMatrix::Zero(m, rp.free_dim);
    rp.b = RVector::Zero(m);
    rp.rows.resize(rows.size());
    for (Eigen::Index i = 0; i < m; ++i) {
        auto& row = rows[static_cast<std::size_t>(i)];
        double norm2 = row.lp_coeff * row.lp_coeff + row.free_coeff * row.free_coeff;
        for (const auto& c : row.psd) norm2 += c.mat.squaredNorm();
        // unit-norm rows keep the Schur complement well scaled
        const double s = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 1.0;
        for (auto& c : row.psd) c.mat *= s;
        rp.rows[static_cast<std::size_t>(i)] = std::move(row.psd);
        if (row.lp_index >= 0) rp.a_lp(i, row.lp_index) = s * row.lp_coeff;
        if (rp.free_dim > 0) rp.a_free(i, 0) = s * row.free_coeff;
        rp.b(i) = s * row.rhs;
    }
    return out;
}

nlohmann::json matrix_json(const CMatrix& a)
{
    nlohmann::json re = nlohmann::json::array();
    nlohmann::json im = nlohmann::json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        nlohmann::json rr = nlohmann::json::array();
        nlohmann::json ri = nlohmann::json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            rr.push_back(a(i, j).real());
            ri.push_back(a(i, j).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ri));
    }
    return {{"re", re}, {"im", im}};
}

nlohmann::json terms_json(const std::vector<TraceTerm>& terms)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& t : terms) {
        out.push_back({{"block", t.block}, {"coeff", matrix_json(t.coeff)}});
    }
    return out;
}

const char* sense_name(ConstraintSense s)
{
    switch (s) {
    case ConstraintSense::greater_equal: return ">=";
    case ConstraintSense::less_equal: return "<=";
    case ConstraintSense::equal: return "==";
    }
    return "?";
}

} // namespace

bool SdpProblem::uses_slack() const
{
    if (slack_objective != 0.0) return true;
    return std::any_of(constraints.begin(), constraints.end(),
                       [](const LinearConstraint& c) { return c.slack_coeff != 0.0; });
}

void SdpProblem::validate() const
{
    if (block_dims.empty()) throw InvalidArgument("SDP has no matrix blocks");
    for (int n : block_dims) {
        if (n < 1) throw InvalidArgument("SDP block dimensions must be positive");
    }
    if (!std::isfinite(slack_objective)) throw InvalidArgument("slack objective must be finite");
    check_terms(objective, block_dims, "objective term");
    bool slack_constrained = false;
    for (const auto& c : constraints) {
        check_terms(c.terms, block_dims, "constraint term");
        if (!std::isfinite(c.rhs) || !std::isfinite(c.slack_coeff)) {
            throw InvalidArgument("constraint data must be finite");
        }
        if (c.terms.empty() && c.slack_coeff == 0.0) {
            throw InvalidArgument("constraint '" + c.label + "' has no terms");
        }
        slack_constrained = slack_constrained || c.slack_coeff != 0.0;
    }
    if (slack_objective != 0.0 && !slack_constrained) {
        throw InvalidArgument("slack appears in the objective but in no constraint");
    }
    for (const auto& c : couplings) {
        if (c.terms.empty()) throw InvalidArgument("PSD coupling has no terms");
        const auto first = c.terms.front().first;
        for (const auto& [block, weight] : c.terms) {
            if (block >= block_dims.size()) throw InvalidArgument("PSD coupling refers to a missing block");
            if (block_dims[block] != block_dims[first]) {
                throw InvalidArgument("PSD coupling mixes blocks of different dimensions");
            }
            if (!std::isfinite(weight)) throw InvalidArgument("PSD coupling weight must be finite");
        }
    }
    for (const auto& b : budgets) {
        if (b.blocks.empty()) throw InvalidArgument("trace budget has no blocks");
        for (auto block : b.blocks) {
            if (block >= block_dims.size()) throw InvalidArgument("trace budget refers to a missing block");
        }
        if (!std::isfinite(b.bound)) throw InvalidArgument("trace budget must be finite");
    }
    if (constraints.empty() && budgets.empty() && couplings.empty()) {
        throw InvalidArgument("SDP has no constraints");
    }
}

const char* to_string(SdpStatus status)
{
    switch (status) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::infeasible: return "infeasible";
    case SdpStatus::unbounded: return "unbounded";
    case SdpStatus::max_iter: return "max_iter";
    case SdpStatus::stalled: return "stalled";
    }
    return "unknown";
}

RMatrix embed_hermitian(const CMatrix& a)
{
    const Eigen::Index n = a.rows();
    RMatrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = a.real();
    out.topRightCorner(n, n) = -a.imag();
    out.bottomLeftCorner(n, n) = a.imag();
    out.bottomRightCorner(n, n) = a.real();
    return out;
}

CMatrix recover_hermitian(const RMatrix& x)
{
    if (x.rows() != x.cols() || x.rows() % 2 != 0) {
        throw InvalidArgument("embedded matrix must be square with even dimension");
    }
    const Eigen::Index n = x.rows() / 2;
    const RMatrix re = 0.5 * (x.topLeftCorner(n, n) + x.bottomRightCorner(n, n));
    const RMatrix im = 0.5 * (x.bottomLeftCorner(n, n) - x.topRightCorner(n, n));
    CMatrix out(n, n);
    out.real() = 0.5 * (re + re.transpose());
    out.imag() = 0.5 * (im - im.transpose());
    return out;
}

double evaluate_terms(const std::vector<TraceTerm>& terms, const std::vector<CMatrix>& blocks)
{
    double acc = 0.0;
    for (const auto& t : terms) {
        acc += (t.coeff.cwiseProduct(blocks.at(t.block).transpose())).sum().real();
    }
    return acc;
}

double max_violation(const SdpProblem& problem, const std::vector<CMatrix>& blocks, double t)
{
    double worst = 0.0;
    for (const auto& c : problem.constraints) {
        const double v = evaluate_terms(c.terms, blocks) + c.slack_coeff * t;
        double miss = 0.0;
        switch (c.sense) {
        case ConstraintSense::greater_equal: miss = c.rhs - v; break;
        case ConstraintSense::less_equal: miss = v - c.rhs; break;
        case ConstraintSense::equal: miss = std::abs(v - c.rhs); break;
        }
        worst = std::max(worst, miss / (1.0 + std::abs(c.rhs)));
    }
    for (const auto& b : problem.budgets) {
        double tr = 0.0;
        for (auto block : b.blocks) tr += blocks.at(block).trace().real();
        worst = std::max(worst, (tr - b.bound) / (1.0 + std::abs(b.bound)));
    }
    for (const auto& c : problem.couplings) {
        const Eigen::Index n = blocks.at(c.terms.front().first).rows();
        CMatrix s = CMatrix::Zero(n, n);
        for (const auto& [block, weight] : c.terms) s += weight * blocks.at(block);
        worst = std::max(worst, -min_eigenvalue(s));
    }
    for (const auto& x : blocks) worst = std::max(worst, -min_eigenvalue(x));
    return worst;
}

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options)
{
    problem.validate();
    const Lowered low = lower(problem);
    const auto res = detail::solve_real_sdp(low.real, options);

    SdpSolution sol;
    sol.blocks.reserve(low.user_blocks);
    for (std::size_t b = 0; b < low.user_blocks; ++b) {
        sol.blocks.push_back(recover_hermitian(res.x_psd[b]));
    }
    sol.t = low.has_slack ? res.x_free(0) : 0.0;
    sol.primal_objective = evaluate_terms(problem.objective, sol.blocks) + problem.slack_objective * sol.t;
    sol.dual_objective = -res.dual_objective;
    sol.primal_residual = res.primal_residual;
    sol.dual_residual = res.dual_residual;
    sol.gap = res.gap;
    sol.iterations = res.iterations;
    sol.status = res.status;
    return sol;
}

void dump_problem(const SdpProblem& problem, std::ostream& os)
{
    nlohmann::json j;
    j["format"] = "hisac-sdp";
    j["version"] = 1;
    j["sense"] = "maximize";
    j["block_dims"] = problem.block_dims;
    j["objective"] = {{"slack", problem.slack_objective}, {"terms", terms_json(problem.objective)}};
    nlohmann::json cons = nlohmann::json::array();
    for (const auto& c : problem.constraints) {
        cons.push_back({{"label", c.label},
                        {"sense", sense_name(c.sense)},
                        {"rhs", c.rhs},
                        {"slack", c.slack_coeff},
                        {"terms", terms_json(c.terms)}});
    }
    j["constraints"] = std::move(cons);
    nlohmann::json coup = nlohmann::json::array();
    for (const auto& c : problem.couplings) {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& [block, weight] : c.terms) terms.push_back({{"block", block}, {"weight", weight}});
        coup.push_back({{"label", c.label}, {"terms", terms}});
    }
    j["psd_couplings"] = std::move(coup);
    nlohmann::json budgets = nlohmann::json::array();
    for (const auto& b : problem.budgets) budgets.push_back({{"blocks", b.blocks}, {"bound", b.bound}});
    j["trace_budgets"] = std::move(budgets);
    os << j.dump(2) << '\n';
}

} // namespace hisac

#include "conic_ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace hisac::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRayTol = 1e-8;
// iterations without a better iterate before giving up
constexpr int kNoProgress = 30;

struct Snapshot {
    double score = std::numeric_limits<double>::infinity();
    int iter = -1;
    std::vector<RMatrix> x, z;
    RVector xl, zl, xf, y;
};

double inner(const RMatrix& a, const RMatrix& b) { return (a.array() * b.array()).sum(); }

RMatrix sym(const RMatrix& a) { return 0.5 * (a + a.transpose()); }

// Largest alpha with x + alpha * dx still PSD (inf if every alpha works).
double max_step_psd(const RMatrix& x, const RMatrix& dx)
{
    Eigen::LLT<RMatrix> llt(x);
    if (llt.info() != Eigen::Success) {
        return 0.0;
    }
    const RMatrix half = llt.matrixL().solve(dx);
    const RMatrix s = llt.matrixL().solve(RMatrix(half.transpose()));
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(sym(s), Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues()(0);
    return lmin < 0.0 ? -1.0 / lmin : kInf;
}

double max_step_lp(const RVector& x, const RVector& dx)
{
    double alpha = kInf;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (dx(i) < 0.0) alpha = std::min(alpha, -x(i) / dx(i));
    }
    return alpha;
}

struct Direction {
    std::vector<RMatrix> dx;
    RVector dxl;
    RVector dxf;
    RVector dy;
    std::vector<RMatrix> dz;
    RVector dzl;
};

class Solver {
public:
    Solver(const RealSdp& p, const SdpOptions& opt) : p_(p), opt_(opt)
    {
        m_ = p.num_rows();
        nb_ = static_cast<int>(p.psd_dims.size());
        check();
        block_rows_.assign(static_cast<std::size_t>(nb_), {});
        for (int i = 0; i < m_; ++i) {
            const auto& row = p.rows[static_cast<std::size_t>(i)];
            for (std::size_t k = 0; k < row.size(); ++k) {
                block_rows_[static_cast<std::size_t>(row[k].block)].push_back({i, static_cast<int>(k)});
            }
        }
        nu_ = p.lp_dim;
        for (int d : p.psd_dims) nu_ += d;
        b_norm_ = p.b.norm();
        double c2 = p.c_lp.squaredNorm() + p.c_free.squaredNorm();
        for (const auto& c : p.c_psd) c2 += c.squaredNorm();
        c_norm_ = std::sqrt(c2);
    }

    RealSdpResult run();

private:
    struct RowRef {
        int row;
        int coeff;
    };

    void check() const;
    void initial_point();
    RVector apply_a(const std::vector<RMatrix>& x, const RVector& xl, const RVector& xf) const;
    RVector apply_a_psd(const std::vector<RMatrix>& x) const;
    std::vector<RMatrix> apply_at(const RVector& y) const;
    void residuals();
    bool build_schur();
    Direction direction(double sigma_mu, const Direction* pred);
    std::pair<double, double> max_steps(const Direction& d) const;

    const RealSdp& p_;
    SdpOptions opt_;
    int m_ = 0;
    int nb_ = 0;
    int nu_ = 0;
    double b_norm_ = 0.0;
    double c_norm_ = 0.0;
    std::vector<std::vector<RowRef>> block_rows_;

    std::vector<RMatrix> x_, z_, zinv_, rd_;
    RVector xl_, zl_, xf_, y_, rp_, rl_, rf_;
    Eigen::PartialPivLU<RMatrix> kkt_;

    double pobj_ = 0.0, dobj_ = 0.0, mu_ = 0.0;
    double pinf_ = 0.0, dinf_ = 0.0, gap_ = 0.0;
};

void Solver::check() const
{
    if (!(opt_.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
    if (opt_.max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
    if (static_cast<int>(p_.c_psd.size()) != nb_) throw InvalidArgument("one objective block per PSD block");
    for (int b = 0; b < nb_; ++b) {
        const int n = p_.psd_dims[static_cast<std::size_t>(b)];
        if (n < 1 || p_.c_psd[static_cast<std::size_t>(b)].rows() != n ||
            p_.c_psd[static_cast<std::size_t>(b)].cols() != n) {
            throw InvalidArgument("objective block dimension mismatch");
        }
    }
    if (p_.c_lp.size() != p_.lp_dim || p_.c_free.size() != p_.free_dim) {
        throw InvalidArgument("objective vector dimension mismatch");
    }
    if (p_.b.size() != m_ || p_.a_lp.rows() != m_ || p_.a_lp.cols() != p_.lp_dim ||
        p_.a_free.rows() != m_ || p_.a_free.cols() != p_.free_dim) {
        throw InvalidArgument("constraint dimension mismatch");
    }
    for (const auto& row : p_.rows) {
        for (const auto& c : row) {
            if (c.block < 0 || c.block >= nb_) throw InvalidArgument("constraint refers to a missing block");
            const int n = p_.psd_dims[static_cast<std::size_t>(c.block)];
            if (c.mat.rows() != n || c.mat.cols() != n) throw InvalidArgument("constraint block dimension mismatch");
        }
    }
    if (m_ == 0) throw InvalidArgument("problem has no constraints");
}

RVector Solver::apply_a_psd(const std::vector<RMatrix>& x) const
{
    RVector out = RVector::Zero(m_);
    for (int i = 0; i < m_; ++i) {
        for (const auto& c : p_.rows[static_cast<std::size_t>(i)]) {
            out(i) += inner(c.mat, x[static_cast<std::size_t>(c.block)]);
        }
    }
    return out;
}

RVector Solver::apply_a(const std::vector<RMatrix>& x, const RVector& xl, const RVector& xf) const
{
    RVector out = apply_a_psd(x);
    if (p_.lp_dim > 0) out += p_.a_lp * xl;
    if (p_.free_dim > 0) out += p_.a_free * xf;
    return out;
}

std::vector<RMatrix> Solver::apply_at(const RVector& y) const
{
    std::vector<RMatrix> out;
    out.reserve(static_cast<std::size_t>(nb_));
    for (int b = 0; b < nb_; ++b) {
        const int n = p_.psd_dims[static_cast<std::size_t>(b)];
        out.emplace_back(RMatrix::Zero(n, n));
    }
    for (int i = 0; i < m_; ++i) {
        if (y(i) == 0.0) continue;
        for (const auto& c : p_.rows[static_cast<std::size_t>(i)]) {
            out[static_cast<std::size_t>(c.block)] += y(i) * c.mat;
        }
    }
    return out;
}

void Solver::initial_point()
{
    x_.clear();
    z_.clear();
    for (int b = 0; b < nb_; ++b) {
        const int n = p_.psd_dims[static_cast<std::size_t>(b)];
        const double sn = std::sqrt(static_cast<double>(n));
        double xi = std::max(10.0, sn);
        double eta = std::max({10.0, sn, p_.c_psd[static_cast<std::size_t>(b)].norm()});
        for (const auto& ref : block_rows_[static_cast<std::size_t>(b)]) {
            const auto& a = p_.rows[static_cast<std::size_t>(ref.row)][static_cast<std::size_t>(ref.coeff)].mat;
            const double an = a.norm();
            xi = std::max(xi, sn * (1.0 + std::abs(p_.b(ref.row))) / (1.0 + an));
            eta = std::max(eta, an);
        }
        x_.emplace_back(xi * RMatrix::Identity(n, n));
        z_.emplace_back(eta * RMatrix::Identity(n, n));
    }
    double xi = 10.0;
    double eta = std::max(10.0, p_.c_lp.size() ? p_.c_lp.cwiseAbs().maxCoeff() : 0.0);
    for (int i = 0; i < m_; ++i) {
        const double an = p_.lp_dim ? p_.a_lp.row(i).norm() : 0.0;
        if (an > 0.0) xi = std::max(xi, (1.0 + std::abs(p_.b(i))) / (1.0 + an));
        eta = std::max(eta, an);
    }
    xl_ = RVector::Constant(p_.lp_dim, xi);
    zl_ = RVector::Constant(p_.lp_dim, eta);
    xf_ = RVector::Zero(p_.free_dim);
    y_ = RVector::Zero(m_);
}

void Solver::residuals()
{
    rp_ = p_.b - apply_a(x_, xl_, xf_);
    const auto aty = apply_at(y_);
    rd_.resize(static_cast<std::size_t>(nb_));
    double dual2 = 0.0;
    double xz = 0.0;
    pobj_ = 0.0;
    for (int b = 0; b < nb_; ++b) {
        const auto sb = static_cast<std::size_t>(b);
        rd_[sb] = p_.c_psd[sb] - aty[sb] - z_[sb];
        dual2 += rd_[sb].squaredNorm();
        xz += inner(x_[sb], z_[sb]);
        pobj_ += inner(p_.c_psd[sb], x_[sb]);
    }
    if (p_.lp_dim > 0) {
        rl_ = p_.c_lp - p_.a_lp.transpose() * y_ - zl_;
        dual2 += rl_.squaredNorm();
        xz += xl_.dot(zl_);
        pobj_ += p_.c_lp.dot(xl_);
    } else {
        rl_.resize(0);
    }
    if (p_.free_dim > 0) {
        rf_ = p_.c_free - p_.a_free.transpose() * y_;
        dual2 += rf_.squaredNorm();
        pobj_ += p_.c_free.dot(xf_);
    } else {
        rf_.resize(0);
    }
    dobj_ = p_.b.dot(y_);
    mu_ = xz / nu_;
    pinf_ = rp_.norm() / (1.0 + b_norm_);
    dinf_ = std::sqrt(dual2) / (1.0 + c_norm_);
    gap_ = std::max(xz, std::abs(pobj_ - dobj_)) / (1.0 + std::abs(pobj_) + std::abs(dobj_));
}

bool Solver::build_schur()
{
    zinv_.resize(static_cast<std::size_t>(nb_));
    const int nf = p_.free_dim;
    RMatrix kkt = RMatrix::Zero(m_ + nf, m_ + nf);
    for (int b = 0; b < nb_; ++b) {
        const auto sb = static_cast<std::size_t>(b);
        const int n = p_.psd_dims[sb];
        Eigen::LLT<RMatrix> llt(z_[sb]);
        if (llt.info() != Eigen::Success) return false;
        zinv_[sb] = sym(llt.solve(RMatrix::Identity(n, n)));
        const auto& refs = block_rows_[sb];
        for (const auto& ri : refs) {
            const auto& ai = p_.rows[static_cast<std::size_t>(ri.row)][static_cast<std::size_t>(ri.coeff)].mat;
            const RMatrix pt = (x_[sb] * ai * zinv_[sb]).transpose();
            for (const auto& rj : refs) {
                if (rj.row < ri.row) continue;
                const auto& aj = p_.rows[static_cast<std::size_t>(rj.row)][static_cast<std::size_t>(rj.coeff)].mat;
                const double v = inner(aj, pt);
                kkt(ri.row, rj.row) += v;
                if (rj.row != ri.row) kkt(rj.row, ri.row) += v;
            }
        }
    }
    if (p_.lp_dim > 0) {
        const RVector d = xl_.cwiseQuotient(zl_);
        kkt.topLeftCorner(m_, m_) += p_.a_lp * d.asDiagonal() * p_.a_lp.transpose();
    }
    if (nf > 0) {
        kkt.topRightCorner(m_, nf) = p_.a_free;
        kkt.bottomLeftCorner(nf, m_) = p_.a_free.transpose();
    }
    kkt_.compute(kkt);
    return kkt.allFinite();
}

Direction Solver::direction(double sigma_mu, const Direction* pred)
{
    Direction d;
    const auto nbs = static_cast<std::size_t>(nb_);
    std::vector<RMatrix> corr(nbs);
    std::vector<RMatrix> t(nbs);
    for (std::size_t b = 0; b < nbs; ++b) {
        corr[b] = pred ? RMatrix(pred->dx[b] * pred->dz[b] * zinv_[b]) : RMatrix::Zero(x_[b].rows(), x_[b].cols());
        t[b] = sigma_mu * zinv_[b] - x_[b] - x_[b] * rd_[b] * zinv_[b] - corr[b];
    }
    RVector h = rp_ - apply_a_psd(t);
    RVector corr_l;
    if (p_.lp_dim > 0) {
        corr_l = pred ? RVector(pred->dxl.cwiseProduct(pred->dzl).cwiseQuotient(zl_)) : RVector::Zero(p_.lp_dim);
        const RVector tl = (sigma_mu * zl_.cwiseInverse()) - xl_ - xl_.cwiseProduct(rl_).cwiseQuotient(zl_) - corr_l;
        h -= p_.a_lp * tl;
    }
    RVector rhs(m_ + p_.free_dim);
    rhs.head(m_) = h;
    if (p_.free_dim > 0) rhs.tail(p_.free_dim) = rf_;
    const RVector sol = kkt_.solve(rhs);
    d.dy = sol.head(m_);
    d.dxf = sol.tail(p_.free_dim);

    const auto atdy = apply_at(d.dy);
    d.dz.resize(nbs);
    d.dx.resize(nbs);
    for (std::size_t b = 0; b < nbs; ++b) {
        d.dz[b] = rd_[b] - atdy[b];
        d.dx[b] = sym(sigma_mu * zinv_[b] - x_[b] - x_[b] * d.dz[b] * zinv_[b] - corr[b]);
    }
    if (p_.lp_dim > 0) {
        d.dzl = rl_ - p_.a_lp.transpose() * d.dy;
        d.dxl = (sigma_mu * zl_.cwiseInverse()) - xl_ - xl_.cwiseProduct(d.dzl).cwiseQuotient(zl_) - corr_l;
    } else {
        d.dzl.resize(0);
        d.dxl.resize(0);
    }
    return d;
}

std::pair<double, double> Solver::max_steps(const Direction& d) const
{
    double ap = kInf;
    double ad = kInf;
    for (std::size_t b = 0; b < static_cast<std::size_t>(nb_); ++b) {
        ap = std::min(ap, max_step_psd(x_[b], d.dx[b]));
        ad = std::min(ad, max_step_psd(z_[b], d.dz[b]));
    }
    if (p_.lp_dim > 0) {
        ap = std::min(ap, max_step_lp(xl_, d.dxl));
        ad = std::min(ad, max_step_lp(zl_, d.dzl));
    }
    return {ap, ad};
}

RealSdpResult Solver::run()
{
    initial_point();
    RealSdpResult res;
    res.status = SdpStatus::max_iter;
    double gamma = 0.9;
    int stuck = 0;
    int iter = 0;
    Snapshot best;
    for (;; ++iter) {
        residuals();
        if (!std::isfinite(pobj_) || !std::isfinite(dobj_) || !std::isfinite(mu_)) {
            res.status = SdpStatus::stalled;
            break;
        }
        if (pinf_ <= opt_.tol && dinf_ <= opt_.tol && gap_ <= opt_.tol) {
            res.status = SdpStatus::optimal;
            break;
        }
        const double score = std::max({pinf_, dinf_, gap_});
        if (score < best.score) {
            best = {score, iter, x_, z_, xl_, zl_, xf_, y_};
        } else if (iter - best.iter > kNoProgress) {
            res.status = SdpStatus::stalled;
            break;
        }
        if (dobj_ > 0.0) {
            // dual improving ray: A^T y + Z = C - R_d stays bounded while b'y grows
            double ray2 = 0.0;
            for (int b = 0; b < nb_; ++b) {
                const auto sb = static_cast<std::size_t>(b);
                ray2 += (p_.c_psd[sb] - rd_[sb]).squaredNorm();
            }
            if (p_.lp_dim > 0) ray2 += (p_.c_lp - rl_).squaredNorm();
            if (p_.free_dim > 0) ray2 += (p_.c_free - rf_).squaredNorm();
            if (std::sqrt(ray2) / dobj_ < kRayTol) {
                res.status = SdpStatus::infeasible;
                break;
            }
        }
        if (pobj_ < 0.0 && (p_.b - rp_).norm() / -pobj_ < kRayTol) {
            res.status = SdpStatus::unbounded;
            break;
        }
        if (iter >= opt_.max_iter) {
            res.status = SdpStatus::max_iter;
            break;
        }
        if (!build_schur()) {
            res.status = SdpStatus::stalled;
            break;
        }

        const Direction pred = direction(0.0, nullptr);
        auto [app, adp] = max_steps(pred);
        app = std::min(1.0, gamma * app);
        adp = std::min(1.0, gamma * adp);
        double xz_aff = 0.0;
        for (std::size_t b = 0; b < static_cast<std::size_t>(nb_); ++b) {
            xz_aff += inner(x_[b] + app * pred.dx[b], z_[b] + adp * pred.dz[b]);
        }
        if (p_.lp_dim > 0) xz_aff += (xl_ + app * pred.dxl).dot(zl_ + adp * pred.dzl);
        const double mu_aff = std::max(xz_aff, 0.0) / nu_;
        const double ratio = std::clamp(mu_aff / mu_, 0.0, 1.0);
        const double sigma = ratio * ratio * ratio;

        const Direction dir = direction(sigma * mu_, &pred);
        if (!dir.dy.allFinite()) {
            res.status = SdpStatus::stalled;
            break;
        }
        auto [ap, ad] = max_steps(dir);
        ap = std::min(1.0, gamma * ap);
        ad = std::min(1.0, gamma * ad);
        gamma = 0.9 + 0.09 * std::min(ap, ad);

        for (std::size_t b = 0; b < static_cast<std::size_t>(nb_); ++b) {
            x_[b] = sym(x_[b] + ap * dir.dx[b]);
            z_[b] = sym(z_[b] + ad * dir.dz[b]);
        }
        if (p_.lp_dim > 0) {
            xl_ += ap * dir.dxl;
            zl_ += ad * dir.dzl;
        }
        if (p_.free_dim > 0) xf_ += ap * dir.dxf;
        y_ += ad * dir.dy;

        stuck = (std::max(ap, ad) < 1e-10) ? stuck + 1 : 0;
        if (stuck >= 3) {
            residuals();
            res.status = SdpStatus::stalled;
            ++iter;
            break;
        }
    }
    if (res.status != SdpStatus::optimal && best.iter >= 0 &&
        !(std::max({pinf_, dinf_, gap_}) <= best.score)) {
        // the last steps lost accuracy; report the best iterate seen instead
        x_ = best.x;
        z_ = best.z;
        xl_ = best.xl;
        zl_ = best.zl;
        xf_ = best.xf;
        y_ = best.y;
        residuals();
    }
    res.iterations = iter;
    res.x_psd = x_;
    res.z_psd = z_;
    res.x_lp = xl_;
    res.z_lp = zl_;
    res.x_free = xf_;
    res.y = y_;
    res.primal_objective = pobj_;
    res.dual_objective = dobj_;
    res.primal_residual = pinf_;
    res.dual_residual = dinf_;
    res.gap = gap_;
    return res;
}

} // namespace

RealSdpResult solve_real_sdp(const RealSdp& problem, const SdpOptions& options)
{
    Solver solver(problem, options);
    return solver.run();
}

} // namespace hisac::detail

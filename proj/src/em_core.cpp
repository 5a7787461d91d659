#include "hisac/em_core.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace hisac {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int half_order(double length, double lambda)
{
    // ceil with a small guard so that exact ratios such as 0.5 / 0.125 stay at 4
    return static_cast<int>(std::ceil(length / lambda - 1e-9));
}

} // namespace

ApertureSpec ApertureSpec::from_carrier(double lx, double ly, double carrier_hz)
{
    if (!(lx > 0.0) || !(ly > 0.0)) {
        throw InvalidArgument("aperture side lengths must be positive");
    }
    if (!(carrier_hz > 0.0)) {
        throw InvalidArgument("carrier frequency must be positive");
    }
    ApertureSpec a;
    a.lx = lx;
    a.ly = ly;
    a.carrier_freq = carrier_hz;
    a.lambda = kSpeedOfLight / carrier_hz;
    a.kappa = kTwoPi / a.lambda;
    a.area = lx * ly;
    a.z0 = kFreeSpaceImpedance;
    return a;
}

ApertureSpec ApertureSpec::square(double area, double carrier_hz)
{
    if (!(area > 0.0)) {
        throw InvalidArgument("aperture area must be positive");
    }
    const double side = std::sqrt(area);
    return from_carrier(side, side, carrier_hz);
}

std::size_t WavenumberGrid::index_of(int nx, int ny) const
{
    if (std::abs(nx) > half_x || std::abs(ny) > half_y) {
        throw InvalidArgument("order outside the truncation grid");
    }
    return static_cast<std::size_t>((nx + half_x) * (2 * half_y + 1) + (ny + half_y));
}

FarFieldPoint FarFieldPoint::make(double r, double theta, double psi)
{
    if (!(r > 0.0)) {
        throw InvalidArgument("far-field range must be positive");
    }
    if (!(theta >= 0.0) || !(theta < std::numbers::pi / 2.0)) {
        throw InvalidArgument("polar angle must lie in [0, 90) degrees");
    }
    if (!std::isfinite(psi)) {
        throw InvalidArgument("azimuth must be finite");
    }
    double wrapped = std::fmod(psi, kTwoPi);
    if (wrapped < 0.0) {
        wrapped += kTwoPi;
    }
    if (wrapped >= kTwoPi) {
        wrapped = 0.0;
    }
    return FarFieldPoint{r, theta, wrapped};
}

FarFieldPoint FarFieldPoint::from_degrees(double r, double theta_deg, double psi_deg)
{
    constexpr double deg = std::numbers::pi / 180.0;
    return make(r, theta_deg * deg, psi_deg * deg);
}

std::size_t ChannelSet::dimension() const
{
    if (!user_vectors.empty()) {
        return static_cast<std::size_t>(user_vectors.front().size());
    }
    if (!target_vectors.empty()) {
        return static_cast<std::size_t>(target_vectors.front().size());
    }
    return 0;
}

ChannelSet ChannelSet::from_vectors(std::vector<CVector> users, std::vector<CVector> targets)
{
    ChannelSet set;
    set.user_vectors = std::move(users);
    set.target_vectors = std::move(targets);
    const auto n = set.dimension();
    auto check = [n](const CVector& v) {
        if (static_cast<std::size_t>(v.size()) != n) {
            throw InvalidArgument("channel vectors must share one length");
        }
    };
    for (const auto& v : set.user_vectors) check(v);
    set.target_matrices.reserve(set.target_vectors.size());
    for (const auto& g : set.target_vectors) {
        check(g);
        set.target_matrices.emplace_back(g * g.adjoint());
    }
    return set;
}

double sinc(double x)
{
    if (std::abs(x) < 1e-8) {
        return 1.0 - x * x / 6.0;
    }
    return std::sin(x) / x;
}

WavenumberGrid truncation_grid(const ApertureSpec& aperture)
{
    WavenumberGrid grid;
    grid.half_x = half_order(aperture.lx, aperture.lambda);
    grid.half_y = half_order(aperture.ly, aperture.lambda);
    grid.orders.reserve(static_cast<std::size_t>((2 * grid.half_x + 1) * (2 * grid.half_y + 1)));
    for (int nx = -grid.half_x; nx <= grid.half_x; ++nx) {
        for (int ny = -grid.half_y; ny <= grid.half_y; ++ny) {
            grid.orders.push_back({nx, ny});
        }
    }
    return grid;
}

cplx fourier_green_coeff(const ApertureSpec& aperture, std::array<int, 2> order,
                         const FarFieldPoint& point)
{
    const double u = std::sin(point.theta) * std::cos(point.psi);
    const double v = std::sin(point.theta) * std::sin(point.psi);
    const double kx = aperture.kappa * (u + aperture.lambda * order[0] / aperture.lx);
    const double ky = aperture.kappa * (v + aperture.lambda * order[1] / aperture.ly);
    const double sign = ((order[0] + order[1]) % 2 == 0) ? 1.0 : -1.0;
    const double amplitude = std::sqrt(aperture.area) / (4.0 * std::numbers::pi * point.r);
    const cplx spherical = std::polar(1.0, aperture.kappa * point.r);
    return spherical * (amplitude * sign * sinc(kx * aperture.lx / 2.0) *
                        sinc(ky * aperture.ly / 2.0));
}

CVector channel_vector(const ApertureSpec& aperture, const WavenumberGrid& grid,
                       const FarFieldPoint& point)
{
    CVector f(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t n = 0; n < grid.size(); ++n) {
        f(static_cast<Eigen::Index>(n)) = std::conj(fourier_green_coeff(aperture, grid.orders[n], point));
    }
    return f;
}

ChannelSet make_channel_set(const ApertureSpec& aperture, const WavenumberGrid& grid,
                            const std::vector<FarFieldPoint>& users,
                            const std::vector<FarFieldPoint>& targets)
{
    std::vector<CVector> f;
    std::vector<CVector> g;
    f.reserve(users.size());
    g.reserve(targets.size());
    for (const auto& p : users) f.push_back(channel_vector(aperture, grid, p));
    // reciprocity: the receive coefficients share the transmit closed form
    for (const auto& p : targets) g.push_back(channel_vector(aperture, grid, p));
    return ChannelSet::from_vectors(std::move(f), std::move(g));
}

double green_energy_oracle(const ApertureSpec& aperture, const FarFieldPoint& point,
                           int resolution)
{
    if (resolution < 64) {
        throw InvalidArgument("green_energy_oracle needs at least 64 samples per axis");
    }
    const double dx = aperture.lx / resolution;
    const double dy = aperture.ly / resolution;
    const double st = std::sin(point.theta);
    const double scale = 1.0 / (4.0 * std::numbers::pi * point.r);
    double acc = 0.0;
    for (int i = 0; i < resolution; ++i) {
        const double sx = -aperture.lx / 2.0 + (i + 0.5) * dx;
        double row = 0.0;
        for (int j = 0; j < resolution; ++j) {
            const double sy = -aperture.ly / 2.0 + (j + 0.5) * dy;
            const double phase = aperture.kappa *
                (point.r - st * (sx * std::cos(point.psi) + sy * std::sin(point.psi)));
            row += std::norm(std::polar(scale, phase));
        }
        acc += row;
    }
    return acc * dx * dy;
}

cplx basis_function(const ApertureSpec& aperture, std::array<int, 2> order, double sx, double sy)
{
    const double phase = -kTwoPi * (order[0] / aperture.lx * (sx - aperture.lx / 2.0) +
                                    order[1] / aperture.ly * (sy - aperture.ly / 2.0));
    return std::polar(1.0 / std::sqrt(aperture.area), phase);
}

CMatrix project_noise_samples(const ApertureSpec& aperture, const WavenumberGrid& grid,
                              double sigma_r_sq, std::size_t num_samples, std::uint64_t seed,
                              int surface_resolution)
{
    if (num_samples == 0) {
        throw InvalidArgument("project_noise_samples needs at least one sample");
    }
    if (sigma_r_sq < 0.0) {
        throw InvalidArgument("noise power must be nonnegative");
    }
    const auto n = static_cast<Eigen::Index>(grid.size());
    if (sigma_r_sq == 0.0) {
        return CMatrix::Zero(n, n);
    }
    // Midpoint sampling with more points per axis than the order span keeps the
    // discrete basis exactly orthonormal.
    const int mx = surface_resolution > 0 ? surface_resolution : 2 * (2 * grid.half_x + 1);
    const int my = surface_resolution > 0 ? surface_resolution : 2 * (2 * grid.half_y + 1);
    const double dx = aperture.lx / mx;
    const double dy = aperture.ly / my;
    const double cell = dx * dy;
    const Eigen::Index points = static_cast<Eigen::Index>(mx) * my;

    CMatrix basis(points, n);
    for (int i = 0; i < mx; ++i) {
        const double sx = -aperture.lx / 2.0 + (i + 0.5) * dx;
        for (int j = 0; j < my; ++j) {
            const double sy = -aperture.ly / 2.0 + (j + 0.5) * dy;
            for (Eigen::Index k = 0; k < n; ++k) {
                basis(static_cast<Eigen::Index>(i) * my + j, k) =
                    basis_function(aperture, grid.orders[static_cast<std::size_t>(k)], sx, sy) * cell;
            }
        }
    }

    std::mt19937_64 rng(seed);
    // per-cell field variance sigma^2 / dA discretises the delta correlation
    std::normal_distribution<double> normal(0.0, std::sqrt(sigma_r_sq / (2.0 * cell)));
    constexpr std::size_t kBatch = 4096;
    CMatrix acc = CMatrix::Zero(n, n);
    CMatrix field;
    for (std::size_t done = 0; done < num_samples; done += kBatch) {
        const auto rows = static_cast<Eigen::Index>(std::min(kBatch, num_samples - done));
        field.resize(rows, points);
        for (Eigen::Index s = 0; s < rows; ++s) {
            for (Eigen::Index p = 0; p < points; ++p) {
                const double re = normal(rng);
                const double im = normal(rng);
                field(s, p) = cplx(re, im);
            }
        }
        const CMatrix coeffs = field * basis;
        acc.noalias() += coeffs.transpose() * coeffs.conjugate();
    }
    return acc / static_cast<double>(num_samples);
}

} // namespace hisac

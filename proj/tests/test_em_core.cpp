#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hisac/em_core.hpp"
#include "oracles.hpp"

using namespace hisac;

namespace {

ApertureSpec default_aperture() { return ApertureSpec::from_carrier(0.5, 0.5, 2.4e9); }

double free_space_energy(double area, double r) { return area / std::pow(4.0 * std::numbers::pi * r, 2); }

} // namespace

TEST_CASE("aperture derives wavelength and wavenumber")
{
    const ApertureSpec a = default_aperture();
    CHECK(a.lambda == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(std::abs(a.kappa * a.lambda - 2.0 * std::numbers::pi) < 1e-12 * 2.0 * std::numbers::pi);
    CHECK(a.area == a.lx * a.ly);
    CHECK_THROWS_AS(ApertureSpec::from_carrier(0.0, 0.5, 2.4e9), InvalidArgument);
    CHECK_THROWS_AS(ApertureSpec::from_carrier(0.5, -1.0, 2.4e9), InvalidArgument);
    CHECK_THROWS_AS(ApertureSpec::from_carrier(0.5, 0.5, 0.0), InvalidArgument);
    const ApertureSpec s = ApertureSpec::square(0.36, 2.4e9);
    CHECK(s.lx == doctest::Approx(0.6));
    CHECK(s.ly == s.lx);
}

TEST_CASE("truncation grid sizes")
{
    const WavenumberGrid g = truncation_grid(default_aperture());
    CHECK(g.half_x == 4);
    CHECK(g.half_y == 4);
    CHECK(g.size() == 81);
    CHECK(truncation_grid(ApertureSpec::from_carrier(0.0625, 0.0625, 2.4e9)).size() == 9);
    CHECK(truncation_grid(ApertureSpec::from_carrier(0.5, 0.25, 2.4e9)).size() == 45);
}

TEST_CASE("truncation grid is row-major and complete")
{
    const WavenumberGrid g = truncation_grid(ApertureSpec::from_carrier(0.5, 0.25, 2.4e9));
    std::size_t idx = 0;
    for (int nx = -g.half_x; nx <= g.half_x; ++nx) {
        for (int ny = -g.half_y; ny <= g.half_y; ++ny) {
            REQUIRE(idx < g.size());
            CHECK(g.orders[idx][0] == nx);
            CHECK(g.orders[idx][1] == ny);
            CHECK(g.index_of(nx, ny) == idx);
            ++idx;
        }
    }
    CHECK(idx == g.size());
    CHECK_THROWS_AS(g.index_of(5, 0), InvalidArgument);
}

TEST_CASE("far-field point validation and azimuth wrap")
{
    const FarFieldPoint p = FarFieldPoint::from_degrees(10.0, 30.0, 450.0);
    CHECK(p.psi == doctest::Approx(std::numbers::pi / 2.0));
    CHECK(FarFieldPoint::from_degrees(10.0, 30.0, -90.0).psi == doctest::Approx(1.5 * std::numbers::pi));
    CHECK_THROWS_AS(FarFieldPoint::from_degrees(0.0, 30.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(FarFieldPoint::from_degrees(10.0, 90.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(FarFieldPoint::from_degrees(10.0, -1.0, 0.0), InvalidArgument);
}

TEST_CASE("sinc limit")
{
    CHECK(sinc(0.0) == 1.0);
    CHECK(sinc(std::numbers::pi) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(sinc(1e-9) == doctest::Approx(1.0));
    CHECK(sinc(2.0) == doctest::Approx(std::sin(2.0) / 2.0));
}

TEST_CASE("broadside coefficient magnitudes")
{
    const ApertureSpec a = default_aperture();
    const FarFieldPoint p = FarFieldPoint::from_degrees(10.0, 0.0, 0.0);
    CHECK(std::abs(fourier_green_coeff(a, {0, 0}, p)) ==
          doctest::Approx(std::sqrt(a.area) / (4.0 * std::numbers::pi * 10.0)).epsilon(1e-14));
    // at broadside every nonzero order sits on a sinc zero
    CHECK(std::abs(fourier_green_coeff(a, {1, 0}, p)) < 1e-18);
    CHECK(std::abs(fourier_green_coeff(a, {0, -3}, p)) < 1e-18);
}

TEST_CASE("closed-form coefficient matches surface quadrature")
{
    const ApertureSpec a = default_aperture();
    struct Case {
        FarFieldPoint p;
        int nx, ny;
    };
    const Case cases[] = {
        {FarFieldPoint::from_degrees(10.0, 30.0, 90.0), 0, -4},
        {FarFieldPoint::from_degrees(10.0, 30.0, 90.0), 0, 0},
        {FarFieldPoint::from_degrees(10.0, 30.0, 45.0), -1, 2},
        {FarFieldPoint::from_degrees(25.0, 60.0, 200.0), 3, -1},
        {FarFieldPoint::from_degrees(10.0, 12.0, 310.0), 4, 4},
    };
    for (const auto& c : cases) {
        const cplx closed = fourier_green_coeff(a, {c.nx, c.ny}, c.p);
        const cplx quad = oracle::coefficient_quadrature(a, c.nx, c.ny, c.p);
        CAPTURE(c.nx);
        CAPTURE(c.ny);
        CHECK(std::abs(closed - quad) <= 1e-6 * std::abs(quad) + 1e-15);
    }
}

TEST_CASE("channel vector is the conjugated coefficient list")
{
    const ApertureSpec a = default_aperture();
    const WavenumberGrid g = truncation_grid(a);
    const FarFieldPoint p = FarFieldPoint::from_degrees(10.0, 30.0, 45.0);
    const CVector f = channel_vector(a, g, p);
    REQUIRE(static_cast<std::size_t>(f.size()) == g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
        CHECK(std::abs(f(static_cast<Eigen::Index>(n)) - std::conj(fourier_green_coeff(a, g.orders[n], p))) < 1e-20);
    }
    const CVector f2 = channel_vector(a, g, FarFieldPoint::make(10.0, p.theta, p.psi + 2.0 * std::numbers::pi));
    CHECK((f - f2).norm() <= 1e-12 * f.norm());
}

TEST_CASE("channel energy never exceeds the surface energy")
{
    const ApertureSpec a = default_aperture();
    const WavenumberGrid g = truncation_grid(a);
    for (double theta : {0.0, 15.0, 30.0, 60.0, 85.0}) {
        for (double psi : {0.0, 45.0, 90.0, 137.0, 270.0}) {
            const FarFieldPoint p = FarFieldPoint::from_degrees(10.0, theta, psi);
            const double oracle_energy = green_energy_oracle(a, p, 128);
            CHECK(channel_vector(a, g, p).squaredNorm() <= oracle_energy + 1e-9);
        }
    }
}

TEST_CASE("untruncated coefficient energy approaches the surface energy")
{
    const ApertureSpec a = default_aperture();
    const FarFieldPoint p = FarFieldPoint::from_degrees(10.0, 30.0, 45.0);
    double sum = 0.0;
    for (int nx = -80; nx <= 80; ++nx)
        for (int ny = -80; ny <= 80; ++ny) sum += std::norm(fourier_green_coeff(a, {nx, ny}, p));
    const double energy = green_energy_oracle(a, p, 64);
    CHECK(sum <= energy * (1.0 + 1e-12));
    CHECK(sum >= 0.99 * energy);
}

TEST_CASE("surface energy oracle")
{
    const ApertureSpec a = default_aperture();
    const FarFieldPoint p = FarFieldPoint::from_degrees(10.0, 30.0, 90.0);
    const double e64 = green_energy_oracle(a, p, 64);
    CHECK(e64 == doctest::Approx(free_space_energy(0.25, 10.0)).epsilon(1e-12));
    CHECK(e64 == doctest::Approx(1.5831e-5).epsilon(1e-4));
    CHECK(std::abs(green_energy_oracle(a, p, 128) - e64) < 1e-10 * e64);
    CHECK_THROWS_AS(green_energy_oracle(a, p, 63), InvalidArgument);
}

TEST_CASE("basis functions are orthonormal")
{
    const ApertureSpec a = ApertureSpec::from_carrier(0.5, 0.25, 2.4e9);
    const WavenumberGrid g = truncation_grid(a);
    for (std::size_t i = 0; i < g.size(); i += 7) {
        for (std::size_t j = 0; j < g.size(); j += 5) {
            const cplx ip = oracle::basis_inner_product(a, g.orders[i], g.orders[j], 96);
            CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-10);
        }
        const double sx = 0.1, sy = -0.05;
        CHECK(std::abs(basis_function(a, g.orders[i], sx, sy) - oracle::basis(a, g.orders[i][0], g.orders[i][1], sx, sy)) <
              1e-12);
    }
}

TEST_CASE("channel set builds rank-one target matrices")
{
    const ApertureSpec a = default_aperture();
    const WavenumberGrid g = truncation_grid(a);
    const ChannelSet ch = make_channel_set(a, g, {FarFieldPoint::from_degrees(10, 30, 180)},
                                           {FarFieldPoint::from_degrees(10, 30, 90), FarFieldPoint::from_degrees(10, 30, 45)});
    CHECK(ch.num_users() == 1);
    CHECK(ch.num_targets() == 2);
    CHECK(ch.dimension() == 81);
    for (const auto& G : ch.target_matrices) {
        CHECK((G - G.adjoint()).norm() <= 1e-12 * G.norm());
        Eigen::JacobiSVD<CMatrix> svd(G);
        CHECK(svd.singularValues()(1) <= 1e-9 * svd.singularValues()(0));
    }
    CHECK_THROWS_AS(ChannelSet::from_vectors({CVector::Ones(3)}, {CVector::Ones(4)}), InvalidArgument);
}

TEST_CASE("projected surface noise is white")
{
    const ApertureSpec a = ApertureSpec::from_carrier(0.25, 0.25, 2.4e9);
    const WavenumberGrid g = truncation_grid(a);
    const double sigma = 2.5;
    const CMatrix cov = project_noise_samples(a, g, sigma, 20000, 11);
    double worst_off = 0.0, worst_diag = 0.0;
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
        for (Eigen::Index j = 0; j < cov.cols(); ++j) {
            if (i == j) {
                worst_diag = std::max(worst_diag, std::abs(cov(i, i).real() / sigma - 1.0));
            } else {
                worst_off = std::max(worst_off, std::abs(cov(i, j)) / sigma);
            }
        }
    }
    // Monte Carlo spread is about 1/sqrt(20000) = 0.007
    CHECK(worst_off < 0.04);
    CHECK(worst_diag < 0.05);
    CHECK((cov - cov.adjoint()).norm() < 1e-12 * cov.norm());

    const CMatrix again = project_noise_samples(a, g, sigma, 500, 3);
    CHECK(again == project_noise_samples(a, g, sigma, 500, 3));
    CHECK(again != project_noise_samples(a, g, sigma, 500, 4));
    CHECK_THROWS_AS(project_noise_samples(a, g, sigma, 0, 1), InvalidArgument);
}

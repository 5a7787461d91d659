#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hisac/types.hpp"

namespace hisac {

/// Propagation speed used throughout the model. We use the rounded value so that
/// 2.4 GHz maps to a wavelength of exactly 0.125 m.
inline constexpr double kSpeedOfLight = 3.0e8;
/// Free-space wave impedance consistent with kSpeedOfLight (120 pi ohm).
inline constexpr double kFreeSpaceImpedance = 376.99111843077515;

/// Rectangular aperture centred at the origin of the XOY plane.
struct ApertureSpec {
    double lx = 0.0;           // m
    double ly = 0.0;           // m
    double carrier_freq = 0.0; // Hz
    double lambda = 0.0;       // m
    double kappa = 0.0;        // rad/m
    double area = 0.0;         // m^2, exactly lx * ly
    double z0 = kFreeSpaceImpedance;

    /// Throws InvalidArgument unless lx, ly and the carrier are positive.
    static ApertureSpec from_carrier(double lx, double ly, double carrier_hz);
    /// Square aperture of the given area.
    static ApertureSpec square(double area, double carrier_hz);
};

/// Retained Fourier orders (n_x, n_y), row-major by n_x then n_y.
struct WavenumberGrid {
    int half_x = 0;
    int half_y = 0;
    std::vector<std::array<int, 2>> orders;

    std::size_t size() const { return orders.size(); }
    /// Position of (n_x, n_y) in `orders`.
    std::size_t index_of(int nx, int ny) const;
};

/// Far-field position in spherical coordinates around the aperture centre.
struct FarFieldPoint {
    double r = 0.0;     // m
    double theta = 0.0; // polar angle, [0, pi/2)
    double psi = 0.0;   // azimuth, [0, 2 pi)

    /// Validates r and theta, wraps psi into [0, 2 pi).
    static FarFieldPoint make(double r, double theta, double psi);
    static FarFieldPoint from_degrees(double r, double theta_deg, double psi_deg);
};

/// Channel vectors of users (f_k) and targets (g_m) with G_m = g_m g_m^H.
struct ChannelSet {
    std::vector<CVector> user_vectors;
    std::vector<CVector> target_vectors;
    std::vector<CMatrix> target_matrices;

    std::size_t num_users() const { return user_vectors.size(); }
    std::size_t num_targets() const { return target_vectors.size(); }
    /// Common vector length; 0 for an empty set.
    std::size_t dimension() const;

    /// Builds G_m from the target vectors and checks that all lengths agree.
    static ChannelSet from_vectors(std::vector<CVector> users, std::vector<CVector> targets);
};

/// sin(x)/x with the limit value at the origin.
double sinc(double x);

WavenumberGrid truncation_grid(const ApertureSpec& aperture);

/// Closed-form Fourier coefficient of the far-field Green's function against the
/// aperture basis function of the given order.
cplx fourier_green_coeff(const ApertureSpec& aperture, std::array<int, 2> order,
                         const FarFieldPoint& point);

/// Channel vector in the convention f = [c_1 ... c_N]^H, ordered like `grid`.
CVector channel_vector(const ApertureSpec& aperture, const WavenumberGrid& grid,
                       const FarFieldPoint& point);

ChannelSet make_channel_set(const ApertureSpec& aperture, const WavenumberGrid& grid,
                            const std::vector<FarFieldPoint>& users,
                            const std::vector<FarFieldPoint>& targets);

/// Midpoint-rule value of the surface integral of |G|^2 over the aperture.
/// Requires at least 64 samples per axis.
double green_energy_oracle(const ApertureSpec& aperture, const FarFieldPoint& point,
                           int resolution);

/// Orthonormal aperture basis function of the given order at surface point (sx, sy).
cplx basis_function(const ApertureSpec& aperture, std::array<int, 2> order, double sx, double sy);

/// Empirical covariance of spatially white surface noise projected onto the
/// retained basis. `surface_resolution` = 0 picks an exact-orthogonality sampling.
CMatrix project_noise_samples(const ApertureSpec& aperture, const WavenumberGrid& grid,
                              double sigma_r_sq, std::size_t num_samples, std::uint64_t seed,
                              int surface_resolution = 0);

} // namespace hisac

#pragma once

#include <string>
#include <vector>

#include "hisac/ao_driver.hpp"
#include "hisac/em_core.hpp"
#include "hisac/sinr.hpp"

namespace hisac {

/// Half-wavelength planar array filling the same aperture as the surface.
struct DiscreteArraySpec {
    int dx = 0;
    int dy = 0;
    double spacing_x = 0.0;  // m
    double spacing_y = 0.0;  // m
    double e_a = 0.0;        // effective element aperture, m^2
    double kappa = 0.0;
    double area = 0.0;       // aperture the array fills, m^2

    int size() const { return dx * dy; }
    /// Element counts round(2L / lambda) (at least one), spacing L / count and
    /// e_a = A_T / (pi D), which is lambda^2 / (4 pi) whenever 2L / lambda is whole.
    static DiscreteArraySpec from_aperture(const ApertureSpec& aperture);
};

/// Element d at (x_d, y_d): sqrt(e_a) e^{j kappa r} / (4 pi r) e^{-j kappa sin(theta)(x_d cos(psi) + y_d sin(psi))}.
/// Elements are centred on the origin and ordered row-major by x then y.
CVector discrete_channel_vector(const DiscreteArraySpec& spec, const FarFieldPoint& point);

ChannelModel discrete_channel_model(const DiscreteArraySpec& spec);

ChannelSet make_discrete_channel_set(const DiscreteArraySpec& spec, const std::vector<FarFieldPoint>& users,
                                     const std::vector<FarFieldPoint>& targets);

/// One optimised design with what is needed to compare it against another.
struct ArrayDesign {
    std::string label;
    std::vector<FarFieldPoint> users;
    std::vector<FarFieldPoint> targets;
    IsacProblem problem;
    ChannelModel model;
    OptimizationResult result;
};

struct GainReport {
    double sensing_db = 0.0;
    std::vector<double> comm_margin_db;  // per user
    double tx_peak_db = 0.0;
    std::vector<double> rx_peak_db;      // per target
};

/// dB differences (first minus second) for designs of the same scenario. The
/// pattern peaks are taken on the azimuth cut at `theta_cut_deg`.
GainReport compare_gain(const ArrayDesign& his, const ArrayDesign& other, double theta_cut_deg = 30.0,
                        std::size_t cut_points = 720);

} // namespace hisac

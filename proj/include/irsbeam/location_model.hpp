// SPDX-License-Identifier: Apache-2.0
//
// irsbeam - robust transmit beamforming and IRS phase-shift design
// Copyright (C) 2026 irsbeam developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef IRSBEAM_LOCATION_MODEL_HPP
#define IRSBEAM_LOCATION_MODEL_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "irsbeam/array_geometry.hpp"
#include "irsbeam/channel_model.hpp"
#include "irsbeam/rng.hpp"

namespace irsbeam
{

struct Position3D
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Eigen::Vector3d vec() const { return {x, y, z}; }
};

/// Additive user-position error (dx, dy, dz) in meters.
struct LocationError
{
    Eigen::Vector3d delta = Eigen::Vector3d::Zero();
};

/// Spherical uncertainty region: the true user position lies within `radius`
/// meters of the estimate.
struct UncertaintyBall
{
    double radius = 0.0;

    UncertaintyBall() = default;
    explicit UncertaintyBall(double r) : radius(r)
    {
        if (radius < 0.0)
            throw std::invalid_argument("UncertaintyBall: radius must be nonnegative");
    }
};

/// First-order sensitivity of the per-element reflection phase to the user
/// position error. Row i of `f` holds the (x, y, z) coefficients so that the
/// phase error of element i is pi * f.row(i) . delta.
struct ErrorSensitivity
{
    Eigen::Matrix<double, Eigen::Dynamic, 3> f;
    double d_hat = 0.0;            // estimated IRS-user distance
    Eigen::Vector3d v_hat = Eigen::Vector3d::Zero(); // estimated (v_x, v_y, v_z)
};

/// Effective departure angles from IRS to user together with the separation
/// distance: v_y = (y_I - y_U)/d, v_z = (z_I - z_U)/d.
inline std::pair<EffectiveAngles, double> effective_aods_from_positions(const Position3D &irs,
                                                                        const Position3D &user)
{
    const Eigen::Vector3d diff = irs.vec() - user.vec();
    const double d = diff.norm();
    if (d == 0.0)
        throw std::domain_error("effective_aods_from_positions: coincident positions");
    return {EffectiveAngles{diff.z() / d, diff.y() / d}, d};
}

/// Reflection channel built from the estimated user position.
inline ReflectChannel estimated_reflect_channel(const Position3D &irs, const Position3D &user_est,
                                                std::complex<double> alpha,
                                                const UraGeometry &irs_geom)
{
    const auto [angles, d] = effective_aods_from_positions(irs, user_est);
    ReflectChannel g;
    g.alpha = alpha;
    g.angles = angles;
    g.vector = alpha * steering_vector(irs_geom, angles);
    return g;
}

/// Per-element phase sensitivity vectors f_i. With (i_m, i_n) the grid position
/// of element i and v = (v_x, v_y, v_z) the estimated direction cosines:
///   f_i = [ (i_m-1) v_z v_x / d + (i_n-1) v_y v_x / d,
///           (i_m-1) v_z v_y / d + (i_n-1) (v_y^2 - 1) / d,
///           (i_m-1) (v_z^2 - 1) / d + (i_n-1) v_y v_z / d ].
/// Element 1 (grid corner) has f_1 = 0.
inline ErrorSensitivity error_sensitivity(const Position3D &irs, const Position3D &user_est,
                                          const UraGeometry &irs_geom)
{
    const auto [angles, d] = effective_aods_from_positions(irs, user_est);
    const double vx = (irs.x - user_est.x) / d;
    const double vy = angles.v_y;
    const double vz = angles.v_z;

    ErrorSensitivity s;
    s.d_hat = d;
    s.v_hat = {vx, vy, vz};
    s.f.resize(irs_geom.size(), 3);
    for (int i = 1; i <= irs_geom.size(); ++i)
    {
        const GridIndex g = flat_to_grid(i, irs_geom.n_z, irs_geom.n_y);
        const double km = g.row - 1;
        const double kn = g.col - 1;
        s.f(i - 1, 0) = (km * vz * vx + kn * vy * vx) / d;
        s.f(i - 1, 1) = (km * vz * vy + kn * (vy * vy - 1.0)) / d;
        s.f(i - 1, 2) = (km * (vz * vz - 1.0) + kn * vy * vz) / d;
    }
    return s;
}

/// Multiplicative channel error e with [e]_i = exp(j pi f_i . delta); all
/// entries unit modulus.
inline Eigen::VectorXcd error_vector(const ErrorSensitivity &sens, const LocationError &err)
{
    Eigen::VectorXcd e(sens.f.rows());
    const Eigen::VectorXd phase = std::numbers::pi * (sens.f * err.delta);
    for (Eigen::Index i = 0; i < e.size(); ++i)
        e(i) = std::polar(1.0, phase(i));
    return e;
}

/// Draw a position error uniformly from the closed uncertainty ball.
inline LocationError sample_error(const UncertaintyBall &ball, Rng &rng)
{
    if (ball.radius == 0.0)
        return {};
    return {rng.uniform_in_ball(ball.radius)};
}

/// Reflection channel recomputed from the true (perturbed) user position; the
/// amplitude is rescaled with distance so that |alpha| follows the free-space
/// 1/d law while keeping the reference phase.
inline ReflectChannel exact_reflect_channel(const Position3D &irs, const Position3D &user_true,
                                            std::complex<double> alpha_ref, double d_ref,
                                            const UraGeometry &irs_geom)
{
    const auto [angles, d] = effective_aods_from_positions(irs, user_true);
    ReflectChannel g;
    g.alpha = alpha_ref * (d_ref / d);
    g.angles = angles;
    g.vector = g.alpha * steering_vector(irs_geom, angles);
    return g;
}

} // namespace irsbeam

#endif

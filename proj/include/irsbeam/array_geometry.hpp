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

#ifndef IRSBEAM_ARRAY_GEOMETRY_HPP
#define IRSBEAM_ARRAY_GEOMETRY_HPP

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace irsbeam
{

/// Uniform rectangular array layout. Elements are counted 1-based along the
/// z axis first (rows), then along the y axis (columns), so flat index i maps
/// to row i_m and column i_n of an n_z-by-n_y grid.
struct UraGeometry
{
    int n_z = 1;          // elements along z (rows)
    int n_y = 1;          // elements along y (columns)
    double spacing = 0.5; // element pitch in carrier wavelengths

    UraGeometry() = default;
    UraGeometry(int nz, int ny, double pitch = 0.5) : n_z(nz), n_y(ny), spacing(pitch)
    {
        if (n_z < 1 || n_y < 1)
            throw std::invalid_argument("UraGeometry: array dimensions must be at least 1");
        if (!(spacing > 0.0))
            throw std::invalid_argument("UraGeometry: element spacing must be positive");
    }

    int size() const { return n_z * n_y; }
};

/// Dimensionless effective angle pair. Each component is the per-element phase
/// progression divided by pi, i.e. a product of sines/cosines of the physical
/// elevation/azimuth angles; with half-wavelength spacing both lie in [-1, 1].
struct EffectiveAngles
{
    double v_z = 0.0;
    double v_y = 0.0;
};

/// 1-based row/column position of an element on the URA grid.
struct GridIndex
{
    int row = 1; // i_m, along z
    int col = 1; // i_n, along y
};

/// Map a 1-based flat element index onto the grid:
/// i_m = i - (ceil(i/n_z) - 1) * n_z, i_n = ceil(i/n_z).
inline GridIndex flat_to_grid(int flat, int n_z, int n_y)
{
    if (n_z < 1 || n_y < 1)
        throw std::invalid_argument("flat_to_grid: array dimensions must be at least 1");
    if (flat < 1 || flat > n_z * n_y)
        throw std::domain_error("flat_to_grid: index " + std::to_string(flat) + " outside 1.." +
                                std::to_string(n_z * n_y));
    const int col = (flat + n_z - 1) / n_z; // ceil(flat / n_z)
    const int row = flat - (col - 1) * n_z;
    return {row, col};
}

/// Inverse of flat_to_grid (1-based everywhere).
inline int grid_to_flat(const GridIndex &g, int n_z, int n_y)
{
    if (g.row < 1 || g.row > n_z || g.col < 1 || g.col > n_y)
        throw std::domain_error("grid_to_flat: grid position outside the array");
    return (g.col - 1) * n_z + g.row;
}

/// Array response (steering) vector. Entry i is
/// exp(j*pi*(spacing/0.5)*[(i_m-1)*v_z + (i_n-1)*v_y]); all entries have unit
/// modulus.
inline Eigen::VectorXcd steering_vector(const UraGeometry &geom, const EffectiveAngles &angles)
{
    const double scale = std::numbers::pi * (geom.spacing / 0.5);
    Eigen::VectorXcd a(geom.size());
    for (int i = 1; i <= geom.size(); ++i)
    {
        const GridIndex g = flat_to_grid(i, geom.n_z, geom.n_y);
        const double phase = scale * ((g.row - 1) * angles.v_z + (g.col - 1) * angles.v_y);
        a(i - 1) = std::polar(1.0, phase);
    }
    return a;
}

} // namespace irsbeam

#endif

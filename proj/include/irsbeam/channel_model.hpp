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

#ifndef IRSBEAM_CHANNEL_MODEL_HPP
#define IRSBEAM_CHANNEL_MODEL_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "irsbeam/array_geometry.hpp"

namespace irsbeam
{

/// One propagation path of the narrowband geometric channel model: complex
/// gain, departure angles at the BS, arrival angles at the IRS.
struct PathSpec
{
    std::complex<double> gain{1.0, 0.0};
    EffectiveAngles aod; // at the BS
    EffectiveAngles aoa; // at the IRS
};

/// BS-to-IRS matrix channel, M x N.
struct ChannelB2I
{
    Eigen::MatrixXcd matrix;
};

/// Line-of-sight IRS-to-user reflection channel: complex amplitude times a
/// steering vector, so every entry has modulus |alpha|.
struct ReflectChannel
{
    std::complex<double> alpha{1.0, 0.0};
    EffectiveAngles angles;
    Eigen::VectorXcd vector;
};

/// Per-element IRS phase shifts, constrained to unit modulus.
struct PhaseShifts
{
    Eigen::VectorXcd xi;

    PhaseShifts() = default;
    explicit PhaseShifts(Eigen::VectorXcd v) : xi(std::move(v))
    {
        for (Eigen::Index i = 0; i < xi.size(); ++i)
            if (std::abs(std::abs(xi(i)) - 1.0) > 1e-9)
                throw std::invalid_argument("PhaseShifts: entries must have unit modulus");
    }

    static PhaseShifts all_ones(int m)
    {
        PhaseShifts p;
        p.xi = Eigen::VectorXcd::Ones(m);
        return p;
    }
};

/// Sum-of-paths geometric channel G = sum_l beta_l * b(aoa_l) * a(aod_l)^T,
/// of size M x N where M is the IRS size and N the BS size.
inline ChannelB2I synthesize_b2i(const std::vector<PathSpec> &paths, const UraGeometry &bs_geom,
                                 const UraGeometry &irs_geom)
{
    if (paths.empty())
        throw std::invalid_argument("synthesize_b2i: at least one path required");
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(irs_geom.size(), bs_geom.size());
    for (const PathSpec &p : paths)
    {
        const Eigen::VectorXcd b = steering_vector(irs_geom, p.aoa);
        const Eigen::VectorXcd a = steering_vector(bs_geom, p.aod);
        g.noalias() += p.gain * b * a.transpose();
    }
    return {std::move(g)};
}

/// Composite BS-to-user channel h with h^T = g^T diag(xi) G, returned as an
/// N-vector. Bilinear in (g, xi).
inline Eigen::VectorXcd effective_channel(const ReflectChannel &g, const PhaseShifts &xi,
                                          const ChannelB2I &big_g)
{
    const Eigen::Index m = big_g.matrix.rows();
    if (g.vector.size() != m || xi.xi.size() != m)
        throw std::invalid_argument("effective_channel: dimension mismatch");
    // h = G^T diag(xi) g
    return big_g.matrix.transpose() * (xi.xi.cwiseProduct(g.vector));
}

/// Achievable rate R = log2(1 + |h^T w|^2 / sigma0^2) in bits/s/Hz.
inline double achievable_rate(const Eigen::VectorXcd &h, const Eigen::VectorXcd &w,
                              double noise_power_w)
{
    if (!(noise_power_w > 0.0))
        throw std::invalid_argument("achievable_rate: noise power must be positive");
    if (h.size() != w.size())
        throw std::invalid_argument("achievable_rate: dimension mismatch");
    const std::complex<double> s = h.transpose() * w;
    return std::log2(1.0 + std::norm(s) / noise_power_w);
}

/// Noise power in watts from a spectral density in dBm/Hz and a bandwidth in
/// Hz: sigma0^2 = 10^((density + 10 log10 B - 30) / 10).
inline double noise_power_from_scenario(double density_dbm_per_hz, double bandwidth_hz)
{
    if (!(bandwidth_hz > 0.0))
        throw std::invalid_argument("noise_power_from_scenario: bandwidth must be positive");
    const double dbm = density_dbm_per_hz + 10.0 * std::log10(bandwidth_hz);
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

} // namespace irsbeam

#endif

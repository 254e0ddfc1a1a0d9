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

#ifndef IRSBEAM_RNG_HPP
#define IRSBEAM_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace irsbeam
{

/// splitmix64 step; used to derive independent stream seeds from a base seed.
inline std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for substream `index` of purpose `tag` under a base seed. Used so that
/// Monte Carlo partitions and channel synthesis draw from disjoint streams
/// regardless of evaluation order or thread count.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag, std::uint64_t index = 0)
{
    return mix_seed(mix_seed(base ^ mix_seed(tag)) + index);
}

/// Deterministic random stream. Distribution transforms are implemented here
/// rather than with std:: distributions so that byte-identical sequences are
/// produced across standard libraries.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of precision.
    double uniform01() { return std::ldexp(static_cast<double>(engine_() >> 11), -53); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (always consumes two draws).
    double normal()
    {
        if (have_spare_)
        {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0)
            u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    /// Circularly symmetric complex normal with unit variance.
    std::complex<double> complex_normal()
    {
        const double re = normal();
        const double im = normal();
        return {re / std::numbers::sqrt2, im / std::numbers::sqrt2};
    }

    std::complex<double> unit_phase() { return std::polar(1.0, uniform(0.0, 2.0 * std::numbers::pi)); }

    /// Uniform draw from the closed ball of given radius: random direction from
    /// three normals, radius scaled by U^(1/3).
    Eigen::Vector3d uniform_in_ball(double radius)
    {
        Eigen::Vector3d dir;
        do
        {
            // draws sequenced one at a time; argument evaluation order would
            // be compiler-dependent
            for (int i = 0; i < 3; ++i)
                dir(i) = normal();
        } while (dir.norm() == 0.0);
        const double n = dir.norm();
        const double r = radius * std::cbrt(uniform01());
        return dir * (r / n);
    }

    Eigen::VectorXcd complex_normal_vector(int n)
    {
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i)
            v(i) = complex_normal();
        return v;
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace irsbeam

#endif

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

#ifndef IRSBEAM_BASELINE_HPP
#define IRSBEAM_BASELINE_HPP

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "irsbeam/channel_model.hpp"
#include "irsbeam/robust_optimizer.hpp"

namespace irsbeam
{

struct BaselineSolution
{
    Eigen::VectorXcd w;
    PhaseShifts xi;
    double power = 0.0;        // always equals the budget
    double nominal_rate = 0.0; // bits/s/Hz at the estimated position
    int iterations = 0;
};

/// Uncertainty-blind reference design at a fixed power budget: alternate
/// phase alignment against the current beamformer with a matched filter
/// against the resulting effective channel, until the nominal rate stops
/// improving. Both half-steps are closed-form and each is optimal given the
/// other variable, so the rate sequence is nondecreasing.
inline BaselineSolution nonrobust_design(const DesignContext &ctx, double power_budget)
{
    ctx.validate();
    if (!(power_budget > 0.0))
        throw std::invalid_argument("nonrobust_design: power budget must be positive");

    const Eigen::VectorXcd h0 =
        effective_channel(ctx.g_hat, PhaseShifts::all_ones(ctx.m()), ctx.big_g);
    if (!(h0.norm() > 0.0))
        throw std::domain_error("nonrobust_design: zero composite channel");

    BaselineSolution out;
    out.power = power_budget;
    Eigen::VectorXcd w = std::sqrt(power_budget) * h0.conjugate() / h0.norm();
    PhaseShifts xi = PhaseShifts::all_ones(ctx.m());
    double rate = achievable_rate(effective_channel(ctx.g_hat, xi, ctx.big_g), w,
                                  ctx.noise_power_w);

    constexpr int k_max_rounds = 500;
    for (int k = 1; k <= k_max_rounds; ++k)
    {
        out.iterations = k;
        const Eigen::VectorXcd d0 = ctx.g_hat.vector.cwiseProduct(ctx.big_g.matrix * w);
        Eigen::VectorXcd aligned(ctx.m());
        for (int i = 0; i < ctx.m(); ++i)
            aligned(i) = std::polar(1.0, -std::arg(d0(i)));
        xi = PhaseShifts(aligned);

        const Eigen::VectorXcd h = effective_channel(ctx.g_hat, xi, ctx.big_g);
        if (!(h.norm() > 0.0))
            throw std::domain_error("nonrobust_design: zero composite channel");
        w = std::sqrt(power_budget) * h.conjugate() / h.norm();

        const double next = achievable_rate(h, w, ctx.noise_power_w);
        if (next - rate < 1e-6)
        {
            rate = std::max(rate, next);
            break;
        }
        rate = next;
    }

    out.w = w;
    out.xi = xi;
    out.nominal_rate = rate;
    return out;
}

} // namespace irsbeam

#endif

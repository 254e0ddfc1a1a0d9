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

#ifndef IRSBEAM_ROBUST_OPTIMIZER_HPP
#define IRSBEAM_ROBUST_OPTIMIZER_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "irsbeam/channel_model.hpp"
#include "irsbeam/location_model.hpp"
#include "irsbeam/rng.hpp"
#include "irsbeam/robust_quadratic.hpp"
#include "irsbeam/sdp.hpp"

namespace irsbeam
{

struct OptimizerConfig
{
    double target_rate_r = 4.0;     // bits/s/Hz
    double epsilon = 1e-3;          // stop when fractional power decrease falls below
    int max_outer_iters = 30;
    int randomization_count = 200;
    double power_scale_cap = 1e6;   // largest admissible feasibility-restoring scale
    std::uint64_t rng_seed = 1;
    double sdp_tol = 1e-8;
    bool verify_sdp_solutions = false; // audit every subproblem solution independently
};

/// Immutable per-scenario inputs of the joint design.
struct DesignContext
{
    ChannelB2I big_g;       // BS-to-surface matrix, M x N
    ReflectChannel g_hat;   // estimated surface-to-user channel
    ErrorSensitivity sens;
    UncertaintyBall ball;
    double noise_power_w = 1.0;

    int n() const { return static_cast<int>(big_g.matrix.cols()); }
    int m() const { return static_cast<int>(big_g.matrix.rows()); }

    void validate() const
    {
        if (big_g.matrix.size() == 0 || g_hat.vector.size() != big_g.matrix.rows() ||
            sens.f.rows() != big_g.matrix.rows())
            throw std::invalid_argument("DesignContext: dimension mismatch");
        if (!(noise_power_w > 0.0))
            throw std::invalid_argument("DesignContext: noise power must be positive");
    }
};

/// Received-power floor gamma = (2^r - 1) sigma0^2 equivalent to the rate
/// target.
inline double qos_gamma(double target_rate_r, double noise_power_w)
{
    return (std::exp2(target_rate_r) - 1.0) * noise_power_w;
}

struct TraceRecord
{
    int iteration = 0;
    double power_w = 0.0;
    double v = 0.0;                 // phase-step slack; -inf when that step was infeasible
    double worst_case_margin = 0.0; // model worst-case power minus gamma
};

struct DesignSolution
{
    Eigen::VectorXcd w;
    PhaseShifts xi;
    double power = 0.0;             // ||w||^2 in watts
    double mu = 0.0;
    double worst_case_rate = 0.0;   // certified by the quadratic-model oracle
    double exact_rate_at_worst = 0.0; // exact channel model at the oracle's argmin
    int iterations = 0;
    std::vector<TraceRecord> trace;
    double max_sdp_violation = 0.0; // only populated when verify_sdp_solutions
};

struct WStepResult
{
    Eigen::MatrixXcd w_bar; // relaxed N x N psd beamforming matrix
    double mu = 0.0;
    double relaxed_power = 0.0; // trace(w_bar), the SDR lower bound
    double verify_violation = 0.0;
};

/// Raised by alternate(); carries the iterations completed before the
/// failure so callers can persist a diagnostic trace.
struct OptimizerError : std::runtime_error
{
    std::vector<TraceRecord> trace;
    OptimizerError(const std::string &what, std::vector<TraceRecord> t)
        : std::runtime_error(what), trace(std::move(t))
    {
    }
};

struct XiStepResult
{
    Eigen::MatrixXcd xi_bar; // relaxed M x M psd, unit diagonal
    double mu = 0.0;
    double v = -std::numeric_limits<double>::infinity();
    bool feasible = false;
    double verify_violation = 0.0;
    std::string note;
};

namespace detail
{

/// Below this normalized radius the certificate block is numerically
/// degenerate; the pointwise constraint at zero offset is exact in the limit.
inline constexpr double k_pointwise_rho = 1e-7;

/// Gamma-normalized certificate as one psd constraint:
///   [[ q(V) - 1 - rho^2 mu_n (- v_n),  phi(V)^T / 2        ],
///    [ phi(V) / 2,                     Phi(V)/2 + mu_n I_3 ]]
/// where the lifted forms are pre-scaled so that q is measured in units of
/// gamma. mu_n is the normalized ball multiplier; v_n the optional slack.
inline sdp::PsdConstraint certificate_constraint(const LiftedForms &lf, double rho,
                                                 int n_scalars, int mu_index, int v_index)
{
    sdp::PsdConstraint c;
    c.dim = 4;
    c.constant = Eigen::MatrixXd::Zero(4, 4);
    c.constant(0, 0) = -1.0;
    c.scalar_coeff.resize(static_cast<std::size_t>(n_scalars));
    Eigen::MatrixXd mu_coef = Eigen::MatrixXd::Identity(4, 4);
    mu_coef(0, 0) = -rho * rho;
    c.scalar_coeff[static_cast<std::size_t>(mu_index)] = mu_coef;
    if (v_index >= 0)
    {
        Eigen::MatrixXd v_coef = Eigen::MatrixXd::Zero(4, 4);
        v_coef(0, 0) = -1.0;
        c.scalar_coeff[static_cast<std::size_t>(v_index)] = v_coef;
    }
    c.var_coeff.resize(static_cast<std::size_t>(c.tri_count()));
    c.var_coeff[static_cast<std::size_t>(sdp::PsdConstraint::tri_index(0, 0, 4))] = lf.q_coeff();
    for (int q = 0; q < 3; ++q)
        c.var_coeff[static_cast<std::size_t>(sdp::PsdConstraint::tri_index(0, q + 1, 4))] =
            0.5 * lf.phi_coeff(q);
    for (int s = 0; s < 3; ++s)
        for (int l = s; l < 3; ++l)
            c.var_coeff[static_cast<std::size_t>(sdp::PsdConstraint::tri_index(s + 1, l + 1, 4))] =
                0.5 * lf.Phi_coeff(s, l);
    return c;
}

inline double checked_verify(const sdp::SdpProblem &p, const sdp::SdpSolution &sol)
{
    return sdp::verify(p, sol, 1e-6).max_violation;
}

/// Smallest t in [1, cap] with margin_of(t) >= 0, by bisection on the
/// monotone margin; negative infinity when even the cap fails.
template <class MarginFn>
double smallest_feasible_scale(MarginFn margin_of, double cap, double tol)
{
    if (margin_of(1.0) >= 0.0)
        return 1.0;
    if (margin_of(cap) < 0.0)
        return -std::numeric_limits<double>::infinity();
    double lo = 1.0;
    double hi = cap;
    while ((hi - lo) > tol * hi)
    {
        const double mid = 0.5 * (lo + hi);
        (margin_of(mid) >= 0.0 ? hi : lo) = mid;
    }
    return hi;
}

} // namespace detail

/// Power-minimizing beamforming step at fixed phase shifts: the relaxed
/// matrix variable minimizes trace subject to the certificate block. Solved
/// in gamma-normalized units for conditioning; radius zero (or vanishingly
/// small) uses the pointwise power floor instead of the certificate.
inline WStepResult solve_w_subproblem(const PhaseShifts &xi, const DesignContext &ctx,
                                      const OptimizerConfig &cfg)
{
    ctx.validate();
    const double gamma = qos_gamma(cfg.target_rate_r, ctx.noise_power_w);
    if (!(gamma > 0.0))
        throw std::invalid_argument("solve_w_subproblem: target rate must be positive");

    LiftedForms lf = lift_for_w(xi, ctx.g_hat, ctx.big_g, ctx.sens, ctx.ball);
    const double t_norm = lf.t_or_pi.norm();
    if (!(t_norm > 0.0))
        throw std::domain_error("solve_w_subproblem: zero composite channel");
    lf.t_or_pi /= t_norm;
    // variable substitution W = beta W' makes the floor equal one
    const double beta = gamma / (t_norm * t_norm);
    const double rho = ctx.ball.radius / ctx.sens.d_hat;

    sdp::SdpProblem p;
    p.matrix_var_dim = ctx.n();
    p.var_is_hermitian = true;
    p.sense = sdp::Sense::minimize;
    p.objective_var_coeff = Eigen::MatrixXcd::Identity(ctx.n(), ctx.n());
    if (rho < detail::k_pointwise_rho)
    {
        sdp::LinearConstraint floor;
        floor.var_coeff = lf.q_coeff();
        floor.rhs = 1.0;
        floor.rel = sdp::Relation::ge;
        p.linear_constraints.push_back(floor);
    }
    else
    {
        p.scalars.push_back({"mu_n", 0.0});
        p.psd_constraints.push_back(detail::certificate_constraint(lf, rho, 1, 0, -1));
    }

    const sdp::SdpSolution sol = sdp::solve(p, cfg.sdp_tol);
    if (sol.status != sdp::SolveStatus::optimal)
        throw std::runtime_error(std::string("solve_w_subproblem: solver returned ") +
                                 sdp::to_string(sol.status));

    WStepResult r;
    r.w_bar = beta * sol.matrix_value;
    r.mu = (rho < detail::k_pointwise_rho)
               ? 0.0
               : gamma * rho * rho * sol.scalar_values.at("mu_n");
    r.relaxed_power = r.w_bar.trace().real();
    if (cfg.verify_sdp_solutions)
        r.verify_violation = detail::checked_verify(p, sol);
    return r;
}

/// Rank-one recovery for the beamforming step: candidates U sqrt(L) r with
/// standard complex-normal r plus the principal eigenvector, each scaled up
/// just enough to restore the worst-case floor; returns the cheapest
/// restored candidate.
inline Eigen::VectorXcd randomize_w(const Eigen::MatrixXcd &w_bar, const PhaseShifts &xi,
                                    const DesignContext &ctx, const OptimizerConfig &cfg,
                                    Rng &rng)
{
    ctx.validate();
    const double gamma = qos_gamma(cfg.target_rate_r, ctx.noise_power_w);
    const LiftedForms lf = lift_for_w(xi, ctx.g_hat, ctx.big_g, ctx.sens, ctx.ball);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(w_bar);
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXcd factor = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
    const int n = static_cast<int>(w_bar.rows());

    double best_power = std::numeric_limits<double>::infinity();
    Eigen::VectorXcd best_w;
    double best_margin = -std::numeric_limits<double>::infinity();

    for (int k = 0; k <= cfg.randomization_count; ++k)
    {
        Eigen::VectorXcd cand;
        if (k == 0)
            cand = factor.col(n - 1); // principal direction, tried first
        else
            cand = factor * rng.complex_normal_vector(n);
        if (cand.norm() == 0.0)
            continue;

        CompositeVector d;
        d.d = lf.t_or_pi * cand;
        const RobustQuadratic rq = taylor_quadratic(d, ctx.sens, ctx.ball);
        const auto margin_of = [&](double t) {
            return min_quadratic_over_ball(rq.scaled(t)).value - gamma;
        };
        const double t =
            detail::smallest_feasible_scale(margin_of, cfg.power_scale_cap, 1e-6);
        if (!std::isfinite(t))
        {
            best_margin = std::max(best_margin, margin_of(cfg.power_scale_cap));
            continue;
        }
        const double power = t * cand.squaredNorm();
        if (power < best_power)
        {
            best_power = power;
            best_w = std::sqrt(t) * cand;
        }
        best_margin = std::max(best_margin, margin_of(t));
    }

    if (!best_w.size())
        throw std::runtime_error("randomize_w: randomization failed; best margin " +
                                 std::to_string(best_margin));
    return best_w;
}

inline Eigen::VectorXcd randomize_w(const Eigen::MatrixXcd &w_bar, const PhaseShifts &xi,
                                    const DesignContext &ctx, const OptimizerConfig &cfg)
{
    Rng rng(derive_seed(cfg.rng_seed, 0x77));
    return randomize_w(w_bar, xi, ctx, cfg, rng);
}

/// Phase-shift feasibility step at fixed beamformer: maximizes the power
/// slack v of the certificate over relaxed unit-diagonal phase matrices.
/// Infeasibility is reported through the v = -inf marker, not thrown; the
/// caller keeps its current phases in that case.
inline XiStepResult solve_xi_subproblem(const Eigen::VectorXcd &w, const DesignContext &ctx,
                                        const OptimizerConfig &cfg)
{
    ctx.validate();
    if (w.size() != ctx.n() || w.norm() == 0.0)
        throw std::invalid_argument("solve_xi_subproblem: beamformer must be a nonzero N-vector");
    const double gamma = qos_gamma(cfg.target_rate_r, ctx.noise_power_w);
    if (!(gamma > 0.0))
        throw std::invalid_argument("solve_xi_subproblem: target rate must be positive");

    LiftedForms lf = lift_for_xi(w, ctx.g_hat, ctx.big_g, ctx.sens, ctx.ball);
    if (!(lf.t_or_pi.norm() > 0.0))
        throw std::domain_error("solve_xi_subproblem: zero composite channel");
    lf.t_or_pi /= std::sqrt(gamma); // certificate entries in units of gamma
    const double rho = ctx.ball.radius / ctx.sens.d_hat;

    sdp::SdpProblem p;
    p.matrix_var_dim = ctx.m();
    p.var_is_hermitian = true;
    p.sense = sdp::Sense::maximize;
    if (rho < detail::k_pointwise_rho)
    {
        p.scalars.push_back({"v_n", 1.0});
        sdp::LinearConstraint floor; // q - 1 - v >= 0
        floor.var_coeff = lf.q_coeff();
        floor.scalar_coeff = Eigen::VectorXd::Constant(1, -1.0);
        floor.rhs = 1.0;
        floor.rel = sdp::Relation::ge;
        p.linear_constraints.push_back(floor);
    }
    else
    {
        p.scalars.push_back({"mu_n", 0.0});
        p.scalars.push_back({"v_n", 1.0});
        p.psd_constraints.push_back(detail::certificate_constraint(lf, rho, 2, 0, 1));
    }
    for (int i = 0; i < ctx.m(); ++i)
    {
        sdp::LinearConstraint diag;
        diag.var_coeff = Eigen::MatrixXcd::Zero(ctx.m(), ctx.m());
        diag.var_coeff(i, i) = 1.0;
        diag.rhs = 1.0;
        diag.rel = sdp::Relation::eq;
        p.linear_constraints.push_back(diag);
    }

    const sdp::SdpSolution sol = sdp::solve(p, cfg.sdp_tol);
    XiStepResult r;
    if (sol.status != sdp::SolveStatus::optimal)
    {
        r.note = std::string("phase step not solved to optimality: ") +
                 sdp::to_string(sol.status);
        return r; // v stays at the -inf marker
    }
    r.feasible = true;
    r.xi_bar = sol.matrix_value;
    r.v = gamma * sol.scalar_values.at("v_n");
    r.mu = (rho < detail::k_pointwise_rho)
               ? 0.0
               : gamma * rho * rho * sol.scalar_values.at("mu_n");
    if (cfg.verify_sdp_solutions)
        r.verify_violation = detail::checked_verify(p, sol);
    return r;
}

/// Rank-one recovery for the phase step: candidates exp(j arg(U sqrt(L) r))
/// plus the entrywise-normalized principal eigenvector; returns the
/// candidate with the best model worst-case margin at the given beamformer.
inline PhaseShifts randomize_xi(const Eigen::MatrixXcd &xi_bar, const Eigen::VectorXcd &w,
                                const DesignContext &ctx, const OptimizerConfig &cfg, Rng &rng)
{
    ctx.validate();
    const double gamma = qos_gamma(cfg.target_rate_r, ctx.noise_power_w);
    const Eigen::VectorXcd d0 = ctx.g_hat.vector.cwiseProduct(ctx.big_g.matrix * w);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(xi_bar);
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXcd factor = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
    const int m = static_cast<int>(xi_bar.rows());

    const auto to_phases = [](const Eigen::VectorXcd &raw) {
        Eigen::VectorXcd out(raw.size());
        for (Eigen::Index i = 0; i < raw.size(); ++i)
            out(i) = std::polar(1.0, std::arg(raw(i)));
        return out;
    };

    double best_margin = -std::numeric_limits<double>::infinity();
    Eigen::VectorXcd best;
    for (int k = 0; k <= cfg.randomization_count; ++k)
    {
        const Eigen::VectorXcd cand = to_phases(
            k == 0 ? Eigen::VectorXcd(factor.col(m - 1)) // principal direction
                   : Eigen::VectorXcd(factor * rng.complex_normal_vector(m)));
        CompositeVector d;
        d.d = d0.cwiseProduct(cand);
        const double margin =
            min_quadratic_over_ball(taylor_quadratic(d, ctx.sens, ctx.ball)).value - gamma;
        if (margin > best_margin)
        {
            best_margin = margin;
            best = cand;
        }
    }
    return PhaseShifts(best);
}

inline PhaseShifts randomize_xi(const Eigen::MatrixXcd &xi_bar, const Eigen::VectorXcd &w,
                                const DesignContext &ctx, const OptimizerConfig &cfg)
{
    Rng rng(derive_seed(cfg.rng_seed, 0x78));
    return randomize_xi(xi_bar, w, ctx, cfg, rng);
}

namespace detail
{

inline double model_margin(const Eigen::VectorXcd &w, const PhaseShifts &xi,
                           const DesignContext &ctx, double gamma)
{
    const CompositeVector d = composite_vector(ctx.g_hat, xi, ctx.big_g, w);
    return min_quadratic_over_ball(taylor_quadratic(d, ctx.sens, ctx.ball)).value - gamma;
}

} // namespace detail

/// Alternating design loop: phase-aligned matched-filter start scaled to
/// feasibility, then beamforming and phase steps with monotone power
/// acceptance until the fractional power decrease drops below epsilon.
inline DesignSolution alternate(const DesignContext &ctx, const OptimizerConfig &cfg)
{
    ctx.validate();
    if (!(cfg.epsilon > 0.0) || cfg.randomization_count < 1 || cfg.max_outer_iters < 1)
        throw std::invalid_argument("alternate: bad optimizer configuration");
    const double gamma = qos_gamma(cfg.target_rate_r, ctx.noise_power_w);
    if (!(gamma > 0.0))
        throw std::invalid_argument("alternate: target rate must be positive");

    Rng rng_w(derive_seed(cfg.rng_seed, 0x77));
    Rng rng_xi(derive_seed(cfg.rng_seed, 0x78));

    // matched filter against the all-ones-phase effective channel
    const Eigen::VectorXcd h0 =
        effective_channel(ctx.g_hat, PhaseShifts::all_ones(ctx.m()), ctx.big_g);
    if (!(h0.norm() > 0.0))
        throw std::domain_error("alternate: zero composite channel");
    const Eigen::VectorXcd w_mrt = h0.conjugate() / h0.norm();

    // phase alignment to the matched filter, then scale to feasibility
    const Eigen::VectorXcd d_mrt = ctx.g_hat.vector.cwiseProduct(ctx.big_g.matrix * w_mrt);
    Eigen::VectorXcd xi0(ctx.m());
    for (int i = 0; i < ctx.m(); ++i)
        xi0(i) = std::polar(1.0, -std::arg(d_mrt(i)));
    PhaseShifts xi{xi0};

    const CompositeVector d_init = composite_vector(ctx.g_hat, xi, ctx.big_g, w_mrt);
    const RobustQuadratic rq_init = taylor_quadratic(d_init, ctx.sens, ctx.ball);
    // bisect headroom over the power meeting the zero-error floor, so the cap
    // bounds a unitless decoherence ratio rather than absolute watts
    const double p_nom = gamma / rq_init.q0;
    const double t_init = detail::smallest_feasible_scale(
        [&](double t) {
            return min_quadratic_over_ball(rq_init.scaled(t * p_nom)).value - gamma;
        },
        cfg.power_scale_cap, 1e-6);
    if (!std::isfinite(t_init))
        throw OptimizerError("alternate: initialization infeasible within power cap", {});
    Eigen::VectorXcd w = std::sqrt(t_init * p_nom) * w_mrt;

    DesignSolution out;
    out.max_sdp_violation = 0.0;
    double power = w.squaredNorm();
    double mu = 0.0;

    for (int iter = 1; iter <= cfg.max_outer_iters; ++iter)
    {
        out.iterations = iter;
        const double power_prev = power;

        try
        {
            const WStepResult ws = solve_w_subproblem(xi, ctx, cfg);
            out.max_sdp_violation = std::max(out.max_sdp_violation, ws.verify_violation);
            const Eigen::VectorXcd w_cand = randomize_w(ws.w_bar, xi, ctx, cfg, rng_w);
            const double power_cand = w_cand.squaredNorm();
            if (power_cand <= power_prev * (1.0 + 1e-9))
            {
                w = w_cand;
                power = power_cand;
                mu = ws.mu;
            }
        }
        catch (const std::exception &e)
        {
            throw OptimizerError(
                "alternate: iteration " + std::to_string(iter) + ": " + e.what(), out.trace);
        }

        const XiStepResult xs = solve_xi_subproblem(w, ctx, cfg);
        out.max_sdp_violation = std::max(out.max_sdp_violation, xs.verify_violation);
        double v_rec = xs.v;
        if (xs.feasible)
        {
            const PhaseShifts xi_cand = randomize_xi(xs.xi_bar, w, ctx, cfg, rng_xi);
            if (detail::model_margin(w, xi_cand, ctx, gamma) >
                detail::model_margin(w, xi, ctx, gamma))
                xi = xi_cand;
        }

        TraceRecord rec;
        rec.iteration = iter;
        rec.power_w = power;
        rec.v = v_rec;
        rec.worst_case_margin = detail::model_margin(w, xi, ctx, gamma);
        out.trace.push_back(rec);

        if ((power_prev - power) / power_prev < cfg.epsilon && iter > 1)
            break;
    }

    out.w = w;
    out.xi = xi;
    out.power = power;
    out.mu = mu;

    const CompositeVector d_fin = composite_vector(ctx.g_hat, xi, ctx.big_g, w);
    const RobustQuadratic rq_fin = taylor_quadratic(d_fin, ctx.sens, ctx.ball);
    const BallMin wc = min_quadratic_over_ball(rq_fin);
    out.worst_case_rate = std::log2(1.0 + std::max(0.0, wc.value) / ctx.noise_power_w);
    const double exact_p = exact_received_power(
        d_fin, ctx.sens, LocationError{ctx.sens.d_hat * wc.argmin});
    out.exact_rate_at_worst = std::log2(1.0 + exact_p / ctx.noise_power_w);
    return out;
}

} // namespace irsbeam

#endif

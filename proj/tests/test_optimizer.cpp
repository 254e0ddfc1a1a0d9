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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "irsbeam/baseline.hpp"
#include "irsbeam/robust_optimizer.hpp"

using namespace irsbeam;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

struct Instance
{
    UraGeometry bs_geom{1, 1};
    UraGeometry irs_geom{1, 1};
    DesignContext ctx;
};

/// Small synthetic deployment: surface a few meters up, terminal a few tens
/// of meters out, one dominant propagation path plus optional weaker ones.
/// Unit-scale gains keep these fixtures easy to reason about; the
/// physical-scale test below exercises realistic magnitudes.
Instance make_instance(std::uint64_t seed, int irs_nz, int irs_ny, int n_ant, double radius,
                       int extra_paths = 2, std::complex<double> alpha = {0.4, 0.3},
                       std::complex<double> los_gain = {0.8, -0.5})
{
    Instance inst;
    inst.bs_geom = UraGeometry(1, n_ant);
    inst.irs_geom = UraGeometry(irs_nz, irs_ny);
    Rng rng(seed);

    const Position3D irs{0.0, 0.0, 6.0};
    const Position3D user{rng.uniform(25.0, 45.0), rng.uniform(-12.0, 12.0), 1.5};

    std::vector<PathSpec> paths;
    PathSpec los;
    los.gain = los_gain;
    los.aod = {rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6)};
    los.aoa = {rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6)};
    paths.push_back(los);
    for (int p = 0; p < extra_paths; ++p)
    {
        PathSpec sp;
        sp.gain = 0.3 * std::abs(los_gain) * rng.unit_phase();
        sp.aod = {rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)};
        sp.aoa = {rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)};
        paths.push_back(sp);
    }

    inst.ctx.big_g = synthesize_b2i(paths, inst.bs_geom, inst.irs_geom);
    inst.ctx.g_hat = estimated_reflect_channel(irs, user, alpha, inst.irs_geom);
    inst.ctx.sens = error_sensitivity(irs, user, inst.irs_geom);
    inst.ctx.ball = UncertaintyBall(radius);
    inst.ctx.noise_power_w = 0.05;
    return inst;
}

double margin_at(const Eigen::VectorXcd &w, const PhaseShifts &xi, const DesignContext &ctx,
                 double gamma)
{
    const CompositeVector d = composite_vector(ctx.g_hat, xi, ctx.big_g, w);
    return min_quadratic_over_ball(taylor_quadratic(d, ctx.sens, ctx.ball)).value - gamma;
}

PhaseShifts random_phases(int m, Rng &rng)
{
    Eigen::VectorXcd v(m);
    for (int i = 0; i < m; ++i)
        v(i) = rng.unit_phase();
    return PhaseShifts(v);
}

} // namespace

TEST_CASE("rate floor converts to a received-power floor")
{
    CHECK_THAT(qos_gamma(4.0, 2.0), WithinRel(30.0, 1e-15));
    CHECK_THAT(qos_gamma(1.0, 1.0), WithinRel(1.0, 1e-15));
    CHECK_THAT(qos_gamma(0.5, 4.0), WithinRel(4.0 * (std::sqrt(2.0) - 1.0), 1e-12));
}

TEST_CASE("beamforming step at zero radius attains the matched-filter floor")
{
    Instance inst = make_instance(101, 2, 2, 3, 0.0);
    OptimizerConfig cfg;
    cfg.target_rate_r = 3.0;

    Rng rng(7);
    const PhaseShifts xi = random_phases(inst.ctx.m(), rng);
    const WStepResult ws = solve_w_subproblem(xi, inst.ctx, cfg);

    const double gamma = qos_gamma(cfg.target_rate_r, inst.ctx.noise_power_w);
    const Eigen::VectorXcd h = effective_channel(inst.ctx.g_hat, xi, inst.ctx.big_g);
    CHECK_THAT(ws.relaxed_power, WithinRel(gamma / h.squaredNorm(), 1e-6));
    CHECK(ws.mu == 0.0);

    // the optimum is rank one along the matched filter
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ws.w_bar);
    CHECK(es.eigenvalues()(inst.ctx.n() - 1) > 0.0);
    CHECK(es.eigenvalues()(inst.ctx.n() - 2) <
          1e-5 * es.eigenvalues()(inst.ctx.n() - 1));
}

TEST_CASE("beamforming step with one antenna matches the ball oracle")
{
    Instance inst = make_instance(102, 3, 2, 1, 1.5);
    OptimizerConfig cfg;
    cfg.target_rate_r = 2.0;
    const double gamma = qos_gamma(cfg.target_rate_r, inst.ctx.noise_power_w);

    Rng rng(11);
    const PhaseShifts xi = random_phases(inst.ctx.m(), rng);

    // with a single antenna the quadratic scales linearly in the transmit
    // power, so the optimum is gamma over the unit-power worst case
    const Eigen::VectorXcd w_unit = Eigen::VectorXcd::Ones(1);
    const CompositeVector d = composite_vector(inst.ctx.g_hat, xi, inst.ctx.big_g, w_unit);
    const double worst_unit =
        min_quadratic_over_ball(taylor_quadratic(d, inst.ctx.sens, inst.ctx.ball)).value;
    REQUIRE(worst_unit > 0.0);

    const WStepResult ws = solve_w_subproblem(xi, inst.ctx, cfg);
    CHECK_THAT(ws.relaxed_power, WithinRel(gamma / worst_unit, 1e-6));
    CHECK(ws.mu >= 0.0);

    // recovered multiplier certifies the floor at the returned power
    const RobustQuadratic rq =
        taylor_quadratic(d, inst.ctx.sens, inst.ctx.ball).scaled(ws.relaxed_power);
    const LmiBlock blk = assemble_lmi(rq, gamma);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eb(blk.block(ws.mu));
    CHECK(eb.eigenvalues()(0) >= -1e-7 * gamma);
}

TEST_CASE("doubling the power floor doubles the relaxed power")
{
    Instance inst = make_instance(103, 2, 2, 3, 2.0);
    OptimizerConfig cfg;
    cfg.target_rate_r = 2.5;
    Rng rng(13);
    const PhaseShifts xi = random_phases(inst.ctx.m(), rng);

    const WStepResult a = solve_w_subproblem(xi, inst.ctx, cfg);
    // rate with exactly twice the power floor: 2^r2 - 1 = 2 (2^r1 - 1)
    cfg.target_rate_r = std::log2(2.0 * (std::exp2(cfg.target_rate_r) - 1.0) + 1.0);
    const WStepResult b = solve_w_subproblem(xi, inst.ctx, cfg);
    CHECK_THAT(b.relaxed_power, WithinRel(2.0 * a.relaxed_power, 1e-6));
}

TEST_CASE("relaxed power is nondecreasing in the uncertainty radius")
{
    OptimizerConfig cfg;
    cfg.target_rate_r = 3.0;
    Rng rng(17);
    PhaseShifts xi;
    double prev = 0.0;
    for (const double radius : {0.25, 0.5, 1.0, 2.0, 4.0})
    {
        Instance inst = make_instance(104, 3, 2, 2, radius);
        if (xi.xi.size() == 0)
            xi = random_phases(inst.ctx.m(), rng);
        const WStepResult ws = solve_w_subproblem(xi, inst.ctx, cfg);
        CHECK(ws.relaxed_power >= prev * (1.0 - 1e-9));
        prev = ws.relaxed_power;
    }
}

TEST_CASE("subproblems reject degenerate inputs")
{
    Instance inst = make_instance(105, 2, 2, 2, 1.0, 2, {0.0, 0.0});
    OptimizerConfig cfg;
    Rng rng(19);
    const PhaseShifts xi = random_phases(inst.ctx.m(), rng);
    CHECK_THROWS_AS(solve_w_subproblem(xi, inst.ctx, cfg), std::domain_error);
    CHECK_THROWS_AS(solve_xi_subproblem(Eigen::VectorXcd::Ones(2), inst.ctx, cfg),
                    std::domain_error);

    Instance ok = make_instance(105, 2, 2, 2, 1.0);
    OptimizerConfig bad;
    bad.target_rate_r = 0.0;
    CHECK_THROWS_AS(solve_w_subproblem(xi, ok.ctx, bad), std::invalid_argument);
    CHECK_THROWS_AS(solve_xi_subproblem(Eigen::VectorXcd::Zero(2), ok.ctx, cfg),
                    std::invalid_argument);
}

TEST_CASE("beamforming randomization restores the floor at near-relaxed power")
{
    Instance inst = make_instance(106, 3, 3, 3, 2.0);
    OptimizerConfig cfg;
    cfg.target_rate_r = 3.5;
    cfg.rng_seed = 23;
    const double gamma = qos_gamma(cfg.target_rate_r, inst.ctx.noise_power_w);

    Rng rng(29);
    const PhaseShifts xi = random_phases(inst.ctx.m(), rng);
    const WStepResult ws = solve_w_subproblem(xi, inst.ctx, cfg);
    const Eigen::VectorXcd w = randomize_w(ws.w_bar, xi, inst.ctx, cfg);

    CHECK(margin_at(w, xi, inst.ctx, gamma) >= -1e-9 * gamma);
    CHECK(w.squaredNorm() >= ws.relaxed_power * (1.0 - 1e-6));
    CHECK(w.squaredNorm() <= ws.relaxed_power * 1.25);
}

TEST_CASE("beamforming randomization keeps an already-tight vector")
{
    Instance inst = make_instance(107, 2, 3, 3, 0.4);
    OptimizerConfig cfg;
    cfg.target_rate_r = 2.0;
    const double gamma = qos_gamma(cfg.target_rate_r, inst.ctx.noise_power_w);

    Rng rng(31);
    const PhaseShifts xi = random_phases(inst.ctx.m(), rng);
    Eigen::VectorXcd w0 = rng.complex_normal_vector(inst.ctx.n());
    const double worst = margin_at(w0, xi, inst.ctx, 0.0);
    REQUIRE(worst > 0.0);
    w0 *= std::sqrt(gamma / worst); // exactly tight: worst case equals gamma

    const Eigen::MatrixXcd w_bar = w0 * w0.adjoint();
    const Eigen::VectorXcd w = randomize_w(w_bar, xi, inst.ctx, cfg);
    // power matches up to the feasibility-restoring bisection tolerance
    CHECK_THAT(w.squaredNorm(), WithinRel(w0.squaredNorm(), 2e-6));
    CHECK_THAT(std::abs((w0.adjoint() * w).value()), WithinRel(w0.norm() * w.norm(), 1e-6));
}

TEST_CASE("beamforming randomization reports an unreachable floor")
{
    // uncertainty so large the quadratic model dips negative: no amount of
    // transmit power can restore the floor along this direction
    Instance inst = make_instance(108, 2, 2, 2, 20.0);
    OptimizerConfig cfg;
    cfg.target_rate_r = 2.0;

    Rng rng(37);
    const PhaseShifts xi = random_phases(inst.ctx.m(), rng);
    const Eigen::VectorXcd w0 = rng.complex_normal_vector(inst.ctx.n());
    REQUIRE(margin_at(w0, xi, inst.ctx, 0.0) < 0.0);

    CHECK_THROWS_WITH(randomize_w(w0 * w0.adjoint(), xi, inst.ctx, cfg),
                      ContainsSubstring("randomization failed"));
}

TEST_CASE("phase step with a single element reduces to the scalar slack")
{
    for (const double radius : {0.0, 1.0})
    {
        Instance inst = make_instance(109, 1, 1, 3, radius);
        OptimizerConfig cfg;
        cfg.target_rate_r = 1.0;
        const double gamma = qos_gamma(cfg.target_rate_r, inst.ctx.noise_power_w);

        Rng rng(41);
        const Eigen::VectorXcd w = rng.complex_normal_vector(inst.ctx.n());
        const std::complex<double> d0 =
            inst.ctx.g_hat.vector.cwiseProduct(inst.ctx.big_g.matrix * w)(0);
        REQUIRE(std::norm(d0) > gamma); // slack must come out positive

        const XiStepResult xs = solve_xi_subproblem(w, inst.ctx, cfg);
        REQUIRE(xs.feasible);
        // one element has no pairwise phase structure: v = |d|^2 - gamma
        CHECK_THAT(xs.v, WithinRel(std::norm(d0) - gamma, 1e-6));
        CHECK(std::abs(xs.mu) <= 1e-6 * gamma);
        CHECK_THAT(std::abs(xs.xi_bar(0, 0)), WithinAbs(1.0, 1e-8));
    }
}

TEST_CASE("phase step slack dominates every unit-modulus competitor")
{
    Instance inst = make_instance(110, 2, 3, 2, 1.5);
    OptimizerConfig cfg;
    cfg.target_rate_r = 2.0;
    const double gamma = qos_gamma(cfg.target_rate_r, inst.ctx.noise_power_w);

    Rng rng(43);
    Eigen::VectorXcd w = rng.complex_normal_vector(inst.ctx.n());
    w *= 2.0; // comfortable headroom above the floor
    const XiStepResult xs = solve_xi_subproblem(w, inst.ctx, cfg);
    REQUIRE(xs.feasible);

    for (int i = 0; i < inst.ctx.m(); ++i)
        CHECK_THAT(std::abs(xs.xi_bar(i, i)), WithinAbs(1.0, 1e-8));

    for (int trial = 0; trial < 20; ++trial)
    {
        const PhaseShifts xi = random_phases(inst.ctx.m(), rng);
        CHECK(xs.v >= margin_at(w, xi, inst.ctx, gamma) - 1e-7 * gamma);
    }
}

TEST_CASE("phase step reports an unreachable floor without throwing")
{
    Instance inst = make_instance(111, 2, 2, 2, 1.0);
    OptimizerConfig cfg;
    cfg.target_rate_r = 3.0;
    const double gamma = qos_gamma(cfg.target_rate_r, inst.ctx.noise_power_w);

    Rng rng(47);
    Eigen::VectorXcd w = rng.complex_normal_vector(inst.ctx.n());
    const Eigen::VectorXcd d0 = inst.ctx.g_hat.vector.cwiseProduct(inst.ctx.big_g.matrix * w);
    // even perfectly coherent phases cannot reach the floor
    w *= std::sqrt(0.5 * gamma) / d0.lpNorm<1>();

    const XiStepResult xs = solve_xi_subproblem(w, inst.ctx, cfg);
    CHECK_FALSE(xs.feasible);
    CHECK(xs.v == -std::numeric_limits<double>::infinity());
}

TEST_CASE("phase randomization recovers a rank-one relaxation exactly")
{
    Instance inst = make_instance(112, 2, 3, 2, 1.0);
    OptimizerConfig cfg;
    cfg.rng_seed = 53;
    Rng rng(59);
    const Eigen::VectorXcd w = 1.5 * rng.complex_normal_vector(inst.ctx.n());
    const PhaseShifts xi_true = random_phases(inst.ctx.m(), rng);

    const Eigen::MatrixXcd xi_bar = xi_true.xi * xi_true.xi.adjoint();
    const PhaseShifts got = randomize_xi(xi_bar, w, inst.ctx, cfg);
    // identical up to a common rotation, which leaves the design unchanged;
    // the eigenfactor carries noise-level minor columns, hence the slack
    for (int i = 0; i < inst.ctx.m(); ++i)
        CHECK_THAT(std::abs(got.xi(i) * std::conj(got.xi(0)) -
                            xi_true.xi(i) * std::conj(xi_true.xi(0))),
                   WithinAbs(0.0, 1e-6));
    const double gamma = qos_gamma(cfg.target_rate_r, inst.ctx.noise_power_w);
    CHECK(margin_at(w, got, inst.ctx, gamma) >=
          margin_at(w, xi_true, inst.ctx, gamma) - 1e-9 * gamma);
}

TEST_CASE("alternating design on a single-path channel reaches the aligned optimum")
{
    const std::complex<double> alpha{0.1, -0.05};
    const std::complex<double> beta{0.6, 0.2};
    Instance inst = make_instance(113, 2, 2, 3, 1e-9, 0, alpha, beta);
    OptimizerConfig cfg;
    cfg.target_rate_r = 4.0;
    cfg.rng_seed = 61;

    const DesignSolution sol = alternate(inst.ctx, cfg);
    const double gamma = qos_gamma(cfg.target_rate_r, inst.ctx.noise_power_w);
    const double m = inst.ctx.m();
    const double n = inst.ctx.n();
    // coherent phases and a matched filter through a rank-one channel
    const double ideal = gamma / (n * m * m * std::norm(alpha) * std::norm(beta));
    CHECK(sol.power <= ideal * 1.05);
    CHECK(sol.power >= ideal * (1.0 - 1e-6));
    CHECK(sol.worst_case_rate >= cfg.target_rate_r - 1e-6);
}

TEST_CASE("alternating design holds the floor at physical magnitudes")
{
    // millimeter-wave scale: channel products around 1e-9, noise near 1e-12
    const double lambda_m = 2.998e8 / 28e9;
    Instance inst;
    inst.bs_geom = UraGeometry(1, 4);
    inst.irs_geom = UraGeometry(4, 4);
    Rng rng(67);

    const Position3D irs{0.0, 0.0, 6.0};
    const Position3D user{38.0, 7.0, 1.5};
    const double bs_dist = 52.0;

    std::vector<PathSpec> paths;
    PathSpec los;
    los.gain = lambda_m / (4.0 * std::numbers::pi * bs_dist) * rng.unit_phase();
    los.aod = {0.2, -0.1};
    los.aoa = {0.3, 0.25};
    paths.push_back(los);
    for (int p = 0; p < 2; ++p)
    {
        PathSpec sp;
        sp.gain = std::abs(los.gain) * std::pow(10.0, -0.5) * rng.unit_phase();
        sp.aod = {rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)};
        sp.aoa = {rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)};
        paths.push_back(sp);
    }
    inst.ctx.big_g = synthesize_b2i(paths, inst.bs_geom, inst.irs_geom);

    const auto [angles, dist] = effective_aods_from_positions(irs, user);
    (void)angles;
    const std::complex<double> alpha =
        lambda_m / (4.0 * std::numbers::pi * dist) * rng.unit_phase();
    inst.ctx.g_hat = estimated_reflect_channel(irs, user, alpha, inst.irs_geom);
    inst.ctx.sens = error_sensitivity(irs, user, inst.irs_geom);
    inst.ctx.ball = UncertaintyBall(2.0);
    inst.ctx.noise_power_w = noise_power_from_scenario(-169.0, 1e8);

    OptimizerConfig cfg;
    cfg.target_rate_r = 4.0;
    cfg.rng_seed = 71;
    cfg.verify_sdp_solutions = true;

    const DesignSolution sol = alternate(inst.ctx, cfg);
    const double gamma = qos_gamma(cfg.target_rate_r, inst.ctx.noise_power_w);

    CHECK(sol.iterations <= cfg.max_outer_iters);
    CHECK(margin_at(sol.w, sol.xi, inst.ctx, gamma) >= -1e-9 * gamma);
    CHECK(sol.worst_case_rate >= cfg.target_rate_r - 1e-6);
    CHECK(sol.exact_rate_at_worst >= cfg.target_rate_r - 0.1);
    CHECK(sol.max_sdp_violation <= 1e-6);

    REQUIRE_FALSE(sol.trace.empty());
    double prev = sol.trace.front().power_w;
    for (const TraceRecord &rec : sol.trace)
    {
        CHECK(rec.power_w <= prev * (1.0 + 1e-6));
        CHECK(rec.worst_case_margin >= -1e-9 * gamma);
        prev = rec.power_w;
    }
    CHECK_THAT(sol.power, WithinRel(sol.trace.back().power_w, 1e-12));
}

TEST_CASE("alternating design is deterministic in the seed")
{
    Instance inst = make_instance(114, 3, 2, 2, 1.0);
    OptimizerConfig cfg;
    cfg.target_rate_r = 2.0;
    cfg.rng_seed = 73;
    cfg.max_outer_iters = 6;

    const DesignSolution a = alternate(inst.ctx, cfg);
    const DesignSolution b = alternate(inst.ctx, cfg);
    REQUIRE(a.w.size() == b.w.size());
    CHECK((a.w - b.w).norm() == 0.0);
    CHECK((a.xi.xi - b.xi.xi).norm() == 0.0);
    CHECK(a.power == b.power);

    cfg.rng_seed = 74;
    const DesignSolution c = alternate(inst.ctx, cfg);
    CHECK(std::abs(c.power - a.power) <= 0.05 * a.power);
}

TEST_CASE("alternating design rejects bad configuration")
{
    Instance inst = make_instance(115, 2, 2, 2, 1.0);
    OptimizerConfig cfg;
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(alternate(inst.ctx, cfg), std::invalid_argument);
    cfg = OptimizerConfig{};
    cfg.max_outer_iters = 0;
    CHECK_THROWS_AS(alternate(inst.ctx, cfg), std::invalid_argument);
    cfg = OptimizerConfig{};
    cfg.target_rate_r = -1.0;
    CHECK_THROWS_AS(alternate(inst.ctx, cfg), std::invalid_argument);
}

TEST_CASE("reference design spends exactly the power budget")
{
    Instance inst = make_instance(116, 3, 3, 3, 0.0);
    const double budget = 2.75;
    const BaselineSolution sol = nonrobust_design(inst.ctx, budget);
    CHECK_THAT(sol.w.squaredNorm(), WithinRel(budget, 1e-12));
    CHECK(sol.power == budget);
    CHECK(sol.nominal_rate > 0.0);
}

TEST_CASE("reference design solves the rank-one channel in closed form")
{
    const std::complex<double> alpha{0.2, 0.1};
    const std::complex<double> beta{-0.4, 0.3};
    Instance inst = make_instance(117, 2, 3, 2, 0.0, 0, alpha, beta);
    const double budget = 1.6;
    const BaselineSolution sol = nonrobust_design(inst.ctx, budget);

    const double m = inst.ctx.m();
    const double n = inst.ctx.n();
    const double snr =
        budget * n * m * m * std::norm(alpha) * std::norm(beta) / inst.ctx.noise_power_w;
    CHECK_THAT(sol.nominal_rate, WithinRel(std::log2(1.0 + snr), 1e-9));

    // every reflected term arrives in phase
    const Eigen::VectorXcd terms =
        sol.xi.xi.cwiseProduct(inst.ctx.g_hat.vector.cwiseProduct(inst.ctx.big_g.matrix * sol.w));
    for (int i = 0; i < inst.ctx.m(); ++i)
        CHECK(std::abs(std::arg(terms(i))) < 1e-9);
}

TEST_CASE("reference design is first-order optimal in each variable")
{
    Instance inst = make_instance(118, 3, 2, 3, 0.0);
    const double budget = 1.2;
    const BaselineSolution sol = nonrobust_design(inst.ctx, budget);

    Rng rng(79);
    for (int trial = 0; trial < 10; ++trial)
    {
        Eigen::VectorXcd w = sol.w + 1e-6 * rng.complex_normal_vector(inst.ctx.n());
        w *= std::sqrt(budget) / w.norm();
        const double rate = achievable_rate(
            effective_channel(inst.ctx.g_hat, sol.xi, inst.ctx.big_g), w, inst.ctx.noise_power_w);
        CHECK(rate <= sol.nominal_rate + 1e-8);

        Eigen::VectorXcd xi = sol.xi.xi;
        for (int i = 0; i < inst.ctx.m(); ++i)
            xi(i) *= std::polar(1.0, 1e-6 * rng.normal());
        const double rate2 =
            achievable_rate(effective_channel(inst.ctx.g_hat, PhaseShifts(xi), inst.ctx.big_g),
                            sol.w, inst.ctx.noise_power_w);
        CHECK(rate2 <= sol.nominal_rate + 1e-8);
    }
}

TEST_CASE("reference design rejects degenerate inputs")
{
    Instance inst = make_instance(119, 2, 2, 2, 0.0, 2, {0.0, 0.0});
    CHECK_THROWS_AS(nonrobust_design(inst.ctx, 1.0), std::domain_error);
    Instance ok = make_instance(119, 2, 2, 2, 0.0);
    CHECK_THROWS_AS(nonrobust_design(ok.ctx, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(nonrobust_design(ok.ctx, -2.0), std::invalid_argument);
}

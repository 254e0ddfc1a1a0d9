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
#include <memory>

#include "irsbeam/channel_model.hpp"
#include "irsbeam/location_model.hpp"
#include "irsbeam/rng.hpp"
#include "irsbeam/robust_quadratic.hpp"

using namespace irsbeam;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

// shared instance: 2x2 surface, estimated user at (20, 20, -20), 3 m ball
struct Fixture
{
    UraGeometry geom{2, 2};
    Position3D irs{0.0, 0.0, 0.0};
    Position3D user{20.0, 20.0, -20.0};
    ErrorSensitivity sens = error_sensitivity(irs, user, geom);
    UncertaintyBall ball{3.0};
    CompositeVector d;

    Fixture()
    {
        d.d = Eigen::VectorXcd(4);
        d.d << std::complex<double>(0.6, -0.2), std::complex<double>(-0.3, 0.4),
            std::complex<double>(0.1, 0.7), std::complex<double>(-0.5, -0.1);
    }
};

Eigen::MatrixXcd random_hermitian(int n, Rng &rng)
{
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a(i, j) = rng.complex_normal();
    return 0.5 * (a + a.adjoint());
}

} // namespace

TEST_CASE("taylor coefficients")
{
    const Fixture fx;
    const RobustQuadratic rq = taylor_quadratic(fx.d, fx.sens, fx.ball);
    CHECK_THAT(rq.q0, WithinRel(0.65000000000000013, 1e-13));
    CHECK_THAT(rq.d_hat, WithinRel(34.641016151377549, 1e-15));
    CHECK_THAT(rq.radius, WithinRel(3.0, 1e-15));

    CHECK_THAT(rq.phi(0), WithinRel(0.73303828583761832, 1e-12));
    CHECK_THAT(rq.phi(1), WithinRel(2.3666664657043111, 1e-12));
    CHECK_THAT(rq.phi(2), WithinRel(3.0997047515419296, 1e-12));

    const Eigen::Matrix3d want{{-1.4256095246017952, 2.061650697116443, 0.63604117251464753},
                               {2.061650697116443, 5.5489109188346823, 7.6105616159511253},
                               {0.63604117251464753, 7.6105616159511253, 8.2466027884657738}};
    CHECK((rq.phi_mat - want).cwiseAbs().maxCoeff() < 1e-12 * want.norm());
    CHECK((rq.phi_mat - rq.phi_mat.transpose()).norm() == 0.0);
}

TEST_CASE("pairwise sums have no imaginary residue")
{
    const Fixture fx;
    // complex accumulation of the same pairwise sums; Hermitian pairing must
    // cancel the imaginary parts to rounding noise
    const double pd = std::numbers::pi * fx.sens.d_hat;
    Eigen::Vector3cd phi_c = Eigen::Vector3cd::Zero();
    Eigen::Matrix3cd mat_c = Eigen::Matrix3cd::Zero();
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
        {
            const std::complex<double> c = fx.d.d(m) * std::conj(fx.d.d(n));
            const Eigen::Vector3d df = (fx.sens.f.row(m) - fx.sens.f.row(n)).transpose();
            const std::complex<double> jpd(0.0, pd);
            phi_c += c * jpd * df.cast<std::complex<double>>();
            mat_c += c * jpd * jpd * (df * df.transpose()).cast<std::complex<double>>();
        }
    const double scale = fx.d.d.squaredNorm();
    CHECK(phi_c.imag().cwiseAbs().maxCoeff() <= 1e-10 * scale);
    CHECK(mat_c.imag().cwiseAbs().maxCoeff() <= 1e-10 * scale);

    const RobustQuadratic rq = taylor_quadratic(fx.d, fx.sens, fx.ball);
    CHECK((phi_c.real() - rq.phi).norm() <= 1e-12);
    CHECK((mat_c.real() - rq.phi_mat).norm() <= 1e-11);
}

TEST_CASE("exact power and model agreement")
{
    const Fixture fx;
    const RobustQuadratic rq = taylor_quadratic(fx.d, fx.sens, fx.ball);
    const Eigen::Vector3d delta(1.0, -2.0, 1.5);
    const double exact = exact_received_power(fx.d, fx.sens, LocationError{delta});
    CHECK_THAT(exact, WithinRel(0.66331484164302745, 1e-13));
    CHECK_THAT(rq.value(delta / rq.d_hat), WithinRel(0.66346052737131889, 1e-13));

    // truncation error decays with the third power of the offset
    const auto err = [&](double t) {
        const Eigen::Vector3d dt = t * delta;
        return std::abs(exact_received_power(fx.d, fx.sens, LocationError{dt}) -
                        rq.value(dt / rq.d_hat));
    };
    const double e1 = err(1.0);
    const double e2 = err(0.1);
    const double e3 = err(0.01);
    CHECK(e2 / e1 < 5e-3);
    CHECK(e2 / e1 > 2e-4);
    CHECK(e3 / e2 < 5e-3);
    CHECK(e3 / e2 > 2e-4);
}

TEST_CASE("uniform power scaling")
{
    const Fixture fx;
    const RobustQuadratic rq = taylor_quadratic(fx.d, fx.sens, fx.ball);
    CompositeVector scaled_d;
    scaled_d.d = std::sqrt(2.5) * fx.d.d;
    const RobustQuadratic direct = taylor_quadratic(scaled_d, fx.sens, fx.ball);
    const RobustQuadratic via = rq.scaled(2.5);
    CHECK_THAT(via.q0, WithinRel(direct.q0, 1e-12));
    CHECK((via.phi - direct.phi).norm() <= 1e-12 * direct.phi.norm());
    CHECK((via.phi_mat - direct.phi_mat).norm() <= 1e-12 * direct.phi_mat.norm());
}

TEST_CASE("ball minimum: interior")
{
    const Eigen::Vector3d g(0.2, -0.3, 0.1);
    const Eigen::Matrix3d h{{2.0, 0.1, 0.0}, {0.1, 3.0, 0.0}, {0.0, 0.0, 4.0}};
    const BallMin r = min_quadratic_over_ball(1.0, g, h, 2.0);
    CHECK_THAT(r.value, WithinRel(0.97270659432387307, 1e-10));
    CHECK_THAT(r.argmin(0), WithinAbs(-0.10517529215358928, 1e-10));
    CHECK_THAT(r.argmin(1), WithinAbs(0.10350584307178627, 1e-10));
    CHECK_THAT(r.argmin(2), WithinAbs(-0.025, 1e-10));
}

TEST_CASE("ball minimum: boundary")
{
    const Eigen::Vector3d g(0.4, -1.1, 0.7);
    const Eigen::Matrix3d h{{1.0, 0.8, -0.3}, {0.8, -0.5, 0.2}, {-0.3, 0.2, 2.0}};
    const BallMin r = min_quadratic_over_ball(5.0, g, h, 1.3);
    CHECK_THAT(r.value, WithinRel(2.6093281646016431, 1e-8));
    CHECK_THAT(r.argmin.norm(), WithinRel(1.3, 1e-9));
    CHECK_THAT(r.argmin(0), WithinAbs(-0.5001256948549252, 1e-7));
    CHECK_THAT(r.argmin(1), WithinAbs(1.1662215192007175, 1e-7));
    CHECK_THAT(r.argmin(2), WithinAbs(-0.28249187156279071, 1e-7));
}

TEST_CASE("ball minimum: gradient orthogonal to the bottom eigenspace")
{
    const Eigen::Vector3d g(0.0, 1.0, 1.0);
    const Eigen::Matrix3d h = Eigen::Vector3d(-1.0, 2.0, 3.0).asDiagonal();
    const BallMin r = min_quadratic_over_ball(2.0, g, h, 1.0);
    CHECK_THAT(r.value, WithinRel(1.2083333333333335, 1e-10));
    CHECK_THAT(r.argmin.norm(), WithinRel(1.0, 1e-10));
    // the bottom-eigenvector component is sign-ambiguous
    CHECK_THAT(std::abs(r.argmin(0)), WithinAbs(0.90905934288630952, 1e-9));
    CHECK_THAT(r.argmin(1), WithinAbs(-1.0 / 3.0, 1e-9));
    CHECK_THAT(r.argmin(2), WithinAbs(-0.25, 1e-9));
}

TEST_CASE("ball minimum: pure curvature")
{
    const BallMin r =
        min_quadratic_over_ball(7.0, Eigen::Vector3d::Zero(), -2.0 * Eigen::Matrix3d::Identity(), 0.9);
    CHECK_THAT(r.value, WithinRel(6.19, 1e-12));
    CHECK_THAT(r.argmin.norm(), WithinRel(0.9, 1e-12));
}

TEST_CASE("ball minimum: degenerate radius and bad input")
{
    const Eigen::Vector3d g(1.0, 2.0, 3.0);
    const Eigen::Matrix3d h = Eigen::Matrix3d::Identity();
    const BallMin r = min_quadratic_over_ball(4.2, g, h, 0.0);
    CHECK(r.value == 4.2);
    CHECK(r.argmin.norm() == 0.0);
    CHECK_THROWS_AS(min_quadratic_over_ball(0.0, g, h, -1.0), std::invalid_argument);
}

TEST_CASE("ball minimum beats dense sampling on random instances")
{
    Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial)
    {
        Eigen::Matrix3d h;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                h(i, j) = rng.normal();
        h = (0.5 * (h + h.transpose())).eval();
        Eigen::Vector3d g;
        for (int i = 0; i < 3; ++i)
            g(i) = rng.normal();
        const double q0 = rng.uniform(-2.0, 2.0);
        const double rho = rng.uniform(0.2, 2.0);

        const BallMin r = min_quadratic_over_ball(q0, g, h, rho);
        const auto model = [&](const Eigen::Vector3d &x) {
            return q0 + g.dot(x) + 0.5 * x.dot(h * x);
        };
        CHECK(r.argmin.norm() <= rho * (1.0 + 1e-10));
        CHECK_THAT(r.value, WithinRel(model(r.argmin), 1e-9));
        for (int s = 0; s < 2000; ++s)
            CHECK(model(rng.uniform_in_ball(rho)) >= r.value - 1e-9 * (1.0 + std::abs(r.value)));
    }
}

TEST_CASE("worst case over the model's own ball")
{
    const Fixture fx;
    const RobustQuadratic rq = taylor_quadratic(fx.d, fx.sens, fx.ball);
    const BallMin r = min_quadratic_over_ball(rq);
    CHECK_THAT(r.value, WithinRel(0.36109595297275965, 1e-8));
    CHECK_THAT(r.argmin(0), WithinAbs(-0.019705020276928383, 1e-8));
    CHECK_THAT(r.argmin(1), WithinAbs(-0.048958918444034792, 1e-8));
    CHECK_THAT(r.argmin(2), WithinAbs(-0.0686639387209632, 1e-8));
    // argmin is in normalized units: the worst offset in meters is d_hat times
    // it and sits on the 3 m sphere
    CHECK_THAT(r.argmin.norm() * rq.d_hat, WithinRel(3.0, 1e-9));
}

TEST_CASE("lifted forms reproduce the quadratic at rank one: beamformer side")
{
    const Fixture fx;
    std::vector<PathSpec> paths(2);
    paths[0].gain = {0.8, 0.1};
    paths[0].aod = {0.2, -0.4};
    paths[0].aoa = {0.5, 0.3};
    paths[1].gain = {-0.05, 0.3};
    paths[1].aod = {-0.6, 0.1};
    paths[1].aoa = {0.9, -0.2};
    const ChannelB2I big_g = synthesize_b2i(paths, UraGeometry(1, 2), UraGeometry(2, 2));

    ReflectChannel ghat;
    ghat.vector = Eigen::VectorXcd(4);
    ghat.vector << std::complex<double>(0.3, -0.2), std::complex<double>(-0.1, 0.45),
        std::complex<double>(0.25, 0.05), std::complex<double>(-0.15, -0.3);
    Eigen::VectorXcd ph(4);
    ph << std::polar(1.0, 0.3), std::polar(1.0, -1.2), std::polar(1.0, 2.5),
        std::polar(1.0, 0.9);
    const PhaseShifts xi(ph);
    Eigen::VectorXcd w(2);
    w << std::complex<double>(0.6, -0.3), std::complex<double>(-0.2, 0.7);

    const CompositeVector d = composite_vector(ghat, xi, big_g, w);
    const LiftedForms lf = lift_for_w(xi, ghat, big_g, fx.sens, fx.ball);

    CHECK((lf.t_or_pi * w - d.d).norm() <= 1e-14 * d.d.norm());

    const Eigen::MatrixXcd v = w * w.adjoint();
    const RobustQuadratic direct = taylor_quadratic(d, fx.sens, fx.ball);
    const RobustQuadratic lifted = lf.quadratic_of(v);
    CHECK_THAT(lifted.q0, WithinRel(direct.q0, 1e-11));
    CHECK((lifted.phi - direct.phi).norm() <= 1e-11 * (1.0 + direct.phi.norm()));
    CHECK((lifted.phi_mat - direct.phi_mat).norm() <= 1e-11 * (1.0 + direct.phi_mat.norm()));
}

TEST_CASE("lifted forms reproduce the quadratic at rank one: phase side")
{
    const Fixture fx;
    std::vector<PathSpec> paths(1);
    paths[0].gain = {0.7, -0.2};
    paths[0].aod = {0.1, 0.6};
    paths[0].aoa = {-0.3, 0.8};
    const ChannelB2I big_g = synthesize_b2i(paths, UraGeometry(1, 3), UraGeometry(2, 2));

    ReflectChannel ghat;
    ghat.vector = Eigen::VectorXcd(4);
    ghat.vector << std::complex<double>(0.2, 0.1), std::complex<double>(-0.4, 0.3),
        std::complex<double>(0.05, -0.35), std::complex<double>(0.3, 0.25);
    Eigen::VectorXcd w(3);
    w << std::complex<double>(0.5, 0.2), std::complex<double>(-0.1, -0.6),
        std::complex<double>(0.3, 0.0);
    Eigen::VectorXcd ph(4);
    ph << std::polar(1.0, -0.7), std::polar(1.0, 1.9), std::polar(1.0, 0.4),
        std::polar(1.0, -2.8);
    const PhaseShifts xi(ph);

    const LiftedForms lf = lift_for_xi(w, ghat, big_g, fx.sens, fx.ball);
    CHECK((lf.t_or_pi * xi.xi - composite_vector(ghat, xi, big_g, w).d).norm() <= 1e-14);

    const Eigen::MatrixXcd v = xi.xi * xi.xi.adjoint();
    const RobustQuadratic direct =
        taylor_quadratic(composite_vector(ghat, xi, big_g, w), fx.sens, fx.ball);
    const RobustQuadratic lifted = lf.quadratic_of(v);
    CHECK_THAT(lifted.q0, WithinRel(direct.q0, 1e-11));
    CHECK((lifted.phi - direct.phi).norm() <= 1e-11 * (1.0 + direct.phi.norm()));
    CHECK((lifted.phi_mat - direct.phi_mat).norm() <= 1e-11 * (1.0 + direct.phi_mat.norm()));
}

TEST_CASE("coefficient matrices agree with direct evaluation")
{
    const Fixture fx;
    std::vector<PathSpec> paths(1);
    paths[0].gain = {1.0, 0.4};
    paths[0].aod = {0.25, -0.15};
    paths[0].aoa = {0.6, -0.5};
    const ChannelB2I big_g = synthesize_b2i(paths, UraGeometry(1, 2), UraGeometry(2, 2));
    ReflectChannel ghat;
    ghat.vector = Eigen::VectorXcd(4);
    ghat.vector << std::complex<double>(0.3, -0.2), std::complex<double>(-0.1, 0.45),
        std::complex<double>(0.25, 0.05), std::complex<double>(-0.15, -0.3);
    const LiftedForms lf =
        lift_for_w(PhaseShifts::all_ones(4), ghat, big_g, fx.sens, fx.ball);

    Rng rng(555);
    for (int trial = 0; trial < 10; ++trial)
    {
        const Eigen::MatrixXcd v = random_hermitian(2, rng);
        const double q_direct = lf.q_of(v);
        const double q_coef = (lf.q_coeff().adjoint() * v).trace().real();
        CHECK_THAT(q_coef, WithinAbs(q_direct, 1e-11 * (1.0 + std::abs(q_direct))));
        for (int q = 0; q < 3; ++q)
        {
            const double p_direct = lf.phi_of(v)(q);
            const double p_coef = (lf.phi_coeff(q).adjoint() * v).trace().real();
            CHECK_THAT(p_coef, WithinAbs(p_direct, 1e-11 * (1.0 + std::abs(p_direct))));
        }
        for (int s = 0; s < 3; ++s)
            for (int l = s; l < 3; ++l)
            {
                const double m_direct = lf.Phi_of(v)(s, l);
                const double m_coef = (lf.Phi_coeff(s, l).adjoint() * v).trace().real();
                CHECK_THAT(m_coef, WithinAbs(m_direct, 1e-11 * (1.0 + std::abs(m_direct))));
            }
        // coefficient matrices are Hermitian
        CHECK((lf.q_coeff() - lf.q_coeff().adjoint()).norm() <= 1e-14);
        CHECK((lf.phi_coeff(1) - lf.phi_coeff(1).adjoint()).norm() <= 1e-14);
        CHECK((lf.Phi_coeff(0, 2) - lf.Phi_coeff(0, 2).adjoint()).norm() <= 1e-14);
    }
}

TEST_CASE("certificate block entries")
{
    const Fixture fx;
    const RobustQuadratic rq = taylor_quadratic(fx.d, fx.sens, fx.ball);
    const double gamma = 0.2;
    const LmiBlock lmi = assemble_lmi(rq, gamma);
    const double mu = 3e-4;
    const double v = 1e-3;
    const Eigen::Matrix4d b = lmi.block(mu, v);

    CHECK_THAT(b(0, 0), WithinRel(rq.q0 - gamma - mu - v, 1e-14));
    CHECK((b.block<1, 3>(0, 1).transpose() - 0.5 * rq.phi).norm() <= 1e-14);
    CHECK((b.block<3, 1>(1, 0) - 0.5 * rq.phi).norm() <= 1e-14);
    const Eigen::Matrix3d br = 0.5 * rq.phi_mat +
                               mu * (rq.d_hat * rq.d_hat) / (rq.radius * rq.radius) *
                                   Eigen::Matrix3d::Identity();
    CHECK((b.block<3, 3>(1, 1) - br).norm() <= 1e-12 * br.norm());
    CHECK((b - b.transpose()).norm() == 0.0);

    CHECK_THROWS_AS(assemble_lmi(rq, -0.1), std::invalid_argument);
    RobustQuadratic degenerate = rq;
    degenerate.radius = 0.0;
    CHECK_THROWS_AS(assemble_lmi(degenerate, gamma), std::domain_error);
}

TEST_CASE("certificate existence tracks robust feasibility")
{
    const Fixture fx;
    const RobustQuadratic rq = taylor_quadratic(fx.d, fx.sens, fx.ball);
    const double wc = min_quadratic_over_ball(rq).value;
    REQUIRE(wc > 0.0);

    const auto best_mu_margin = [&](double gamma) {
        const LmiBlock lmi = assemble_lmi(rq, gamma);
        double best = -std::numeric_limits<double>::infinity();
        // mu sweep covers the multiplier scale rho^2 * ||phi_mat|| and far out
        for (int k = 0; k <= 600; ++k)
        {
            const double mu = std::pow(10.0, -16.0 + 22.0 * k / 600.0);
            const double lam =
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(lmi.block(mu),
                                                               Eigen::EigenvaluesOnly)
                    .eigenvalues()(0);
            best = std::max(best, lam);
        }
        return best;
    };

    // strictly feasible target: some multiplier certifies it
    CHECK(best_mu_margin(0.9 * wc) >= 0.0);
    // infeasible target: no multiplier may certify it (soundness)
    CHECK(best_mu_margin(1.1 * wc) < 0.0);
}

TEST_CASE("composite vector and lift input validation")
{
    const Fixture fx;
    ReflectChannel ghat;
    ghat.vector = Eigen::VectorXcd::Ones(3); // wrong length for a 2x2 surface
    ChannelB2I big_g;
    big_g.matrix = Eigen::MatrixXcd::Ones(4, 2);
    CHECK_THROWS_AS(
        composite_vector(ghat, PhaseShifts::all_ones(4), big_g, Eigen::VectorXcd::Ones(2)),
        std::invalid_argument);
    CHECK_THROWS_AS(lift_for_w(PhaseShifts::all_ones(4), ghat, big_g, fx.sens, fx.ball),
                    std::invalid_argument);
    CHECK_THROWS_AS(lift_for_xi(Eigen::VectorXcd::Ones(3), ghat, big_g, fx.sens, fx.ball),
                    std::invalid_argument);
}

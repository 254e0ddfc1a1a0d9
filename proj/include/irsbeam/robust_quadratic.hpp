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

#ifndef IRSBEAM_ROBUST_QUADRATIC_HPP
#define IRSBEAM_ROBUST_QUADRATIC_HPP

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "irsbeam/channel_model.hpp"
#include "irsbeam/location_model.hpp"

namespace irsbeam
{

/// Per-element reflected contributions d = diag(g_hat) diag(xi) G w. The
/// received power is |e(delta)^T d|^2 where e carries the location-error
/// phases.
struct CompositeVector
{
    Eigen::VectorXcd d;
};

inline CompositeVector composite_vector(const ReflectChannel &g_hat, const PhaseShifts &xi,
                                        const ChannelB2I &big_g, const Eigen::VectorXcd &w)
{
    const Eigen::Index m = big_g.matrix.rows();
    if (g_hat.vector.size() != m || xi.xi.size() != m || big_g.matrix.cols() != w.size())
        throw std::invalid_argument("composite_vector: dimension mismatch");
    return {g_hat.vector.cwiseProduct(xi.xi).cwiseProduct(big_g.matrix * w)};
}

/// Second-order model of the worst-case received power around zero location
/// error, in the normalized variable db = delta / d_hat:
///   q(db) = q0 + phi^T db + 1/2 db^T phi_mat db.
/// Valid over the ball ||db|| <= radius / d_hat.
struct RobustQuadratic
{
    double q0 = 0.0;
    Eigen::Vector3d phi = Eigen::Vector3d::Zero();
    Eigen::Matrix3d phi_mat = Eigen::Matrix3d::Zero();
    double d_hat = 1.0;
    double radius = 0.0;

    double value(const Eigen::Vector3d &db) const
    {
        return q0 + phi.dot(db) + 0.5 * db.dot(phi_mat * db);
    }

    double ball_radius() const { return radius / d_hat; }

    /// Uniform scaling of the underlying d vector by sqrt(t) scales every
    /// coefficient by t.
    RobustQuadratic scaled(double t) const
    {
        RobustQuadratic r = *this;
        r.q0 *= t;
        r.phi *= t;
        r.phi_mat *= t;
        return r;
    }
};

/// Exact received power |e(delta)^T d|^2 with the full complex-exponential
/// error model; the brute-force reference for the quadratic approximation.
inline double exact_received_power(const CompositeVector &d, const ErrorSensitivity &sens,
                                   const LocationError &err)
{
    std::complex<double> acc = 0.0;
    const Eigen::VectorXd phase = std::numbers::pi * (sens.f * err.delta);
    for (Eigen::Index m = 0; m < d.d.size(); ++m)
        acc += d.d(m) * std::polar(1.0, phase(m));
    return std::norm(acc);
}

/// Exact second-order Maclaurin expansion of |e^T d|^2 in the normalized
/// error. With fb_m = j pi d_hat f_m,
///   q0      = |1^T d|^2,
///   phi     = sum_{m,n} d_m d_n^* (fb_m - fb_n),
///   phi_mat = sum_{m,n} d_m d_n^* (fb_m - fb_n)(fb_m - fb_n)^T,
/// and the model is q0 + phi^T db + 1/2 db^T phi_mat db (pairwise Hermitian
/// terms cancel the imaginary parts).
inline RobustQuadratic taylor_quadratic(const CompositeVector &d, const ErrorSensitivity &sens,
                                        const UncertaintyBall &ball)
{
    const Eigen::Index m_count = d.d.size();
    if (sens.f.rows() != m_count)
        throw std::invalid_argument("taylor_quadratic: dimension mismatch");

    const double pd = std::numbers::pi * sens.d_hat;
    RobustQuadratic rq;
    rq.d_hat = sens.d_hat;
    rq.radius = ball.radius;
    rq.q0 = std::norm(d.d.sum());
    for (Eigen::Index m = 0; m < m_count; ++m)
    {
        for (Eigen::Index n = 0; n < m_count; ++n)
        {
            const std::complex<double> c = d.d(m) * std::conj(d.d(n));
            const Eigen::Vector3d df = (sens.f.row(m) - sens.f.row(n)).transpose();
            // Re{c * j pi d_hat} = -pi d_hat Im{c};  Re{c * (j pi d_hat)^2} = -(pi d_hat)^2 Re{c}
            rq.phi += (-pd * c.imag()) * df;
            rq.phi_mat += (-pd * pd * c.real()) * (df * df.transpose());
        }
    }
    rq.phi_mat = (0.5 * (rq.phi_mat + rq.phi_mat.transpose())).eval(); // exact symmetry
    return rq;
}

struct BallMin
{
    double value = 0.0;
    Eigen::Vector3d argmin = Eigen::Vector3d::Zero();
};

/// Global minimum of q0 + g^T x + 1/2 x^T H x over ||x|| <= rho via the
/// trust-region characterization: x(nu) = -(H + nu I)^{-1} g with nu >= 0,
/// nu (||x|| - rho) = 0 and H + nu I psd. Handles indefinite H and the hard
/// case (gradient orthogonal to the bottom eigenspace).
inline BallMin min_quadratic_over_ball(double q0, const Eigen::Vector3d &g,
                                       const Eigen::Matrix3d &h, double rho)
{
    BallMin out;
    if (rho < 0.0)
        throw std::invalid_argument("min_quadratic_over_ball: negative radius");
    if (rho == 0.0)
    {
        out.value = q0;
        return out;
    }

    const Eigen::Matrix3d hs = 0.5 * (h + h.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(hs);
    const Eigen::Vector3d lam = es.eigenvalues();
    const Eigen::Matrix3d v = es.eigenvectors();
    const Eigen::Vector3d gt = v.transpose() * g;
    const double lam_min = lam(0);
    const double scale = std::max({1.0, lam.cwiseAbs().maxCoeff(), g.norm() / rho});

    const auto finish = [&](const Eigen::Vector3d &x_eig) {
        out.argmin = v * x_eig;
        out.value = q0 + g.dot(out.argmin) + 0.5 * out.argmin.dot(hs * out.argmin);
        return out;
    };

    // interior minimum when H is positive definite and the Newton point fits
    if (lam_min > 0.0)
    {
        const Eigen::Vector3d x = -gt.cwiseQuotient(lam);
        if (x.norm() <= rho)
            return finish(x);
    }

    const auto norm_at = [&](double nu) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i)
        {
            const double den = lam(i) + nu;
            s += (gt(i) * gt(i)) / (den * den);
        }
        return std::sqrt(s);
    };

    // boundary solution: root of ||x(nu)|| = rho on (max(0, -lam_min), inf)
    const double nu_floor = std::max(0.0, -lam_min);
    const double eps = 1e-14 * scale;

    // hard case: all gradient components in the bottom eigenspace vanish and
    // the remaining components cannot reach the boundary
    bool degenerate_grad = true;
    for (int i = 0; i < 3; ++i)
        if (std::abs(lam(i) - lam_min) <= 1e-12 * scale && std::abs(gt(i)) > 1e-13 * scale * rho)
            degenerate_grad = false;
    if (lam_min <= 0.0 && degenerate_grad)
    {
        Eigen::Vector3d x = Eigen::Vector3d::Zero();
        for (int i = 0; i < 3; ++i)
        {
            const double den = lam(i) + nu_floor;
            if (std::abs(den) > 1e-10 * scale)
                x(i) = -gt(i) / den;
        }
        if (x.norm() <= rho * (1.0 + 1e-12))
        {
            const double tau = std::sqrt(std::max(0.0, rho * rho - x.squaredNorm()));
            for (int i = 0; i < 3; ++i)
            {
                if (std::abs(lam(i) - lam_min) <= 1e-12 * scale)
                {
                    x(i) += tau; // any bottom-eigenspace direction reaches the boundary
                    break;
                }
            }
            return finish(x);
        }
    }

    double lo = nu_floor + eps;
    double hi = std::max(lo * 2.0 + 1.0, nu_floor + gt.norm() / rho);
    while (norm_at(hi) > rho)
        hi = 2.0 * hi + 1.0;
    while (norm_at(lo) < rho && lo > nu_floor * (1.0 + 1e-15) + 1e-300)
    {
        // shrink toward the pole until the bracket encloses the root
        const double step = (lo - nu_floor) * 0.5;
        if (step <= 0.0)
            break;
        lo = nu_floor + step;
    }

    // safeguarded Newton on the reciprocal secular equation 1/||x(nu)|| = 1/rho
    double nu = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it)
    {
        const double n = norm_at(nu);
        if (std::abs(n - rho) <= 1e-10 * rho)
            break;
        if (n > rho)
            lo = nu;
        else
            hi = nu;
        double dphi = 0.0; // d/dnu of ||x(nu)||^2 = -2 sum g_i^2/(lam_i+nu)^3
        for (int i = 0; i < 3; ++i)
        {
            const double den = lam(i) + nu;
            dphi += (gt(i) * gt(i)) / (den * den * den);
        }
        dphi = -2.0 * dphi;
        const double dn = dphi / (2.0 * std::max(n, 1e-300));
        const double phi_val = 1.0 / std::max(n, 1e-300) - 1.0 / rho;
        const double dphi_rec = -dn / std::max(n * n, 1e-300);
        double next = nu - phi_val / dphi_rec;
        if (!(next > lo) || !(next < hi) || !std::isfinite(next))
            next = 0.5 * (lo + hi);
        nu = next;
    }

    Eigen::Vector3d x;
    for (int i = 0; i < 3; ++i)
        x(i) = -gt(i) / (lam(i) + nu);
    if (x.norm() > 0.0)
        x *= rho / x.norm(); // place exactly on the boundary
    return finish(x);
}

/// Worst case of the quadratic model over its own uncertainty ball.
inline BallMin min_quadratic_over_ball(const RobustQuadratic &rq)
{
    return min_quadratic_over_ball(rq.q0, rq.phi, rq.phi_mat, rq.ball_radius());
}

/// Linear-in-matrix-variable forms of the quadratic model. For the w-step the
/// carrier is T = diag(g_hat) diag(xi) G and the matrix variable is W = w w^H;
/// for the xi-step the carrier is Pi = diag(diag(g_hat) G w) and the variable
/// is Xi = xi xi^H. With E = carrier * V * carrier^H:
///   q(V)       = sum_{m,n} E_mn
///   phi_q(V)   = -pi d_hat sum_{m,n} Im(E_mn) [d_mats_q]_mn
///   Phi_sl(V)  = sum_{m,n} Re(E_mn) [a_mats_sl]_mn
/// which reproduce taylor_quadratic at rank-one V.
struct LiftedForms
{
    Eigen::MatrixXcd t_or_pi;                 // T (MxN) or Pi (MxM)
    std::array<Eigen::MatrixXd, 3> d_mats;    // [(f_m - f_n)_q]_mn, antisymmetric
    std::array<Eigen::MatrixXd, 6> a_mats;    // A_sl = -(pi d_hat)^2 (f_m-f_n)_s (f_m-f_n)_l, s <= l
    double d_hat = 1.0;
    double radius = 0.0;

    static int sl_index(int s, int l)
    {
        if (s > l)
            std::swap(s, l);
        return l + s * (5 - s) / 2; // (0,0)(0,1)(0,2)(1,1)(1,2)(2,2)
    }

    Eigen::MatrixXcd pair_matrix(const Eigen::MatrixXcd &v) const
    {
        return t_or_pi * v * t_or_pi.adjoint();
    }

    double q_of(const Eigen::MatrixXcd &v) const { return pair_matrix(v).sum().real(); }

    Eigen::Vector3d phi_of(const Eigen::MatrixXcd &v) const
    {
        const Eigen::MatrixXcd e = pair_matrix(v);
        Eigen::Vector3d out;
        for (int q = 0; q < 3; ++q)
            out(q) = -std::numbers::pi * d_hat * e.imag().cwiseProduct(d_mats[q]).sum();
        return out;
    }

    Eigen::Matrix3d Phi_of(const Eigen::MatrixXcd &v) const
    {
        const Eigen::MatrixXcd e = pair_matrix(v);
        Eigen::Matrix3d out;
        for (int s = 0; s < 3; ++s)
            for (int l = s; l < 3; ++l)
            {
                out(s, l) = e.real().cwiseProduct(a_mats[static_cast<std::size_t>(sl_index(s, l))]).sum();
                out(l, s) = out(s, l);
            }
        return out;
    }

    RobustQuadratic quadratic_of(const Eigen::MatrixXcd &v) const
    {
        RobustQuadratic rq;
        rq.q0 = q_of(v);
        rq.phi = phi_of(v);
        rq.phi_mat = Phi_of(v);
        rq.d_hat = d_hat;
        rq.radius = radius;
        return rq;
    }

    /// Hermitian K with q(V) = Re tr(K^H V).
    Eigen::MatrixXcd q_coeff() const
    {
        const Eigen::VectorXcd u = t_or_pi.adjoint() * Eigen::VectorXcd::Ones(t_or_pi.rows());
        return u * u.adjoint();
    }

    /// Hermitian K with phi_q(V) = Re tr(K^H V).
    Eigen::MatrixXcd phi_coeff(int q) const
    {
        const std::complex<double> jpd(0.0, std::numbers::pi * d_hat);
        // phi_q(V) = tr((carrier^H B^T carrier) V) with B = j pi d_hat d_mats[q]
        const Eigen::MatrixXcd g =
            t_or_pi.adjoint() * (-jpd * d_mats[static_cast<std::size_t>(q)]) * t_or_pi;
        return 0.5 * (g + g.adjoint());
    }

    /// Hermitian K with Phi_sl(V) = Re tr(K^H V).
    Eigen::MatrixXcd Phi_coeff(int s, int l) const
    {
        const Eigen::MatrixXcd g =
            t_or_pi.adjoint() * a_mats[static_cast<std::size_t>(sl_index(s, l))] * t_or_pi;
        return 0.5 * (g + g.adjoint());
    }
};

namespace detail
{
inline void fill_pairwise_mats(LiftedForms &lf, const ErrorSensitivity &sens)
{
    const Eigen::Index m = sens.f.rows();
    const double pd2 = std::pow(std::numbers::pi * sens.d_hat, 2);
    for (auto &mat : lf.d_mats)
        mat.setZero(m, m);
    for (auto &mat : lf.a_mats)
        mat.setZero(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b)
        {
            const Eigen::Vector3d df = (sens.f.row(a) - sens.f.row(b)).transpose();
            for (int q = 0; q < 3; ++q)
                lf.d_mats[static_cast<std::size_t>(q)](a, b) = df(q);
            for (int s = 0; s < 3; ++s)
                for (int l = s; l < 3; ++l)
                    lf.a_mats[static_cast<std::size_t>(LiftedForms::sl_index(s, l))](a, b) =
                        -pd2 * df(s) * df(l);
        }
}
} // namespace detail

/// Lifted forms for the beamforming subproblem: carrier T = diag(g_hat)
/// diag(xi) G, evaluated at W = w w^H.
inline LiftedForms lift_for_w(const PhaseShifts &xi, const ReflectChannel &g_hat,
                              const ChannelB2I &big_g, const ErrorSensitivity &sens,
                              const UncertaintyBall &ball)
{
    const Eigen::Index m = big_g.matrix.rows();
    if (g_hat.vector.size() != m || xi.xi.size() != m || sens.f.rows() != m)
        throw std::invalid_argument("lift_for_w: dimension mismatch");
    LiftedForms lf;
    lf.t_or_pi = g_hat.vector.cwiseProduct(xi.xi).asDiagonal() * big_g.matrix;
    lf.d_hat = sens.d_hat;
    lf.radius = ball.radius;
    detail::fill_pairwise_mats(lf, sens);
    return lf;
}

/// Lifted forms for the phase-shift subproblem: carrier Pi = diag(diag(g_hat)
/// G w), evaluated at Xi = xi xi^H. The current phase shifts are absorbed into
/// the variable, so the carrier is built phase-free.
inline LiftedForms lift_for_xi(const Eigen::VectorXcd &w, const ReflectChannel &g_hat,
                               const ChannelB2I &big_g, const ErrorSensitivity &sens,
                               const UncertaintyBall &ball)
{
    const Eigen::Index m = big_g.matrix.rows();
    if (g_hat.vector.size() != m || sens.f.rows() != m || big_g.matrix.cols() != w.size())
        throw std::invalid_argument("lift_for_xi: dimension mismatch");
    LiftedForms lf;
    const Eigen::VectorXcd d0 = g_hat.vector.cwiseProduct(big_g.matrix * w);
    lf.t_or_pi = Eigen::MatrixXcd(d0.asDiagonal());
    lf.d_hat = sens.d_hat;
    lf.radius = ball.radius;
    detail::fill_pairwise_mats(lf, sens);
    return lf;
}

/// S-Procedure certificate block for the constraint q(db) >= gamma over the
/// normalized ball of radius Upsilon / d_hat:
///   [ q0 - gamma - mu (- v)   phi^T / 2                        ]
///   [ phi / 2                 phi_mat / 2 + mu d_hat^2/Ups^2 I ]
/// psd for some mu >= 0 certifies the constraint.
struct LmiBlock
{
    double q0 = 0.0;
    Eigen::Vector3d phi = Eigen::Vector3d::Zero();
    Eigen::Matrix3d phi_mat = Eigen::Matrix3d::Zero();
    std::shared_ptr<const LiftedForms> lifted; // set for the variable-coupled form
    double gamma = 0.0;
    double d_hat = 1.0;
    double radius = 0.0;
    bool with_v = false;

    double mu_scale() const { return (d_hat * d_hat) / (radius * radius); }

    Eigen::Matrix4d block_from(double q0v, const Eigen::Vector3d &phiv,
                               const Eigen::Matrix3d &phimv, double mu, double v) const
    {
        Eigen::Matrix4d b;
        b(0, 0) = q0v - gamma - mu - v;
        b.block<1, 3>(0, 1) = 0.5 * phiv.transpose();
        b.block<3, 1>(1, 0) = 0.5 * phiv;
        b.block<3, 3>(1, 1) = 0.5 * phimv + mu * mu_scale() * Eigen::Matrix3d::Identity();
        return b;
    }

    Eigen::Matrix4d block(double mu, double v = 0.0) const
    {
        return block_from(q0, phi, phi_mat, mu, v);
    }

    Eigen::Matrix4d block(const Eigen::MatrixXcd &var, double mu, double v = 0.0) const
    {
        if (!lifted)
            throw std::logic_error("LmiBlock: no lifted forms attached");
        return block_from(lifted->q_of(var), lifted->phi_of(var), lifted->Phi_of(var), mu, v);
    }
};

inline LmiBlock assemble_lmi(const RobustQuadratic &rq, double gamma)
{
    if (gamma < 0.0)
        throw std::invalid_argument("assemble_lmi: gamma must be nonnegative");
    if (!(rq.radius > 0.0))
        throw std::domain_error(
            "assemble_lmi: zero uncertainty radius; use the pointwise constraint q0 >= gamma");
    LmiBlock b;
    b.q0 = rq.q0;
    b.phi = rq.phi;
    b.phi_mat = rq.phi_mat;
    b.gamma = gamma;
    b.d_hat = rq.d_hat;
    b.radius = rq.radius;
    return b;
}

inline LmiBlock assemble_lmi(std::shared_ptr<const LiftedForms> lifted, double gamma,
                             bool with_v = false)
{
    if (gamma < 0.0)
        throw std::invalid_argument("assemble_lmi: gamma must be nonnegative");
    if (!lifted || !(lifted->radius > 0.0))
        throw std::domain_error(
            "assemble_lmi: zero uncertainty radius; use the pointwise constraint q0 >= gamma");
    LmiBlock b;
    b.lifted = std::move(lifted);
    b.gamma = gamma;
    b.d_hat = b.lifted->d_hat;
    b.radius = b.lifted->radius;
    b.with_v = with_v;
    return b;
}

} // namespace irsbeam

#endif

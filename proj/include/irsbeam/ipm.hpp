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

#ifndef IRSBEAM_IPM_HPP
#define IRSBEAM_IPM_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace irsbeam
{
namespace sdp
{

/// Symmetric block-diagonal matrix; the cone variable of the standard form.
struct BlockDiag
{
    std::vector<Eigen::MatrixXd> blocks;

    static BlockDiag zero(const std::vector<int> &dims)
    {
        BlockDiag b;
        b.blocks.reserve(dims.size());
        for (int d : dims)
            b.blocks.emplace_back(Eigen::MatrixXd::Zero(d, d));
        return b;
    }

    static BlockDiag identity(const std::vector<int> &dims, double scale)
    {
        BlockDiag b;
        b.blocks.reserve(dims.size());
        for (int d : dims)
            b.blocks.emplace_back(scale * Eigen::MatrixXd::Identity(d, d));
        return b;
    }

    double dot(const BlockDiag &o) const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < blocks.size(); ++i)
            s += blocks[i].cwiseProduct(o.blocks[i]).sum();
        return s;
    }

    double squared_norm() const
    {
        double s = 0.0;
        for (const auto &b : blocks)
            s += b.squaredNorm();
        return s;
    }

    double norm() const { return std::sqrt(squared_norm()); }

    void axpy(double a, const BlockDiag &o)
    {
        for (std::size_t i = 0; i < blocks.size(); ++i)
            blocks[i] += a * o.blocks[i];
    }

    void symmetrize()
    {
        for (auto &b : blocks)
            b = 0.5 * (b + b.transpose()).eval();
    }

    int total_dim() const
    {
        int n = 0;
        for (const auto &b : blocks)
            n += static_cast<int>(b.rows());
        return n;
    }
};

/// min <C,X> s.t. <A_k,X> = b_k, X block-diagonal psd.
struct StandardForm
{
    std::vector<int> dims;
    BlockDiag c;
    std::vector<BlockDiag> a;
    Eigen::VectorXd b;
};

enum class IpmStatus
{
    optimal,
    primal_infeasible,
    dual_infeasible,
    iteration_limit
};

struct IpmOptions
{
    double tol = 1e-8;
    int max_iters = 200;
    double step_frac = 0.98;
};

struct IpmResult
{
    IpmStatus status = IpmStatus::iteration_limit;
    BlockDiag x;
    BlockDiag z;
    Eigen::VectorXd y;
    double primal_obj = 0.0;
    double dual_obj = 0.0;
    double rel_gap = std::numeric_limits<double>::infinity();
    double primal_res = std::numeric_limits<double>::infinity();
    double dual_res = std::numeric_limits<double>::infinity();
    int iterations = 0;
};

namespace detail
{

/// Largest step in [0, inf) keeping x + alpha*dx psd, via the generalized
/// eigenvalues of dx against the Cholesky factor of x.
inline double max_psd_step(const BlockDiag &x, const BlockDiag &dx)
{
    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.blocks.size(); ++i)
    {
        const Eigen::MatrixXd &xb = x.blocks[i];
        if (xb.rows() == 1)
        {
            const double d = dx.blocks[i](0, 0);
            if (d < 0.0)
                alpha = std::min(alpha, -xb(0, 0) / d);
            continue;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(xb);
        if (llt.info() != Eigen::Success)
            return 0.0;
        const Eigen::MatrixXd l = llt.matrixL();
        Eigen::MatrixXd t = l.triangularView<Eigen::Lower>().solve(dx.blocks[i]);
        t = l.triangularView<Eigen::Lower>().solve(t.transpose().eval());
        const double lam_min =
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t, Eigen::EigenvaluesOnly)
                .eigenvalues()(0);
        if (lam_min < 0.0)
            alpha = std::min(alpha, -1.0 / lam_min);
    }
    return alpha;
}

inline std::vector<std::vector<std::size_t>> active_blocks(const std::vector<BlockDiag> &a)
{
    std::vector<std::vector<std::size_t>> act(a.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t i = 0; i < a[k].blocks.size(); ++i)
            if (a[k].blocks[i].squaredNorm() > 0.0)
                act[k].push_back(i);
    return act;
}

} // namespace detail

/// Infeasible-start primal-dual path-following solver with a predictor-
/// corrector step. The search direction linearizes X Z = sigma*mu*I and is
/// reduced to a dense positive-definite normal system in y.
inline IpmResult solve_standard_form(const StandardForm &p, const IpmOptions &opt = {})
{
    const std::size_t m = p.a.size();
    const std::size_t nb = p.dims.size();
    IpmResult res;
    res.y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));

    const int ntot = [&] {
        int n = 0;
        for (int d : p.dims)
            n += d;
        return n;
    }();
    if (ntot == 0)
    {
        res.status = IpmStatus::optimal;
        res.rel_gap = res.primal_res = res.dual_res = 0.0;
        return res;
    }

    double norm_a_max = 0.0;
    for (const auto &ak : p.a)
        norm_a_max = std::max(norm_a_max, ak.norm());
    const double norm_b = p.b.size() ? p.b.norm() : 0.0;
    const double norm_c = p.c.norm();

    const double start =
        std::max({10.0, std::sqrt(static_cast<double>(ntot)), norm_b, norm_c, norm_a_max});
    res.x = BlockDiag::identity(p.dims, start);
    res.z = BlockDiag::identity(p.dims, start);

    const auto act = detail::active_blocks(p.a);

    BlockDiag at_y = BlockDiag::zero(p.dims);
    const auto apply_at = [&](const Eigen::VectorXd &y, BlockDiag &out) {
        for (std::size_t i = 0; i < nb; ++i)
            out.blocks[i].setZero();
        for (std::size_t k = 0; k < m; ++k)
        {
            const double yk = y(static_cast<Eigen::Index>(k));
            if (yk == 0.0)
                continue;
            for (std::size_t i : act[k])
                out.blocks[i] += yk * p.a[k].blocks[i];
        }
    };

    for (int iter = 0; iter < opt.max_iters; ++iter)
    {
        res.iterations = iter;

        // inverse of z, blockwise
        BlockDiag zinv = BlockDiag::zero(p.dims);
        bool factor_ok = true;
        for (std::size_t i = 0; i < nb; ++i)
        {
            Eigen::LLT<Eigen::MatrixXd> llt(res.z.blocks[i]);
            if (llt.info() != Eigen::Success)
            {
                factor_ok = false;
                break;
            }
            zinv.blocks[i] =
                llt.solve(Eigen::MatrixXd::Identity(p.dims[i], p.dims[i]));
        }
        if (!factor_ok)
            break;

        Eigen::VectorXd rp(static_cast<Eigen::Index>(m));
        for (std::size_t k = 0; k < m; ++k)
            rp(static_cast<Eigen::Index>(k)) =
                p.b(static_cast<Eigen::Index>(k)) - p.a[k].dot(res.x);
        apply_at(res.y, at_y);
        BlockDiag rd = p.c;
        rd.axpy(-1.0, res.z);
        rd.axpy(-1.0, at_y);

        const double gap = res.x.dot(res.z);
        const double mu = gap / ntot;
        res.primal_obj = p.c.dot(res.x);
        res.dual_obj = p.b.size() ? p.b.dot(res.y) : 0.0;
        res.primal_res = rp.size() ? rp.norm() / (1.0 + norm_b) : 0.0;
        res.dual_res = rd.norm() / (1.0 + norm_c);
        res.rel_gap = std::abs(res.primal_obj - res.dual_obj) /
                      (1.0 + std::abs(res.primal_obj) + std::abs(res.dual_obj));
        const double compl_gap =
            gap / (1.0 + std::abs(res.primal_obj) + std::abs(res.dual_obj));

        if (res.primal_res <= opt.tol && res.dual_res <= opt.tol &&
            std::min(res.rel_gap, compl_gap) <= opt.tol)
        {
            res.status = IpmStatus::optimal;
            return res;
        }

        // Farkas certificate of primal infeasibility: y/(b'y), z/(b'y) with
        // A'(y) + z vanishing and b'y > 0
        const double bty = res.dual_obj;
        if (bty > 0.0)
        {
            BlockDiag cert = at_y;
            cert.axpy(1.0, res.z);
            const double cert_res = cert.norm() / bty;
            const double cert_scale =
                (1.0 + res.y.norm() / bty * std::max(1.0, norm_a_max));
            if (cert_res <= std::max(opt.tol, 1e-9) * cert_scale)
            {
                res.status = IpmStatus::primal_infeasible;
                return res;
            }
        }
        // certificate of dual infeasibility (primal unbounded ray)
        if (res.primal_obj < 0.0)
        {
            double ax_norm = 0.0;
            for (std::size_t k = 0; k < m; ++k)
            {
                const double v = p.a[k].dot(res.x);
                ax_norm += v * v;
            }
            ax_norm = std::sqrt(ax_norm);
            const double xn = res.x.norm();
            if (ax_norm <= std::max(opt.tol, 1e-9) * std::max(1.0, norm_a_max) * xn &&
                res.primal_obj <= -std::max(opt.tol, 1e-9) * std::max(1.0, norm_c) * xn)
            {
                res.status = IpmStatus::dual_infeasible;
                return res;
            }
        }

        // products shared by the normal system: B_j = X A_j Z^{-1}
        std::vector<BlockDiag> bj(m);
        for (std::size_t j = 0; j < m; ++j)
        {
            bj[j].blocks.resize(nb);
            for (std::size_t i : act[j])
                bj[j].blocks[i] = res.x.blocks[i] * p.a[j].blocks[i] * zinv.blocks[i];
        }
        Eigen::MatrixXd schur(m, m);
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t j = 0; j < m; ++j)
            {
                double s = 0.0;
                for (std::size_t i : act[k])
                    if (bj[j].blocks[i].size() > 0)
                        s += p.a[k].blocks[i].cwiseProduct(bj[j].blocks[i]).sum();
                schur(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = s;
            }
        schur = 0.5 * (schur + schur.transpose()).eval();
        Eigen::LLT<Eigen::MatrixXd> schur_llt(schur);
        if (schur_llt.info() != Eigen::Success)
        {
            const double ridge = 1e-13 * (1.0 + schur.trace() / std::max<std::size_t>(m, 1));
            schur.diagonal().array() += ridge;
            schur_llt.compute(schur);
            if (schur_llt.info() != Eigen::Success)
                break;
        }

        // blockwise W = X Rd Z^{-1} enters both predictor and corrector
        BlockDiag w = BlockDiag::zero(p.dims);
        for (std::size_t i = 0; i < nb; ++i)
            w.blocks[i] = res.x.blocks[i] * rd.blocks[i] * zinv.blocks[i];

        Eigen::VectorXd rhs(static_cast<Eigen::Index>(m));
        for (std::size_t k = 0; k < m; ++k)
        {
            double s = p.b(static_cast<Eigen::Index>(k));
            for (std::size_t i : act[k])
                s += p.a[k].blocks[i].cwiseProduct(w.blocks[i]).sum();
            rhs(static_cast<Eigen::Index>(k)) = s;
        }

        // predictor (sigma = 0)
        const Eigen::VectorXd dy_aff = schur_llt.solve(rhs);
        BlockDiag dz_aff = rd;
        BlockDiag at_dy = BlockDiag::zero(p.dims);
        apply_at(dy_aff, at_dy);
        dz_aff.axpy(-1.0, at_dy);
        BlockDiag dx_aff = BlockDiag::zero(p.dims);
        for (std::size_t i = 0; i < nb; ++i)
            dx_aff.blocks[i] =
                -res.x.blocks[i] - res.x.blocks[i] * dz_aff.blocks[i] * zinv.blocks[i];
        dx_aff.symmetrize();

        const double ap_aff = std::min(1.0, detail::max_psd_step(res.x, dx_aff));
        const double ad_aff = std::min(1.0, detail::max_psd_step(res.z, dz_aff));
        BlockDiag x_try = res.x;
        x_try.axpy(ap_aff, dx_aff);
        BlockDiag z_try = res.z;
        z_try.axpy(ad_aff, dz_aff);
        const double gap_aff = std::max(0.0, x_try.dot(z_try));
        double sigma = std::pow(gap_aff / std::max(gap, 1e-300), 3);
        sigma = std::clamp(sigma, 1e-8, 1.0);

        // corrector with second-order term dX_aff dZ_aff Z^{-1}
        BlockDiag corr = BlockDiag::zero(p.dims);
        for (std::size_t i = 0; i < nb; ++i)
            corr.blocks[i] = dx_aff.blocks[i] * dz_aff.blocks[i] * zinv.blocks[i];

        const double smu = sigma * mu;
        for (std::size_t k = 0; k < m; ++k)
        {
            double s = rhs(static_cast<Eigen::Index>(k));
            for (std::size_t i : act[k])
                s += p.a[k].blocks[i].cwiseProduct(corr.blocks[i]).sum() -
                     smu * p.a[k].blocks[i].cwiseProduct(zinv.blocks[i]).sum();
            rhs(static_cast<Eigen::Index>(k)) = s;
        }
        const Eigen::VectorXd dy = schur_llt.solve(rhs);
        BlockDiag dz = rd;
        apply_at(dy, at_dy);
        dz.axpy(-1.0, at_dy);
        BlockDiag dx = BlockDiag::zero(p.dims);
        for (std::size_t i = 0; i < nb; ++i)
            dx.blocks[i] = smu * zinv.blocks[i] - res.x.blocks[i] -
                           res.x.blocks[i] * dz.blocks[i] * zinv.blocks[i] -
                           corr.blocks[i];
        dx.symmetrize();

        const double ap = std::min(1.0, opt.step_frac * detail::max_psd_step(res.x, dx));
        const double ad = std::min(1.0, opt.step_frac * detail::max_psd_step(res.z, dz));
        if (ap < 1e-10 && ad < 1e-10)
            break;
        res.x.axpy(ap, dx);
        res.y += ad * dy;
        res.z.axpy(ad, dz);
        res.x.symmetrize();
        res.z.symmetrize();
    }

    res.status = IpmStatus::iteration_limit;
    return res;
}

} // namespace sdp
} // namespace irsbeam

#endif

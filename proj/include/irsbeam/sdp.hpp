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

#ifndef IRSBEAM_SDP_HPP
#define IRSBEAM_SDP_HPP

#include <cmath>
#include <complex>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "irsbeam/ipm.hpp"

namespace irsbeam
{
namespace sdp
{

enum class Sense
{
    minimize,
    maximize
};

enum class Relation
{
    eq,
    le,
    ge
};

enum class SolveStatus
{
    optimal,
    infeasible,
    unbounded,
    numerical_failure
};

inline const char *to_string(SolveStatus s)
{
    switch (s)
    {
    case SolveStatus::optimal:
        return "optimal";
    case SolveStatus::infeasible:
        return "infeasible";
    case SolveStatus::unbounded:
        return "unbounded";
    default:
        return "numerical_failure";
    }
}

/// Named scalar variable, constrained nonnegative.
struct ScalarVar
{
    std::string name;
    double obj_coeff = 0.0;
};

/// Affine map into symmetric p x p space, required psd:
///   F(V, s) = constant + sum_{i<=j} Re tr(var_coeff[ij]^H V) basis_ij
///           + sum_t s_t scalar_coeff[t].
/// Entry coefficients are stored on the upper triangle; empty matrices mean
/// zero.
struct PsdConstraint
{
    int dim = 0;
    Eigen::MatrixXd constant;
    std::vector<Eigen::MatrixXd> scalar_coeff;  // one per scalar var, may be empty
    std::vector<Eigen::MatrixXcd> var_coeff;    // flattened upper triangle, may be empty

    static int tri_index(int i, int j, int dim)
    {
        if (i > j || j >= dim)
            throw std::out_of_range("PsdConstraint::tri_index");
        return i * dim - i * (i - 1) / 2 + (j - i);
    }

    int tri_count() const { return dim * (dim + 1) / 2; }
};

/// Linear equality or inequality over (matrix variable, scalars): value
/// Re tr(var_coeff^H V) + scalar_coeff . s  (rel)  rhs.
struct LinearConstraint
{
    Eigen::MatrixXcd var_coeff;
    Eigen::VectorXd scalar_coeff;
    double rhs = 0.0;
    Relation rel = Relation::eq;
};

struct SdpProblem
{
    int matrix_var_dim = 0;
    bool var_is_hermitian = true;
    Sense sense = Sense::minimize;
    Eigen::MatrixXcd objective_var_coeff;  // empty means zero
    std::vector<ScalarVar> scalars;
    std::vector<PsdConstraint> psd_constraints;
    std::vector<LinearConstraint> linear_constraints;

    int scalar_index(const std::string &name) const
    {
        for (std::size_t i = 0; i < scalars.size(); ++i)
            if (scalars[i].name == name)
                return static_cast<int>(i);
        return -1;
    }
};

struct SdpSolution
{
    SolveStatus status = SolveStatus::numerical_failure;
    Eigen::MatrixXcd matrix_value;
    std::map<std::string, double> scalar_values;
    double objective_value = std::numeric_limits<double>::quiet_NaN();
    double certified_gap = std::numeric_limits<double>::infinity();
    int iterations = 0;
    std::string diagnostic;
};

namespace detail
{

inline Eigen::MatrixXd embed_hermitian(const Eigen::MatrixXcd &k)
{
    const Eigen::Index n = k.rows();
    Eigen::MatrixXd e(2 * n, 2 * n);
    e.topLeftCorner(n, n) = k.real();
    e.topRightCorner(n, n) = -k.imag();
    e.bottomLeftCorner(n, n) = k.imag();
    e.bottomRightCorner(n, n) = k.real();
    return e;
}

/// Standard-form coefficient of the matrix variable with inner-product
/// convention <coef, X_block> = Re tr(k^H V).
inline Eigen::MatrixXd var_coefficient(const Eigen::MatrixXcd &k, bool hermitian)
{
    if (hermitian)
        return 0.5 * embed_hermitian(0.5 * (k + k.adjoint()));
    if (k.imag().cwiseAbs().maxCoeff() > 0.0)
        throw std::invalid_argument("sdp: complex coefficient on a real matrix variable");
    return 0.5 * (k.real() + k.real().transpose());
}

inline double eval_var_term(const Eigen::MatrixXcd &k, const Eigen::MatrixXcd &v)
{
    if (k.size() == 0)
        return 0.0;
    return (k.adjoint() * v).trace().real();
}

inline Eigen::MatrixXd eval_psd_map(const PsdConstraint &c, const Eigen::MatrixXcd &v,
                                    const std::vector<double> &s)
{
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(c.dim, c.dim);
    if (c.constant.size() > 0)
        f = 0.5 * (c.constant + c.constant.transpose());
    for (int i = 0; i < c.dim; ++i)
        for (int j = i; j < c.dim; ++j)
        {
            const auto &k = c.var_coeff[static_cast<std::size_t>(PsdConstraint::tri_index(i, j, c.dim))];
            if (k.size() == 0)
                continue;
            const double val = eval_var_term(k, v);
            f(i, j) += val;
            if (i != j)
                f(j, i) += val;
        }
    for (std::size_t t = 0; t < c.scalar_coeff.size(); ++t)
        if (c.scalar_coeff[t].size() > 0)
            f += s[t] * 0.5 * (c.scalar_coeff[t] + c.scalar_coeff[t].transpose());
    return f;
}

inline double eval_linear(const LinearConstraint &c, const Eigen::MatrixXcd &v,
                          const std::vector<double> &s)
{
    double val = eval_var_term(c.var_coeff, v);
    if (c.scalar_coeff.size() > 0)
        for (Eigen::Index t = 0; t < c.scalar_coeff.size(); ++t)
            val += c.scalar_coeff(t) * s[static_cast<std::size_t>(t)];
    return val;
}

inline void validate(const SdpProblem &p)
{
    if (p.matrix_var_dim <= 0)
        throw std::invalid_argument("sdp: matrix_var_dim must be positive");
    const Eigen::Index n = p.matrix_var_dim;
    const auto check_var = [&](const Eigen::MatrixXcd &k, const char *what) {
        if (k.size() > 0 && (k.rows() != n || k.cols() != n))
            throw std::invalid_argument(std::string("sdp: bad coefficient dimension in ") + what);
    };
    check_var(p.objective_var_coeff, "objective");
    for (const auto &c : p.psd_constraints)
    {
        if (c.dim <= 0)
            throw std::invalid_argument("sdp: psd constraint with nonpositive dimension");
        if (c.constant.size() > 0 && (c.constant.rows() != c.dim || c.constant.cols() != c.dim))
            throw std::invalid_argument("sdp: psd constant dimension mismatch");
        if (static_cast<int>(c.var_coeff.size()) != c.tri_count())
            throw std::invalid_argument("sdp: psd var_coeff must cover the upper triangle");
        for (const auto &k : c.var_coeff)
            check_var(k, "psd constraint");
        if (c.scalar_coeff.size() != p.scalars.size())
            throw std::invalid_argument("sdp: psd scalar_coeff must have one entry per scalar");
        for (const auto &m : c.scalar_coeff)
            if (m.size() > 0 && (m.rows() != c.dim || m.cols() != c.dim))
                throw std::invalid_argument("sdp: psd scalar_coeff dimension mismatch");
    }
    for (const auto &c : p.linear_constraints)
    {
        check_var(c.var_coeff, "linear constraint");
        if (c.scalar_coeff.size() > 0 &&
            c.scalar_coeff.size() != static_cast<Eigen::Index>(p.scalars.size()))
            throw std::invalid_argument("sdp: linear scalar_coeff must have one entry per scalar");
    }
}

struct ConvertedForm
{
    StandardForm form;
    int var_block = 0;
    std::vector<int> scalar_block;  // block index per scalar
};

inline ConvertedForm to_standard_form(const SdpProblem &p)
{
    validate(p);
    const int n = p.matrix_var_dim;
    const int vdim = p.var_is_hermitian ? 2 * n : n;
    const double obj_sign = (p.sense == Sense::minimize) ? 1.0 : -1.0;

    ConvertedForm cf;
    auto &dims = cf.form.dims;
    dims.push_back(vdim);
    cf.var_block = 0;
    cf.scalar_block.resize(p.scalars.size());
    for (std::size_t t = 0; t < p.scalars.size(); ++t)
    {
        cf.scalar_block[t] = static_cast<int>(dims.size());
        dims.push_back(1);
    }
    std::vector<int> psd_block(p.psd_constraints.size());
    for (std::size_t c = 0; c < p.psd_constraints.size(); ++c)
    {
        psd_block[c] = static_cast<int>(dims.size());
        dims.push_back(p.psd_constraints[c].dim);
    }
    std::vector<int> ineq_block(p.linear_constraints.size(), -1);
    for (std::size_t c = 0; c < p.linear_constraints.size(); ++c)
        if (p.linear_constraints[c].rel != Relation::eq)
        {
            ineq_block[c] = static_cast<int>(dims.size());
            dims.push_back(1);
        }

    cf.form.c = BlockDiag::zero(dims);
    if (p.objective_var_coeff.size() > 0)
        cf.form.c.blocks[0] = obj_sign * var_coefficient(p.objective_var_coeff, p.var_is_hermitian);
    for (std::size_t t = 0; t < p.scalars.size(); ++t)
        cf.form.c.blocks[static_cast<std::size_t>(cf.scalar_block[t])](0, 0) =
            obj_sign * p.scalars[t].obj_coeff;

    std::vector<double> bvals;
    auto &a = cf.form.a;

    // psd constraints: slack S = F(V, s), one equality per upper-triangle entry
    for (std::size_t c = 0; c < p.psd_constraints.size(); ++c)
    {
        const auto &pc = p.psd_constraints[c];
        const Eigen::MatrixXd f0 = pc.constant.size() > 0
                                       ? (0.5 * (pc.constant + pc.constant.transpose())).eval()
                                       : Eigen::MatrixXd::Zero(pc.dim, pc.dim).eval();
        for (int i = 0; i < pc.dim; ++i)
            for (int j = i; j < pc.dim; ++j)
            {
                BlockDiag ak = BlockDiag::zero(dims);
                auto &slack = ak.blocks[static_cast<std::size_t>(psd_block[c])];
                if (i == j)
                    slack(i, i) = 1.0;
                else
                {
                    slack(i, j) = 0.5;
                    slack(j, i) = 0.5;
                }
                const auto &k =
                    pc.var_coeff[static_cast<std::size_t>(PsdConstraint::tri_index(i, j, pc.dim))];
                if (k.size() > 0)
                    ak.blocks[0] = -var_coefficient(k, p.var_is_hermitian);
                for (std::size_t t = 0; t < p.scalars.size(); ++t)
                    if (pc.scalar_coeff[t].size() > 0)
                    {
                        const double coef =
                            0.5 * (pc.scalar_coeff[t](i, j) + pc.scalar_coeff[t](j, i));
                        if (coef != 0.0)
                            ak.blocks[static_cast<std::size_t>(cf.scalar_block[t])](0, 0) = -coef;
                    }
                a.push_back(std::move(ak));
                bvals.push_back(f0(i, j));
            }
    }

    // linear constraints, inequality slack folded in
    for (std::size_t c = 0; c < p.linear_constraints.size(); ++c)
    {
        const auto &lc = p.linear_constraints[c];
        BlockDiag ak = BlockDiag::zero(dims);
        if (lc.var_coeff.size() > 0)
            ak.blocks[0] = var_coefficient(lc.var_coeff, p.var_is_hermitian);
        if (lc.scalar_coeff.size() > 0)
            for (Eigen::Index t = 0; t < lc.scalar_coeff.size(); ++t)
                if (lc.scalar_coeff(t) != 0.0)
                    ak.blocks[static_cast<std::size_t>(cf.scalar_block[static_cast<std::size_t>(t)])](
                        0, 0) = lc.scalar_coeff(t);
        if (lc.rel == Relation::le)
            ak.blocks[static_cast<std::size_t>(ineq_block[c])](0, 0) = 1.0;
        else if (lc.rel == Relation::ge)
            ak.blocks[static_cast<std::size_t>(ineq_block[c])](0, 0) = -1.0;
        a.push_back(std::move(ak));
        bvals.push_back(lc.rhs);
    }

    cf.form.b = Eigen::Map<const Eigen::VectorXd>(bvals.data(),
                                                  static_cast<Eigen::Index>(bvals.size()));
    return cf;
}

inline Eigen::MatrixXcd extract_matrix(const Eigen::MatrixXd &block, int n, bool hermitian)
{
    if (!hermitian)
        return (0.5 * (block + block.transpose())).cast<std::complex<double>>();
    const Eigen::MatrixXd re = 0.5 * (block.topLeftCorner(n, n) + block.bottomRightCorner(n, n));
    const Eigen::MatrixXd im = 0.5 * (block.bottomLeftCorner(n, n) - block.topRightCorner(n, n));
    Eigen::MatrixXcd v(n, n);
    v.real() = re;
    v.imag() = im;
    return 0.5 * (v + v.adjoint());
}

} // namespace detail

/// Solves the problem with the built-in interior-point backend. status
/// optimal certifies primal/dual residuals and the relative duality gap at or
/// below tol; infeasible and unbounded are certificate-based.
inline SdpSolution solve(const SdpProblem &p, double tol = 1e-8)
{
    if (!(tol > 0.0))
        throw std::invalid_argument("sdp::solve: tol must be positive");
    detail::ConvertedForm cf = detail::to_standard_form(p);

    IpmOptions opt;
    opt.tol = tol;
    IpmResult r = solve_standard_form(cf.form, opt);

    SdpSolution sol;
    sol.iterations = r.iterations;
    switch (r.status)
    {
    case IpmStatus::optimal:
        sol.status = SolveStatus::optimal;
        break;
    case IpmStatus::primal_infeasible:
        sol.status = SolveStatus::infeasible;
        sol.diagnostic = "certificate: dual ray with positive objective and vanishing residual";
        break;
    case IpmStatus::dual_infeasible:
        sol.status = SolveStatus::unbounded;
        sol.diagnostic = "certificate: feasible ray with unbounded objective";
        break;
    default:
        sol.status = SolveStatus::numerical_failure;
        sol.diagnostic = "iteration limit or factorization breakdown before convergence";
        break;
    }
    sol.certified_gap = std::max({r.rel_gap, r.primal_res, r.dual_res});
    if (r.status == IpmStatus::optimal || r.status == IpmStatus::iteration_limit)
    {
        sol.matrix_value =
            detail::extract_matrix(r.x.blocks[0], p.matrix_var_dim, p.var_is_hermitian);
        for (std::size_t t = 0; t < p.scalars.size(); ++t)
            sol.scalar_values[p.scalars[t].name] =
                r.x.blocks[static_cast<std::size_t>(cf.scalar_block[t])](0, 0);
        const double sign = (p.sense == Sense::minimize) ? 1.0 : -1.0;
        sol.objective_value = sign * r.primal_obj;
    }
    return sol;
}

struct VerifyReport
{
    double max_violation = 0.0;
    double matrix_min_eigenvalue = 0.0;
    std::vector<double> psd_min_eigenvalues;
    std::vector<std::string> notes;

    bool clean(double tol) const { return max_violation <= tol; }
};

/// Independent feasibility audit: re-evaluates every affine map from the
/// problem description and eigen-decomposes each psd block. Never reuses
/// solver internals; violations are reported rather than thrown.
inline VerifyReport verify(const SdpProblem &p, const SdpSolution &sol, double tol)
{
    detail::validate(p);
    VerifyReport rep;
    const auto flag = [&](double violation, const std::string &what) {
        rep.max_violation = std::max(rep.max_violation, violation);
        if (violation > tol)
            rep.notes.push_back(what);
    };

    const Eigen::MatrixXcd &v = sol.matrix_value;
    std::vector<double> s(p.scalars.size(), 0.0);
    for (std::size_t t = 0; t < p.scalars.size(); ++t)
    {
        const auto it = sol.scalar_values.find(p.scalars[t].name);
        if (it == sol.scalar_values.end())
        {
            flag(std::numeric_limits<double>::infinity(),
                 "missing scalar value: " + p.scalars[t].name);
            continue;
        }
        s[t] = it->second;
        flag(std::max(0.0, -s[t]), "scalar " + p.scalars[t].name + " negative");
    }
    if (v.rows() != p.matrix_var_dim || v.cols() != p.matrix_var_dim)
    {
        flag(std::numeric_limits<double>::infinity(), "matrix value dimension mismatch");
        return rep;
    }

    const Eigen::MatrixXcd vh = 0.5 * (v + v.adjoint());
    flag((v - vh).norm() / (1.0 + vh.norm()), "matrix value not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(vh, Eigen::EigenvaluesOnly);
    rep.matrix_min_eigenvalue = es.eigenvalues()(0);
    flag(std::max(0.0, -rep.matrix_min_eigenvalue) / (1.0 + vh.norm()),
         "matrix variable has a negative eigenvalue");

    for (std::size_t c = 0; c < p.psd_constraints.size(); ++c)
    {
        const Eigen::MatrixXd f = detail::eval_psd_map(p.psd_constraints[c], vh, s);
        const double lam_min =
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(f, Eigen::EigenvaluesOnly)
                .eigenvalues()(0);
        rep.psd_min_eigenvalues.push_back(lam_min);
        flag(std::max(0.0, -lam_min) / (1.0 + f.norm()),
             "psd constraint " + std::to_string(c) + " has a negative eigenvalue");
    }

    for (std::size_t c = 0; c < p.linear_constraints.size(); ++c)
    {
        const auto &lc = p.linear_constraints[c];
        const double lhs = detail::eval_linear(lc, vh, s);
        double viol = 0.0;
        if (lc.rel == Relation::eq)
            viol = std::abs(lhs - lc.rhs);
        else if (lc.rel == Relation::le)
            viol = std::max(0.0, lhs - lc.rhs);
        else
            viol = std::max(0.0, lc.rhs - lhs);
        flag(viol / (1.0 + std::abs(lc.rhs)), "linear constraint " + std::to_string(c) + " violated");
    }

    double obj = detail::eval_var_term(p.objective_var_coeff, vh);
    for (std::size_t t = 0; t < p.scalars.size(); ++t)
        obj += p.scalars[t].obj_coeff * s[t];
    flag(std::abs(obj - sol.objective_value) / (1.0 + std::abs(obj)),
         "objective value does not match re-evaluation");
    return rep;
}

// ---------------------------------------------------------------- dump/load

namespace detail
{

inline void dump_real_dense(std::ostream &os, const Eigen::MatrixXd &m)
{
    char buf[40];
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
        {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            os << (j ? " " : "") << buf;
        }
        os << "\n";
    }
}

inline void dump_complex_dense(std::ostream &os, const Eigen::MatrixXcd &m)
{
    char buf[96];
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
        {
            std::snprintf(buf, sizeof buf, "%.17g %.17g", m(i, j).real(), m(i, j).imag());
            os << (j ? " " : "") << buf;
        }
        os << "\n";
    }
}

class TokenReader
{
  public:
    explicit TokenReader(std::istream &is) : is_(is) {}

    std::string word(const char *what)
    {
        std::string t;
        if (!(is_ >> t))
            throw std::runtime_error(std::string("sdp load: unexpected end of input, wanted ") +
                                     what);
        return t;
    }

    void expect(const std::string &lit)
    {
        const std::string t = word(lit.c_str());
        if (t != lit)
            throw std::runtime_error("sdp load: expected '" + lit + "', got '" + t + "'");
    }

    double number(const char *what)
    {
        const std::string t = word(what);
        try
        {
            std::size_t pos = 0;
            const double v = std::stod(t, &pos);
            if (pos != t.size())
                throw std::invalid_argument(t);
            return v;
        }
        catch (const std::exception &)
        {
            throw std::runtime_error(std::string("sdp load: bad number for ") + what + ": '" + t +
                                     "'");
        }
    }

    int integer(const char *what)
    {
        const double v = number(what);
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw std::runtime_error(std::string("sdp load: expected integer for ") + what);
        return i;
    }

    Eigen::MatrixXd real_dense(int rows, int cols, const char *what)
    {
        Eigen::MatrixXd m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                m(i, j) = number(what);
        return m;
    }

    Eigen::MatrixXcd complex_dense(int rows, int cols, const char *what)
    {
        Eigen::MatrixXcd m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
            {
                const double re = number(what);
                const double im = number(what);
                m(i, j) = {re, im};
            }
        return m;
    }

  private:
    std::istream &is_;
};

} // namespace detail

/// Writes the full problem in a self-describing text form suitable for
/// offline cross-checking with another solver. Numbers keep full precision.
inline void dump(const SdpProblem &p, std::ostream &os)
{
    detail::validate(p);
    for (const auto &sv : p.scalars)
        if (sv.name.empty() || sv.name.find_first_of(" \t\n") != std::string::npos)
            throw std::invalid_argument("sdp dump: scalar names must be non-empty without spaces");
    char buf[40];
    os << "irsbeam-sdp 1\n";
    os << "sense " << (p.sense == Sense::minimize ? "min" : "max") << "\n";
    os << "var_dim " << p.matrix_var_dim << "\n";
    os << "var_hermitian " << (p.var_is_hermitian ? 1 : 0) << "\n";
    if (p.objective_var_coeff.size() == 0)
        os << "objective_var none\n";
    else
    {
        os << "objective_var dense\n";
        detail::dump_complex_dense(os, p.objective_var_coeff);
    }
    os << "scalars " << p.scalars.size() << "\n";
    for (const auto &sv : p.scalars)
    {
        std::snprintf(buf, sizeof buf, "%.17g", sv.obj_coeff);
        os << sv.name << " " << buf << "\n";
    }
    os << "psd_constraints " << p.psd_constraints.size() << "\n";
    for (const auto &c : p.psd_constraints)
    {
        os << "dim " << c.dim << "\n";
        if (c.constant.size() == 0)
            os << "constant none\n";
        else
        {
            os << "constant dense\n";
            detail::dump_real_dense(os, c.constant);
        }
        int n_scalar = 0;
        for (const auto &m : c.scalar_coeff)
            if (m.size() > 0)
                ++n_scalar;
        os << "scalar_coeffs " << n_scalar << "\n";
        for (std::size_t t = 0; t < c.scalar_coeff.size(); ++t)
            if (c.scalar_coeff[t].size() > 0)
            {
                os << t << "\n";
                detail::dump_real_dense(os, c.scalar_coeff[t]);
            }
        int n_var = 0;
        for (const auto &k : c.var_coeff)
            if (k.size() > 0)
                ++n_var;
        os << "var_coeffs " << n_var << "\n";
        for (int i = 0; i < c.dim; ++i)
            for (int j = i; j < c.dim; ++j)
            {
                const auto &k =
                    c.var_coeff[static_cast<std::size_t>(PsdConstraint::tri_index(i, j, c.dim))];
                if (k.size() == 0)
                    continue;
                os << i << " " << j << "\n";
                detail::dump_complex_dense(os, k);
            }
    }
    os << "linear_constraints " << p.linear_constraints.size() << "\n";
    for (const auto &c : p.linear_constraints)
    {
        os << "rel "
           << (c.rel == Relation::eq ? "eq" : (c.rel == Relation::le ? "le" : "ge")) << "\n";
        std::snprintf(buf, sizeof buf, "%.17g", c.rhs);
        os << "rhs " << buf << "\n";
        if (c.var_coeff.size() == 0)
            os << "var none\n";
        else
        {
            os << "var dense\n";
            detail::dump_complex_dense(os, c.var_coeff);
        }
        if (c.scalar_coeff.size() == 0)
            os << "scalars none\n";
        else
        {
            os << "scalars dense\n";
            detail::dump_real_dense(os, c.scalar_coeff.transpose());
        }
    }
    os << "end\n";
}

inline std::string dump(const SdpProblem &p)
{
    std::ostringstream os;
    dump(p, os);
    return os.str();
}

inline SdpProblem load(std::istream &is)
{
    detail::TokenReader tr(is);
    tr.expect("irsbeam-sdp");
    if (tr.integer("format version") != 1)
        throw std::runtime_error("sdp load: unsupported format version");
    SdpProblem p;
    tr.expect("sense");
    const std::string sense = tr.word("sense");
    if (sense == "min")
        p.sense = Sense::minimize;
    else if (sense == "max")
        p.sense = Sense::maximize;
    else
        throw std::runtime_error("sdp load: bad sense '" + sense + "'");
    tr.expect("var_dim");
    p.matrix_var_dim = tr.integer("var_dim");
    tr.expect("var_hermitian");
    p.var_is_hermitian = tr.integer("var_hermitian") != 0;
    const int n = p.matrix_var_dim;
    tr.expect("objective_var");
    if (tr.word("objective_var kind") == "dense")
        p.objective_var_coeff = tr.complex_dense(n, n, "objective matrix");
    tr.expect("scalars");
    const int ns = tr.integer("scalar count");
    for (int t = 0; t < ns; ++t)
    {
        ScalarVar sv;
        sv.name = tr.word("scalar name");
        sv.obj_coeff = tr.number("scalar objective coefficient");
        p.scalars.push_back(std::move(sv));
    }
    tr.expect("psd_constraints");
    const int np = tr.integer("psd constraint count");
    for (int c = 0; c < np; ++c)
    {
        PsdConstraint pc;
        tr.expect("dim");
        pc.dim = tr.integer("psd dim");
        tr.expect("constant");
        if (tr.word("constant kind") == "dense")
            pc.constant = tr.real_dense(pc.dim, pc.dim, "psd constant");
        pc.scalar_coeff.resize(static_cast<std::size_t>(ns));
        tr.expect("scalar_coeffs");
        const int nsc = tr.integer("psd scalar_coeff count");
        for (int t = 0; t < nsc; ++t)
        {
            const int idx = tr.integer("scalar index");
            if (idx < 0 || idx >= ns)
                throw std::runtime_error("sdp load: scalar index out of range");
            pc.scalar_coeff[static_cast<std::size_t>(idx)] =
                tr.real_dense(pc.dim, pc.dim, "psd scalar coefficient");
        }
        pc.var_coeff.resize(static_cast<std::size_t>(pc.tri_count()));
        tr.expect("var_coeffs");
        const int nvc = tr.integer("psd var_coeff count");
        for (int t = 0; t < nvc; ++t)
        {
            const int i = tr.integer("entry row");
            const int j = tr.integer("entry col");
            if (i < 0 || j < i || j >= pc.dim)
                throw std::runtime_error("sdp load: psd entry index out of range");
            pc.var_coeff[static_cast<std::size_t>(PsdConstraint::tri_index(i, j, pc.dim))] =
                tr.complex_dense(n, n, "psd var coefficient");
        }
        p.psd_constraints.push_back(std::move(pc));
    }
    tr.expect("linear_constraints");
    const int nl = tr.integer("linear constraint count");
    for (int c = 0; c < nl; ++c)
    {
        LinearConstraint lc;
        tr.expect("rel");
        const std::string rel = tr.word("relation");
        if (rel == "eq")
            lc.rel = Relation::eq;
        else if (rel == "le")
            lc.rel = Relation::le;
        else if (rel == "ge")
            lc.rel = Relation::ge;
        else
            throw std::runtime_error("sdp load: bad relation '" + rel + "'");
        tr.expect("rhs");
        lc.rhs = tr.number("rhs");
        tr.expect("var");
        if (tr.word("var kind") == "dense")
            lc.var_coeff = tr.complex_dense(n, n, "linear var coefficient");
        tr.expect("scalars");
        if (tr.word("scalars kind") == "dense")
            lc.scalar_coeff = tr.real_dense(1, ns, "linear scalar coefficients").transpose();
        p.linear_constraints.push_back(std::move(lc));
    }
    tr.expect("end");
    detail::validate(p);
    return p;
}

inline SdpProblem load(const std::string &text)
{
    std::istringstream is(text);
    return load(is);
}

} // namespace sdp
} // namespace irsbeam

#endif

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
//
// Command-line driver: design / evaluate / sweep / selftest.
//
// Exit codes: 0 success, 2 malformed configuration or arguments, 3 optimizer
// failure (a trace of completed iterations is written next to the output).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "irsbeam/harness.hpp"
#include "irsbeam/sdp.hpp"

namespace
{

using namespace irsbeam;

constexpr int k_exit_ok = 0;
constexpr int k_exit_config = 2;
constexpr int k_exit_optimizer = 3;

Scenario load_scenario(const std::string &path, const std::string &profile,
                       std::optional<std::uint64_t> seed_override)
{
    Scenario base = (profile == "paper") ? Scenario{} : desk_scenario();
    if (!path.empty())
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error(path + ": cannot open scenario file");
        base = parse_scenario(in, path, base);
    }
    if (seed_override)
        base.seed = *seed_override;
    return base;
}

void write_file(const std::string &path, const std::string &content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error(path + ": cannot open for writing");
    out << content;
    if (!out)
        throw std::runtime_error(path + ": write failed");
}

std::string trace_text(const std::vector<TraceRecord> &trace)
{
    std::ostringstream os;
    os << "iteration power_w v worst_case_margin\n";
    char buf[160];
    for (const TraceRecord &t : trace)
    {
        std::snprintf(buf, sizeof buf, "%d %.17g %.17g %.17g\n", t.iteration, t.power_w, t.v,
                      t.worst_case_margin);
        os << buf;
    }
    return os.str();
}

int cmd_design(const std::string &scenario_path, const std::string &profile,
               std::optional<std::uint64_t> seed, const std::string &out_path,
               const std::string &scheme, double power_budget)
{
    Scenario scen;
    DesignContext ctx;
    try
    {
        scen = load_scenario(scenario_path, profile, seed);
        ctx = make_context(scen);
        if (scheme == "nonrobust" && !(power_budget > 0.0))
            throw std::runtime_error("nonrobust design needs --power-budget > 0");
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return k_exit_config;
    }

    StoredDesign stored;
    try
    {
        if (scheme == "robust")
            stored = store_design(alternate(ctx, optimizer_config_for(scen)));
        else
            stored = store_design(nonrobust_design(ctx, power_budget));
    }
    catch (const OptimizerError &e)
    {
        const std::string trace_path = out_path + ".trace.txt";
        write_file(trace_path, std::string("failed: ") + e.what() + "\n" + trace_text(e.trace));
        std::cerr << "error: optimizer failed: " << e.what() << "\n"
                  << "trace: " << trace_path << "\n";
        return k_exit_optimizer;
    }
    catch (const std::exception &e)
    {
        const std::string trace_path = out_path + ".trace.txt";
        write_file(trace_path, std::string("failed: ") + e.what() + "\n");
        std::cerr << "error: optimizer failed: " << e.what() << "\n"
                  << "trace: " << trace_path << "\n";
        return k_exit_optimizer;
    }

    write_file(out_path, design_to_text(stored));
    std::cout << "scheme " << stored.scheme << "\n"
              << "power_w " << stored.power_w << "\n"
              << "iterations " << stored.iterations << "\n";
    return k_exit_ok;
}

int cmd_evaluate(const std::string &scenario_path, const std::string &profile,
                 std::optional<std::uint64_t> seed, const std::string &design_path, int trials,
                 const std::string &mode_name, const std::string &out_path,
                 const std::string &summary_path, const std::string &cdf_path)
{
    Scenario scen;
    StoredDesign design;
    EvalMode mode{};
    try
    {
        scen = load_scenario(scenario_path, profile, seed);
        mode = eval_mode_from(mode_name);
        std::ifstream in(design_path);
        if (!in)
            throw std::runtime_error(design_path + ": cannot open design file");
        design = parse_design(in, design_path);
        if (design.w.size() != scen.bs_geom.size() || design.xi.size() != scen.irs_geom.size())
            throw std::runtime_error(design_path + ": design does not match the scenario sizes");
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return k_exit_config;
    }

    try
    {
        const EvalReport rep =
            evaluate_fixed(design.w, PhaseShifts(design.xi), design.scheme, scen, trials, mode);
        write_file(out_path, eval_report_csv(rep));
        if (!cdf_path.empty())
            write_file(cdf_path, eval_cdf_csv(rep));
        const std::string summary = eval_report_summary(rep);
        if (!summary_path.empty())
            write_file(summary_path, summary);
        std::cout << summary;
        return k_exit_ok;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return k_exit_optimizer;
    }
}

int cmd_sweep(const std::string &scenario_path, const std::string &profile,
              std::optional<std::uint64_t> seed, const std::vector<double> &rates,
              const std::vector<double> &upsilons, const std::vector<int> &m_values,
              const std::string &out_path)
{
    Scenario scen;
    try
    {
        scen = load_scenario(scenario_path, profile, seed);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return k_exit_config;
    }

    try
    {
        const std::vector<SweepRow> rows = sweep_power_vs_rate(scen, rates, upsilons, m_values);
        write_file(out_path, sweep_csv(rows));
        int failures = 0;
        for (const SweepRow &r : rows)
            if (!r.ok)
                ++failures;
        std::cout << "points " << rows.size() << "\n"
                  << "failures " << failures << "\n";
        return k_exit_ok;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return k_exit_optimizer;
    }
}

bool selftest_check(const char *name, bool ok, std::ostream &os)
{
    os << (ok ? "pass" : "FAIL") << " " << name << "\n";
    return ok;
}

/// Quick invariant suite over every layer; meant as a deployment smoke test,
/// not a replacement for the unit suites.
int cmd_selftest()
{
    bool all = true;
    std::ostream &os = std::cout;

    {
        const UraGeometry g(3, 4);
        const Eigen::VectorXcd a = steering_vector(g, {0.31, -0.44});
        bool unit = true;
        for (Eigen::Index i = 0; i < a.size(); ++i)
            unit = unit && std::abs(std::abs(a(i)) - 1.0) < 1e-12;
        all &= selftest_check("steering entries unit modulus", unit, os);
    }
    {
        Rng a(42);
        Rng b(42);
        bool same = true;
        for (int i = 0; i < 64; ++i)
            same = same && a.raw() == b.raw();
        all &= selftest_check("random stream reproducible", same, os);
    }
    {
        // ball oracle beats dense sampling on a random indefinite quadratic
        Rng rng(7);
        bool ok = true;
        for (int inst = 0; inst < 5; ++inst)
        {
            Eigen::Vector3d g;
            Eigen::Matrix3d h;
            for (int i = 0; i < 3; ++i)
            {
                g(i) = rng.normal();
                for (int j = 0; j < 3; ++j)
                    h(i, j) = rng.normal();
            }
            h = 0.5 * (h + h.transpose()).eval();
            const double rho = 0.8;
            const BallMin bm = min_quadratic_over_ball(1.0, g, h, rho);
            for (int s = 0; s < 2000; ++s)
            {
                const Eigen::Vector3d x = rng.uniform_in_ball(rho);
                const double q = 1.0 + g.dot(x) + 0.5 * x.dot(h * x);
                ok = ok && q >= bm.value - 1e-9;
            }
            ok = ok && bm.argmin.norm() <= rho * (1.0 + 1e-9);
        }
        all &= selftest_check("ball minimum below dense sampling", ok, os);
    }
    {
        sdp::SdpProblem p;
        p.matrix_var_dim = 2;
        p.var_is_hermitian = true;
        p.sense = sdp::Sense::minimize;
        p.objective_var_coeff = Eigen::MatrixXcd::Identity(2, 2);
        sdp::LinearConstraint c;
        c.var_coeff = Eigen::MatrixXcd::Zero(2, 2);
        c.var_coeff(0, 0) = 1.0;
        c.rhs = 1.0;
        c.rel = sdp::Relation::ge;
        p.linear_constraints.push_back(c);
        const sdp::SdpSolution sol = sdp::solve(p, 1e-9);
        const bool ok = sol.status == sdp::SolveStatus::optimal &&
                        std::abs(sol.objective_value - 1.0) < 1e-6 &&
                        sdp::verify(p, sol, 1e-6).clean(1e-6);
        all &= selftest_check("sdp backend solves the trace floor", ok, os);
    }
    {
        Scenario scen = desk_scenario();
        scen.seed = 5;
        const DesignContext ctx = make_context(scen);
        OptimizerConfig cfg = optimizer_config_for(scen);
        cfg.max_outer_iters = 3;
        bool ok = true;
        try
        {
            const DesignSolution sol = alternate(ctx, cfg);
            const double gamma = qos_gamma(scen.target_rate, ctx.noise_power_w);
            const CompositeVector d = composite_vector(ctx.g_hat, sol.xi, ctx.big_g, sol.w);
            const double worst =
                min_quadratic_over_ball(taylor_quadratic(d, ctx.sens, ctx.ball)).value;
            ok = worst >= gamma * (1.0 - 1e-9);
        }
        catch (const std::exception &)
        {
            ok = false;
        }
        all &= selftest_check("desk design certifies its floor", ok, os);
    }

    os << (all ? "selftest ok" : "selftest FAILED") << "\n";
    return all ? k_exit_ok : 1;
}

} // namespace

int run_cli(int argc, char **argv)
{
    CLI::App app{"robust transmit beamforming with reconfigurable surfaces"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string profile = "desk";
    std::optional<std::uint64_t> seed;

    const auto add_common = [&](CLI::App *cmd) {
        cmd->add_option("--scenario", scenario_path, "scenario key-value file");
        cmd->add_option("--profile", profile, "base profile: desk or paper")
            ->check(CLI::IsMember({"desk", "paper"}));
        cmd->add_option("--seed", seed, "override the scenario seed");
    };

    auto *design = app.add_subcommand("design", "solve one scenario and store the design");
    std::string out_path = "design.out";
    std::string scheme = "robust";
    double power_budget = 0.0;
    add_common(design);
    design->add_option("--out", out_path, "design output path");
    design->add_option("--scheme", scheme, "robust or nonrobust")
        ->check(CLI::IsMember({"robust", "nonrobust"}));
    design->add_option("--power-budget", power_budget,
                       "transmit power in watts (nonrobust scheme only)");

    auto *evaluate = app.add_subcommand("evaluate", "Monte Carlo rate evaluation of a design");
    std::string design_path = "design.out";
    int trials = 2000;
    std::string mode_name = "exact";
    std::string report_path = "report.csv";
    std::string summary_path;
    std::string cdf_path;
    add_common(evaluate);
    evaluate->add_option("--design", design_path, "design file from the design subcommand");
    evaluate->add_option("--trials", trials, "number of Monte Carlo trials")
        ->check(CLI::PositiveNumber);
    evaluate->add_option("--mode", mode_name, "exact or model channel rebuild")
        ->check(CLI::IsMember({"exact", "model"}));
    evaluate->add_option("--out", report_path, "per-trial CSV output path");
    evaluate->add_option("--summary", summary_path, "summary text output path");
    evaluate->add_option("--cdf", cdf_path, "rate CDF CSV output path");

    auto *sweep = app.add_subcommand("sweep", "power versus rate/uncertainty/element grid");
    std::vector<double> rates{2.0, 4.0, 6.0};
    std::vector<double> upsilons{1.0, 2.0};
    std::vector<int> m_values{16, 36};
    std::string sweep_path = "sweep.csv";
    add_common(sweep);
    sweep->add_option("--rates", rates, "target rates, bits/s/Hz")->delimiter(',');
    sweep->add_option("--upsilons", upsilons, "uncertainty radii, meters")->delimiter(',');
    sweep->add_option("--m-values", m_values, "surface element counts")->delimiter(',');
    sweep->add_option("--out", sweep_path, "sweep CSV output path");

    auto *selftest = app.add_subcommand("selftest", "run the built-in invariant suite");
    (void)selftest;

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        app.exit(e);
        return k_exit_config;
    }

    if (design->parsed())
        return cmd_design(scenario_path, profile, seed, out_path, scheme, power_budget);
    if (evaluate->parsed())
        return cmd_evaluate(scenario_path, profile, seed, design_path, trials, mode_name,
                            report_path, summary_path, cdf_path);
    if (sweep->parsed())
        return cmd_sweep(scenario_path, profile, seed, rates, upsilons, m_values, sweep_path);
    return cmd_selftest();
}

int main(int argc, char **argv)
{
    return run_cli(argc, argv);
}

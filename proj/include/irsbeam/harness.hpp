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

#ifndef IRSBEAM_HARNESS_HPP
#define IRSBEAM_HARNESS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "irsbeam/baseline.hpp"
#include "irsbeam/channel_model.hpp"
#include "irsbeam/location_model.hpp"
#include "irsbeam/rng.hpp"
#include "irsbeam/robust_optimizer.hpp"

namespace irsbeam
{

inline constexpr double k_speed_of_light = 2.99792458e8;

/// Deployment and evaluation configuration. Defaults are the full-scale
/// reference setup (16 transmit antennas, 100 surface elements); see
/// desk_scenario() for the light profile used in routine testing.
struct Scenario
{
    double carrier_ghz = 28.0;
    double bandwidth_hz = 1e8;
    double noise_density_dbm_hz = -169.0;
    Position3D irs_pos{0.0, 0.0, 0.0};
    Position3D bs_pos{100.0, -100.0, 0.0};
    Position3D user_true_pos{20.0, 20.0, -20.0};
    Position3D user_est_pos{20.0, 20.0, -20.0};
    UraGeometry bs_geom = UraGeometry(4, 4);
    UraGeometry irs_geom = UraGeometry(10, 10);
    double upsilon_m = 4.0;
    double target_rate = 4.0;
    int path_count = 3;
    std::uint64_t seed = 1;

    double wavelength_m() const { return k_speed_of_light / (carrier_ghz * 1e9); }
    double noise_power_w() const
    {
        return noise_power_from_scenario(noise_density_dbm_hz, bandwidth_hz);
    }
};

/// Light profile: 4 antennas, 16 elements, tighter uncertainty. Small enough
/// for interactive runs and the default for the command-line driver.
inline Scenario desk_scenario()
{
    Scenario s;
    s.bs_geom = UraGeometry(1, 4);
    s.irs_geom = UraGeometry(4, 4);
    s.upsilon_m = 2.0;
    return s;
}

namespace detail
{

inline constexpr std::uint64_t k_tag_channel = 0x11;
inline constexpr std::uint64_t k_tag_trials = 0x22;
inline constexpr std::uint64_t k_tag_design = 0x33;

inline std::string g17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace detail

// ---------------------------------------------------------------- scenario io

/// Flat key-value text, one `key value...` entry per line, `#` comments.
/// Unit-bearing quantities carry the unit in the key name. Unknown keys,
/// arity mismatches and unparsable numbers raise errors naming the line.
/// Entries override `base`, which defaults to the full-scale profile.
inline Scenario parse_scenario(std::istream &in, const std::string &name = "scenario",
                               const Scenario &base = Scenario{})
{
    Scenario s = base;
    bool est_seen = false;
    std::string line;
    int lineno = 0;

    const auto fail = [&](const std::string &what) {
        throw std::runtime_error(name + ":" + std::to_string(lineno) + ": " + what);
    };
    const auto want = [&](std::istringstream &ls, double &out, const char *field) {
        if (!(ls >> out))
            fail(std::string("expected a number for '") + field + "'");
    };

    while (std::getline(in, line))
    {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key))
            continue;

        const auto read_pos = [&](Position3D &p) {
            want(ls, p.x, key.c_str());
            want(ls, p.y, key.c_str());
            want(ls, p.z, key.c_str());
        };
        const auto read_geom = [&](UraGeometry &g) {
            int nz = 0;
            int ny = 0;
            if (!(ls >> nz >> ny))
                fail("expected two element counts for '" + key + "'");
            try
            {
                g = UraGeometry(nz, ny);
            }
            catch (const std::exception &e)
            {
                fail(e.what());
            }
        };

        if (key == "carrier_ghz")
            want(ls, s.carrier_ghz, "carrier_ghz");
        else if (key == "bandwidth_hz")
            want(ls, s.bandwidth_hz, "bandwidth_hz");
        else if (key == "noise_density_dbm_hz")
            want(ls, s.noise_density_dbm_hz, "noise_density_dbm_hz");
        else if (key == "irs_pos_m")
            read_pos(s.irs_pos);
        else if (key == "bs_pos_m")
            read_pos(s.bs_pos);
        else if (key == "user_true_pos_m")
            read_pos(s.user_true_pos);
        else if (key == "user_est_pos_m")
        {
            read_pos(s.user_est_pos);
            est_seen = true;
        }
        else if (key == "bs_geom")
            read_geom(s.bs_geom);
        else if (key == "irs_geom")
            read_geom(s.irs_geom);
        else if (key == "upsilon_m")
            want(ls, s.upsilon_m, "upsilon_m");
        else if (key == "target_rate")
            want(ls, s.target_rate, "target_rate");
        else if (key == "path_count")
        {
            if (!(ls >> s.path_count) || s.path_count < 1)
                fail("expected a positive integer for 'path_count'");
        }
        else if (key == "seed")
        {
            if (!(ls >> s.seed))
                fail("expected an unsigned integer for 'seed'");
        }
        else
            fail("unknown key '" + key + "'");

        std::string extra;
        if (ls >> extra)
            fail("trailing token '" + extra + "' after '" + key + "'");
    }

    if (!est_seen)
        s.user_est_pos = s.user_true_pos; // estimate defaults to the truth
    if (!(s.upsilon_m >= 0.0))
    {
        lineno = 0;
        fail("upsilon_m must be nonnegative");
    }
    return s;
}

inline std::string scenario_to_text(const Scenario &s)
{
    using detail::g17;
    std::ostringstream os;
    os << "carrier_ghz " << g17(s.carrier_ghz) << "\n";
    os << "bandwidth_hz " << g17(s.bandwidth_hz) << "\n";
    os << "noise_density_dbm_hz " << g17(s.noise_density_dbm_hz) << "\n";
    os << "irs_pos_m " << g17(s.irs_pos.x) << " " << g17(s.irs_pos.y) << " " << g17(s.irs_pos.z)
       << "\n";
    os << "bs_pos_m " << g17(s.bs_pos.x) << " " << g17(s.bs_pos.y) << " " << g17(s.bs_pos.z)
       << "\n";
    os << "user_true_pos_m " << g17(s.user_true_pos.x) << " " << g17(s.user_true_pos.y) << " "
       << g17(s.user_true_pos.z) << "\n";
    os << "user_est_pos_m " << g17(s.user_est_pos.x) << " " << g17(s.user_est_pos.y) << " "
       << g17(s.user_est_pos.z) << "\n";
    os << "bs_geom " << s.bs_geom.n_z << " " << s.bs_geom.n_y << "\n";
    os << "irs_geom " << s.irs_geom.n_z << " " << s.irs_geom.n_y << "\n";
    os << "upsilon_m " << g17(s.upsilon_m) << "\n";
    os << "target_rate " << g17(s.target_rate) << "\n";
    os << "path_count " << s.path_count << "\n";
    os << "seed " << s.seed << "\n";
    return os.str();
}

// --------------------------------------------------------- channel synthesis

/// Everything evaluate() needs beyond the design itself: the deterministic
/// channel realization plus the pieces to rebuild the channel at a perturbed
/// user position.
struct SceneModel
{
    DesignContext ctx;
    UraGeometry irs_geom;
    std::complex<double> alpha_hat{0.0, 0.0};
};

/// Deterministic channel realization: one geometric dominant path at
/// free-space magnitude with a random phase, the remaining paths 10 dB
/// weaker with uniformly random effective angles. All draws come from a
/// stream derived from the scenario seed, in a fixed order independent of
/// the array sizes, so realizations stay comparable across element counts.
inline SceneModel synthesize_scene(const Scenario &scen)
{
    Rng rng(derive_seed(scen.seed, detail::k_tag_channel));
    const double lambda = scen.wavelength_m();

    const double bs_irs_dist = (scen.bs_pos.vec() - scen.irs_pos.vec()).norm();
    if (!(bs_irs_dist > 0.0))
        throw std::invalid_argument("synthesize_scene: coincident base station and surface");

    std::vector<PathSpec> paths;
    PathSpec los;
    los.gain = lambda / (4.0 * std::numbers::pi * bs_irs_dist) * rng.unit_phase();
    los.aod = effective_aods_from_positions(scen.bs_pos, scen.irs_pos).first;
    los.aoa = effective_aods_from_positions(scen.irs_pos, scen.bs_pos).first;
    paths.push_back(los);
    for (int p = 1; p < scen.path_count; ++p)
    {
        PathSpec sp;
        sp.gain = std::abs(los.gain) * std::pow(10.0, -0.5) * rng.unit_phase();
        sp.aod = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        sp.aoa = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        paths.push_back(sp);
    }

    SceneModel sm;
    sm.irs_geom = scen.irs_geom;
    sm.ctx.big_g = synthesize_b2i(paths, scen.bs_geom, scen.irs_geom);

    const double user_dist = (scen.irs_pos.vec() - scen.user_est_pos.vec()).norm();
    if (!(user_dist > 0.0))
        throw std::invalid_argument("synthesize_scene: coincident surface and user");
    sm.alpha_hat = lambda / (4.0 * std::numbers::pi * user_dist) * rng.unit_phase();
    sm.ctx.g_hat =
        estimated_reflect_channel(scen.irs_pos, scen.user_est_pos, sm.alpha_hat, scen.irs_geom);
    sm.ctx.sens = error_sensitivity(scen.irs_pos, scen.user_est_pos, scen.irs_geom);
    sm.ctx.ball = UncertaintyBall(scen.upsilon_m);
    sm.ctx.noise_power_w = scen.noise_power_w();
    return sm;
}

inline DesignContext make_context(const Scenario &scen)
{
    return synthesize_scene(scen).ctx;
}

inline OptimizerConfig optimizer_config_for(const Scenario &scen)
{
    OptimizerConfig cfg;
    cfg.target_rate_r = scen.target_rate;
    cfg.rng_seed = derive_seed(scen.seed, detail::k_tag_design);
    return cfg;
}

// -------------------------------------------------------------- monte carlo

enum class EvalMode
{
    exact, // rebuild the reflection channel at the perturbed position
    model  // apply the multiplicative first-order error to the estimate
};

inline const char *to_string(EvalMode m)
{
    return m == EvalMode::exact ? "exact" : "model";
}

inline EvalMode eval_mode_from(const std::string &s)
{
    if (s == "exact")
        return EvalMode::exact;
    if (s == "model")
        return EvalMode::model;
    throw std::invalid_argument("eval mode must be 'exact' or 'model', got '" + s + "'");
}

struct TrialRecord
{
    Eigen::Vector3d delta = Eigen::Vector3d::Zero(); // sampled location error, meters
    double exact_rate = 0.0;
    double model_rate = 0.0;
};

struct EvalReport
{
    std::vector<TrialRecord> trials;
    double power_w = 0.0;
    std::string scheme;
    EvalMode mode = EvalMode::exact;
    double target_rate = 0.0;
    double min_rate = 0.0;
    double outage = 0.0;            // fraction of trials below the target
    std::vector<double> cdf_rate;   // rate axis, nondecreasing
    std::vector<double> cdf_value;  // empirical distribution, ends at 1

    double rate_of(const TrialRecord &t) const
    {
        return mode == EvalMode::exact ? t.exact_rate : t.model_rate;
    }
};

namespace detail
{

inline constexpr int k_trial_partition = 256;

/// One partition of trials with its own derived stream; partition layout is
/// independent of how many workers execute them.
inline std::vector<TrialRecord> run_trial_partition(const Scenario &scen, const SceneModel &sm,
                                                    const Eigen::VectorXcd &w,
                                                    const PhaseShifts &xi, int first, int count)
{
    Rng rng(derive_seed(scen.seed, k_tag_trials,
                        static_cast<std::uint64_t>(first / k_trial_partition)));
    std::vector<TrialRecord> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t)
    {
        TrialRecord rec;
        const LocationError err = sample_error(sm.ctx.ball, rng);
        rec.delta = err.delta;

        Position3D true_pos = scen.user_est_pos;
        true_pos.x += err.delta.x();
        true_pos.y += err.delta.y();
        true_pos.z += err.delta.z();
        const ReflectChannel g_true = exact_reflect_channel(
            scen.irs_pos, true_pos, sm.alpha_hat, sm.ctx.sens.d_hat, sm.irs_geom);
        rec.exact_rate = achievable_rate(effective_channel(g_true, xi, sm.ctx.big_g), w,
                                         sm.ctx.noise_power_w);

        ReflectChannel g_model = sm.ctx.g_hat;
        g_model.vector = sm.ctx.g_hat.vector.cwiseProduct(error_vector(sm.ctx.sens, err));
        rec.model_rate = achievable_rate(effective_channel(g_model, xi, sm.ctx.big_g), w,
                                         sm.ctx.noise_power_w);
        out.push_back(rec);
    }
    return out;
}

} // namespace detail

/// Monte Carlo rate evaluation of a fixed design under location uncertainty.
/// Trials are partitioned with per-partition seed streams and merged in
/// partition order, so the report does not depend on worker scheduling.
inline EvalReport evaluate_fixed(const Eigen::VectorXcd &w, const PhaseShifts &xi,
                                 const std::string &scheme, const Scenario &scen, int trials,
                                 EvalMode mode)
{
    if (trials < 1)
        throw std::invalid_argument("evaluate: need at least one trial");
    const SceneModel sm = synthesize_scene(scen);
    if (w.size() != sm.ctx.n() || xi.xi.size() != sm.ctx.m())
        throw std::invalid_argument("evaluate: design does not match the scenario dimensions");

    EvalReport rep;
    rep.power_w = w.squaredNorm();
    rep.scheme = scheme;
    rep.mode = mode;
    rep.target_rate = scen.target_rate;

    std::vector<std::future<std::vector<TrialRecord>>> parts;
    for (int first = 0; first < trials; first += detail::k_trial_partition)
    {
        const int count = std::min(detail::k_trial_partition, trials - first);
        parts.push_back(std::async(std::launch::async | std::launch::deferred,
                                   detail::run_trial_partition, std::cref(scen), std::cref(sm),
                                   std::cref(w), std::cref(xi), first, count));
    }
    rep.trials.reserve(static_cast<std::size_t>(trials));
    for (auto &f : parts)
    {
        std::vector<TrialRecord> part = f.get();
        rep.trials.insert(rep.trials.end(), part.begin(), part.end());
    }

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    int below = 0;
    for (const TrialRecord &t : rep.trials)
    {
        const double r = rep.rate_of(t);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        if (r < scen.target_rate)
            ++below;
    }
    rep.min_rate = lo;
    rep.outage = static_cast<double>(below) / static_cast<double>(trials);

    constexpr int k_grid = 101;
    rep.cdf_rate.resize(k_grid);
    rep.cdf_value.resize(k_grid);
    for (int i = 0; i < k_grid; ++i)
        rep.cdf_rate[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / (k_grid - 1);
    std::vector<double> sorted;
    sorted.reserve(rep.trials.size());
    for (const TrialRecord &t : rep.trials)
        sorted.push_back(rep.rate_of(t));
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < k_grid; ++i)
    {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(),
                                         rep.cdf_rate[static_cast<std::size_t>(i)]);
        rep.cdf_value[static_cast<std::size_t>(i)] =
            static_cast<double>(it - sorted.begin()) / static_cast<double>(trials);
    }
    return rep;
}

inline EvalReport evaluate(const DesignSolution &design, const Scenario &scen, int trials,
                           EvalMode mode)
{
    return evaluate_fixed(design.w, design.xi, "robust", scen, trials, mode);
}

inline EvalReport evaluate(const BaselineSolution &design, const Scenario &scen, int trials,
                           EvalMode mode)
{
    return evaluate_fixed(design.w, design.xi, "nonrobust", scen, trials, mode);
}

// -------------------------------------------------------------------- sweeps

struct SweepRow
{
    double target_rate = 0.0;
    double upsilon_m = 0.0;
    int m_elements = 0;
    bool ok = false;
    double power_w = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    double certified_margin_w = std::numeric_limits<double>::quiet_NaN();
    std::string reason; // empty on success
};

namespace detail
{

/// Near-square factorization for a requested element count.
inline UraGeometry geometry_for_elements(int m)
{
    if (m < 1)
        throw std::invalid_argument("geometry_for_elements: need at least one element");
    for (int d = static_cast<int>(std::sqrt(static_cast<double>(m))); d >= 1; --d)
        if (m % d == 0)
            return UraGeometry(d, m / d);
    return UraGeometry(1, m);
}

} // namespace detail

/// Designs one configuration per grid point and tabulates the required
/// power. Per-point failures become rows with a reason instead of aborting
/// the rest of the grid.
inline std::vector<SweepRow> sweep_power_vs_rate(const Scenario &base,
                                                 const std::vector<double> &rates,
                                                 const std::vector<double> &upsilons,
                                                 const std::vector<int> &m_values)
{
    if (rates.empty() || upsilons.empty() || m_values.empty())
        throw std::invalid_argument("sweep_power_vs_rate: empty grid axis");

    std::vector<SweepRow> rows;
    for (const double r : rates)
        for (const double ups : upsilons)
            for (const int m : m_values)
            {
                SweepRow row;
                row.target_rate = r;
                row.upsilon_m = ups;
                row.m_elements = m;
                try
                {
                    Scenario scen = base;
                    scen.target_rate = r;
                    scen.upsilon_m = ups;
                    scen.irs_geom = detail::geometry_for_elements(m);
                    const DesignContext ctx = make_context(scen);
                    const OptimizerConfig cfg = optimizer_config_for(scen);
                    const DesignSolution sol = alternate(ctx, cfg);
                    row.ok = true;
                    row.power_w = sol.power;
                    row.iterations = sol.iterations;
                    row.certified_margin_w = sol.trace.empty()
                                                 ? std::numeric_limits<double>::quiet_NaN()
                                                 : sol.trace.back().worst_case_margin;
                }
                catch (const std::exception &e)
                {
                    row.reason = e.what();
                }
                rows.push_back(row);
            }
    return rows;
}

// ------------------------------------------------------------------- reports

inline std::string eval_report_csv(const EvalReport &rep)
{
    using detail::g17;
    std::ostringstream os;
    os << "trial,delta_x_m,delta_y_m,delta_z_m,exact_rate_bits_s_hz,model_rate_bits_s_hz\n";
    for (std::size_t i = 0; i < rep.trials.size(); ++i)
    {
        const TrialRecord &t = rep.trials[i];
        os << i << "," << g17(t.delta.x()) << "," << g17(t.delta.y()) << "," << g17(t.delta.z())
           << "," << g17(t.exact_rate) << "," << g17(t.model_rate) << "\n";
    }
    return os.str();
}

inline std::string eval_report_summary(const EvalReport &rep)
{
    using detail::g17;
    std::ostringstream os;
    os << "scheme " << rep.scheme << "\n";
    os << "mode " << to_string(rep.mode) << "\n";
    os << "trials " << rep.trials.size() << "\n";
    os << "power_w " << g17(rep.power_w) << "\n";
    os << "power_dbm " << g17(10.0 * std::log10(rep.power_w * 1e3)) << "\n";
    os << "target_rate_bits_s_hz " << g17(rep.target_rate) << "\n";
    os << "outage " << g17(rep.outage) << "\n";
    os << "min_rate_bits_s_hz " << g17(rep.min_rate) << "\n";
    return os.str();
}

inline std::string eval_cdf_csv(const EvalReport &rep)
{
    using detail::g17;
    std::ostringstream os;
    os << "rate_bits_s_hz,cdf\n";
    for (std::size_t i = 0; i < rep.cdf_rate.size(); ++i)
        os << g17(rep.cdf_rate[i]) << "," << g17(rep.cdf_value[i]) << "\n";
    return os.str();
}

inline std::string sweep_csv(const std::vector<SweepRow> &rows)
{
    using detail::g17;
    std::ostringstream os;
    os << "target_rate_bits_s_hz,upsilon_m,m_elements,status,power_w,iterations,"
          "certified_margin_w,reason\n";
    for (const SweepRow &row : rows)
    {
        std::string reason = row.reason;
        std::replace(reason.begin(), reason.end(), ',', ';');
        os << g17(row.target_rate) << "," << g17(row.upsilon_m) << "," << row.m_elements << ","
           << (row.ok ? "ok" : "failed") << "," << g17(row.power_w) << "," << row.iterations
           << "," << g17(row.certified_margin_w) << "," << reason << "\n";
    }
    return os.str();
}

// ----------------------------------------------------------- design storage

/// Scheme-tagged design snapshot as written by the `design` subcommand and
/// consumed by `evaluate`.
struct StoredDesign
{
    std::string scheme = "robust";
    Eigen::VectorXcd w;
    Eigen::VectorXcd xi;
    double power_w = 0.0;
    double mu = 0.0;
    double worst_case_rate = 0.0;
    double exact_rate_at_worst = 0.0;
    int iterations = 0;
    std::vector<TraceRecord> trace;
};

inline StoredDesign store_design(const DesignSolution &sol)
{
    StoredDesign d;
    d.scheme = "robust";
    d.w = sol.w;
    d.xi = sol.xi.xi;
    d.power_w = sol.power;
    d.mu = sol.mu;
    d.worst_case_rate = sol.worst_case_rate;
    d.exact_rate_at_worst = sol.exact_rate_at_worst;
    d.iterations = sol.iterations;
    d.trace = sol.trace;
    return d;
}

inline StoredDesign store_design(const BaselineSolution &sol)
{
    StoredDesign d;
    d.scheme = "nonrobust";
    d.w = sol.w;
    d.xi = sol.xi.xi;
    d.power_w = sol.power;
    d.worst_case_rate = sol.nominal_rate;
    d.exact_rate_at_worst = sol.nominal_rate;
    d.iterations = sol.iterations;
    return d;
}

inline std::string design_to_text(const StoredDesign &d)
{
    using detail::g17;
    std::ostringstream os;
    os << "design_version 1\n";
    os << "scheme " << d.scheme << "\n";
    os << "n " << d.w.size() << "\n";
    os << "m " << d.xi.size() << "\n";
    os << "power_w " << g17(d.power_w) << "\n";
    os << "mu " << g17(d.mu) << "\n";
    os << "worst_case_rate_bits_s_hz " << g17(d.worst_case_rate) << "\n";
    os << "exact_rate_at_worst_bits_s_hz " << g17(d.exact_rate_at_worst) << "\n";
    os << "iterations " << d.iterations << "\n";
    for (Eigen::Index i = 0; i < d.w.size(); ++i)
        os << "w " << g17(d.w(i).real()) << " " << g17(d.w(i).imag()) << "\n";
    for (Eigen::Index i = 0; i < d.xi.size(); ++i)
        os << "xi " << g17(d.xi(i).real()) << " " << g17(d.xi(i).imag()) << "\n";
    for (const TraceRecord &t : d.trace)
        os << "trace " << t.iteration << " " << g17(t.power_w) << " " << g17(t.v) << " "
           << g17(t.worst_case_margin) << "\n";
    return os.str();
}

inline StoredDesign parse_design(std::istream &in, const std::string &name = "design")
{
    StoredDesign d;
    std::string line;
    int lineno = 0;
    Eigen::Index n = -1;
    Eigen::Index m = -1;
    std::vector<std::complex<double>> ws;
    std::vector<std::complex<double>> xis;
    bool version_seen = false;

    const auto fail = [&](const std::string &what) {
        throw std::runtime_error(name + ":" + std::to_string(lineno) + ": " + what);
    };

    while (std::getline(in, line))
    {
        ++lineno;
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key))
            continue;
        // strtod-based so that inf markers in trace records round-trip
        const auto num = [&](const char *field) {
            std::string tok;
            if (!(ls >> tok))
                fail(std::string("expected a number for '") + field + "'");
            char *end = nullptr;
            const double x = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0')
                fail("bad number '" + tok + "' for '" + field + "'");
            return x;
        };
        if (key == "design_version")
        {
            if (static_cast<int>(num("design_version")) != 1)
                fail("unsupported design_version");
            version_seen = true;
        }
        else if (key == "scheme")
        {
            if (!(ls >> d.scheme) || (d.scheme != "robust" && d.scheme != "nonrobust"))
                fail("scheme must be 'robust' or 'nonrobust'");
        }
        else if (key == "n")
            n = static_cast<Eigen::Index>(num("n"));
        else if (key == "m")
            m = static_cast<Eigen::Index>(num("m"));
        else if (key == "power_w")
            d.power_w = num("power_w");
        else if (key == "mu")
            d.mu = num("mu");
        else if (key == "worst_case_rate_bits_s_hz")
            d.worst_case_rate = num("worst_case_rate_bits_s_hz");
        else if (key == "exact_rate_at_worst_bits_s_hz")
            d.exact_rate_at_worst = num("exact_rate_at_worst_bits_s_hz");
        else if (key == "iterations")
            d.iterations = static_cast<int>(num("iterations"));
        else if (key == "w")
        {
            const double re = num("w");
            const double im = num("w");
            ws.emplace_back(re, im);
        }
        else if (key == "xi")
        {
            const double re = num("xi");
            const double im = num("xi");
            xis.emplace_back(re, im);
        }
        else if (key == "trace")
        {
            TraceRecord t;
            t.iteration = static_cast<int>(num("trace"));
            t.power_w = num("trace");
            t.v = num("trace");
            t.worst_case_margin = num("trace");
            d.trace.push_back(t);
        }
        else
            fail("unknown key '" + key + "'");

        std::string extra;
        if (ls >> extra)
            fail("trailing token '" + extra + "' after '" + key + "'");
    }

    lineno = 0;
    if (!version_seen)
        fail("missing design_version");
    if (n < 0 || m < 0)
        fail("missing n or m");
    if (static_cast<Eigen::Index>(ws.size()) != n)
        fail("beamformer entry count does not match n");
    if (static_cast<Eigen::Index>(xis.size()) != m)
        fail("phase entry count does not match m");
    d.w = Eigen::Map<const Eigen::VectorXcd>(ws.data(), n);
    d.xi = Eigen::Map<const Eigen::VectorXcd>(xis.data(), m);
    return d;
}

} // namespace irsbeam

#endif

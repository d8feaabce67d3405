#pragma once

// End-to-end runs of the bundled reference scenarios, including the numeric
// cross-checks. Produces an in-memory file bundle so callers can write it to
// disk or compare runs byte for byte.

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "criteria.hpp"
#include "presets.hpp"
#include "report.hpp"

namespace fdelab {

struct ReportBundle {
    std::vector<std::pair<std::string, std::string>> files;  // name -> content
    OscillationVerdict headline;
    bool crosscheck_ok = true;   // numeric cross-checks (when the scenario has them)
    bool exhibit_ok = true;      // auxiliary exhibits (zero-free trajectory etc.)

    const std::string* find(const std::string& name) const {
        for (const auto& [n, c] : files)
            if (n == name) return &c;
        return nullptr;
    }
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

inline ordered_json resolved_preset_config(const std::string& id, uint64_t seed) {
    ordered_json doc;
    doc["seed"] = seed;
    doc["equation"] = ordered_json::object({{"preset", id}});
    return load_config(doc).resolved;
}

}  // namespace detail

// Scenario "3.1": certify non-oscillation by comparison with the constant
// witness, then exhibit a numerically zero-free solution of the forced
// equation out to the horizon.
inline ReportBundle reproduce_31(uint64_t seed) {
    ReportBundle out;
    auto s = presets::scenario_31();

    NonoscillationInput in;
    in.eq = s.eq;
    in.r1 = s.r1;
    in.window_lo = s.window_lo;
    in.window_hi = s.window_hi;
    in.witness = s.witness;
    CriterionReport rep = check_nonoscillation_thm31(in);
    out.headline = rep.verdict;

    Trajectory traj = solve_cauchy(s.eq, s.history, s.horizon);
    out.exhibit_ok = traj.reached_horizon() && traj.zeros().empty() && traj.near_zeros().empty();

    const ordered_json resolved = detail::resolved_preset_config("3.1", seed);
    ordered_json jrep = to_json(rep);
    jrep["resolved_config"] = resolved;
    ordered_json exhibit;
    exhibit["history_theta"] = print(s.history.theta);
    exhibit["history_zeta"] = s.history.zeta;
    exhibit["horizon"] = s.horizon;
    exhibit["zero_free"] = out.exhibit_ok;
    exhibit["phi_at_horizon"] = traj.phi(s.horizon);
    jrep["zero_free_exhibit"] = exhibit;

    ordered_json jz = zeros_json(traj);
    jz["resolved_config"] = resolved;

    out.files.emplace_back("report.json", dump_json(jrep));
    out.files.emplace_back("trajectory.csv", trajectory_csv(traj));
    out.files.emplace_back("zeros.json", dump_json(jz));
    return out;
}

struct ZeroCountTable {
    bool all_hit = true;
    ordered_json rows = ordered_json::array();
};

// Integrate `count` random-history trajectories of the scenario-"3.2"
// equation over [0, 3*pi*periods] and count detected zeros per period
// interval [3*pi*l, 3*pi*(l+1)).
inline ZeroCountTable zero_count_crosscheck(const EquationSpec& eq, uint64_t seed, int count,
                                            int periods) {
    ZeroCountTable table;
    std::mt19937_64 rng(seed);
    const double horizon = 3 * M_PI * periods;
    for (int trial = 0; trial < count; ++trial) {
        const double mag = 0.5 + 1.5 * detail::uniform01(rng);
        const double sign = detail::uniform01(rng) < 0.5 ? -1.0 : 1.0;
        const double A = sign * mag;
        const double B = 2 * detail::uniform01(rng) - 1;
        const double C = 2 * detail::uniform01(rng) - 1;
        HistorySpec hist{0.0, PiecewiseFn(add(constant(A), mul(constant(B), time_var()))), C};
        Trajectory traj = solve_cauchy(eq, hist, horizon);

        std::vector<int> counts(periods, 0);
        for (const auto& z : traj.zeros()) {
            const int l = int(z.t / (3 * M_PI));
            if (l >= 0 && l < periods) ++counts[l];
        }
        bool hit = true;
        for (int c : counts) hit &= c >= 1;
        table.all_hit &= hit;

        ordered_json row;
        row["theta"] = print(hist.theta);
        row["zeta"] = C;
        row["zeros_per_interval"] = counts;
        row["every_interval_hit"] = hit;
        table.rows.push_back(row);
    }
    return table;
}

// Scenario "3.2": run the interval-oscillation checks for the first ten
// periods, the forced-equation criterion over the window, and the
// 20-trajectory zero-count cross-check.
inline ReportBundle reproduce_32(uint64_t seed, int trajectories = 20, int periods = 10) {
    ReportBundle out;
    auto s = presets::scenario_32();

    ordered_json interval_reports = ordered_json::array();
    for (int l = 0; l < periods; ++l) {
        auto inst = presets::interval_instance_32(l);
        CriterionReport rep = check_interval_osc_thm22(inst, default_epsilon_schedule());
        ordered_json o = to_json(rep);
        o["l"] = l;
        interval_reports.push_back(std::move(o));
    }

    OscillationInput in;
    in.eq = s.eq;
    in.r1 = s.r1;
    in.window_lo = s.window_lo;
    in.window_hi = s.window_hi;
    in.repetitions = 3;
    in.min_len = 2.0;
    in.partition = presets::partition_32;
    CriterionReport rep = check_oscillation_thm32(in);
    out.headline = rep.verdict;

    ZeroCountTable table = zero_count_crosscheck(s.eq, seed, trajectories, periods);
    out.crosscheck_ok = table.all_hit;

    const ordered_json resolved = detail::resolved_preset_config("3.2", seed);
    ordered_json jrep = to_json(rep);
    jrep["resolved_config"] = resolved;
    jrep["interval_checks"] = interval_reports;

    ordered_json jcross;
    jcross["seed"] = seed;
    jcross["trajectories"] = trajectories;
    jcross["periods"] = periods;
    jcross["all_intervals_hit"] = table.all_hit;
    jcross["rows"] = table.rows;
    jcross["resolved_config"] = resolved;

    out.files.emplace_back("report.json", dump_json(jrep));
    out.files.emplace_back("crosscheck.json", dump_json(jcross));
    return out;
}

inline ReportBundle reproduce_scenario(const std::string& id, uint64_t seed) {
    if (id == "3.1") return reproduce_31(seed);
    if (id == "3.2") return reproduce_32(seed);
    throw ConfigError("unknown scenario id '" + id + "' (expected 3.1 or 3.2)");
}

}  // namespace fdelab

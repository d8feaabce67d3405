#pragma once

// JSON and CSV serialization of reports and trajectories. Field order is
// fixed (ordered_json) so that identical runs produce byte-identical files.

#include <fstream>
#include <string>

#include <json.hpp>

#include "comparison.hpp"
#include "criteria.hpp"
#include "trajectory.hpp"
#include "verdict.hpp"

namespace fdelab {

inline ordered_json to_json(const HypothesisCheck& h) {
    ordered_json o;
    o["id"] = h.id;
    o["status"] = to_string(h.status);
    o["worst_point"] = h.worst_point;
    o["margin"] = h.margin;
    if (!h.note.empty()) o["note"] = h.note;
    return o;
}

inline ordered_json to_json(const OscillationVerdict& v) {
    ordered_json o;
    o["tag"] = to_string(v.tag);
    if (v.horizon) o["horizon"] = *v.horizon;
    return o;
}

inline ordered_json to_json(const CriterionReport& rep) {
    ordered_json o;
    o["criterion"] = rep.criterion;
    ordered_json hyps = ordered_json::array();
    for (const auto& h : rep.hypotheses) hyps.push_back(to_json(h));
    o["hypotheses"] = hyps;
    o["verdict"] = to_json(rep.verdict);
    o["caveats"] = rep.caveats;
    o["witnesses"] = rep.witnesses;
    return o;
}

inline ordered_json to_json(const BlowUpRecord& b) {
    ordered_json o;
    o["t_escape"] = b.t_escape;
    o["direction"] = b.direction;
    return o;
}

inline ordered_json to_json(const ComparisonReport& rep) {
    ordered_json o;
    ordered_json conds = ordered_json::array();
    for (const auto& c : rep.conditions) conds.push_back(to_json(c));
    o["conditions"] = conds;
    o["margin"] = rep.margin;
    o["margin_at"] = rep.margin_at;
    o["conclusion"] = rep.conclusion;
    o["span_end"] = rep.span_end;
    if (rep.blowup_given) o["blowup_given"] = to_json(*rep.blowup_given);
    if (rep.blowup_concluded) o["blowup_concluded"] = to_json(*rep.blowup_concluded);
    return o;
}

inline ordered_json zeros_json(const Trajectory& traj) {
    ordered_json o;
    ordered_json zs = ordered_json::array();
    for (const auto& z : traj.zeros()) {
        ordered_json e;
        e["t"] = z.t;
        e["phi"] = z.phi;
        e["bracket"] = z.bracket;
        zs.push_back(e);
    }
    ordered_json ns = ordered_json::array();
    for (const auto& z : traj.near_zeros()) {
        ordered_json e;
        e["t"] = z.t;
        e["phi"] = z.phi;
        ns.push_back(e);
    }
    o["zeros"] = zs;
    o["near_zeros"] = ns;
    o["horizon"] = traj.horizon();
    return o;
}

// One row per accepted-step boundary: t, phi, psi.
inline std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,phi,psi\n";
    char buf[128];
    auto row = [&out, &buf](double t, double phi, double psi) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t, phi, psi);
        out += buf;
    };
    if (!traj.empty()) {
        for (const auto& s : traj.segments()) row(s.t_begin, s.phi(s.t_begin), s.psi(s.t_begin));
        const auto& last = traj.segments().back();
        row(last.t_end, last.phi(last.t_end), last.psi(last.t_end));
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
}

inline std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace fdelab

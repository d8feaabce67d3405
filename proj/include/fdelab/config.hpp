#pragma once

// Scenario configuration: one JSON document per scenario describing the
// equation (inline coefficient sources or a preset id), the Cauchy data, the
// requested analysis and the output paths. Every report embeds the fully
// resolved configuration.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "criteria.hpp"
#include "expr.hpp"
#include "integrator.hpp"
#include "presets.hpp"

namespace fdelab {

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error("config: " + msg) {}
};

struct ScenarioConfig {
    uint64_t seed = 1;

    EquationSpec eq;
    std::optional<HistorySpec> history;

    // analysis
    std::string criterion;  // thm31 | cor31 | thm32 | cor32 (for `check`)
    double window_lo = 0, window_hi = 100;
    double horizon = kNaN;  // defaults to window_hi
    double tol = 1e-9;
    double zero_tol = 0;
    std::vector<PiecewiseFn> comparison_r1;  // empty: equal to the equation's r_j
    std::optional<PiecewiseFn> witness;
    IntervalOscStrategy strategy = IntervalOscStrategy::Thm22;
    std::optional<std::string> partition_preset;        // "3.2"
    std::optional<std::array<double, 4>> partition;     // explicit t1..t4
    int repetitions = 3;
    double min_len = 2.0;
    double eps0 = 1.0;
    int eps_count = 9;
    double delta_cap = 0;

    // interval-osc subcommand instance
    std::optional<IntervalOscInstance> instance;

    // wong subcommand block
    std::optional<WongInstance> wong;
    double wong_min_len = 2.0;

    // output
    std::string out_dir = ".";
    std::string report_file = "report.json";
    std::string trajectory_file = "trajectory.csv";
    std::string zeros_file = "zeros.json";

    ordered_json resolved;  // fully expanded configuration, embedded in reports

    std::vector<double> eps_schedule() const {
        std::vector<double> eps;
        for (int i = 0; i < eps_count; ++i) eps.push_back(eps0 * std::ldexp(1.0, -i));
        return eps;
    }
};

namespace detail {

inline PiecewiseFn parse_field(const ordered_json& j, const std::string& what) {
    if (!j.is_string()) throw ConfigError(what + " must be an expression string");
    try {
        return parse(j.get<std::string>());
    } catch (const ParseError& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

inline double number_field(const ordered_json& j, const std::string& what) {
    if (!j.is_number()) throw ConfigError(what + " must be a number");
    return j.get<double>();
}

}  // namespace detail

inline ScenarioConfig load_config(const ordered_json& doc) {
    if (!doc.is_object()) throw ConfigError("document must be a JSON object");
    ScenarioConfig cfg;
    ordered_json resolved;

    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
            throw ConfigError("seed must be an integer");
        cfg.seed = doc["seed"].get<uint64_t>();
    }
    resolved["seed"] = cfg.seed;

    // ---- equation ----
    if (!doc.contains("equation")) throw ConfigError("missing equation block");
    const auto& jeq = doc["equation"];
    ordered_json req;
    if (jeq.contains("preset")) {
        const std::string id = jeq["preset"].get<std::string>();
        if (id == "3.1") {
            auto s = presets::scenario_31();
            cfg.eq = s.eq;
            cfg.comparison_r1 = s.r1;
            cfg.witness = s.witness;
            cfg.history = s.history;
            cfg.window_hi = s.window_hi;
            cfg.horizon = s.horizon;
        } else if (id == "3.2") {
            auto s = presets::scenario_32();
            cfg.eq = s.eq;
            cfg.comparison_r1 = s.r1;
            cfg.window_hi = s.window_hi;
            cfg.horizon = s.window_hi;
            cfg.partition_preset = "3.2";
            cfg.min_len = 2.0;
        } else {
            throw ConfigError("unknown equation preset '" + id + "'");
        }
        req["preset"] = id;
    } else {
        cfg.eq.p = detail::parse_field(jeq.value("p", ordered_json("1")), "equation.p");
        cfg.eq.q = detail::parse_field(jeq.value("q", ordered_json("0")), "equation.q");
        cfg.eq.f = detail::parse_field(jeq.value("f", ordered_json("0")), "equation.f");
        cfg.eq.t0 = jeq.contains("t0") ? detail::number_field(jeq["t0"], "equation.t0") : 0.0;
        if (jeq.contains("terms")) {
            if (!jeq["terms"].is_array()) throw ConfigError("equation.terms must be an array");
            for (const auto& jt : jeq["terms"]) {
                DelayTerm term;
                term.r = detail::parse_field(jt.at("r"), "term.r");
                term.alpha = jt.contains("alpha")
                                 ? detail::parse_field(jt["alpha"], "term.alpha")
                                 : PiecewiseFn(time_var());
                cfg.eq.terms.push_back(std::move(term));
            }
        }
    }
    req["p"] = print(cfg.eq.p);
    req["q"] = print(cfg.eq.q);
    req["f"] = print(cfg.eq.f);
    req["t0"] = cfg.eq.t0;
    ordered_json jterms = ordered_json::array();
    for (const auto& term : cfg.eq.terms) {
        ordered_json jt;
        jt["r"] = print(term.r);
        jt["alpha"] = print(term.alpha);
        jterms.push_back(jt);
    }
    req["terms"] = jterms;
    resolved["equation"] = req;

    // ---- history ----
    if (doc.contains("history")) {
        const auto& jh = doc["history"];
        HistorySpec h;
        h.t1 = jh.contains("t1") ? detail::number_field(jh["t1"], "history.t1") : cfg.eq.t0;
        h.theta = detail::parse_field(jh.value("theta", ordered_json("1")), "history.theta");
        h.zeta = jh.contains("zeta") ? detail::number_field(jh["zeta"], "history.zeta") : 0.0;
        cfg.history = h;
    }
    if (cfg.history) {
        ordered_json jh;
        jh["t1"] = cfg.history->t1;
        jh["theta"] = print(cfg.history->theta);
        jh["zeta"] = cfg.history->zeta;
        resolved["history"] = jh;
    }

    // ---- analysis ----
    ordered_json ja = doc.value("analysis", ordered_json::object());
    if (ja.contains("criterion")) cfg.criterion = ja["criterion"].get<std::string>();
    if (ja.contains("window")) {
        const auto& w = ja["window"];
        if (!w.is_array() || w.size() != 2) throw ConfigError("analysis.window must be [lo, hi]");
        cfg.window_lo = detail::number_field(w[0], "window[0]");
        cfg.window_hi = detail::number_field(w[1], "window[1]");
        if (!(cfg.window_lo < cfg.window_hi)) throw ConfigError("analysis.window must be ordered");
    }
    if (ja.contains("horizon")) cfg.horizon = detail::number_field(ja["horizon"], "horizon");
    if (std::isnan(cfg.horizon)) cfg.horizon = cfg.window_hi;
    if (ja.contains("tol")) cfg.tol = detail::number_field(ja["tol"], "tol");
    if (!(cfg.tol > 0)) throw ConfigError("tol must be positive");
    if (ja.contains("zero_tol")) cfg.zero_tol = detail::number_field(ja["zero_tol"], "zero_tol");
    if (cfg.zero_tol < 0) throw ConfigError("zero_tol must be nonnegative");
    if (ja.contains("comparison")) {
        cfg.comparison_r1.clear();
        for (const auto& jr : ja["comparison"])
            cfg.comparison_r1.push_back(detail::parse_field(jr, "analysis.comparison[]"));
    }
    if (ja.contains("witness"))
        cfg.witness = detail::parse_field(ja["witness"], "analysis.witness");
    if (ja.contains("strategy")) {
        const std::string s = ja["strategy"].get<std::string>();
        if (s == "thm22") cfg.strategy = IntervalOscStrategy::Thm22;
        else if (s == "conjugate-scan") cfg.strategy = IntervalOscStrategy::ConjugateScan;
        else if (s == "assume") cfg.strategy = IntervalOscStrategy::Assume;
        else throw ConfigError("unknown strategy '" + s + "'");
    }
    if (ja.contains("partition_preset"))
        cfg.partition_preset = ja["partition_preset"].get<std::string>();
    if (ja.contains("partition")) {
        const auto& p = ja["partition"];
        if (!p.is_array() || p.size() != 4)
            throw ConfigError("analysis.partition must be [t1,t2,t3,t4]");
        cfg.partition = {detail::number_field(p[0], "t1"), detail::number_field(p[1], "t2"),
                         detail::number_field(p[2], "t3"), detail::number_field(p[3], "t4")};
    }
    if (ja.contains("repetitions")) cfg.repetitions = ja["repetitions"].get<int>();
    if (ja.contains("min_len")) cfg.min_len = detail::number_field(ja["min_len"], "min_len");
    if (ja.contains("eps0")) cfg.eps0 = detail::number_field(ja["eps0"], "eps0");
    if (ja.contains("eps_count")) cfg.eps_count = ja["eps_count"].get<int>();
    if (!(cfg.eps0 > 0) || cfg.eps_count < 1) throw ConfigError("eps schedule must be positive");
    if (ja.contains("delta_cap")) cfg.delta_cap = detail::number_field(ja["delta_cap"], "delta_cap");

    if (ja.contains("instance")) {
        const auto& ji = ja["instance"];
        PiecewiseFn p = detail::parse_field(ji.value("p", ordered_json("1")), "instance.p");
        std::vector<BetaTerm> terms;
        for (const auto& jt : ji.at("terms")) {
            terms.push_back(BetaTerm{detail::parse_field(jt.at("r"), "instance.term.r"),
                                     detail::parse_field(jt.at("beta"), "instance.term.beta")});
        }
        const auto& jp = ji.at("partition");
        if (!jp.is_array() || jp.size() != 4)
            throw ConfigError("instance.partition must be [t1,t2,t3,t4]");
        cfg.instance = analyze_interval_instance(
            p, std::move(terms), detail::number_field(jp[0], "t1"),
            detail::number_field(jp[1], "t2"), detail::number_field(jp[2], "t3"),
            detail::number_field(jp[3], "t4"));
    }

    if (ja.contains("wong")) {
        const auto& jw = ja["wong"];
        WongInstance w;
        w.d = detail::parse_field(jw.value("d", ordered_json("1")), "wong.d");
        w.r = detail::parse_field(jw.value("r", ordered_json("0")), "wong.r");
        w.g = detail::parse_field(jw.value("g", ordered_json("0")), "wong.g");
        cfg.wong = w;
        if (jw.contains("min_len"))
            cfg.wong_min_len = detail::number_field(jw["min_len"], "wong.min_len");
    }

    ordered_json jana;
    if (!cfg.criterion.empty()) jana["criterion"] = cfg.criterion;
    jana["window"] = {cfg.window_lo, cfg.window_hi};
    jana["horizon"] = cfg.horizon;
    jana["tol"] = cfg.tol;
    jana["zero_tol"] = cfg.zero_tol;
    if (!cfg.comparison_r1.empty()) {
        ordered_json jr = ordered_json::array();
        for (const auto& r : cfg.comparison_r1) jr.push_back(print(r));
        jana["comparison"] = jr;
    }
    if (cfg.witness) jana["witness"] = print(*cfg.witness);
    jana["strategy"] = to_string(cfg.strategy);
    if (cfg.partition_preset) jana["partition_preset"] = *cfg.partition_preset;
    if (cfg.partition) jana["partition"] = *cfg.partition;
    jana["repetitions"] = cfg.repetitions;
    jana["min_len"] = cfg.min_len;
    jana["eps0"] = cfg.eps0;
    jana["eps_count"] = cfg.eps_count;
    jana["delta_cap"] = cfg.delta_cap;
    if (cfg.wong) {
        ordered_json jw;
        jw["d"] = print(cfg.wong->d);
        jw["r"] = print(cfg.wong->r);
        jw["g"] = print(cfg.wong->g);
        jw["min_len"] = cfg.wong_min_len;
        jana["wong"] = jw;
    }
    resolved["analysis"] = jana;

    // ---- output ----
    if (doc.contains("output")) {
        const auto& jo = doc["output"];
        if (jo.contains("dir")) cfg.out_dir = jo["dir"].get<std::string>();
        if (jo.contains("report")) cfg.report_file = jo["report"].get<std::string>();
        if (jo.contains("trajectory")) cfg.trajectory_file = jo["trajectory"].get<std::string>();
        if (jo.contains("zeros")) cfg.zeros_file = jo["zeros"].get<std::string>();
    }
    ordered_json jout;
    jout["dir"] = cfg.out_dir;
    jout["report"] = cfg.report_file;
    jout["trajectory"] = cfg.trajectory_file;
    jout["zeros"] = cfg.zeros_file;
    resolved["output"] = jout;

    cfg.resolved = std::move(resolved);
    return cfg;
}

inline ScenarioConfig load_config_text(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    return load_config(doc);
}

}  // namespace fdelab

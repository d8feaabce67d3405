// Command-line front end: configuration-driven integrations, criterion
// checks, interval-oscillation and variational tests, and the bundled
// reference scenarios.
//
// Exit codes: 0 success; 1 inconclusive verdict under --require-verdict;
// 2 configuration or expression error; 3 numeric failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <fdelab/config.hpp>
#include <fdelab/criteria.hpp>
#include <fdelab/expr.hpp>
#include <fdelab/integrator.hpp>
#include <fdelab/report.hpp>
#include <fdelab/reproduce.hpp>
#include <fdelab/sign.hpp>

namespace {

namespace fs = std::filesystem;
using namespace fdelab;

struct CommonFlags {
    std::string config_path;
    std::optional<double> horizon;
    std::optional<double> tol;
    std::optional<uint64_t> seed;
    std::optional<std::string> out_dir;
    bool require_verdict = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required = true) {
    auto* c = cmd->add_option("--config", flags.config_path, "scenario configuration file (JSON)");
    if (config_required) c->required();
    cmd->add_option("--horizon", flags.horizon, "override the integration horizon");
    cmd->add_option("--tol", flags.tol, "override the integrator tolerance");
    cmd->add_option("--seed", flags.seed, "override the random seed");
    cmd->add_option("--out-dir", flags.out_dir, "override the output directory");
    cmd->add_flag("--require-verdict", flags.require_verdict,
                  "exit with status 1 when the verdict is inconclusive");
}

ScenarioConfig load_from_flags(const CommonFlags& flags) {
    std::ifstream f(flags.config_path);
    if (!f) throw ConfigError("cannot open " + flags.config_path);
    std::stringstream ss;
    ss << f.rdbuf();
    ScenarioConfig cfg = load_config_text(ss.str());
    if (flags.horizon) {
        cfg.horizon = *flags.horizon;
        cfg.resolved["analysis"]["horizon"] = cfg.horizon;
    }
    if (flags.tol) {
        cfg.tol = *flags.tol;
        cfg.resolved["analysis"]["tol"] = cfg.tol;
    }
    if (flags.seed) {
        cfg.seed = *flags.seed;
        cfg.resolved["seed"] = cfg.seed;
    }
    if (flags.out_dir) {
        cfg.out_dir = *flags.out_dir;
        cfg.resolved["output"]["dir"] = cfg.out_dir;
    }
    return cfg;
}

std::string out_path(const ScenarioConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

int finish_with_verdict(const ScenarioConfig& cfg, const CommonFlags& flags,
                        const CriterionReport& rep) {
    ordered_json j = to_json(rep);
    j["resolved_config"] = cfg.resolved;
    write_text_file(out_path(cfg, cfg.report_file), dump_json(j));
    std::printf("%s: %s\n", rep.criterion.c_str(), to_string(rep.verdict.tag));
    if (flags.require_verdict && rep.verdict.tag == VerdictTag::Inconclusive) return 1;
    return 0;
}

int cmd_integrate(const CommonFlags& flags) {
    ScenarioConfig cfg = load_from_flags(flags);
    if (!cfg.history) throw ConfigError("integrate needs a history block");
    cfg.eq.validate(std::fmax(cfg.horizon, cfg.history->t1));
    IntegratorOptions opt;
    opt.tol = cfg.tol;
    opt.zero_tol = cfg.zero_tol;
    Trajectory traj = solve_cauchy(cfg.eq, *cfg.history, cfg.horizon, opt);
    write_text_file(out_path(cfg, cfg.trajectory_file), trajectory_csv(traj));
    ordered_json zj = zeros_json(traj);
    zj["resolved_config"] = cfg.resolved;
    write_text_file(out_path(cfg, cfg.zeros_file), dump_json(zj));
    std::printf("integrated to t = %g: %zu zeros, %zu near-zeros\n", traj.horizon(),
                traj.zeros().size(), traj.near_zeros().size());
    return 0;
}

int cmd_check(const CommonFlags& flags) {
    ScenarioConfig cfg = load_from_flags(flags);
    if (cfg.criterion.empty()) throw ConfigError("check needs analysis.criterion");
    cfg.eq.validate(cfg.window_hi);

    std::vector<PiecewiseFn> r1 = cfg.comparison_r1;
    if (r1.empty())
        for (const auto& term : cfg.eq.terms) r1.push_back(term.r);

    IntegratorOptions opt;
    opt.tol = cfg.tol;

    CriterionReport rep;
    if (cfg.criterion == "thm31") {
        NonoscillationInput in;
        in.eq = cfg.eq;
        in.r1 = r1;
        in.window_lo = cfg.window_lo;
        in.window_hi = cfg.window_hi;
        in.witness = cfg.witness;
        in.delta_cap = cfg.delta_cap;
        in.integrator = opt;
        rep = check_nonoscillation_thm31(in);
    } else if (cfg.criterion == "cor31") {
        rep = check_nonoscillation_cor31(cfg.eq, cfg.window_lo, cfg.window_hi, opt);
    } else if (cfg.criterion == "thm32" || cfg.criterion == "cor32") {
        OscillationInput in;
        in.eq = cfg.eq;
        in.r1 = r1;
        in.window_lo = cfg.window_lo;
        in.window_hi = cfg.window_hi;
        in.repetitions = cfg.repetitions;
        in.min_len = cfg.min_len;
        in.delta_cap = cfg.delta_cap;
        in.strategy = cfg.strategy;
        in.eps_schedule = cfg.eps_schedule();
        in.integrator = opt;
        if (cfg.partition) {
            auto part = *cfg.partition;
            in.partition = [part](double, double) { return part; };
        } else if (cfg.partition_preset == "3.2") {
            in.partition = presets::partition_32;
        }
        rep = cfg.criterion == "thm32" ? check_oscillation_thm32(in)
                                       : check_oscillation_cor32(in);
    } else {
        throw ConfigError("unknown criterion '" + cfg.criterion + "'");
    }
    return finish_with_verdict(cfg, flags, rep);
}

int cmd_interval_osc(const CommonFlags& flags) {
    ScenarioConfig cfg = load_from_flags(flags);
    if (!cfg.instance) throw ConfigError("interval-osc needs analysis.instance");
    IntegratorOptions opt;
    opt.tol = cfg.tol;
    CriterionReport rep = check_interval_osc_thm22(*cfg.instance, cfg.eps_schedule(), opt);
    return finish_with_verdict(cfg, flags, rep);
}

int cmd_wong(const CommonFlags& flags) {
    ScenarioConfig cfg = load_from_flags(flags);
    if (!cfg.wong) throw ConfigError("wong needs analysis.wong");
    WongInstance w = *cfg.wong;
    SignPattern pat =
        find_sign_intervals(w.g, cfg.window_lo, cfg.window_hi, cfg.wong_min_len);
    CriterionReport rep;
    if (!pat.complete()) {
        rep.criterion = "wong";
        HypothesisCheck h;
        h.id = "sign-pattern";
        h.status = CheckStatus::Violated;
        h.note = "no sign quadruple of g found in the window";
        rep.hypotheses.push_back(h);
        rep.verdict = OscillationVerdict::inconclusive();
    } else {
        w.s1 = pat.intervals[0].lo;
        w.t1 = pat.intervals[0].hi;
        w.s2 = pat.intervals[1].lo;
        w.t2 = pat.intervals[1].hi;
        rep = wong_test(w);
    }
    return finish_with_verdict(cfg, flags, rep);
}

int cmd_reproduce(const std::string& id, const CommonFlags& flags) {
    const uint64_t seed = flags.seed.value_or(1);
    ReportBundle bundle = reproduce_scenario(id, seed);
    const std::string dir = flags.out_dir.value_or("reproduce-" + id);
    fs::create_directories(dir);
    for (const auto& [name, content] : bundle.files)
        write_text_file((fs::path(dir) / name).string(), content);
    std::printf("scenario %s: %s (outputs in %s)\n", id.c_str(),
                to_string(bundle.headline.tag), dir.c_str());
    if (!bundle.crosscheck_ok) std::printf("warning: numeric cross-check failed\n");
    if (!bundle.exhibit_ok) std::printf("warning: zero-free exhibit failed\n");
    if (flags.require_verdict && bundle.headline.tag == VerdictTag::Inconclusive) return 1;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for second order linear functional-differential equations"};
    app.require_subcommand(1);

    CommonFlags fi, fc, fo, fw, fr;
    auto* integrate = app.add_subcommand("integrate", "solve a Cauchy problem, emit CSV + zeros");
    add_common(integrate, fi);
    auto* check = app.add_subcommand("check", "run an oscillation / non-oscillation criterion");
    add_common(check, fc);
    auto* interval = app.add_subcommand("interval-osc", "interval-oscillation check");
    add_common(interval, fo);
    auto* wong = app.add_subcommand("wong", "variational oscillation test");
    add_common(wong, fw);
    auto* reproduce = app.add_subcommand("reproduce", "run a bundled reference scenario");
    std::string scenario_id;
    reproduce->add_option("id", scenario_id, "scenario id (3.1 or 3.2)")->required();
    add_common(reproduce, fr, /*config_required=*/false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (integrate->parsed()) return cmd_integrate(fi);
        if (check->parsed()) return cmd_check(fc);
        if (interval->parsed()) return cmd_interval_osc(fo);
        if (wong->parsed()) return cmd_wong(fw);
        if (reproduce->parsed()) return cmd_reproduce(scenario_id, fr);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    }
    return 0;
}

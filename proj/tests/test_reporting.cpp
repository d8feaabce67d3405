#define CATCH_CONFIG_MAIN
#include <catch2/catch.hpp>

#include <fdelab/config.hpp>
#include <fdelab/report.hpp>
#include <fdelab/reproduce.hpp>

using namespace fdelab;

TEST_CASE("config: inline equation round trips into the resolved block") {
    const char* text = R"json({
        "seed": 7,
        "equation": {
            "p": "1", "q": "0", "f": "sin(t/3)", "t0": 0,
            "terms": [{"r": "2*ind(1, 5)", "alpha": "t - 1/2"}]
        },
        "history": {"t1": 0, "theta": "1 + t", "zeta": 0.5},
        "analysis": {"window": [0, 20], "horizon": 25, "tol": 1e-8},
        "output": {"dir": "out", "report": "r.json"}
    })json";
    ScenarioConfig cfg = load_config_text(text);
    CHECK(cfg.seed == 7);
    CHECK(cfg.eq.terms.size() == 1);
    CHECK(cfg.eq.f(3 * M_PI / 2) == Approx(1.0));
    CHECK(cfg.horizon == 25.0);
    CHECK(cfg.history.has_value());
    CHECK(cfg.history->zeta == 0.5);
    CHECK(cfg.out_dir == "out");
    CHECK(cfg.resolved["equation"]["terms"][0]["alpha"].get<std::string>() == "t - 1/2");
    // the resolved sources reparse to the same functions
    auto back = parse(cfg.resolved["equation"]["terms"][0]["r"].get<std::string>());
    for (double t = 0; t < 6; t += 0.3) CHECK(back(t) == cfg.eq.terms[0].r(t));
}

TEST_CASE("config: presets expand") {
    ScenarioConfig c31 = load_config_text(R"json({"equation": {"preset": "3.1"}})json");
    CHECK(c31.eq.terms.size() == 3);
    CHECK(c31.witness.has_value());
    CHECK(c31.horizon == 300.0);

    ScenarioConfig c32 = load_config_text(R"json({"equation": {"preset": "3.2"}})json");
    CHECK(c32.eq.terms.size() == 1);
    CHECK(c32.partition_preset == "3.2");
    CHECK(c32.eq.terms[0].r(1.5) == Approx(2.0));
    CHECK(c32.eq.terms[0].r(0.5) == Approx(0.0));
}

TEST_CASE("config: errors are reported") {
    CHECK_THROWS_AS(load_config_text("not json"), ConfigError);
    CHECK_THROWS_AS(load_config_text(R"json({"equation": {"p": "1 +"}})json"), ConfigError);
    CHECK_THROWS_AS(load_config_text(R"json({"equation": {"preset": "9.9"}})json"), ConfigError);
    CHECK_THROWS_AS(load_config_text(R"json({"equation": {}, "analysis": {"window": [5, 1]}})json"),
                    ConfigError);
    CHECK_THROWS_AS(load_config_text(R"json({"equation": {}, "analysis": {"tol": -1}})json"), ConfigError);
    CHECK_THROWS_AS(load_config_text(R"json({})json"), ConfigError);
}

TEST_CASE("criterion reports serialize with fixed field order") {
    CriterionReport rep;
    rep.criterion = "demo";
    rep.hypotheses.push_back({"1", CheckStatus::Verified, 0.5, 0.25, "note"});
    rep.verdict = OscillationVerdict::numeric_nonoscillatory(30);
    rep.caveats.push_back("grid");
    rep.witnesses["value"] = 1.5;
    std::string a = dump_json(to_json(rep));
    std::string b = dump_json(to_json(rep));
    CHECK(a == b);
    CHECK(a.find("\"criterion\"") < a.find("\"hypotheses\""));
    CHECK(a.find("\"hypotheses\"") < a.find("\"verdict\""));
    CHECK(a.find("\"verdict\"") < a.find("\"caveats\""));
    CHECK(a.find("\"caveats\"") < a.find("\"witnesses\""));
}

TEST_CASE("comparison reports serialize") {
    ScalarRiccatiPair pair;
    pair.a = pair.a1 = parse("1");
    pair.b = pair.b1 = parse("0");
    pair.c = parse("1");
    pair.c1 = parse("0");
    pair.t1 = 0;
    pair.t2 = 1;
    pair.lambda = 0;
    ComparisonReport rep = verify_scalar_comparison(pair);
    ordered_json j = to_json(rep);
    CHECK(j["conclusion"].get<bool>() == rep.conclusion);
    CHECK(j["conditions"].is_array());
    CHECK(j["margin"].get<double>() == Approx(rep.margin));
    CHECK(dump_json(j) == dump_json(to_json(rep)));
}

TEST_CASE("trajectory exports") {
    EquationSpec eq;
    eq.p = parse("1");
    eq.q = parse("0");
    eq.f = parse("0");
    eq.terms.push_back({parse("1"), parse("t")});
    eq.t0 = 0;
    Trajectory traj = solve_cauchy(eq, HistorySpec{0, parse("0"), 1.0}, 7.0);
    std::string csv = trajectory_csv(traj);
    CHECK(csv.substr(0, 10) == "t,phi,psi\n");
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 10);
    ordered_json zj = zeros_json(traj);
    REQUIRE(zj["zeros"].size() == 2);  // pi and 2*pi
    CHECK(zj["zeros"][0]["t"].get<double>() == Approx(M_PI).margin(1e-8));
    CHECK(zj["horizon"].get<double>() == 7.0);
}

TEST_CASE("reproduce bundles are deterministic for a fixed seed") {
    ReportBundle a = reproduce_31(5);
    ReportBundle b = reproduce_31(5);
    REQUIRE(a.files.size() == b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) {
        CHECK(a.files[i].first == b.files[i].first);
        CHECK(a.files[i].second == b.files[i].second);
    }
    CHECK(a.headline.tag == VerdictTag::CertifiedNonoscillatory);
    CHECK(a.exhibit_ok);
}

TEST_CASE("unknown scenario id is a config error") {
    CHECK_THROWS_AS(reproduce_scenario("4.7", 1), ConfigError);
}

#include <doctest.h>

#include "regcb/config.hpp"

using namespace regcb;

namespace {

std::string error_of(const std::string& text)
{
    try {
        parse_run_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("config defaults and round trip")
{
    const RunConfig def = parse_run_config("{}");
    CHECK(def.algorithm == "regcb-opt");
    CHECK(def.schedule == "practical_sqrt2");
    CHECK(def.precision == 1e-3);

    const RunConfig cfg = parse_run_config(R"({"algorithm": "egreedy", "parameter": 0.05, "horizon": 321,
        "environment": "massart_linear", "margin": 0.25, "seed_algo": 9, "oracle": "ridge_joint",
        "label_dependent": true})");
    CHECK(cfg.algorithm == "egreedy");
    CHECK(cfg.horizon == 321);
    CHECK(cfg.seed_algo == 9);
    const RunConfig back = parse_run_config(dump_run_config(cfg));
    CHECK(dump_run_config(back) == dump_run_config(cfg));
    CHECK(config_metadata(cfg).at("margin") == "0.25");
}

TEST_CASE("config rejects unknown keys, bad names and bad combinations")
{
    CHECK(error_of(R"({"horizn": 5})").find("horizn") != std::string::npos);
    const auto algo = error_of(R"({"algorithm": "linucb"})");
    CHECK(algo.find("linucb") != std::string::npos);
    CHECK(algo.find("regcb-elim") != std::string::npos);
    CHECK_FALSE(error_of(R"({"schedule": "weekly"})").empty());
    CHECK_FALSE(error_of(R"({"horizon": "long"})").empty());
    CHECK_FALSE(error_of(R"({"horizon": 0})").empty());
    CHECK_FALSE(error_of(R"({"delta": 1.5})").empty());
    CHECK_FALSE(error_of(R"({"algorithm": "egreedy", "parameter": 2})").empty());
    CHECK_FALSE(error_of(R"({"oracle": "finite"})").empty());
    CHECK_FALSE(error_of(R"({"environment": "prop1"})").empty());
    CHECK_FALSE(error_of(R"({"environment": "csv"})").empty());
    CHECK_FALSE(error_of(R"({"label_dependent": true})").empty());
    CHECK_FALSE(error_of("[1, 2]").empty());
    CHECK_FALSE(error_of("{not json").empty());
    CHECK(error_of(R"({"environment": "prop1", "oracle": "finite", "algorithm": "regcb-elim"})").empty());
}

TEST_CASE("factories follow the config")
{
    RunConfig cfg;
    cfg.environment = "massart_linear";
    cfg.horizon = 50;
    const auto env = make_environment(cfg);
    CHECK(env->name() == "massart_linear");
    CHECK(env->num_actions() == 4);
    for (const char* algo : {"regcb-opt", "regcb-elim", "egreedy", "bootstrap", "uniform"}) {
        cfg.algorithm = algo;
        cfg.parameter = 0.1;
        CHECK(make_learner(cfg, *env)->name() == algo);
    }
    CHECK(make_schedule(cfg).horizon == 50);
    CHECK(grid_kind_for("egreedy") == GridKind::epsilon);
    CHECK(grid_kind_for("regcb-opt") == GridKind::confidence);
    CHECK(replicate_seed(3, 0) != replicate_seed(3, 1));

    cfg.algorithm = "regcb-opt";
    const RunRecord a = run_config(cfg);
    const RunRecord b = run_config(cfg);
    CHECK(a.rounds.size() == 50);
    CHECK(a.meta.at("config.algorithm") == "regcb-opt");
    for (std::size_t i = 0; i < 50; ++i) CHECK(a.rounds[i].action == b.rounds[i].action);
}

#include <doctest.h>

#include "dirac/config.hpp"
#include "dirac/errors.hpp"

using namespace dirac;

namespace {

ojson minimal() {
    return ojson::parse(R"({
        "geometry": {"kind": "strip"},
        "grid": {"nx": 65},
        "data": {"bumps": [{"center": 0.5, "half_width": 0.2}]}
    })");
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults") {
    const ExperimentConfig c = parse_config(minimal());
    CHECK(c.nx == 65);
    CHECK(c.dt == doctest::Approx(0.5 / 64));
    CHECK(c.t_begin == 0.0);
    CHECK(c.t_end == 1.0);
    CHECK(c.boundary.family == "transmission");
    CHECK(c.run.scheme == "crank-nicolson");
    CHECK(c.psi0.bumps.size() == 1);
    CHECK(c.check.support_threshold == 1e-8);
}

TEST_CASE("unknown keys are errors") {
    for (const char* path : {"/extra", "/grid/Nx", "/data/bumps/0/width"}) {
        ojson j = minimal();
        j[ojson::json_pointer(path)] = 1;
        CHECK_THROWS_AS(parse_config(j), ConfigError);
    }
}

TEST_CASE("invalid values are errors") {
    ojson j = minimal();
    j["data"]["bumps"][0]["half_width"] = 0.0;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = minimal();
    j["data"]["bumps"][0]["half_width"] = 0.6;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = minimal();
    j["grid"]["dt"] = 0.01;
    j["grid"]["dt_over_h"] = 0.5;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = minimal();
    j["grid"]["nx"] = "sixty";
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = minimal();
    j["boundary"] = {{"family", "aps"}};
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = minimal();
    j["geometry"]["lapse"] = {{"type", "sin_affine"}, {"a", 0.2}, {"b", 0.5}, {"omega", 10.0}};
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = minimal();
    j["geometry"]["lapse"] = {{"type", "exp"}, {"a", 1.0}};
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("time function vocabulary round trips") {
    const ojson spec = ojson::parse(R"({"type": "product", "factors": [
        {"type": "sin_affine", "a": 1.0, "b": 0.5, "omega": 2.0, "phase": 0.25},
        {"type": "bump", "center": 0.5, "half_width": 0.3, "amplitude": 2.0},
        {"type": "affine", "a": 0.5, "b": -0.25}]})");
    const TimeFunction f = parse_time_function(spec, "f");
    const TimeFunction g = parse_time_function(time_function_json(f), "g");
    for (double t : {0.0, 0.3, 0.55, 0.79}) {
        const double expect = (1.0 + 0.5 * std::sin(2.0 * t + 0.25)) * 2.0 * smooth_bump((t - 0.5) / 0.3) * (0.5 - 0.25 * t);
        CHECK(f(t) == doctest::Approx(expect).epsilon(1e-15));
        CHECK(g(t) == f(t));
    }
}

TEST_CASE("families from config") {
    ojson j = minimal();
    j["geometry"] = {{"kind", "cylinder"}, {"mode_cutoff", 2}};
    j["boundary"] = {{"family", "aps"}};
    ExperimentConfig c = parse_config(j);
    const CliffordModel m = make_clifford_model(2);
    CHECK(make_family(c, m).kind() == FamilyKind::APS);
    CHECK(make_family(c, m)(0.0).size() == 5);

    j = minimal();
    j["boundary"] = {{"family", "rotated"}, {"base", "chirality"}, {"phi", {{"type", "affine"}, {"a", 0.0}, {"b", 1.0}}}};
    c = parse_config(j);
    const auto fam = make_family(c, make_clifford_model(1));
    CHECK(fam.time_dependent());
    CHECK(fam.local());

    j = minimal();
    ojson row = ojson::array({ojson::array({0.0, 0.0}), ojson::array({0.0, 0.0}), ojson::array({0.0, 0.0}),
                              ojson::array({0.0, 0.0})});
    j["boundary"] = {{"family", "custom"}, {"matrices", ojson::array({ojson::array({row, row, row, row})})}};
    c = parse_config(j);
    CHECK(make_family(c, make_clifford_model(1))(0.0).front().norm() == 0.0);
}

TEST_CASE("sources and output times") {
    ojson j = minimal();
    j["data"]["sources"] = ojson::parse(
        R"([{"center": 0.5, "half_width": 0.1, "amplitude": [[1.0, 0.0], [0.0, 1.0]],
             "envelope": {"type": "bump", "center": 0.3, "half_width": 0.1}}])");
    j["run"] = {{"output_times", {0.0, 0.25, 1.0}}};
    const ExperimentConfig c = parse_config(j);
    CHECK(c.sources.size() == 1);
    CHECK(c.sources[0].amplitude(1) == cplx(0.0, 1.0));
    CHECK(c.solver_options().landing_times.size() == 3);
    j["run"] = {{"output_times", {1.5}}};
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = minimal();
    j["data"]["sources"] = ojson::parse(
        R"([{"center": 0.05, "half_width": 0.1, "envelope": {"type": "const", "value": 1.0}}])");
    CHECK_THROWS_AS(parse_config(j), ConfigError);
}

}

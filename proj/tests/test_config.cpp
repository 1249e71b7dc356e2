#include <gtest/gtest.h>

#include "kachanov/config.hpp"

using namespace kachanov;

namespace {

TEST(Config, BaseScenarioWithOverrides) {
    const Scenario s = parse_config(R"({
        "base_scenario": "TC03S01",
        "omega_cap": 0.01,
        "steps": 40,
        "output": {"dir": "override_out", "snapshot_interval": 0.5}
    })");
    EXPECT_EQ(s.name, "TC03S01");
    EXPECT_EQ(s.g, GKind::G2);
    EXPECT_EQ(s.omega_cap, 0.01);
    EXPECT_EQ(s.steps, 40);
    EXPECT_EQ(s.output.dir, "override_out");
}

TEST(Config, FullStandaloneScenario) {
    const Scenario s = parse_config(R"({
        "name": "custom",
        "mesh": {"builtin_n": 8},
        "bc": {
            "gamma0": {"type": "dirichlet", "u": "u0"},
            "gamma1": {"type": "neumann", "tau": "tau0"},
            "gamma2": {"type": "robin", "beta": 100.0, "u": "u2", "tau": "tau0"}
        },
        "g_model": "g1",
        "lambda": 121.15,
        "mu": 80.77,
        "alpha": 1.0,
        "horizon": 5.0,
        "steps": 50,
        "load_scale": 2.0,
        "solver": {"tol": 1e-9, "max_iter_factor": 20},
        "tag_aliases": {"gamma0": 1, "gamma1": 2, "gamma2": 3},
        "stress_measure": "plane_strain_augmented"
    })");
    EXPECT_EQ(s.name, "custom");
    EXPECT_EQ(s.mesh.builtin_n, 8);
    EXPECT_EQ(s.bc.at(BoundaryTag::Gamma0).type, BcSpec::Type::Dirichlet);
    EXPECT_EQ(s.bc.at(BoundaryTag::Gamma2).type, BcSpec::Type::Robin);
    EXPECT_EQ(s.bc.at(BoundaryTag::Gamma2).beta, 100.0);
    EXPECT_EQ(s.g, GKind::G1);
    EXPECT_EQ(s.horizon, 5.0);
    EXPECT_EQ(s.load_scale, 2.0);
    EXPECT_EQ(s.solver.tol, 1e-9);
    EXPECT_EQ(s.aliases.gamma2, 3);
    EXPECT_EQ(s.measure, StressMeasure::PlaneStrainAugmented);
}

TEST(Config, NegatedBoundaryData) {
    const Scenario s = parse_config(R"({
        "name": "pull",
        "mesh": {"builtin_n": 4},
        "bc": {
            "gamma0": {"type": "neumann", "tau": "-tau2"},
            "gamma1": {"type": "neumann", "tau": "tau0"},
            "gamma2": {"type": "neumann", "tau": "tau2"}
        },
        "g_model": "g0"
    })");
    EXPECT_TRUE(s.bc.at(BoundaryTag::Gamma0).tau.negate);
    EXPECT_FALSE(s.bc.at(BoundaryTag::Gamma2).tau.negate);
}

TEST(Config, UnknownKeysRejected) {
    EXPECT_THROW(parse_config(R"({"base_scenario": "TC01S00", "typo_key": 1})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"base_scenario": "TC01S00", "solver": {"tolerance": 1e-9}})"),
                 ConfigError);
    EXPECT_THROW(parse_config(R"({"base_scenario": "TC01S00", "bc": {"gamma3": {}}})"),
                 ConfigError);
}

TEST(Config, StructuralErrors) {
    EXPECT_THROW(parse_config("not json"), ConfigError);
    EXPECT_THROW(parse_config(R"(["array"])"), ConfigError);
    EXPECT_THROW(parse_config(R"({"base_scenario": "NOPE"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"name": "x"})"), ConfigError);  // missing mesh/bc/g_model
    EXPECT_THROW(parse_config(R"({
        "base_scenario": "TC01S00",
        "mesh": {"builtin_n": 4, "msh": "also.msh"}
    })"),
                 ConfigError);
    EXPECT_THROW(parse_config(R"({
        "base_scenario": "TC01S00",
        "tag_aliases": {"gamma0": 7, "gamma1": 7}
    })"),
                 ConfigError);
    EXPECT_THROW(parse_config(R"({"base_scenario": "TC01S00", "g_model": "g9"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"base_scenario": "TC01S00", "steps": 0})"), ConfigError);
}

TEST(Config, BcValidation) {
    EXPECT_THROW(parse_config(R"({
        "base_scenario": "TC01S00",
        "bc": {"gamma0": {"type": "dirichlet", "u": "u0", "beta": 5.0}}
    })"),
                 ConfigError);
    EXPECT_THROW(parse_config(R"({
        "base_scenario": "TC01S00",
        "bc": {"gamma0": {"type": "robin", "beta": -1.0, "u": "u0", "tau": "tau0"}}
    })"),
                 ConfigError);
    EXPECT_THROW(parse_config(R"({
        "base_scenario": "TC01S00",
        "bc": {"gamma0": {"type": "neumann", "tau": "tau9"}}
    })"),
                 ConfigError);
}

}  // namespace

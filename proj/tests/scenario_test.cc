// Copyright 2026 The qme Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "qme/runner.h"
#include "qme/timeseries.h"

using namespace qme;

namespace {

const char *kMinimal = R"(schema_version: 1
initial_bloch: [0.5, 0.0, 0.8]
)";

const char *kNoisy = R"(schema_version: 1
name: noisy
initial_bloch: [0.2, 0.4, 0.8]
seed: 11
gates:
  - kind: not
noise:
  count: 4
  start: 46.97
  end: 104.7
  gamma: 0.0535
run:
  t_end: 120
)";

ScenarioError parse_error(const std::string &text) {
    try {
        parse_scenario_text(text, "input.yaml");
    } catch (const ScenarioError &e) {
        return e;
    }
    ADD_FAILURE() << "no error for:\n" << text;
    return ScenarioError("", "", 0, 0, "");
}

std::filesystem::path scratch(const std::string &name) {
    auto dir = std::filesystem::temp_directory_path() / ("qme_scenario_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST(parse_scenario, minimal_file_takes_defaults) {
    auto s = parse_scenario_text(kMinimal);
    EXPECT_EQ(s.initial_bloch, (Vec3{0.5, 0, 0.8}));
    EXPECT_EQ(s.omega_L, 0.2675);
    EXPECT_EQ(s.seed, 0u);
    EXPECT_TRUE(s.gates.empty());
    // No gates: the run covers ten Larmor periods.
    EXPECT_NEAR(s.t_end, 10 * 2 * std::numbers::pi / 0.2675, 1e-9);
    for (const char *field : {"omega_L", "seed", "schedule", "integrator", "run.t_end", "outputs"})
        EXPECT_NE(std::find(s.defaulted.begin(), s.defaulted.end(), field), s.defaulted.end()) << field;
}

TEST(parse_scenario, errors_name_field_and_position) {
    auto e = parse_error("schema_version: 1\ninitial_bloch: [0.5, 0, 0.8]\nnoise:\n  count: four\n  gamma: 1\n");
    EXPECT_EQ(e.field(), "noise.count");
    EXPECT_EQ(e.line(), 4);
    EXPECT_EQ(e.column(), 10);
    EXPECT_NE(std::string(e.what()).find("input.yaml:4:10"), std::string::npos) << e.what();

    auto bad_kind = parse_error("schema_version: 1\ninitial_bloch: [0, 0, 1]\ngates:\n  - kind: cnot\n");
    EXPECT_EQ(bad_kind.field(), "gates[0].kind");
    EXPECT_EQ(bad_kind.line(), 4);
}

TEST(parse_scenario, unknown_keys_are_errors) {
    auto top = parse_error(std::string(kMinimal) + "omega_l: 0.3\n");
    EXPECT_EQ(top.field(), "omega_l");
    EXPECT_EQ(top.line(), 3);
    auto nested = parse_error(std::string(kMinimal) + "bath:\n  kind: korsch\n  gamma3: 0.1\n  temp: 1\n");
    EXPECT_EQ(nested.field(), "bath.temp");
}

TEST(parse_scenario, rejects_invalid_values) {
    EXPECT_EQ(parse_error("schema_version: 1\ninitial_bloch: [1.2, 0, 0]\n").field(), "initial_bloch");
    EXPECT_EQ(parse_error("schema_version: 2\ninitial_bloch: [0, 0, 1]\n").field(), "schema_version");
    EXPECT_EQ(parse_error("initial_bloch: [0, 0, 1]\n").field(), "schema_version");
    EXPECT_EQ(parse_error("schema_version: 1\n").field(), "initial_bloch");
    EXPECT_EQ(parse_error("schema_version: 1\ninitial_bloch: [0, 1]\n").field(), "initial_bloch");
    EXPECT_EQ(parse_error(std::string(kMinimal) + "lindblad:\n  - operator: sz\n    gamma: -0.1\n").field(),
              "lindblad[0].gamma");
    EXPECT_EQ(parse_error(std::string(kMinimal) + "lindblad:\n  - operator: sq\n    gamma: 0.1\n").field(),
              "lindblad[0].operator");
    EXPECT_EQ(parse_error(std::string(kMinimal) + "noise:\n  count: 3\n  start: 0\n  end: 1\n  gamma: 0.1\n").field(),
              "noise.end");
    EXPECT_EQ(parse_error(std::string(kMinimal) + "measurements:\n  - start: 5\n    gamma: 0\n    direction: [0, 0, 1]\n")
                  .field(),
              "measurements[0].gamma");
    EXPECT_EQ(parse_error(std::string(kMinimal) + "integrator:\n  samples: 1\n").field(), "integrator");
    EXPECT_EQ(parse_error(std::string(kMinimal) + "run:\n  t_end: -1\n").field(), "run.t_end");
    // A malformed document reports the parser position.
    auto syntax = parse_error("schema_version: 1\ninitial_bloch: [0.5, 0\n");
    EXPECT_GT(syntax.line(), 0);
}

TEST(parse_scenario, negative_rate_needs_feedback) {
    auto s = parse_scenario_text(std::string(kMinimal) + "feedback: true\nlindblad:\n  - operator: sz\n    gamma: -0.01\n");
    EXPECT_EQ(s.lindblads.at(0).gamma, -0.01);
}

TEST(parse_scenario, default_end_sits_on_the_larmor_grid) {
    auto s = parse_scenario_text(kMinimal + std::string("gates:\n  - kind: not\n  - kind: hadamard\n"));
    auto grid = schedule_of(s).larmor_grid(s.t_end + 1);
    double nearest = 1e9;
    for (double t : grid) nearest = std::min(nearest, std::abs(t - s.t_end));
    EXPECT_LT(nearest, 1e-9);
    EXPECT_GE(s.t_end, schedule_of(s).T_f);
}

TEST(resolved_yaml, replays_to_the_same_scenario) {
    auto s = parse_scenario_text(kNoisy);
    auto text = resolved_yaml(s);
    auto again = parse_scenario_text(text, "resolved");
    EXPECT_EQ(resolved_yaml(again), text);
    EXPECT_EQ(scenario_hash(again), scenario_hash(s));
    // Nothing is left to default in a resolved file except top-level sections it omits.
    for (const auto &field : again.defaulted) EXPECT_EQ(field.find("noise"), std::string::npos) << field;
}

TEST(scenario_hash, tracks_content) {
    auto a = parse_scenario_text(kNoisy);
    auto b = a;
    b.noise.gamma *= 2;
    EXPECT_NE(scenario_hash(a), scenario_hash(b));
    EXPECT_EQ(hex64(scenario_hash(a)).size(), 16u);
    EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(draw_coefficient, matches_top_53_bits) {
    std::mt19937_64 rng(5), shadow(5);
    for (int i = 0; i < 1000; i++) {
        double c = draw_coefficient(rng);
        double u = std::ldexp(static_cast<double>(shadow() >> 11), -53);
        ASSERT_EQ(c, 2 * u - 1);
        ASSERT_GE(c, -1);
        ASSERT_LT(c, 1);
    }
}

TEST(draw_noise_pulses, equi_spaced_and_seeded) {
    auto s = parse_scenario_text(kNoisy);
    auto schedule = schedule_of(s);
    auto pulses = draw_noise_pulses(s, schedule, s.seed);
    ASSERT_EQ(pulses.size(), 4u);
    EXPECT_DOUBLE_EQ(pulses.front().t1, 46.97);
    EXPECT_NEAR(pulses.back().t2, 104.7, 1e-12);
    for (size_t k = 0; k < pulses.size(); k++) {
        EXPECT_NEAR(pulses[k].t2 - pulses[k].t1, 0.47, 1e-12);
        if (k) EXPECT_NEAR(pulses[k].t1 - pulses[k - 1].t1, (104.7 - 46.97 - 0.47) / 3, 1e-12);
    }
    // Draw order: a0..a3 then b0..b3, pulse by pulse.
    std::mt19937_64 rng(11);
    for (const auto &p : pulses) {
        for (double v : p.a) ASSERT_EQ(v, draw_coefficient(rng));
        for (double v : p.b) ASSERT_EQ(v, draw_coefficient(rng));
    }
    auto same = draw_noise_pulses(s, schedule, 11);
    auto other = draw_noise_pulses(s, schedule, 12);
    EXPECT_EQ(same[2].a, pulses[2].a);
    EXPECT_NE(other[0].a, pulses[0].a);
}

TEST(draw_noise_pulses, fixed_operator_and_friction) {
    auto s = parse_scenario_text(kNoisy);
    s.noise.op = "sx";
    s.noise.friction = true;
    auto pulses = draw_noise_pulses(s, schedule_of(s), 1);
    ASSERT_EQ(pulses.size(), 5u);
    EXPECT_EQ(pulses[0].a, (std::array<double, 4>{0, 1, 0, 0}));
    EXPECT_EQ(pulses[0].b, (std::array<double, 4>{}));
    EXPECT_TRUE(pulses.back().friction);
    auto gate = schedule_of(s).gates[0];
    EXPECT_EQ(pulses.back().t1, gate.t1);
    EXPECT_EQ(pulses.back().t2, gate.t2);
}

TEST(set_path, overrides_scalars_only) {
    auto root = YAML::Load(kNoisy);
    set_path(root, "noise.gamma", "0.25", "x");
    set_path(root, "gates[0].kind", "hadamard", "x");
    set_path(root, "initial_bloch[2]", "0.7", "x");
    auto s = parse_scenario(root);
    EXPECT_EQ(s.noise.gamma, 0.25);
    EXPECT_EQ(s.gates[0].kind, GateKind::hadamard);
    EXPECT_EQ(s.initial_bloch.z, 0.7);
    EXPECT_THROW(set_path(root, "noise.sigma", "1", "x"), ScenarioError);
    EXPECT_THROW(set_path(root, "gates[3].kind", "not", "x"), ScenarioError);
    EXPECT_THROW(set_path(root, "noise", "1", "x"), ScenarioError);
    EXPECT_THROW(set_path(root, "", "1", "x"), ScenarioError);
    EXPECT_THROW(set_path(root, "noise.", "1", "x"), ScenarioError);
    EXPECT_THROW(set_path(root, ".noise", "1", "x"), ScenarioError);
    EXPECT_THROW(set_path(root, "gates[x].kind", "1", "x"), ScenarioError);
}

TEST(expand_sweep, one_scenario_per_value) {
    auto root = YAML::Load(kNoisy);
    auto points = expand_sweep(root, "noisy", "noise.gamma", {"0", "0.1"});
    ASSERT_EQ(points.size(), 2u);
    EXPECT_EQ(points[1].scenario.noise.gamma, 0.1);
    EXPECT_EQ(YAML::Load(kNoisy)["noise"]["gamma"].as<double>(), root["noise"]["gamma"].as<double>());
    EXPECT_THROW(expand_sweep(root, "noisy", "noise.gamma", {}), ScenarioError);
    EXPECT_THROW(expand_sweep(root, "noisy", "noise.gamma", {"-1"}), ScenarioError);
}

TEST(format_double, round_trips) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 10000; i++) {
        double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        ASSERT_EQ(parse_double(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_EQ(format_double(std::nan("")), "nan");
    EXPECT_TRUE(std::isnan(parse_double("nan")));
    EXPECT_EQ(parse_double("-inf"), -std::numeric_limits<double>::infinity());
    EXPECT_THROW(parse_double("1.5x"), std::invalid_argument);
    EXPECT_THROW(parse_double(""), std::invalid_argument);
}

TEST(write_timeseries, empty_trajectory_is_header_only) {
    std::ostringstream out;
    write_timeseries(out, {});
    EXPECT_EQ(out.str(), std::string(kTimeseriesHeader) + "\n");
    EXPECT_EQ(std::string(kTimeseriesHeader),
              "t,Px,Py,Pz,lambda1,lambda2,entropy,purity,energy,power,heat_rate,T_occ,T_ratio");
}

TEST(write_timeseries, reload_equals_memory) {
    auto s = parse_scenario_text(kNoisy);
    auto run = run_scenario(s);
    auto dir = scratch("roundtrip");
    auto path = (dir / "timeseries.csv").string();
    write_timeseries(path, run.trajectory.rows);
    auto back = read_timeseries(path);
    ASSERT_EQ(back.size(), run.trajectory.rows.size());
    // Bitwise, so NaN sentinels compare equal to themselves.
    for (size_t i = 0; i < back.size(); i++) {
        auto mem = to_columns(run.trajectory.rows[i]);
        ASSERT_EQ(std::memcmp(back[i].data(), mem.data(), sizeof(double) * mem.size()), 0) << i;
    }
}

TEST(read_timeseries, rejects_bad_files) {
    auto dir = scratch("bad");
    auto write = [&](const std::string &name, const std::string &text) {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    };
    EXPECT_THROW(read_timeseries(write("header.csv", "t,Px\n")), std::runtime_error);
    EXPECT_THROW(read_timeseries(write("short.csv", std::string(kTimeseriesHeader) + "\n1,2,3\n")),
                 std::runtime_error);
    EXPECT_THROW(read_timeseries((dir / "missing.csv").string()), std::runtime_error);
}

TEST(run_scenario, precession_keeps_pz_and_fidelity) {
    auto s = parse_scenario_text(std::string(kMinimal) + "outputs:\n  reference: initial\n");
    auto run = run_scenario(s);
    for (const auto &r : run.trajectory.rows) ASSERT_EQ(r.bloch.z, 0.8);
    for (const auto &g : run.grid) EXPECT_NEAR(g.fidelity, 1, 1e-9);
    ASSERT_TRUE(run.final_fidelity.has_value());
}

TEST(run_scenario, seed_override_is_recorded) {
    auto s = parse_scenario_text(kNoisy);
    auto a = run_scenario(s), b = run_scenario(s, 99);
    EXPECT_EQ(b.scenario.seed, 99u);
    EXPECT_NE(a.trajectory.run_id, b.trajectory.run_id);
    EXPECT_NE(a.trajectory.rows.back().bloch.x, b.trajectory.rows.back().bloch.x);
    auto manifest = manifest_json(b);
    EXPECT_EQ(manifest["seed"], 99u);
    EXPECT_EQ(manifest["noise_pulses"].size(), 4u);
    EXPECT_EQ(manifest["prng"], kPrngName);
}

TEST(write_run, artifacts_are_reproducible) {
    auto s = parse_scenario_text(kNoisy);
    auto d1 = scratch("run1"), d2 = scratch("run2");
    write_run(d1.string(), run_scenario(s));
    write_run(d2.string(), run_scenario(s));
    for (const char *name : {"timeseries.csv", "events.json", "scenario.resolved.yaml"}) {
        std::ifstream a(d1 / name), b(d2 / name);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        EXPECT_FALSE(sa.str().empty()) << name;
        EXPECT_EQ(sa.str(), sb.str()) << name;
    }
    EXPECT_TRUE(std::filesystem::exists(d1 / "timing.json"));
}

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

#ifndef QME_SCENARIO_H
#define QME_SCENARIO_H

#include <yaml-cpp/yaml.h>

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qme/engine.h"

namespace qme {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char *kPrngName = "mt19937_64; u = (x >> 11) * 2^-53; coefficient = 2u - 1";

/// Bad input in a scenario file. `field` is a dotted path such as
/// "noise.count" or "gates[1].kind"; line and column are 1-based, 0 if unknown.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string source, std::string field, int line, int column, const std::string &message);
    const std::string &field() const { return field_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    std::string field_;
    int line_, column_;
};

struct GateConfig {
    GateKind kind = GateKind::not_gate;
    /// Pauli coefficients (c0, cx, cy, cz) of a custom Hermitian Ω.
    std::array<double, 4> custom{};
    int delay_periods = 2;
    double width = 0.47;
    PulseShape shape = PulseShape::gaussian;
};

/// A constant Lindblad operator: either a named case or explicit coefficients.
struct LindbladConfig {
    /// sx, sy, sz, s+, s-, or "custom".
    std::string op = "sz";
    /// Re/Im of α0..α3, used when op == "custom".
    std::array<double, 4> re{}, im{};
    double gamma = 0;

    LindbladOp to_op() const;
};

struct NoiseConfig {
    int count = 0;
    double start = 0, end = 0;
    double width = 0.47;
    /// Soft-square edge of each pulse.
    double edge = 0.02;
    double gamma = 0;
    /// "random" draws α per pulse; sx, sy, sz, s+ or s- fixes the operator.
    std::string op = "random";
    /// Add one random pulse over each gate window.
    bool friction = false;
};

struct MeasurementConfig {
    double start = 0;
    double gamma = 0;
    Vec3 direction{0, 0, 1};
    bool halt_precession = true;

    MeasurementWindow window() const { return MeasurementWindow::for_rate(start, gamma, direction); }
};

enum class Reference { ideal, initial, none };

struct Scenario {
    int schema_version = kSchemaVersion;
    std::string name;
    Vec3 initial_bloch{0, 0, 1};
    double omega_L = 0.2675;
    std::uint64_t seed = 0;
    std::vector<GateConfig> gates;
    double bias_edge = 0.005;
    int extra_periods = 0;
    std::optional<AxisRotation> axis_rotation;
    std::vector<LindbladConfig> lindblads;
    NoiseConfig noise;
    std::vector<MeasurementConfig> measurements;
    std::optional<BerettaSpec> beretta;
    std::optional<BathSpec> bath;
    bool combine_23 = false;
    bool feedback = false;
    IntegratorConfig integrator;
    /// End of the run; filled during loading when absent.
    double t_end = 0;
    Reference reference = Reference::ideal;
    bool grid_report = true;
    /// Field paths that were absent and took their default.
    std::vector<std::string> defaulted;
};

/// Parses and validates. `source` names the input in error messages.
Scenario parse_scenario(const YAML::Node &root, const std::string &source = "<scenario>");
Scenario parse_scenario_text(const std::string &text, const std::string &source = "<scenario>");
Scenario load_scenario(const std::string &path);

/// Reads the file into a node, turning parse failures into ScenarioError.
YAML::Node load_yaml(const std::string &path);

/// Sets `value` at a dotted path ("noise.gamma", "gates[0].width") in place.
/// Throws ScenarioError if the path does not exist.
void set_path(YAML::Node &root, const std::string &path, const std::string &value, const std::string &source);

/// Every field, defaults included, in a stable order.
std::string resolved_yaml(const Scenario &s);
/// FNV-1a 64 of resolved_yaml.
std::uint64_t scenario_hash(const Scenario &s);
std::string hex64(std::uint64_t v);

Schedule schedule_of(const Scenario &s);

struct NoisePulse {
    double t1 = 0, t2 = 0;
    /// Real and imaginary parts of α0..α3, in draw order.
    std::array<double, 4> a{}, b{};
    /// Pulse sits on a gate window.
    bool friction = false;

    LindbladOp to_op(double gamma, double edge) const;
};

/// 2u − 1 with u from the top 53 bits of the generator.
double draw_coefficient(std::mt19937_64 &rng);

/// Equi-spaced noise pulses followed by friction pulses, deterministic in the seed.
std::vector<NoisePulse> draw_noise_pulses(const Scenario &s, const Schedule &schedule, std::uint64_t seed);

/// Ideal static-gate product applied to the initial state.
DensityMatrix ideal_reference(const Scenario &s);

struct RunInputs {
    Schedule schedule;
    std::vector<NoisePulse> noise;
    GeneratorSet generators;
    std::vector<double> extra_samples;
};

RunInputs prepare_run(const Scenario &s, std::uint64_t seed);

}  // namespace qme

#endif

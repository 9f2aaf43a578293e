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

#ifndef QME_RUNNER_H
#define QME_RUNNER_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qme/scenario.h"

namespace qme {

#ifndef QME_VERSION
#define QME_VERSION "0.0.0"
#endif

struct RunOutput {
    /// Scenario as run; its seed is the one actually used.
    Scenario scenario;
    RunInputs inputs;
    Trajectory trajectory;
    std::optional<DensityMatrix> reference;
    std::vector<GridRow> grid;
    /// Fidelity at the last grid point (or the final state without a grid).
    std::optional<double> final_fidelity;
    double wall_seconds = 0;
};

/// Integrates the scenario. Throws IntegrationError on numerical failure.
RunOutput run_scenario(const Scenario &scenario, std::optional<std::uint64_t> seed = std::nullopt);

nlohmann::json manifest_json(const RunOutput &run);
/// events, Larmor-grid rows and manifest; no wall time.
nlohmann::json events_json(const RunOutput &run);

/// timeseries.csv, events.json, scenario.resolved.yaml and timing.json.
void write_run(const std::string &dir, const RunOutput &run);

/// Six significant digits, for log and summary lines.
std::string format_sig(double v, int digits = 6);
std::string summary_line(const RunOutput &run);

struct SweepPoint {
    std::string value;
    Scenario scenario;
};

/// One scenario per value with `path` overridden. Throws ScenarioError on a
/// bad path, an empty value list or any invalid variant.
std::vector<SweepPoint> expand_sweep(const YAML::Node &base, const std::string &source, const std::string &path,
                                     const std::vector<std::string> &values);

/// Runs the points on up to `threads` workers into dir/run_NNN and writes
/// dir/sweep.csv. Results are ordered by point index, not completion.
std::vector<RunOutput> run_sweep(const std::vector<SweepPoint> &points, const std::string &path,
                                 const std::string &dir, std::optional<std::uint64_t> seed, unsigned threads);

}  // namespace qme

#endif

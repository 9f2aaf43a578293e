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

#include "qme/runner.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "qme/timeseries.h"

namespace qme {

namespace {

const ObservableRow *row_at(const Trajectory &traj, double t) {
    for (const auto &r : traj.rows)
        if (std::abs(r.t - t) <= 1e-9) return &r;
    return nullptr;
}

void flag_measurements(RunOutput &run) {
    auto &events = run.trajectory.events;
    for (size_t i = 0; i < run.scenario.measurements.size(); i++) {
        const auto &m = run.scenario.measurements[i];
        auto w = m.window();
        std::string label = "measurement[" + std::to_string(i) + "]";
        if (m.gamma < 20 * run.scenario.omega_L) events.push_back({w.t1, "measurement_weak", label});
        const auto *before = row_at(run.trajectory, w.t1), *after = row_at(run.trajectory, w.t2);
        if (before && after && std::abs(dot(w.direction, after->bloch) - dot(w.direction, before->bloch)) > 5e-3)
            events.push_back({w.t2, "measurement_contaminated", label});
    }
    std::stable_sort(events.begin(), events.end(), [](const Event &a, const Event &b) { return a.t < b.t; });
}

std::string run_id(const Scenario &s) { return hex64(scenario_hash(s)) + "-s" + std::to_string(s.seed); }

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::json vec_json(Vec3 v) { return {v.x, v.y, v.z}; }

}  // namespace

RunOutput run_scenario(const Scenario &scenario, std::optional<std::uint64_t> seed) {
    auto started = std::chrono::steady_clock::now();
    RunOutput run;
    run.scenario = scenario;
    if (seed) run.scenario.seed = *seed;
    const Scenario &s = run.scenario;
    run.inputs = prepare_run(s, s.seed);
    run.trajectory = integrate(bloch_to_density(s.initial_bloch), run.inputs.generators, {0, s.t_end}, s.integrator,
                               run.inputs.extra_samples);
    run.trajectory.run_id = run_id(s);
    flag_measurements(run);
    if (s.reference == Reference::ideal) run.reference = ideal_reference(s);
    if (s.reference == Reference::initial) run.reference = bloch_to_density(s.initial_bloch);
    if (run.reference) {
        run.grid = fidelity_on_larmor_grid(run.trajectory, *run.reference);
        run.final_fidelity = run.grid.empty() ? fidelity(run.trajectory.final_state, *run.reference)
                                              : run.grid.back().fidelity;
    }
    run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return run;
}

nlohmann::json manifest_json(const RunOutput &run) {
    const Scenario &s = run.scenario;
    nlohmann::json m;
    m["run_id"] = run.trajectory.run_id;
    m["scenario_hash"] = hex64(scenario_hash(s));
    m["schema_version"] = s.schema_version;
    m["library_version"] = QME_VERSION;
    m["seed"] = s.seed;
    m["prng"] = kPrngName;
    m["defaults"] = s.defaulted;
    nlohmann::json gates = nlohmann::json::array();
    for (const auto &g : run.inputs.schedule.gates)
        gates.push_back({{"kind", to_string(g.kind)},
                         {"t1", g.t1},
                         {"t2", g.t2},
                         {"bias_start", g.bias.t1_tilde},
                         {"bias_end", g.bias.t2_tilde},
                         {"clock", g.clock},
                         {"halt", g.bias.halt_duration()}});
    nlohmann::json noise = nlohmann::json::array();
    for (const auto &p : run.inputs.noise)
        noise.push_back({{"t1", p.t1}, {"t2", p.t2}, {"a", p.a}, {"b", p.b}, {"friction", p.friction}});
    nlohmann::json measurements = nlohmann::json::array();
    for (const auto &mc : s.measurements) {
        auto w = mc.window();
        measurements.push_back({{"t1", w.t1}, {"t2", w.t2}, {"r", w.r}, {"direction", vec_json(w.direction)}});
    }
    m["resolved_times"] = {{"T_L", run.inputs.schedule.T_L},
                           {"T_f", run.inputs.schedule.T_f},
                           {"t_end", s.t_end},
                           {"gates", gates},
                           {"measurements", measurements}};
    m["noise_pulses"] = noise;
    m["integrator"] = {{"base_step", s.integrator.resolved_base_step(s.omega_L)},
                       {"pulse_refinement", s.integrator.pulse_refinement},
                       {"validate_every", s.integrator.validate_every},
                       {"samples", s.integrator.samples},
                       {"steps", run.trajectory.steps}};
    m["beta2_suppressed_steps"] = run.trajectory.beta2_suppressed;
    m["beta3_suppressed_steps"] = run.trajectory.beta3_suppressed;
    if (run.reference) m["reference_bloch"] = vec_json(density_to_bloch(*run.reference));
    if (run.final_fidelity) m["final_fidelity"] = *run.final_fidelity;
    return m;
}

nlohmann::json events_json(const RunOutput &run) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto &e : run.trajectory.events) events.push_back({{"t", e.t}, {"kind", e.kind}, {"label", e.label}});
    nlohmann::json grid = nlohmann::json::array();
    for (const auto &g : run.grid)
        grid.push_back({{"t", g.t}, {"fidelity", g.fidelity}, {"entropy", g.entropy}, {"impurity", g.impurity}});
    nlohmann::json times = run.trajectory.larmor_grid;
    return {{"events", events}, {"larmor_grid", grid}, {"larmor_times", times}, {"manifest", manifest_json(run)}};
}

void write_run(const std::string &dir, const RunOutput &run) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    fs::path root(dir);
    write_timeseries((root / "timeseries.csv").string(), run.trajectory.rows);
    write_text(root / "events.json", events_json(run).dump(2) + "\n");
    write_text(root / "scenario.resolved.yaml", resolved_yaml(run.scenario));
    nlohmann::json timing = {{"run_id", run.trajectory.run_id}, {"wall_seconds", run.wall_seconds}};
    write_text(root / "timing.json", timing.dump(2) + "\n");
}

std::string format_sig(double v, int digits) {
    if (!std::isfinite(v)) return format_double(v);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string summary_line(const RunOutput &run) {
    const auto &rows = run.trajectory.rows;
    std::string out = "run " + run.trajectory.run_id;
    if (!rows.empty()) {
        const auto &last = rows.back();
        out += " t=" + format_sig(last.t) + " P=(" + format_sig(last.bloch.x) + ", " + format_sig(last.bloch.y) +
               ", " + format_sig(last.bloch.z) + ") S=" + format_sig(last.entropy);
    }
    if (run.final_fidelity) out += " F=" + format_sig(*run.final_fidelity);
    return out;
}

std::vector<SweepPoint> expand_sweep(const YAML::Node &base, const std::string &source, const std::string &path,
                                     const std::vector<std::string> &values) {
    if (values.empty()) throw ScenarioError(source, path, 0, 0, "empty value list");
    std::vector<SweepPoint> points;
    for (const auto &v : values) {
        YAML::Node copy = YAML::Clone(base);
        set_path(copy, path, v, source);
        points.push_back({v, parse_scenario(copy, source + " [" + path + "=" + v + "]")});
    }
    return points;
}

std::vector<RunOutput> run_sweep(const std::vector<SweepPoint> &points, const std::string &path,
                                 const std::string &dir, std::optional<std::uint64_t> seed, unsigned threads) {
    namespace fs = std::filesystem;
    std::vector<RunOutput> results(points.size());
    std::vector<std::exception_ptr> errors(points.size());
    std::atomic<size_t> next{0};
    auto dir_of = [&](size_t i) {
        char name[32];
        std::snprintf(name, sizeof name, "run_%03zu", i);
        return (fs::path(dir) / name).string();
    };
    auto worker = [&] {
        for (size_t i; (i = next++) < points.size();) {
            try {
                results[i] = run_scenario(points[i].scenario, seed);
                write_run(dir_of(i), results[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(points.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; k++) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
    for (const auto &e : errors)
        if (e) std::rethrow_exception(e);

    std::string table = "index,param,value,run_id,final_fidelity,final_entropy,Px,Py,Pz\n";
    for (size_t i = 0; i < points.size(); i++) {
        const auto &r = results[i];
        const auto &last = r.trajectory.rows.back();
        table += std::to_string(i) + "," + path + "," + points[i].value + "," + r.trajectory.run_id + "," +
                 format_double(r.final_fidelity.value_or(std::nan(""))) + "," + format_double(last.entropy) + "," +
                 format_double(last.bloch.x) + "," + format_double(last.bloch.y) + "," + format_double(last.bloch.z) +
                 "\n";
    }
    fs::create_directories(dir);
    write_text(fs::path(dir) / "sweep.csv", table);
    return results;
}

}  // namespace qme

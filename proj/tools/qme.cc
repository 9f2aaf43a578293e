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

// qme: command-line front end for the one-qubit master-equation simulator.
//
// Exit codes: 0 ok, 2 invalid input, 3 integration or oracle failure.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

#include "qme/runner.h"
#include "qme/timeseries.h"
#include "report.h"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kRuntime = 3;

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("qme");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    const char *level = std::getenv("QME_LOG_LEVEL");
    spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::info);
}

std::vector<double> parse_triple(const std::string &text) {
    std::vector<double> out;
    std::stringstream in(text);
    for (std::string cell; std::getline(in, cell, ',');) out.push_back(qme::parse_double(cell));
    if (out.size() != 3) throw std::invalid_argument("expected x,y,z");
    return out;
}

void log_defaults(const qme::Scenario &s) {
    for (const auto &field : s.defaulted) spdlog::debug("default applied: {}", field);
    if (!s.defaulted.empty()) spdlog::info("{} field(s) defaulted; see scenario.resolved.yaml", s.defaulted.size());
}

int cmd_run(const std::string &file, const std::string &out, std::optional<std::uint64_t> seed) {
    auto scenario = qme::load_scenario(file);
    log_defaults(scenario);
    auto run = qme::run_scenario(scenario, seed);
    for (const auto &e : run.trajectory.events)
        if (e.kind == "measurement_weak" || e.kind == "measurement_contaminated")
            spdlog::warn("{} at t = {}: {}", e.kind, qme::format_sig(e.t), e.label);
    qme::write_run(out, run);
    std::cout << qme::summary_line(run) << "\n";
    spdlog::info("wrote {} rows to {} in {} s", run.trajectory.rows.size(), out, qme::format_sig(run.wall_seconds));
    return kOk;
}

int cmd_sweep(const std::string &file, const std::string &param, const std::vector<std::string> &values,
              const std::string &out, std::optional<std::uint64_t> seed, unsigned threads) {
    auto base = qme::load_yaml(file);
    auto points = qme::expand_sweep(base, file, param, values);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    auto runs = qme::run_sweep(points, param, out, seed, threads);
    for (size_t i = 0; i < runs.size(); i++) std::cout << param << "=" << points[i].value << " " << qme::summary_line(runs[i]) << "\n";
    return kOk;
}

int cmd_oracle(const std::string &name, double gamma, double omega, const std::string &p0_text, double tmax,
               int samples) {
    qme::SteadyLindbladCase c{qme::parse_steady_kind(name), gamma, omega};
    auto p = parse_triple(p0_text);
    qme::Vec3 p0{p[0], p[1], p[2]};
    if (p0.norm() > 1 + 1e-9) throw std::invalid_argument("|p0| exceeds 1");
    if (!(gamma >= 0) || !(omega > 0) || !(tmax > 0)) throw std::invalid_argument("need gamma >= 0, omega > 0, tmax > 0");
    qme::steady_analytic(c, p0, 0);  // rejects sx/sy with gamma >= omega

    qme::GeneratorSet gens;
    gens.hamiltonian.omega_L = omega;
    gens.lindblads.push_back(qme::LindbladOp::from_matrix(qme::steady_operator(c.kind), gamma));
    qme::IntegratorConfig config;
    config.samples = samples;
    auto traj = qme::integrate(qme::bloch_to_density(p0), gens, {0, tmax}, config);
    double worst = 0;
    for (const auto &r : traj.rows) {
        auto exact = qme::steady_analytic(c, p0, r.t);
        worst = std::max({worst, std::abs(r.bloch.x - exact.x), std::abs(r.bloch.y - exact.y),
                          std::abs(r.bloch.z - exact.z)});
    }
    const auto &end = traj.rows.back();
    auto exact = qme::steady_analytic(c, p0, end.t);
    std::cout << "case " << qme::to_string(c.kind) << " samples " << traj.rows.size() << " max_error "
              << qme::format_sig(worst) << " P(" << qme::format_sig(end.t) << ")=(" << qme::format_sig(end.bloch.x)
              << ", " << qme::format_sig(end.bloch.y) << ", " << qme::format_sig(end.bloch.z) << ") closed_form=("
              << qme::format_sig(exact.x) << ", " << qme::format_sig(exact.y) << ", " << qme::format_sig(exact.z)
              << ")\n";
    return worst <= 1e-6 ? kOk : kRuntime;
}

int cmd_report(const std::string &dir) {
    for (const auto &path : qme::report::write_report(dir)) std::cout << path << "\n";
    return kOk;
}

int cmd_validate(const std::string &file) {
    auto s = qme::load_scenario(file);
    log_defaults(s);
    std::cout << "ok " << file << " hash " << qme::hex64(qme::scenario_hash(s)) << " t_end "
              << qme::format_sig(s.t_end) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char **argv) {
    setup_logging();
    CLI::App app{"qme: one-qubit master-equation simulator"};
    app.require_subcommand(1);

    std::string file, out, param, dir, case_name, p0 = "0,0,1";
    std::vector<std::string> values;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    double gamma = 0, omega = 0.2675, tmax = 200;
    int samples = 200;

    auto *run = app.add_subcommand("run", "Run a scenario");
    run->add_option("file", file, "Scenario file")->required();
    run->add_option("--out", out, "Output directory")->required();
    run->add_option("--seed", seed, "Override the scenario seed");

    auto *sweep = app.add_subcommand("sweep", "Run one scenario per parameter value");
    sweep->add_option("file", file, "Scenario file")->required();
    sweep->add_option("--param", param, "Dotted field path, e.g. noise.gamma")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
    sweep->add_option("--out", out, "Output directory")->required();
    sweep->add_option("--seed", seed, "Override the scenario seed");
    sweep->add_option("--threads", threads, "Worker threads (0 = hardware)");

    auto *oracle = app.add_subcommand("oracle", "Compare a steady-Lindblad run with its closed form");
    oracle->add_option("--case", case_name, "sx, sy, sz, s+ or s-")->required();
    oracle->add_option("--gamma", gamma, "Lindblad rate, GHz")->required();
    oracle->add_option("--omega", omega, "Larmor frequency, GHz");
    oracle->add_option("--p0", p0, "Initial Bloch vector x,y,z");
    oracle->add_option("--tmax", tmax, "End time, ns");
    oracle->add_option("--samples", samples, "Samples including endpoints");

    auto *report = app.add_subcommand("report", "Larmor-grid table and SVG charts for a run directory");
    report->add_option("dir", dir, "Run directory")->required();

    auto *validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("file", file, "Scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (*run) return cmd_run(file, out, seed);
        if (*sweep) return cmd_sweep(file, param, values, out, seed, threads);
        if (*oracle) return cmd_oracle(case_name, gamma, omega, p0, tmax, samples);
        if (*report) return cmd_report(dir);
        if (*validate) return cmd_validate(file);
    } catch (const qme::ScenarioError &e) {
        spdlog::error("{}", e.what());
        return kInvalid;
    } catch (const qme::IntegrationError &e) {
        spdlog::error("integration failed: {}", e.what());
        return kRuntime;
    } catch (const std::invalid_argument &e) {
        spdlog::error("{}", e.what());
        return kInvalid;
    } catch (const std::exception &e) {
        spdlog::error("{}", e.what());
        return *report ? kInvalid : kRuntime;
    }
    return kInvalid;
}

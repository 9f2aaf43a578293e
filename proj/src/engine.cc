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

#include "qme/engine.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qme {

double IntegratorConfig::resolved_base_step(double omega_L) const {
    if (base_step > 0) return base_step;
    return 2 * std::numbers::pi / omega_L / 2000;
}

void IntegratorConfig::validate() const {
    if (!(base_step >= 0) || !std::isfinite(base_step)) throw std::invalid_argument("base_step must be >= 0");
    if (pulse_refinement < 1) throw std::invalid_argument("pulse_refinement must be >= 1");
    if (validate_every < 1) throw std::invalid_argument("validate_every must be >= 1");
    if (samples < 2) throw std::invalid_argument("samples must be >= 2");
    if (!(tolerances.positivity >= 0)) throw std::invalid_argument("positivity tolerance must be >= 0");
}

namespace {

std::string positivity_message(double t, double min_eigenvalue) {
    std::ostringstream msg;
    msg << "eigenvalue " << min_eigenvalue << " below tolerance at t = " << t << " ns";
    return msg.str();
}

}  // namespace

PositivityViolation::PositivityViolation(double t, double min_eigenvalue)
    : IntegrationError(positivity_message(t, min_eigenvalue)), t(t), min_eigenvalue(min_eigenvalue) {}

namespace {

constexpr double kMergeGap = 1e-9;
constexpr double kMinStep = 1e-12;

struct Region {
    Interval span;
    double step;
};

struct Breakpoint {
    double t;
    bool sample;
};

struct Plan {
    std::vector<Breakpoint> points;
    std::vector<Region> regions;
    std::vector<double> grid;
    double base_step = 0;

    double step_at(double t) const {
        double h = base_step;
        for (const auto &r : regions)
            if (r.span.contains(t)) h = std::min(h, r.step);
        return h;
    }
};

double edge_scale(const Envelope &e) {
    return std::visit(
        [](const auto &p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, GaussianPulse> || std::is_same_v<T, SoftSquarePulse>)
                return p.tau;
            else if constexpr (std::is_same_v<T, SmoothStep>)
                return p.a;
            else
                return std::numeric_limits<double>::infinity();
        },
        e);
}

// Sorted merge that keeps existing points and drops near-duplicates of them.
void merge_into(std::vector<double> &kept, std::vector<double> extra) {
    std::sort(kept.begin(), kept.end());
    std::sort(extra.begin(), extra.end());
    std::vector<double> out;
    for (double t : extra) {
        auto it = std::lower_bound(kept.begin(), kept.end(), t);
        bool near = (it != kept.end() && *it - t <= kMergeGap) || (it != kept.begin() && t - *(it - 1) <= kMergeGap);
        if (!near && (out.empty() || t - out.back() > kMergeGap)) out.push_back(t);
    }
    kept.insert(kept.end(), out.begin(), out.end());
    std::sort(kept.begin(), kept.end());
}

Plan make_plan(const GeneratorSet &gens, Interval span, const IntegratorConfig &config,
               const std::vector<double> &extra_samples) {
    config.validate();
    if (!std::isfinite(span.begin) || !std::isfinite(span.end) || !(span.end > span.begin))
        throw std::invalid_argument("time span must be finite and increasing");
    Plan plan;
    plan.base_step = config.resolved_base_step(gens.hamiltonian.omega_L);
    double fine = plan.base_step / config.pulse_refinement;
    auto add_region = [&](Interval iv, double edge) {
        double h = std::min(fine, edge / 20);
        if (h < kMinStep) throw IntegrationError("step underflow in refinement");
        plan.regions.push_back({iv, h});
    };

    std::vector<double> exact;
    auto in_span = [&](double t) { return t >= span.begin && t <= span.end; };
    auto mark = [&](double t) {
        if (in_span(t)) exact.push_back(t);
    };
    mark(span.begin);
    mark(span.end);
    for (double t : extra_samples) mark(t);

    for (const auto &g : gens.hamiltonian.gates) {
        add_region(g.busy(), g.bias.tau);
        std::visit([&](const auto &p) { add_region(p.support(), edge_scale(p)); }, g.pulse);
        for (double t : {g.t1, g.t2, g.bias.t1_tilde, g.bias.t2_tilde}) mark(t);
    }
    for (const auto &b : gens.hamiltonian.halts) {
        add_region(b.support(), b.tau);
        mark(b.t1_tilde);
        mark(b.t2_tilde);
    }
    if (const auto &rot = gens.hamiltonian.axis_rotation) add_region(rot->step.support(), rot->step.a);
    for (const auto &l : gens.lindblads) {
        if (auto iv = support(l.envelope)) add_region(*iv, edge_scale(l.envelope));
        if (auto *sq = std::get_if<SoftSquarePulse>(&l.envelope)) {
            mark(sq->t1);
            mark(sq->t2);
        }
    }

    Schedule schedule{gens.hamiltonian.gates, 2 * std::numbers::pi / gens.hamiltonian.omega_L, 0};
    for (double t : schedule.larmor_grid(span.end))
        if (in_span(t)) plan.grid.push_back(t);
    merge_into(exact, plan.grid);

    std::vector<double> uniform;
    for (int k = 0; k < config.samples; k++)
        uniform.push_back(span.begin + (span.end - span.begin) * k / (config.samples - 1));
    uniform.back() = span.end;
    std::vector<double> samples = exact;
    // Dedupe the exact set itself, keeping first occurrences.
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end(),
                              [](double a, double b) { return b - a <= kMergeGap; }),
                  samples.end());
    merge_into(samples, uniform);

    std::vector<double> all = samples;
    std::vector<double> bounds;
    for (const auto &r : plan.regions)
        for (double t : {r.span.begin, r.span.end})
            if (in_span(t)) bounds.push_back(t);
    merge_into(all, bounds);
    for (double t : all) plan.points.push_back({t, std::binary_search(samples.begin(), samples.end(), t)});

    // Snap grid times onto the retained sample values.
    for (double &t : plan.grid) {
        auto it = std::lower_bound(samples.begin(), samples.end(), t - kMergeGap);
        if (it != samples.end() && std::abs(*it - t) <= kMergeGap) t = *it;
    }
    plan.grid.erase(std::unique(plan.grid.begin(), plan.grid.end()), plan.grid.end());
    return plan;
}

template <class Y, class F>
Y rk4_step(F &&f, double t, const Y &y, double h) {
    Y k1 = f(t, y);
    Y k2 = f(t + h / 2, y + (h / 2) * k1);
    Y k3 = f(t + h / 2, y + (h / 2) * k2);
    Y k4 = f(t + h, y + h * k3);
    return y + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Runs fn(state, t) at every sample after stepping through the plan.
template <class Y, class F, class OnSample, class AfterStep>
void march(const Plan &plan, Y y, F &&f, OnSample &&on_sample, AfterStep &&after_step) {
    if (plan.points.front().sample) on_sample(plan.points.front().t, y);
    for (size_t i = 1; i < plan.points.size(); i++) {
        double a = plan.points[i - 1].t, b = plan.points[i].t;
        double h_max = plan.step_at(0.5 * (a + b));
        long n = std::max(1L, static_cast<long>(std::ceil((b - a) / h_max - 1e-9)));
        double h = (b - a) / n;
        for (long k = 0; k < n; k++) {
            double t = a + k * h;
            y = rk4_step(f, t, y, k + 1 == n ? b - t : h);
            after_step(k + 1 == n ? b : a + (k + 1) * h, y);
        }
        if (plan.points[i].sample) on_sample(b, y);
    }
}

bool finite(const CMat2 &m) {
    for (const auto &v : m.e)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

void push_events(Trajectory &traj, const GeneratorSet &gens, Interval span) {
    auto add = [&](double t, const char *kind, const std::string &label) {
        if (t >= span.begin && t <= span.end) traj.events.push_back({t, kind, label});
    };
    for (size_t i = 0; i < gens.hamiltonian.gates.size(); i++) {
        const auto &g = gens.hamiltonian.gates[i];
        std::string label = "gate[" + std::to_string(i) + "] " + to_string(g.kind);
        add(g.bias.t1_tilde, "bias_start", label);
        add(g.t1, "gate_start", label);
        add(g.t2, "gate_end", label);
        add(g.bias.t2_tilde, "bias_end", label);
    }
    for (size_t i = 0; i < gens.lindblads.size(); i++) {
        const auto &l = gens.lindblads[i];
        if (auto *sq = std::get_if<SoftSquarePulse>(&l.envelope)) {
            std::string label = "lindblad[" + std::to_string(i) + "]";
            add(sq->t1, l.measurement ? "measurement_start" : "pulse_start", label);
            add(sq->t2, l.measurement ? "measurement_end" : "pulse_end", label);
        }
    }
}

}  // namespace

Trajectory integrate(const DensityMatrix &rho0, const GeneratorSet &gens, Interval t_span,
                     const IntegratorConfig &config, const std::vector<double> &extra_samples) {
    gens.validate();
    auto report = validate(rho0, 1e-9);
    if (!report.ok()) throw UnphysicalState("initial state is not a density matrix");
    Plan plan = make_plan(gens, t_span, config, extra_samples);

    Trajectory traj;
    traj.larmor_grid = plan.grid;
    push_events(traj, gens, t_span);
    double omega = gens.hamiltonian.omega_L;
    double tol = config.tolerances.positivity;
    bool first_b2 = true, first_b3 = true;
    TermStatus step_status;

    auto f = [&](double t, const CMat2 &m) {
        return rhs(DensityMatrix::unchecked(m), t, gens, &step_status);
    };
    auto check_positive = [&](double t, const CMat2 &m) {
        double low = eigh(m).values[1];
        if (low < -tol) throw PositivityViolation(t, low);
    };
    auto on_sample = [&](double t, const CMat2 &m) {
        check_positive(t, m);
        auto rho = DensityMatrix::unchecked(m);
        traj.final_state = rho;
        TermStatus ignored;
        CMat2 rho_dot = rhs(rho, t, gens, &ignored);
        traj.rows.push_back(observe(t, rho, hamiltonian_at(gens.hamiltonian, t),
                                    hamiltonian_dot_at(gens.hamiltonian, t), rho_dot, omega));
    };
    auto after_step = [&](double t, CMat2 &m) {
        m = hermitian_part(m);
        double tr = m.trace().real();
        if (!finite(m) || !(tr > 0)) {
            std::ostringstream msg;
            msg << "non-finite state at t = " << t << " ns";
            throw IntegrationError(msg.str());
        }
        m *= 1 / tr;
        traj.steps++;
        if (traj.steps % config.validate_every == 0) check_positive(t, m);
        if (step_status.beta2_suppressed) {
            traj.beta2_suppressed++;
            if (first_b2) traj.events.push_back({t, "sentinel", "beta2 undefined; beta part suppressed"});
            first_b2 = false;
        }
        if (step_status.beta3_suppressed) {
            traj.beta3_suppressed++;
            if (first_b3) traj.events.push_back({t, "sentinel", "beta3 undefined; bath term suppressed"});
            first_b3 = false;
        }
        step_status = {};
    };
    CMat2 state = rho0.matrix();
    march(plan, state, f, on_sample, [&](double t, CMat2 &m) { after_step(t, m); });
    std::stable_sort(traj.events.begin(), traj.events.end(),
                     [](const Event &a, const Event &b) { return a.t < b.t; });
    return traj;
}

std::vector<BlochSample> integrate_bloch_oracle(BlochVector p0, double omega_L, Vec3 axis,
                                                const std::vector<LindbladOp> &lindblads, Interval t_span,
                                                const IntegratorConfig &config) {
    for (const auto &l : lindblads)
        if (!std::holds_alternative<ConstantEnvelope>(l.envelope))
            throw std::invalid_argument("the Bloch oracle takes constant Lindblad operators only");
    GeneratorSet shell;
    shell.hamiltonian.omega_L = omega_L;
    shell.lindblads = lindblads;
    Plan plan = make_plan(shell, t_span, config, {});

    auto f = [&](double, const Vec3 &p) {
        Vec3 d = -omega_L * cross(axis, p);
        for (const auto &l : lindblads) {
            double scale = std::get<ConstantEnvelope>(l.envelope).value;
            d = d + (2 * l.gamma * scale * scale) * delta_P(l.alpha0, l.alpha, p);
        }
        return d;
    };
    std::vector<BlochSample> out;
    march(plan, p0, f, [&](double t, const Vec3 &p) { out.push_back({t, p}); }, [](double, Vec3 &) {});
    return out;
}

std::vector<BlochSample> integrate_bloch_oracle(BlochVector p0, const GeneratorSet &gens, Interval t_span,
                                                const IntegratorConfig &config) {
    if (gens.beretta || gens.bath) throw std::invalid_argument("the Bloch oracle has no Beretta or bath terms");
    if (!gens.hamiltonian.gates.empty() || !gens.hamiltonian.halts.empty() || gens.hamiltonian.axis_rotation)
        throw std::invalid_argument("the Bloch oracle takes free precession only");
    return integrate_bloch_oracle(p0, gens.hamiltonian.omega_L, {0, 0, 1}, gens.lindblads, t_span, config);
}

SteadyKind parse_steady_kind(const std::string &name) {
    if (name == "sx") return SteadyKind::sx;
    if (name == "sy") return SteadyKind::sy;
    if (name == "sz") return SteadyKind::sz;
    if (name == "s+" || name == "s_plus") return SteadyKind::s_plus;
    if (name == "s-" || name == "s_minus") return SteadyKind::s_minus;
    throw std::invalid_argument("unknown steady case '" + name + "' (expected sx, sy, sz, s+, s-)");
}

std::string to_string(SteadyKind k) {
    switch (k) {
        case SteadyKind::sx:
            return "sx";
        case SteadyKind::sy:
            return "sy";
        case SteadyKind::sz:
            return "sz";
        case SteadyKind::s_plus:
            return "s+";
        case SteadyKind::s_minus:
            break;
    }
    return "s-";
}

CMat2 steady_operator(SteadyKind k) {
    const cplx i(0, 1);
    switch (k) {
        case SteadyKind::sx:
            return pauli::sigma_x;
        case SteadyKind::sy:
            return pauli::sigma_y;
        case SteadyKind::sz:
            return pauli::sigma_z;
        case SteadyKind::s_plus:
            return 0.5 * (pauli::sigma_x + i * pauli::sigma_y);
        case SteadyKind::s_minus:
            break;
    }
    return 0.5 * (pauli::sigma_x - i * pauli::sigma_y);
}

BlochVector steady_analytic(const SteadyLindbladCase &c, BlochVector p0, double t) {
    double g = c.gamma, wl = c.omega_L;
    if (c.kind == SteadyKind::sx || c.kind == SteadyKind::sy) {
        if (!(g < wl)) throw std::invalid_argument("sx/sy cases need Gamma < omega_L");
        double w = std::sqrt(wl * wl - g * g);
        double decay = std::exp(-g * t), cs = std::cos(w * t), sn = std::sin(w * t);
        double sign = c.kind == SteadyKind::sx ? 1 : -1;
        return {decay * (p0.x * cs + (sign * p0.x * g / w + p0.y * wl / w) * sn),
                decay * (p0.y * cs - (sign * p0.y * g / w + p0.x * wl / w) * sn), std::exp(-2 * g * t) * p0.z};
    }
    double cs = std::cos(wl * t), sn = std::sin(wl * t);
    if (c.kind == SteadyKind::sz) {
        double decay = std::exp(-2 * g * t);
        return {decay * (p0.x * cs + p0.y * sn), decay * (p0.y * cs - p0.x * sn), p0.z};
    }
    double target = c.kind == SteadyKind::s_plus ? 1 : -1;
    double decay = std::exp(-g * t / 2);
    return {decay * (p0.x * cs + p0.y * sn), decay * (p0.y * cs - p0.x * sn),
            target + std::exp(-g * t) * (p0.z - target)};
}

BiasPulse measurement_halt(const MeasurementWindow &window, double margin) {
    return {window.t1 - margin * window.r, window.t2 + margin * window.r, window.r};
}

MeasurementResult measure(const DensityMatrix &rho_in, const MeasurementWindow &window, double gamma,
                          double omega_L, const IntegratorConfig &config, bool halt_precession) {
    if (std::abs(window.direction.norm() - 1) > 1e-12) throw std::invalid_argument("measurement axis must be unit");
    GeneratorSet gens;
    gens.hamiltonian.omega_L = omega_L;
    // Fully on before the span opens: the input state is the state at t1.
    if (halt_precession) gens.hamiltonian.halts.push_back(measurement_halt(window, 16));
    gens.lindblads.push_back(LindbladOp::from_matrix(sigma_dot(window.direction), gamma, window.envelope()));
    gens.lindblads.back().measurement = true;
    Interval span{window.t1 - 8 * window.r, window.t2};
    MeasurementResult result;
    result.segment = integrate(rho_in, gens, span, config, {window.t1, window.t2});
    result.final_state = result.segment.final_state;
    double before = 0;
    for (const auto &row : result.segment.rows)
        if (std::abs(row.t - window.t1) <= kMergeGap) before = dot(window.direction, row.bloch);
    double after = dot(window.direction, result.segment.rows.back().bloch);
    result.drift = after - before;
    result.contaminated = std::abs(result.drift) > 5e-3;
    result.weak = gamma < 20 * omega_L;
    return result;
}

DensityMatrix projective_collapse(const DensityMatrix &rho, Vec3 m_hat) {
    if (std::abs(m_hat.norm() - 1) > 1e-12) throw std::invalid_argument("measurement axis must be unit");
    BlochVector p = density_to_bloch(rho);
    return bloch_to_density(dot(m_hat, p) * m_hat);
}

std::vector<GridRow> fidelity_on_larmor_grid(const Trajectory &traj, const DensityMatrix &reference) {
    std::vector<GridRow> out;
    auto by_time = [](const ObservableRow &r, double t) { return r.t < t; };
    for (double t : traj.larmor_grid) {
        auto it = std::lower_bound(traj.rows.begin(), traj.rows.end(), t - kMergeGap, by_time);
        if (it == traj.rows.end() || std::abs(it->t - t) > kMergeGap) continue;
        auto rho = bloch_to_density(it->bloch);
        out.push_back({it->t, fidelity(rho, reference), it->entropy, 1 - it->purity});
    }
    return out;
}

}  // namespace qme

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

#include "qme/pulses.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qme {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;

}  // namespace

double GaussianPulse::eval(double t) const {
    double x = (t - t0) / tau;
    return std::numbers::pi / 2 * kInvSqrtPi / tau * std::exp(-x * x);
}

double GaussianPulse::derivative(double t) const { return -2 * (t - t0) / (tau * tau) * eval(t); }

Interval GaussianPulse::support() const { return {t0 - 8 * tau, t0 + 8 * tau}; }

double SoftSquarePulse::scale() const {
    double width = t2 - t1;
    switch (normalization) {
        case Normalization::gate:
            return std::numbers::pi / 2 / width;
        case Normalization::unit_area:
            return 1 / width;
        case Normalization::unit_peak:
            break;
    }
    return 1 / std::erf(width / (2 * tau));
}

double SoftSquarePulse::eval(double t) const {
    return scale() * 0.5 * (std::erf((t - t1) / tau) - std::erf((t - t2) / tau));
}

double SoftSquarePulse::derivative(double t) const {
    double a = (t - t1) / tau, b = (t - t2) / tau;
    return scale() * kInvSqrtPi / tau * (std::exp(-a * a) - std::exp(-b * b));
}

Interval SoftSquarePulse::support() const { return {t1 - 8 * tau, t2 + 8 * tau}; }

double SoftSquarePulse::area() const { return scale() * (t2 - t1); }

double SmoothStep::eval(double t) const { return 0.5 * (1 + std::erf((t - t0) / a)); }

double SmoothStep::derivative(double t) const {
    double x = (t - t0) / a;
    return kInvSqrtPi / a * std::exp(-x * x);
}

Interval SmoothStep::support() const { return {t0 - 8 * a, t0 + 8 * a}; }

double eval(const Envelope &e, double t) {
    return std::visit(overloaded{[](const ConstantEnvelope &c) { return c.value; },
                                 [t](const auto &p) { return p.eval(t); }},
                      e);
}

double eval_derivative(const Envelope &e, double t) {
    return std::visit(overloaded{[](const ConstantEnvelope &) { return 0.0; },
                                 [t](const auto &p) { return p.derivative(t); }},
                      e);
}

std::optional<Interval> support(const Envelope &e) {
    return std::visit(overloaded{[](const ConstantEnvelope &) -> std::optional<Interval> { return std::nullopt; },
                                 [](const auto &p) -> std::optional<Interval> { return p.support(); }},
                      e);
}

NormalizationCheck check_normalization(const Envelope &e) {
    using boost::math::quadrature::gauss_kronrod;
    auto integrate = [](auto f, Interval iv) {
        return gauss_kronrod<double, 61>::integrate(f, iv.begin, iv.end, 20, 1e-13);
    };
    NormalizationCheck check;
    std::visit(overloaded{
                   [&](const ConstantEnvelope &) { check.integral = std::numeric_limits<double>::infinity(); },
                   [&](const GaussianPulse &p) {
                       check.integral = integrate([&](double t) { return p.eval(t); }, p.support());
                       check.expected = std::numbers::pi / 2;
                   },
                   [&](const SoftSquarePulse &p) {
                       check.integral = integrate([&](double t) { return p.eval(t); }, p.support());
                       if (p.normalization == Normalization::gate) check.expected = std::numbers::pi / 2;
                       if (p.normalization == Normalization::unit_area) check.expected = 1.0;
                   },
                   // The step's pulse is its derivative.
                   [&](const SmoothStep &s) {
                       check.integral = integrate([&](double t) { return s.derivative(t); }, s.support());
                       check.expected = 1.0;
                   },
               },
               e);
    if (check.expected) check.ok = std::abs(check.integral - *check.expected) <= 1e-6;
    return check;
}

SoftSquarePulse MeasurementWindow::envelope() const { return {t1, t2, r, Normalization::unit_peak}; }

MeasurementWindow MeasurementWindow::for_rate(double start, double gamma, Vec3 direction) {
    if (!(gamma > 0)) throw std::invalid_argument("measurement rate must be positive");
    double len = direction.norm();
    if (!(len > 0)) throw std::invalid_argument("measurement direction must be nonzero");
    double tau_m = std::numbers::pi / gamma;
    return {start, start + tau_m, tau_m / 100, (1 / len) * direction};
}

Vec3 AxisRotation::axis(double t) const {
    double s = step.eval(t);
    return (1 - s) * from + s * to;
}

Vec3 AxisRotation::axis_derivative(double t) const { return step.derivative(t) * (to - from); }

std::string to_string(GateKind k) {
    switch (k) {
        case GateKind::not_gate:
            return "NOT";
        case GateKind::hadamard:
            return "H";
        case GateKind::custom:
            break;
    }
    return "custom";
}

std::string to_string(PulseShape s) { return s == PulseShape::gaussian ? "gaussian" : "soft_square"; }

CMat2 gate_operator(GateKind k) {
    switch (k) {
        case GateKind::not_gate:
            return pauli::sigma_x;
        case GateKind::hadamard:
            return (1 / std::numbers::sqrt2) * (pauli::sigma_x + pauli::sigma_z);
        case GateKind::custom:
            break;
    }
    throw std::invalid_argument("custom gates carry their own operator");
}

double GateEvent::theta(double t) const {
    return std::visit([t](const auto &p) { return p.eval(t); }, pulse);
}

double GateEvent::theta_derivative(double t) const {
    return std::visit([t](const auto &p) { return p.derivative(t); }, pulse);
}

double Schedule::halted_before(double t) const {
    double total = 0;
    for (const auto &g : gates)
        if (g.center() < t) total += g.bias.halt_duration();
    return total;
}

std::vector<double> Schedule::larmor_grid(double t_end) const {
    std::vector<double> grid;
    if (!(T_L > 0)) return grid;
    for (long k = 0;; k++) {
        double clock = k * T_L;
        double halted = 0;
        bool on_gate = false;
        for (const auto &g : gates) {
            if (std::abs(clock - g.clock) <= 1e-9 * T_L) {
                // The gate acts at this grid point: report before and after.
                if (g.t1 <= t_end) grid.push_back(g.t1);
                if (g.t2 <= t_end) grid.push_back(g.t2);
                on_gate = true;
                break;
            }
            if (g.clock < clock) halted += g.bias.halt_duration();
        }
        if (on_gate) continue;
        double t = clock + halted;
        if (t > t_end + 1e-9) break;
        bool inside = false;
        for (const auto &g : gates) inside = inside || g.busy().contains(t);
        if (!inside) grid.push_back(t);
    }
    return grid;
}

Schedule build_schedule(const std::vector<GateSpec> &specs, const ScheduleOptions &options) {
    if (!(options.omega_L > 0)) throw std::invalid_argument("omega_L must be positive");
    if (!(options.bias_edge > 0)) throw std::invalid_argument("bias edge must be positive");
    if (options.extra_periods < 0) throw std::invalid_argument("extra periods must be >= 0");
    Schedule s;
    s.T_L = 2 * std::numbers::pi / options.omega_L;
    double clock = 0, halted = 0;
    for (size_t i = 0; i < specs.size(); i++) {
        const auto &spec = specs[i];
        if (spec.delay_periods < 1) throw std::invalid_argument("gate delay must be at least one Larmor period");
        if (!(spec.width > 0)) throw std::invalid_argument("gate width must be positive");
        clock += spec.delay_periods * s.T_L;

        double tau_b = options.bias_edge;
        BiasPulse probe{0, spec.width + 8 * tau_b, tau_b};
        double halt = probe.halt_duration();
        double center = clock + halted + halt / 2;

        GateEvent g;
        g.kind = spec.kind;
        g.omega = spec.kind == GateKind::custom ? spec.omega : gate_operator(spec.kind);
        if (hermiticity_defect(g.omega) > 1e-12) throw std::invalid_argument("gate operator must be Hermitian");
        g.t1 = center - spec.width / 2;
        g.t2 = center + spec.width / 2;
        g.clock = clock;
        g.bias = {g.t1 - 4 * tau_b, g.t2 + 4 * tau_b, tau_b};
        if (spec.shape == PulseShape::gaussian)
            g.pulse = GaussianPulse{center, spec.width / 8};
        else
            g.pulse = SoftSquarePulse{center - spec.width / 4, center + spec.width / 4, spec.width / 32,
                                      Normalization::gate};
        if (!s.gates.empty() && s.gates.back().busy().end >= g.busy().begin) {
            std::ostringstream msg;
            msg << "gate " << i << " overlaps gate " << i - 1;
            throw std::invalid_argument(msg.str());
        }
        s.gates.push_back(g);
        halted += halt;
    }
    // Extra periods count from the bias end, where the precession clock
    // resumes; t2 itself is only on the grid as the post-gate point.
    if (s.gates.empty())
        s.T_f = options.extra_periods * s.T_L;
    else if (options.extra_periods == 0)
        s.T_f = s.gates.back().t2;
    else
        s.T_f = s.gates.back().bias.t2_tilde + options.extra_periods * s.T_L;
    return s;
}

Schedule build_schedule(const std::vector<GateKind> &kinds, int n_D, double omega_L, double width) {
    std::vector<GateSpec> specs;
    for (auto k : kinds) specs.push_back({k, {}, n_D, width, PulseShape::gaussian});
    return build_schedule(specs, {omega_L, 0.005, 0});
}

}  // namespace qme

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

#ifndef QME_PULSES_H
#define QME_PULSES_H

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qme/linalg.h"

namespace qme {

/// Closed interval in ns.
struct Interval {
    double begin = 0, end = 0;
    bool contains(double t) const { return t >= begin && t <= end; }
};

/// Gate pulse (√π/2τ)·exp(−((t−t0)/τ)²); area π/2.
struct GaussianPulse {
    double t0 = 0;
    double tau = 1;

    double eval(double t) const;
    double derivative(double t) const;
    /// ±8τ around the centre.
    Interval support() const;
};

enum class Normalization { gate, unit_peak, unit_area };

/// N·½[erf((t−t1)/τ) − erf((t−t2)/τ)].
struct SoftSquarePulse {
    double t1 = 0, t2 = 1;
    double tau = 0.01;
    Normalization normalization = Normalization::unit_peak;

    double scale() const;
    double eval(double t) const;
    double derivative(double t) const;
    /// [t1 − 8τ, t2 + 8τ].
    Interval support() const;
    /// Exact integral of the envelope.
    double area() const;
};

/// η(t) = (1 + erf((t−t0)/a))/2.
struct SmoothStep {
    double a = 1;
    double t0 = 0;

    double eval(double t) const;
    double derivative(double t) const;
    Interval support() const;
};

/// Always on.
struct ConstantEnvelope {
    double value = 1;
};

using Envelope = std::variant<ConstantEnvelope, GaussianPulse, SoftSquarePulse, SmoothStep>;

double eval(const Envelope &e, double t);
double eval_derivative(const Envelope &e, double t);
/// Empty for constant envelopes.
std::optional<Interval> support(const Envelope &e);

struct NormalizationCheck {
    double integral = 0;
    /// Set for gate pulses (π/2) and unit-area pulses (1).
    std::optional<double> expected;
    bool ok = true;
};

/// Adaptive quadrature of the envelope over its support.
/// Flags deviations above 1e-6 from the expected area.
NormalizationCheck check_normalization(const Envelope &e);

/// Peak-normalized bias pulse cancelling the level splitting during a gate.
struct BiasPulse {
    double t1_tilde = 0, t2_tilde = 0;
    double tau = 0.005;

    SoftSquarePulse shape() const { return {t1_tilde, t2_tilde, tau, Normalization::unit_peak}; }
    double eval(double t) const { return shape().eval(t); }
    double derivative(double t) const { return shape().derivative(t); }
    Interval support() const { return shape().support(); }
    /// ∫θ_B dt: the precession time lost to the gate.
    double halt_duration() const { return shape().area(); }
};

/// Strong Lindblad window of duration π/Γ along `direction`.
struct MeasurementWindow {
    double t1 = 0, t2 = 0;
    double r = 0;
    Vec3 direction{0, 0, 1};

    /// Raw soft square: ≈1 inside, area t2 − t1.
    SoftSquarePulse envelope() const;
    Interval support() const { return envelope().support(); }

    /// τ_m = π/Γ, r = τ_m/100.
    static MeasurementWindow for_rate(double start, double gamma, Vec3 direction);
};

/// Rotation of the precession axis from `from` to `to` around step.t0.
struct AxisRotation {
    SmoothStep step;
    Vec3 from{0, 0, 1};
    Vec3 to{1, 0, 0};

    Vec3 axis(double t) const;
    Vec3 axis_derivative(double t) const;
};

enum class GateKind { not_gate, hadamard, custom };
enum class PulseShape { gaussian, soft_square };

std::string to_string(GateKind k);
std::string to_string(PulseShape s);

/// Ω for the named gates. Custom gates carry their own.
CMat2 gate_operator(GateKind k);

/// One scheduled gate: pulse ħθ_G(t)Ω under a bias pulse.
struct GateEvent {
    GateKind kind = GateKind::not_gate;
    CMat2 omega;
    std::variant<GaussianPulse, SoftSquarePulse> pulse;
    BiasPulse bias;
    /// Gate window (pulse support used for scheduling).
    double t1 = 0, t2 = 0;
    /// Precession-clock time at which the gate acts (multiple of T_L).
    double clock = 0;

    double theta(double t) const;
    double theta_derivative(double t) const;
    double center() const { return 0.5 * (t1 + t2); }
    /// Region needing fine steps: the bias support.
    Interval busy() const { return bias.support(); }
};

struct GateSpec {
    GateKind kind = GateKind::not_gate;
    /// Used when kind == custom; Hermitian.
    CMat2 omega;
    /// Larmor periods since the previous gate (or since t = 0).
    int delay_periods = 2;
    /// Gate window width, ns.
    double width = 0.47;
    PulseShape shape = PulseShape::gaussian;
};

struct ScheduleOptions {
    double omega_L = 0.2675;
    double bias_edge = 0.005;
    /// Extra Larmor periods appended after the last gate.
    int extra_periods = 0;
};

struct Schedule {
    std::vector<GateEvent> gates;
    double T_L = 0;
    /// End of the last gate window, or extra periods past its bias end.
    double T_f = 0;

    /// Σ halt durations of gates centred before t.
    double halted_before(double t) const;
    /// Real times at which the precession clock equals k·T_L, up to t_end.
    std::vector<double> larmor_grid(double t_end) const;
};

/// Lays gates on the Larmor grid. Throws std::invalid_argument on bad input
/// or overlapping windows.
Schedule build_schedule(const std::vector<GateSpec> &gates, const ScheduleOptions &options);
Schedule build_schedule(const std::vector<GateKind> &kinds, int n_D, double omega_L, double width = 0.47);

}  // namespace qme

#endif

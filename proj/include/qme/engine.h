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

#ifndef QME_ENGINE_H
#define QME_ENGINE_H

#include <stdexcept>
#include <string>
#include <vector>

#include "qme/generators.h"

namespace qme {

struct ToleranceProfile {
    double hermiticity = 1e-12;
    double trace = 1e-12;
    /// Most negative eigenvalue tolerated before aborting.
    double positivity = 1e-9;
};

struct IntegratorConfig {
    /// ns; 0 selects T_L/2000.
    double base_step = 0;
    /// Step divisor inside pulse supports.
    int pulse_refinement = 50;
    /// Positivity check cadence, in steps.
    int validate_every = 100;
    /// Uniform samples per run, endpoints included.
    int samples = 500;
    ToleranceProfile tolerances;

    double resolved_base_step(double omega_L) const;
    /// Throws std::invalid_argument on nonsense values.
    void validate() const;
};

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PositivityViolation : IntegrationError {
    PositivityViolation(double t, double min_eigenvalue);
    double t;
    double min_eigenvalue;
};

/// Marker attached to a trajectory.
struct Event {
    double t = 0;
    std::string kind;
    std::string label;
};

struct Trajectory {
    std::vector<ObservableRow> rows;
    std::vector<Event> events;
    /// Sample times at which the precession clock sits on k·T_L.
    std::vector<double> larmor_grid;
    std::string run_id;
    DensityMatrix final_state;
    /// Steps in which a β part was dropped.
    size_t beta2_suppressed = 0;
    size_t beta3_suppressed = 0;
    size_t steps = 0;
};

/// Classic RK4 on dρ/dt = rhs with symmetrize-and-renormalize hygiene.
/// `extra_samples` are added to the uniform samples and the Larmor grid.
Trajectory integrate(const DensityMatrix &rho0, const GeneratorSet &gens, Interval t_span,
                     const IntegratorConfig &config = {}, const std::vector<double> &extra_samples = {});

struct BlochSample {
    double t = 0;
    BlochVector p;
};

/// Independent 3-vector integration of dP/dt = −ω ĥ×P + Σ 2Γ δ_P.
/// Samples at the same times integrate() uses for the same span and config.
std::vector<BlochSample> integrate_bloch_oracle(BlochVector p0, double omega_L, Vec3 axis,
                                                const std::vector<LindbladOp> &lindblads, Interval t_span,
                                                const IntegratorConfig &config = {});
/// Same, taking a generator set; rejects anything beyond precession plus constant Lindblads.
std::vector<BlochSample> integrate_bloch_oracle(BlochVector p0, const GeneratorSet &gens, Interval t_span,
                                                const IntegratorConfig &config = {});

enum class SteadyKind { sx, sy, sz, s_plus, s_minus };

struct SteadyLindbladCase {
    SteadyKind kind = SteadyKind::sz;
    double gamma = 0;
    double omega_L = 0.2675;
};

SteadyKind parse_steady_kind(const std::string &name);
std::string to_string(SteadyKind k);
/// σx, σy, σz, or the ladder operators (σx ± iσy)/2 for the raising/lowering cases.
CMat2 steady_operator(SteadyKind k);
/// Closed-form Bloch vector at t. Throws std::invalid_argument for sx/sy with Γ ≥ ω_L.
BlochVector steady_analytic(const SteadyLindbladCase &c, BlochVector p0, double t);

struct MeasurementResult {
    Trajectory segment;
    DensityMatrix final_state;
    /// m̂·P moved by more than 5e-3 across the window.
    bool contaminated = false;
    double drift = 0;
    /// Γ < 20·ω_L.
    bool weak = false;
};

/// Bias that holds the levels degenerate from margin·r before the window to
/// margin·r after it. Inside a run a wide margin would stop the clock early
/// and shift the phase the window sees.
BiasPulse measurement_halt(const MeasurementWindow &window, double margin = 4);

/// Runs a Lindblad measurement window starting from rho_in at t1 − 8r.
/// With halt_precession the levels are held degenerate so the state does not
/// precess while it collapses; otherwise free precession continues underneath.
MeasurementResult measure(const DensityMatrix &rho_in, const MeasurementWindow &window, double gamma,
                          double omega_L, const IntegratorConfig &config = {}, bool halt_precession = true);

/// P⃗ → (m̂·P⃗)m̂. Throws std::invalid_argument unless ‖m̂‖ = 1 within 1e-12.
DensityMatrix projective_collapse(const DensityMatrix &rho, Vec3 m_hat);

struct GridRow {
    double t = 0;
    double fidelity = 0;
    double entropy = 0;
    double impurity = 0;
};

/// F(ρ(t_k), ρ_ref) on the trajectory's Larmor grid.
std::vector<GridRow> fidelity_on_larmor_grid(const Trajectory &traj, const DensityMatrix &reference);

}  // namespace qme

#endif

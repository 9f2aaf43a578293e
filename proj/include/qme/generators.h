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

#ifndef QME_GENERATORS_H
#define QME_GENERATORS_H

#include <optional>
#include <vector>

#include "qme/observables.h"
#include "qme/pulses.h"
#include "qme/state.h"

namespace qme {

struct HamiltonianSpec {
    double omega_L = 0.2675;
    std::vector<GateEvent> gates;
    std::optional<AxisRotation> axis_rotation;
    /// Bias pulses with no gate attached; they pause precession.
    std::vector<BiasPulse> halts;

    /// Unit precession axis ĥ(t); ẑ unless rotated.
    Vec3 axis(double t) const;
};

/// H(t) = −(ħω_L/2)(1−θ_B)σ·ĥ + Σ ħθ_G Ω, θ_B summed over gate biases and halts.
CMat2 hamiltonian_at(const HamiltonianSpec &spec, double t);
/// Analytic time derivative of H(t).
CMat2 hamiltonian_dot_at(const HamiltonianSpec &spec, double t);

/// L = α0·σ0 + α⃗·σ⃗ switched by an envelope; the dissipator scales as Γ·θ(t)².
struct LindbladOp {
    cplx alpha0 = 0;
    std::array<cplx, 3> alpha{};
    Envelope envelope = ConstantEnvelope{};
    double gamma = 0;
    /// Marks a measurement window rather than noise.
    bool measurement = false;

    static LindbladOp from_matrix(const CMat2 &l, double gamma, Envelope envelope = ConstantEnvelope{});
    CMat2 matrix() const;
    Vec3 real_vec() const { return {alpha[0].real(), alpha[1].real(), alpha[2].real()}; }
    Vec3 imag_vec() const { return {alpha[0].imag(), alpha[1].imag(), alpha[2].imag()}; }
    double rate_at(double t) const;
};

struct BerettaSpec {
    double gamma2 = 0;
};

enum class BathKind { korsch, beretta };

struct BathSpec {
    double gamma3 = 0;
    BathKind kind = BathKind::korsch;
    /// T for Korsch, T_Q for the Beretta bath. Kelvin.
    double temperature = 1;
};

struct GeneratorSet {
    HamiltonianSpec hamiltonian;
    std::vector<LindbladOp> lindblads;
    std::optional<BerettaSpec> beretta;
    std::optional<BathSpec> bath;
    /// Merge Beretta and bath terms into one γ₂₃/β₂₃ term.
    bool combine_23 = false;
    /// Allows negative Γ.
    bool feedback = false;

    /// Throws std::invalid_argument on out-of-range strengths.
    void validate() const;
};

/// Γ{LρL† − ½{L†L, ρ}}.
CMat2 lindblad_term(const CMat2 &l, const DensityMatrix &rho, double gamma = 1);

/// Energy/entropy moments with S̃ = −ln ρ (clamped).
struct Moments {
    double mean_energy = 0;
    double mean_entropy = 0;
    double var_energy = 0;
    double cov_energy_entropy = 0;
    double var_entropy = 0;
    /// |h⃗|² for H = h0 + h⃗·σ; sets the degeneracy scale.
    double energy_scale2 = 0;
};

Moments moments(const DensityMatrix &rho, const CMat2 &h, double eps = kLogClamp);

/// Relative variance threshold below which β is undefined.
inline constexpr double kDegenerateVariance = 1e-18;

/// ⟨ΔEΔS̃⟩/⟨ΔEΔE⟩, or nullopt on degenerate variance.
std::optional<double> beta2(const DensityMatrix &rho, const CMat2 &h);
/// Korsch: 1/(k_B T). Beretta bath: state dependent, nullopt on a vanishing denominator.
std::optional<double> beta3(const DensityMatrix &rho, const CMat2 &h, const BathSpec &bath);

/// Which β parts were dropped during an evaluation.
struct TermStatus {
    bool beta2_suppressed = false;
    bool beta3_suppressed = false;
};

/// γ[ρ(S̃−⟨S̃⟩) − β(½{ρ,H} − ρ⟨H⟩)].
CMat2 relaxation_term(const DensityMatrix &rho, const CMat2 &h, double gamma, double beta);

CMat2 beretta_term(const DensityMatrix &rho, const CMat2 &h, double gamma2, TermStatus *status = nullptr);
CMat2 bath_term(const DensityMatrix &rho, const CMat2 &h, const BathSpec &bath, TermStatus *status = nullptr);
/// γ₂₃ = γ₂+γ₃ with β₂₃ = (γ₂β₂ + γ₃β₃)/γ₂₃.
CMat2 combined_23(const DensityMatrix &rho, const CMat2 &h, double gamma2, double gamma3, double beta2,
                  double beta3);

/// Full right-hand side dρ/dt at time t.
CMat2 rhs(const DensityMatrix &rho, double t, const GeneratorSet &gens, TermStatus *status = nullptr);

/// Bloch image of the dissipator per unit 2Γ.
Vec3 delta_P(cplx alpha0, const std::array<cplx, 3> &alpha, BlochVector p);

/// dλ/dt for (λ1, λ2) descending under Γ{LρL† − ½{L†L, ρ}}.
std::pair<double, double> eigenvalue_flow(const DensityMatrix &rho, const CMat2 &l, double gamma = 1);

}  // namespace qme

#endif

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

#ifndef QME_OBSERVABLES_H
#define QME_OBSERVABLES_H

#include <limits>

#include "qme/state.h"

namespace qme {

/// μeV·ns
inline constexpr double kHbar = 0.6582;
/// μeV/K
inline constexpr double kBoltzmann = 86.17;

/// Temperatures are diagnostics; they carry a tag instead of throwing.
class Temperature {
   public:
    enum class Kind { finite, infinite, undefined };

    static Temperature kelvin(double t) { return {Kind::finite, t}; }
    static Temperature infinite(bool positive = true) {
        return {Kind::infinite, positive ? std::numeric_limits<double>::infinity()
                                         : -std::numeric_limits<double>::infinity()};
    }
    static Temperature undefined() { return {Kind::undefined, std::numeric_limits<double>::quiet_NaN()}; }

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::finite; }
    /// Kelvin, ±inf or NaN according to the tag.
    double value() const { return value_; }

   private:
    Temperature(Kind k, double v) : kind_(k), value_(v) {}
    Kind kind_;
    double value_;
};

double purity(const DensityMatrix &rho);
/// Von Neumann entropy in bits, with clamped logs.
double entropy_base2(const DensityMatrix &rho, double eps = kLogClamp);
/// −Tr[ρ̇ log₂ρ].
double entropy_rate_base2(const DensityMatrix &rho, const CMat2 &rho_dot, double eps = kLogClamp);
/// 2·Tr[ρρ̇].
double purity_rate(const DensityMatrix &rho, const CMat2 &rho_dot);

/// Uhlmann fidelity Tr√(√ρA ρB √ρA).
double fidelity(const DensityMatrix &a, const DensityMatrix &b);

double energy(const DensityMatrix &rho, const CMat2 &h);
double power(const DensityMatrix &rho, const CMat2 &h_dot);
double heat_rate(const CMat2 &h, const CMat2 &rho_dot);

/// Populations of ρ in the eigenbasis of H, lower level first.
/// Falls back to the computational basis when H is degenerate.
struct Occupations {
    double lower = 0, upper = 0;
    double gap = 0;  // μeV
};
Occupations occupations(const DensityMatrix &rho, const CMat2 &h);

/// Gap below which H counts as degenerate, μeV.
inline constexpr double kDegenerateGap = 1e-9;

/// (ε₂−ε₁)/(k_B ln(ñ₁/ñ₂)).
Temperature temperature_occupation(const DensityMatrix &rho, const CMat2 &h);

/// (ħω/k_B)(Ṗz/Ṗ)/ln((1+P)/(1−P)) with Ṗ the radial rate.
Temperature temperature_rate_ratio(BlochVector p, Vec3 p_dot, double omega_L);

/// One sampled point of a trajectory.
struct ObservableRow {
    double t = 0;
    BlochVector bloch;
    double lambda1 = 0, lambda2 = 0;
    double entropy = 0;
    double purity = 0;
    double energy = 0;
    double power = 0;
    double heat_rate = 0;
    double temp_occupation = 0;
    double temp_rate_ratio = 0;
    double occ_n1 = 0, occ_n2 = 0;
    /// Rates, kept for diagnostics; not written to CSV.
    double entropy_rate = 0;
    double purity_rate = 0;
};

ObservableRow observe(double t, const DensityMatrix &rho, const CMat2 &h, const CMat2 &h_dot,
                      const CMat2 &rho_dot, double omega_L);

}  // namespace qme

#endif

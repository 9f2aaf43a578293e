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

#include "qme/observables.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qme {

double purity(const DensityMatrix &rho) { return (rho.matrix() * rho.matrix()).trace().real(); }

double entropy_base2(const DensityMatrix &rho, double eps) {
    auto [l1, l2] = eigenvalues(rho);
    double s = 0;
    for (double l : {l1, l2}) s -= l * std::log2(std::max(l, eps));
    return s;
}

double entropy_rate_base2(const DensityMatrix &rho, const CMat2 &rho_dot, double eps) {
    CMat2 log_rho = matrix_log_clamped(rho, eps);
    return -(rho_dot * log_rho).trace().real() / std::numbers::ln2;
}

double purity_rate(const DensityMatrix &rho, const CMat2 &rho_dot) {
    return 2 * (rho.matrix() * rho_dot).trace().real();
}

double fidelity(const DensityMatrix &a, const DensityMatrix &b) {
    auto clamped_sqrt = [](double l) { return std::sqrt(std::max(l, 0.0)); };
    CMat2 root_a = apply_function(a.matrix(), clamped_sqrt);
    auto spectrum = eigh(root_a * b.matrix() * root_a).values;
    return clamped_sqrt(spectrum[0]) + clamped_sqrt(spectrum[1]);
}

double energy(const DensityMatrix &rho, const CMat2 &h) { return (h * rho.matrix()).trace().real(); }

double power(const DensityMatrix &rho, const CMat2 &h_dot) { return (rho.matrix() * h_dot).trace().real(); }

double heat_rate(const CMat2 &h, const CMat2 &rho_dot) { return (h * rho_dot).trace().real(); }

Occupations occupations(const DensityMatrix &rho, const CMat2 &h) {
    auto eig = eigh(h);
    Occupations occ;
    occ.gap = eig.values[0] - eig.values[1];
    const CMat2 &m = rho.matrix();
    if (occ.gap <= kDegenerateGap) {
        occ.lower = m(0, 0).real();
        occ.upper = m(1, 1).real();
        return occ;
    }
    auto population = [&](int col) {
        cplx u0 = eig.vectors(0, col), u1 = eig.vectors(1, col);
        return (std::conj(u0) * (m(0, 0) * u0 + m(0, 1) * u1) + std::conj(u1) * (m(1, 0) * u0 + m(1, 1) * u1))
            .real();
    };
    occ.lower = population(1);
    occ.upper = population(0);
    return occ;
}

Temperature temperature_occupation(const DensityMatrix &rho, const CMat2 &h) {
    auto occ = occupations(rho, h);
    if (occ.gap <= kDegenerateGap) return Temperature::undefined();
    if (std::abs(occ.lower - occ.upper) <= 1e-15) return Temperature::infinite();
    if (occ.upper <= 0) return Temperature::kelvin(0.0);
    if (occ.lower <= 0) return Temperature::kelvin(-0.0);
    return Temperature::kelvin(occ.gap / (kBoltzmann * std::log(occ.lower / occ.upper)));
}

Temperature temperature_rate_ratio(BlochVector p, Vec3 p_dot, double omega_L) {
    double len = p.norm();
    if (!(len > 0 && len < 1)) return Temperature::undefined();
    double radial = dot(p, p_dot) / len;
    if (std::abs(radial) <= 1e-13) return Temperature::undefined();
    double scale = kHbar * omega_L / kBoltzmann;
    return Temperature::kelvin(scale * (p_dot.z / radial) / std::log((1 + len) / (1 - len)));
}

ObservableRow observe(double t, const DensityMatrix &rho, const CMat2 &h, const CMat2 &h_dot,
                      const CMat2 &rho_dot, double omega_L) {
    ObservableRow row;
    row.t = t;
    row.bloch = density_to_bloch(rho);
    std::tie(row.lambda1, row.lambda2) = eigenvalues(rho);
    row.entropy = entropy_base2(rho);
    row.purity = purity(rho);
    row.energy = energy(rho, h);
    row.power = power(rho, h_dot);
    row.heat_rate = heat_rate(h, rho_dot);
    row.temp_occupation = temperature_occupation(rho, h).value();
    row.temp_rate_ratio = temperature_rate_ratio(row.bloch, bloch_of(rho_dot), omega_L).value();
    auto occ = occupations(rho, h);
    row.occ_n1 = occ.lower;
    row.occ_n2 = occ.upper;
    row.entropy_rate = entropy_rate_base2(rho, rho_dot);
    row.purity_rate = purity_rate(rho, rho_dot);
    return row;
}

}  // namespace qme

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

#include "qme/generators.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace qme {

Vec3 HamiltonianSpec::axis(double t) const {
    if (axis_rotation) return axis_rotation->axis(t);
    return {0, 0, 1};
}

namespace {

double bias_level(const HamiltonianSpec &spec, double t) {
    double theta = 0;
    for (const auto &g : spec.gates)
        if (g.busy().contains(t)) theta += g.bias.eval(t);
    for (const auto &b : spec.halts)
        if (b.support().contains(t)) theta += b.eval(t);
    return theta;
}

}  // namespace

CMat2 hamiltonian_at(const HamiltonianSpec &spec, double t) {
    double half_split = kHbar * spec.omega_L / 2;
    CMat2 h = (-half_split * (1 - bias_level(spec, t))) * sigma_dot(spec.axis(t));
    for (const auto &g : spec.gates)
        if (g.busy().contains(t)) h += (kHbar * g.theta(t)) * g.omega;
    return h;
}

CMat2 hamiltonian_dot_at(const HamiltonianSpec &spec, double t) {
    double half_split = kHbar * spec.omega_L / 2;
    double bias_rate = 0;
    for (const auto &g : spec.gates)
        if (g.busy().contains(t)) bias_rate += g.bias.derivative(t);
    for (const auto &b : spec.halts)
        if (b.support().contains(t)) bias_rate += b.derivative(t);
    CMat2 hd = (half_split * bias_rate) * sigma_dot(spec.axis(t));
    if (spec.axis_rotation)
        hd -= (half_split * (1 - bias_level(spec, t))) * sigma_dot(spec.axis_rotation->axis_derivative(t));
    for (const auto &g : spec.gates)
        if (g.busy().contains(t)) hd += (kHbar * g.theta_derivative(t)) * g.omega;
    return hd;
}

LindbladOp LindbladOp::from_matrix(const CMat2 &l, double gamma, Envelope envelope) {
    auto p = decompose(l);
    return {p.c0, p.c, envelope, gamma};
}

CMat2 LindbladOp::matrix() const { return compose({alpha0, alpha}); }

double LindbladOp::rate_at(double t) const {
    double theta = eval(envelope, t);
    return gamma * theta * theta;
}

void GeneratorSet::validate() const {
    if (!(hamiltonian.omega_L > 0)) throw std::invalid_argument("omega_L must be positive");
    for (size_t i = 0; i < lindblads.size(); i++) {
        double g = lindblads[i].gamma;
        if (!std::isfinite(g) || (g < 0 && !feedback)) {
            std::ostringstream msg;
            msg << "lindblad[" << i << "] rate " << g << " is negative; set feedback to allow it";
            throw std::invalid_argument(msg.str());
        }
    }
    if (beretta && !(beretta->gamma2 >= 0)) throw std::invalid_argument("gamma2 must be >= 0");
    if (bath) {
        if (!(bath->gamma3 >= 0)) throw std::invalid_argument("gamma3 must be >= 0");
        if (!(bath->temperature > 0)) throw std::invalid_argument("bath temperature must be > 0");
    }
}

CMat2 lindblad_term(const CMat2 &l, const DensityMatrix &rho, double gamma) {
    const CMat2 &r = rho.matrix();
    CMat2 ld = l.adjoint();
    CMat2 jump = l * r * ld;
    CMat2 ldl = ld * l;
    return gamma * (hermitian_part(jump) - hermitian_part(ldl * r));
}

Moments moments(const DensityMatrix &rho, const CMat2 &h, double eps) {
    const CMat2 &r = rho.matrix();
    CMat2 s = -1.0 * matrix_log_clamped(rho, eps);
    Moments m;
    m.mean_energy = (r * h).trace().real();
    m.mean_entropy = (r * s).trace().real();
    CMat2 dh = h - m.mean_energy * CMat2::identity();
    CMat2 ds = s - m.mean_entropy * CMat2::identity();
    m.var_energy = (r * dh * dh).trace().real();
    m.cov_energy_entropy = (r * dh * ds).trace().real();
    m.var_entropy = (r * ds * ds).trace().real();
    m.energy_scale2 = decompose(hermitian_part(h)).real_vec().norm2();
    return m;
}

namespace {

bool degenerate(double value, const Moments &m) {
    return m.energy_scale2 == 0 || std::abs(value) <= kDegenerateVariance * m.energy_scale2;
}

}  // namespace

std::optional<double> beta2(const DensityMatrix &rho, const CMat2 &h) {
    auto m = moments(rho, h);
    if (degenerate(m.var_energy, m)) return std::nullopt;
    return m.cov_energy_entropy / m.var_energy;
}

std::optional<double> beta3(const DensityMatrix &rho, const CMat2 &h, const BathSpec &bath) {
    if (bath.kind == BathKind::korsch) return 1 / (kBoltzmann * bath.temperature);
    auto m = moments(rho, h);
    double kt = kBoltzmann * bath.temperature;
    double denominator = m.var_energy - kt * m.cov_energy_entropy;
    if (degenerate(denominator, m)) return std::nullopt;
    return (m.cov_energy_entropy - kt * m.var_entropy) / denominator;
}

CMat2 relaxation_term(const DensityMatrix &rho, const CMat2 &h, double gamma, double beta) {
    const CMat2 &r = rho.matrix();
    // ρS̃ shares eigenvectors with ρ, so build it spectrally to keep it Hermitian.
    CMat2 rho_s = apply_function(r, [](double l) { return l > kLogClamp ? -l * std::log(l) : -l * std::log(kLogClamp); });
    double mean_s = rho_s.trace().real();
    double mean_e = (r * h).trace().real();
    CMat2 entropic = rho_s - mean_s * r;
    CMat2 energetic = hermitian_part(r * h) - mean_e * r;
    return gamma * (entropic - beta * energetic);
}

CMat2 beretta_term(const DensityMatrix &rho, const CMat2 &h, double gamma2, TermStatus *status) {
    auto b = beta2(rho, h);
    if (!b && status) status->beta2_suppressed = true;
    return relaxation_term(rho, h, gamma2, b.value_or(0.0));
}

CMat2 bath_term(const DensityMatrix &rho, const CMat2 &h, const BathSpec &bath, TermStatus *status) {
    auto b = beta3(rho, h, bath);
    if (!b && status) status->beta3_suppressed = true;
    if (!b) return CMat2::zero();
    return relaxation_term(rho, h, bath.gamma3, *b);
}

CMat2 combined_23(const DensityMatrix &rho, const CMat2 &h, double gamma2, double gamma3, double beta2,
                  double beta3) {
    double gamma = gamma2 + gamma3;
    if (gamma == 0) return CMat2::zero();
    return relaxation_term(rho, h, gamma, (gamma2 * beta2 + gamma3 * beta3) / gamma);
}

CMat2 rhs(const DensityMatrix &rho, double t, const GeneratorSet &gens, TermStatus *status) {
    const CMat2 &r = rho.matrix();
    CMat2 h = hamiltonian_at(gens.hamiltonian, t);
    CMat2 out = cplx(0, -1 / kHbar) * commutator(h, r);
    for (const auto &l : gens.lindblads) {
        double rate = l.rate_at(t);
        if (rate != 0) out += lindblad_term(l.matrix(), rho, rate);
    }
    if (gens.combine_23 && gens.beretta && gens.bath) {
        auto b2 = beta2(rho, h);
        auto b3 = beta3(rho, h, *gens.bath);
        if (status) {
            status->beta2_suppressed |= !b2;
            status->beta3_suppressed |= !b3;
        }
        double g2 = gens.beretta->gamma2, g3 = gens.bath->gamma3;
        // A missing β keeps only its entropy part, as in the separate terms;
        // a missing bath β drops the whole bath term.
        if (b3)
            out += combined_23(rho, h, g2, g3, b2.value_or(0.0), *b3);
        else
            out += relaxation_term(rho, h, g2, b2.value_or(0.0));
        return out;
    }
    if (gens.beretta && gens.beretta->gamma2 != 0) out += beretta_term(rho, h, gens.beretta->gamma2, status);
    if (gens.bath && gens.bath->gamma3 != 0) out += bath_term(rho, h, *gens.bath, status);
    return out;
}

Vec3 delta_P(cplx alpha0, const std::array<cplx, 3> &alpha, BlochVector p) {
    Vec3 a{alpha[0].real(), alpha[1].real(), alpha[2].real()};
    Vec3 b{alpha[0].imag(), alpha[1].imag(), alpha[2].imag()};
    double a0 = alpha0.real(), b0 = alpha0.imag();
    Vec3 out = -(a.norm2() * p - dot(a, p) * a) - (b.norm2() * p - dot(b, p) * b);
    out = out + cross(p, a0 * b - b0 * a) + 2.0 * cross(a, b);
    return out;
}

std::pair<double, double> eigenvalue_flow(const DensityMatrix &rho, const CMat2 &l, double gamma) {
    auto eig = eigh(rho.matrix());
    const CMat2 &u = eig.vectors;
    CMat2 v = u.adjoint() * l * u;
    double l1 = eig.values[0], l2 = eig.values[1];
    double v12 = std::norm(v(0, 1)), v21 = std::norm(v(1, 0));
    double d1 = gamma * (v12 * l2 - v21 * l1);
    double d2 = gamma * (v21 * l1 - v12 * l2);
    return {d1, d2};
}

}  // namespace qme

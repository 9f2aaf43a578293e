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

#ifndef QME_LINALG_H
#define QME_LINALG_H

#include <array>
#include <cmath>
#include <complex>
#include <functional>

namespace qme {

using cplx = std::complex<double>;

/// Real 3-vector. Used for Bloch vectors, axes and Pauli coefficients.
struct Vec3 {
    double x = 0, y = 0, z = 0;

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double norm2() const { return x * x + y * y + z * z; }

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return s * a; }
    friend constexpr bool operator==(Vec3 a, Vec3 b) = default;
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Complex 2x2 matrix, row-major.
struct CMat2 {
    std::array<cplx, 4> e{};

    constexpr cplx &operator()(int r, int c) { return e[2 * r + c]; }
    constexpr const cplx &operator()(int r, int c) const { return e[2 * r + c]; }

    static constexpr CMat2 zero() { return {}; }
    static constexpr CMat2 identity() { return {{1.0, 0.0, 0.0, 1.0}}; }

    CMat2 adjoint() const { return {{std::conj(e[0]), std::conj(e[2]), std::conj(e[1]), std::conj(e[3])}}; }
    cplx trace() const { return e[0] + e[3]; }
    cplx det() const { return e[0] * e[3] - e[1] * e[2]; }

    CMat2 &operator+=(const CMat2 &o) {
        for (int i = 0; i < 4; i++) e[i] += o.e[i];
        return *this;
    }
    CMat2 &operator-=(const CMat2 &o) {
        for (int i = 0; i < 4; i++) e[i] -= o.e[i];
        return *this;
    }
    CMat2 &operator*=(cplx s) {
        for (auto &v : e) v *= s;
        return *this;
    }

    friend CMat2 operator+(CMat2 a, const CMat2 &b) { return a += b; }
    friend CMat2 operator-(CMat2 a, const CMat2 &b) { return a -= b; }
    friend CMat2 operator-(CMat2 a) { return a *= -1.0; }
    friend CMat2 operator*(cplx s, CMat2 a) { return a *= s; }
    friend CMat2 operator*(CMat2 a, cplx s) { return a *= s; }
    friend CMat2 operator*(double s, CMat2 a) { return a *= s; }
    friend CMat2 operator*(const CMat2 &a, const CMat2 &b) {
        return {{a.e[0] * b.e[0] + a.e[1] * b.e[2], a.e[0] * b.e[1] + a.e[1] * b.e[3],
                 a.e[2] * b.e[0] + a.e[3] * b.e[2], a.e[2] * b.e[1] + a.e[3] * b.e[3]}};
    }
    friend bool operator==(const CMat2 &a, const CMat2 &b) = default;
};

/// Largest entry modulus.
double max_abs(const CMat2 &m);
/// ‖M − M†‖_max.
double hermiticity_defect(const CMat2 &m);
/// (M + M†)/2.
CMat2 hermitian_part(const CMat2 &m);

CMat2 commutator(const CMat2 &a, const CMat2 &b);
CMat2 anticommutator(const CMat2 &a, const CMat2 &b);

/// Pauli basis. sigma_plus/minus are (σx ± iσy)/√2, so [σ+, σ−] = 2σz.
namespace pauli {
inline const CMat2 sigma0 = CMat2::identity();
inline const CMat2 sigma_x{{0.0, 1.0, 1.0, 0.0}};
inline const CMat2 sigma_y{{0.0, cplx(0, -1), cplx(0, 1), 0.0}};
inline const CMat2 sigma_z{{1.0, 0.0, 0.0, -1.0}};
inline const CMat2 sigma_plus{{0.0, std::sqrt(2.0), 0.0, 0.0}};
inline const CMat2 sigma_minus{{0.0, 0.0, std::sqrt(2.0), 0.0}};

/// σ_i for i in 0..3.
const CMat2 &sigma(int i);
}  // namespace pauli

/// c0·σ0 + c⃗·σ⃗ with complex coefficients.
struct PauliCoeffs {
    cplx c0;
    std::array<cplx, 3> c;

    /// Real parts of c⃗. Exact for Hermitian matrices.
    Vec3 real_vec() const { return {c[0].real(), c[1].real(), c[2].real()}; }
    Vec3 imag_vec() const { return {c[0].imag(), c[1].imag(), c[2].imag()}; }
};

PauliCoeffs decompose(const CMat2 &m);
CMat2 compose(const PauliCoeffs &p);
/// v⃗·σ⃗ for a real vector.
CMat2 sigma_dot(Vec3 v);

/// Closed-form spectrum of a Hermitian 2x2: values descending, vectors as columns.
struct HermitianEigen {
    std::array<double, 2> values;
    CMat2 vectors;
};

HermitianEigen eigh(const CMat2 &h);

/// f(M) for Hermitian M via the spectral projectors ½(I ± n̂·σ).
/// Only the Hermitian part of M is used.
CMat2 apply_function(const CMat2 &h, const std::function<double(double)> &f);

}  // namespace qme

#endif

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

#include "qme/linalg.h"

#include <algorithm>
#include <stdexcept>

namespace qme {

double max_abs(const CMat2 &m) {
    double r = 0;
    for (const auto &v : m.e) r = std::max(r, std::abs(v));
    return r;
}

double hermiticity_defect(const CMat2 &m) { return max_abs(m - m.adjoint()); }

CMat2 hermitian_part(const CMat2 &m) { return 0.5 * (m + m.adjoint()); }

CMat2 commutator(const CMat2 &a, const CMat2 &b) { return a * b - b * a; }

CMat2 anticommutator(const CMat2 &a, const CMat2 &b) { return a * b + b * a; }

const CMat2 &pauli::sigma(int i) {
    switch (i) {
        case 0:
            return sigma0;
        case 1:
            return sigma_x;
        case 2:
            return sigma_y;
        case 3:
            return sigma_z;
    }
    throw std::out_of_range("pauli index must be 0..3");
}

PauliCoeffs decompose(const CMat2 &m) {
    // c_i = Tr(σ_i M)/2, written out.
    const cplx i(0, 1);
    return {0.5 * (m(0, 0) + m(1, 1)),
            {0.5 * (m(0, 1) + m(1, 0)), 0.5 * i * (m(0, 1) - m(1, 0)), 0.5 * (m(0, 0) - m(1, 1))}};
}

CMat2 compose(const PauliCoeffs &p) {
    const cplx i(0, 1);
    return {{p.c0 + p.c[2], p.c[0] - i * p.c[1], p.c[0] + i * p.c[1], p.c0 - p.c[2]}};
}

CMat2 sigma_dot(Vec3 v) { return {{v.z, cplx(v.x, -v.y), cplx(v.x, v.y), -v.z}}; }

namespace {

// Unit eigenvector of n̂·σ with eigenvalue +1, in the branch that avoids cancellation.
std::array<cplx, 2> upper_eigenvector(Vec3 n) {
    if (n.z >= 0) {
        double s = std::sqrt(2 * (1 + n.z));
        return {cplx((1 + n.z) / s, 0), cplx(n.x / s, n.y / s)};
    }
    double s = std::sqrt(2 * (1 - n.z));
    return {cplx(n.x / s, -n.y / s), cplx((1 - n.z) / s, 0)};
}

}  // namespace

HermitianEigen eigh(const CMat2 &h) {
    auto p = decompose(hermitian_part(h));
    double m0 = p.c0.real();
    Vec3 m = p.real_vec();
    double r = m.norm();
    if (r == 0) return {{m0, m0}, CMat2::identity()};
    auto u = upper_eigenvector((1 / r) * m);
    CMat2 vecs{{u[0], -std::conj(u[1]), u[1], std::conj(u[0])}};
    return {{m0 + r, m0 - r}, vecs};
}

CMat2 apply_function(const CMat2 &h, const std::function<double(double)> &f) {
    auto p = decompose(hermitian_part(h));
    double m0 = p.c0.real();
    Vec3 m = p.real_vec();
    double r = m.norm();
    if (r == 0) return f(m0) * CMat2::identity();
    double fp = f(m0 + r), fm = f(m0 - r);
    return 0.5 * (fp + fm) * CMat2::identity() + sigma_dot((0.5 * (fp - fm) / r) * m);
}

}  // namespace qme

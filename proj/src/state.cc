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

#include "qme/state.h"

#include <algorithm>
#include <sstream>

namespace qme {

DensityMatrix DensityMatrix::from_matrix(const CMat2 &m, double tol) {
    auto report = validate(m, tol);
    if (!report.ok()) {
        std::ostringstream msg;
        msg << "not a density matrix: hermiticity defect " << report.hermiticity_defect << ", trace defect "
            << report.trace_defect << ", min eigenvalue " << report.min_eigenvalue;
        throw UnphysicalState(msg.str());
    }
    return DensityMatrix(m);
}

DensityMatrix bloch_to_density(BlochVector p) {
    double len = p.norm();
    if (!(len <= 1 + 1e-9)) {
        std::ostringstream msg;
        msg << "Bloch vector length " << len << " exceeds 1";
        throw UnphysicalState(msg.str());
    }
    return DensityMatrix::unchecked(0.5 * (CMat2::identity() + sigma_dot(p)));
}

Vec3 bloch_of(const CMat2 &m) {
    // Tr[σ_i M] = 2·c_i.
    auto p = decompose(m);
    return 2.0 * p.real_vec();
}

BlochVector density_to_bloch(const DensityMatrix &rho) { return bloch_of(rho.matrix()); }

std::pair<double, double> eigenvalues(const DensityMatrix &rho) {
    double len = density_to_bloch(rho).norm();
    double tr = rho.matrix().trace().real();
    return {0.5 * (tr + len), 0.5 * (tr - len)};
}

CMat2 matrix_log_clamped(const DensityMatrix &rho, double eps) {
    return apply_function(rho.matrix(), [eps](double l) { return std::log(std::max(l, eps)); });
}

ValidationReport validate(const CMat2 &m, double tol) {
    ValidationReport r;
    r.hermiticity_defect = hermiticity_defect(m);
    r.trace_defect = std::abs(m.trace() - 1.0);
    r.min_eigenvalue = eigh(m).values[1];
    r.hermitian = r.hermiticity_defect <= tol;
    r.unit_trace = r.trace_defect <= tol;
    r.positive = r.min_eigenvalue >= -tol;
    return r;
}

}  // namespace qme

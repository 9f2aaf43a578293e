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

#ifndef QME_STATE_H
#define QME_STATE_H

#include <stdexcept>
#include <utility>

#include "qme/linalg.h"

namespace qme {

/// Polarization vector P⃗ = Tr[σ⃗ρ].
using BlochVector = Vec3;

/// Raised when a state violates its physical invariants.
struct UnphysicalState : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Default clamp for eigenvalues inside logarithms.
inline constexpr double kLogClamp = 1e-12;

/// A 2x2 density matrix. Construction through the named factories keeps
/// the invariants; `unchecked` is for integrator internals only.
class DensityMatrix {
   public:
    DensityMatrix() : m_(0.5 * CMat2::identity()) {}

    /// Validates Hermiticity, unit trace and positivity to `tol`.
    static DensityMatrix from_matrix(const CMat2 &m, double tol = 1e-9);
    static DensityMatrix unchecked(const CMat2 &m) { return DensityMatrix(m); }

    const CMat2 &matrix() const { return m_; }

   private:
    explicit DensityMatrix(const CMat2 &m) : m_(m) {}
    CMat2 m_;
};

/// ½(σ0 + P⃗·σ⃗). Throws UnphysicalState when |P| > 1 + 1e-9.
DensityMatrix bloch_to_density(BlochVector p);
BlochVector density_to_bloch(const DensityMatrix &rho);
/// Bloch image of any traceless Hermitian matrix, e.g. a generator value.
Vec3 bloch_of(const CMat2 &m);

/// Descending eigenvalues, (1 ± |P|)/2.
std::pair<double, double> eigenvalues(const DensityMatrix &rho);

/// U·diag(ln max(λ, eps))·U†.
CMat2 matrix_log_clamped(const DensityMatrix &rho, double eps = kLogClamp);

struct ValidationReport {
    bool hermitian = true;
    bool unit_trace = true;
    bool positive = true;
    double hermiticity_defect = 0;
    double trace_defect = 0;
    double min_eigenvalue = 0;

    bool ok() const { return hermitian && unit_trace && positive; }
};

/// Checks an arbitrary matrix against the density-matrix invariants.
ValidationReport validate(const CMat2 &m, double tol = 1e-12);
inline ValidationReport validate(const DensityMatrix &rho, double tol = 1e-12) {
    return validate(rho.matrix(), tol);
}

}  // namespace qme

#endif

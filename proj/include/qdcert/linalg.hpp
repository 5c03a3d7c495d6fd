// Copyright 2026 The qdcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QDCERT_LINALG_HPP
#define QDCERT_LINALG_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qdcert/error.hpp"

namespace qdcert {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Numerical tolerances used to validate density matrices.
namespace tol {
inline constexpr double kHermitian = 1e-9;
inline constexpr double kPsd = 1e-9;
inline constexpr double kTrace = 1e-9;
}  // namespace tol

/// A split of a d-dimensional space into A (first tensor factor) and B.
///
/// Basis index convention: |i_A, i_B> has flat index i_A * dim_b + i_B.
struct Bipartition {
    std::size_t dim_a;
    std::size_t dim_b;

    Bipartition(std::size_t a, std::size_t b);

    std::size_t total() const noexcept {
        return dim_a * dim_b;
    }
    bool operator==(const Bipartition &) const = default;
};

enum class Subsystem { A, B };

enum class Schatten { One, Two, Inf };

struct HermitianEigen {
    RealVector values;      // ascending
    ComplexMatrix vectors;  // columns are eigenvectors
};

void require_square(const ComplexMatrix &m, const char *what);
void require_finite(const ComplexMatrix &m, const char *what);

/// Largest entrywise deviation |M - M^dagger|.
double hermiticity_defect(const ComplexMatrix &m);
bool is_hermitian(const ComplexMatrix &m, double tol = tol::kHermitian);

/// Eigendecomposition of a Hermitian matrix. Only the lower triangle is read.
HermitianEigen hermitian_eigen(const ComplexMatrix &m);
RealVector hermitian_eigenvalues(const ComplexMatrix &m);

/// Singular values in descending order. Hermitian inputs use |eigenvalues|,
/// everything else the square roots of the eigenvalues of M^dagger M.
RealVector singular_values(const ComplexMatrix &m);

double schatten_norm(const ComplexMatrix &m, Schatten p);

/// Hilbert-Schmidt inner product tr(X^dagger Y).
Complex hs_inner(const ComplexMatrix &x, const ComplexMatrix &y);

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b);

ComplexMatrix partial_trace(const ComplexMatrix &m, const Bipartition &part, Subsystem keep);

/// Row-major vectorization: vec(M)[i*d + j] = M(i, j).
ComplexVector vectorize(const ComplexMatrix &m);
ComplexMatrix devectorize(const ComplexVector &v);

ComplexMatrix identity(std::size_t d);

/// Pseudo-inverse of a Hermitian matrix: eigenvalues above `cutoff` inverted, the rest zeroed.
ComplexMatrix hermitian_pinv(const ComplexMatrix &m, double cutoff = 1e-10);

/// Hermitian, positive semidefinite, unit-trace matrix.
class DensityMatrix {
   public:
    /// Validates against the tolerances in `tol`; throws PreconditionError on failure.
    explicit DensityMatrix(ComplexMatrix m);

    static DensityMatrix maximally_mixed(std::size_t d);
    static DensityMatrix basis_state(std::size_t d, std::size_t k);
    static DensityMatrix pure(const ComplexVector &ket);

    std::size_t dim() const noexcept {
        return static_cast<std::size_t>(mat_.rows());
    }
    const ComplexMatrix &matrix() const noexcept {
        return mat_;
    }
    double purity() const;

   private:
    ComplexMatrix mat_;
};

/// Zero-pads a state into dimension `new_dim`, occupying the leading block.
DensityMatrix embed_state(const DensityMatrix &rho, std::size_t new_dim);

}  // namespace qdcert

#endif

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

#include "qdcert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qdcert {

Bipartition::Bipartition(std::size_t a, std::size_t b) : dim_a(a), dim_b(b) {
    if (a == 0 || b == 0) {
        throw PreconditionError("bipartition dimensions must be positive");
    }
}

void require_square(const ComplexMatrix &m, const char *what) {
    if (m.rows() != m.cols()) {
        throw DimensionError(
            std::string(what) + ": matrix must be square, column count",
            static_cast<std::size_t>(m.rows()),
            static_cast<std::size_t>(m.cols()));
    }
}

void require_finite(const ComplexMatrix &m, const char *what) {
    if (!m.allFinite()) {
        throw PreconditionError(std::string(what) + ": matrix has non-finite entries");
    }
}

double hermiticity_defect(const ComplexMatrix &m) {
    require_square(m, "hermiticity_defect");
    if (m.size() == 0) {
        return 0.0;
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix &m, double tol) {
    return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

HermitianEigen hermitian_eigen(const ComplexMatrix &m) {
    require_square(m, "hermitian_eigen");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw Error("hermitian_eigen: eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

RealVector hermitian_eigenvalues(const ComplexMatrix &m) {
    require_square(m, "hermitian_eigenvalues");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw Error("hermitian_eigenvalues: eigensolver did not converge");
    }
    return solver.eigenvalues();
}

RealVector singular_values(const ComplexMatrix &m) {
    RealVector s;
    if (m.rows() == m.cols() && is_hermitian(m, 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))) {
        s = hermitian_eigenvalues(m).cwiseAbs();
    } else {
        ComplexMatrix gram = m.adjoint() * m;
        s = hermitian_eigenvalues(gram).cwiseMax(0.0).cwiseSqrt();
    }
    std::sort(s.data(), s.data() + s.size(), std::greater<>());
    return s;
}

double schatten_norm(const ComplexMatrix &m, Schatten p) {
    require_square(m, "schatten_norm");
    if (m.size() == 0) {
        return 0.0;
    }
    switch (p) {
        case Schatten::Two:
            return m.norm();
        case Schatten::One:
            return singular_values(m).sum();
        case Schatten::Inf:
            return singular_values(m)(0);
    }
    return 0.0;
}

Complex hs_inner(const ComplexMatrix &x, const ComplexMatrix &y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        throw DimensionError(
            "hs_inner: operand sizes differ", static_cast<std::size_t>(x.size()), static_cast<std::size_t>(y.size()));
    }
    return (x.conjugate().cwiseProduct(y)).sum();
}

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix &m, const Bipartition &part, Subsystem keep) {
    require_square(m, "partial_trace");
    const auto d = static_cast<std::size_t>(m.rows());
    if (d != part.total()) {
        throw DimensionError("partial_trace: matrix dimension does not match bipartition", part.total(), d);
    }
    const auto da = static_cast<Eigen::Index>(part.dim_a);
    const auto db = static_cast<Eigen::Index>(part.dim_b);
    if (keep == Subsystem::A) {
        ComplexMatrix out = ComplexMatrix::Zero(da, da);
        for (Eigen::Index i = 0; i < da; ++i) {
            for (Eigen::Index j = 0; j < da; ++j) {
                Complex acc{0.0, 0.0};
                for (Eigen::Index k = 0; k < db; ++k) {
                    acc += m(i * db + k, j * db + k);
                }
                out(i, j) = acc;
            }
        }
        return out;
    }
    ComplexMatrix out = ComplexMatrix::Zero(db, db);
    for (Eigen::Index k = 0; k < da; ++k) {
        out += m.block(k * db, k * db, db, db);
    }
    return out;
}

ComplexVector vectorize(const ComplexMatrix &m) {
    require_square(m, "vectorize");
    const auto d = m.rows();
    ComplexVector v(d * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            v(i * d + j) = m(i, j);
        }
    }
    return v;
}

ComplexMatrix devectorize(const ComplexVector &v) {
    const auto n = static_cast<std::size_t>(v.size());
    const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    if (d * d != n) {
        throw DimensionError("devectorize: length is not a perfect square, nearest square", d * d, n);
    }
    const auto di = static_cast<Eigen::Index>(d);
    ComplexMatrix m(di, di);
    for (Eigen::Index i = 0; i < di; ++i) {
        for (Eigen::Index j = 0; j < di; ++j) {
            m(i, j) = v(i * di + j);
        }
    }
    return m;
}

ComplexMatrix identity(std::size_t d) {
    return ComplexMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

ComplexMatrix hermitian_pinv(const ComplexMatrix &m, double cutoff) {
    auto eig = hermitian_eigen(m);
    RealVector inv = eig.values;
    for (Eigen::Index i = 0; i < inv.size(); ++i) {
        inv(i) = inv(i) > cutoff ? 1.0 / inv(i) : 0.0;
    }
    return eig.vectors * inv.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

DensityMatrix::DensityMatrix(ComplexMatrix m) {
    require_square(m, "DensityMatrix");
    require_finite(m, "DensityMatrix");
    if (m.rows() == 0) {
        throw PreconditionError("DensityMatrix: dimension must be positive");
    }
    const double herm = hermiticity_defect(m);
    if (herm > tol::kHermitian) {
        throw PreconditionError("DensityMatrix: not Hermitian (defect " + std::to_string(herm) + ")");
    }
    ComplexMatrix h = 0.5 * (m + m.adjoint());
    const double tr = h.trace().real();
    if (std::abs(tr - 1.0) > tol::kTrace) {
        throw PreconditionError("DensityMatrix: trace " + std::to_string(tr) + " is not 1");
    }
    const double lo = hermitian_eigenvalues(h)(0);
    if (lo < -tol::kPsd) {
        throw PreconditionError("DensityMatrix: negative eigenvalue " + std::to_string(lo));
    }
    mat_ = std::move(h);
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t d) {
    return DensityMatrix(identity(d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::basis_state(std::size_t d, std::size_t k) {
    if (k >= d) {
        throw PreconditionError("basis_state: index out of range");
    }
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::pure(const ComplexVector &ket) {
    const double n = ket.norm();
    if (!(n > 0.0)) {
        throw PreconditionError("pure: zero vector");
    }
    ComplexVector k = ket / n;
    return DensityMatrix(k * k.adjoint());
}

double DensityMatrix::purity() const {
    return mat_.squaredNorm();
}

DensityMatrix embed_state(const DensityMatrix &rho, std::size_t new_dim) {
    if (new_dim < rho.dim()) {
        throw DimensionError("embed_state: target dimension smaller than state", rho.dim(), new_dim);
    }
    const auto n = static_cast<Eigen::Index>(new_dim);
    const auto d = static_cast<Eigen::Index>(rho.dim());
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    m.topLeftCorner(d, d) = rho.matrix();
    return DensityMatrix(std::move(m));
}

}  // namespace qdcert

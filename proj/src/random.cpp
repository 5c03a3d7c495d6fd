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

#include "qdcert/random.hpp"

#include <bit>
#include <cmath>

namespace qdcert {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

namespace {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t id) noexcept {
    return mix64(mix64(master) ^ mix64(id ^ 0xD1B54A32D192ED03ULL));
}

}  // namespace

SeededStream::SeededStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_(master_seed), id_(stream_id), engine_(derive_seed(master_seed, stream_id)) {
}

SeededStream SeededStream::child(std::uint64_t id) const {
    return SeededStream(derive_seed(master_, id_), id);
}

double SeededStream::normal() {
    return normal_(engine_);
}

double SeededStream::uniform() {
    return uniform_(engine_);
}

std::uint64_t SeededStream::uniform_int(std::uint64_t bound) {
    if (bound == 0) {
        throw PreconditionError("uniform_int: bound must be positive");
    }
    std::uniform_int_distribution<std::uint64_t> dist(0, bound - 1);
    return dist(engine_);
}

ComplexMatrix ginibre(std::size_t rows, std::size_t cols, SeededStream &src) {
    const double s = std::sqrt(0.5);
    ComplexMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            const double re = src.normal();
            const double im = src.normal();
            g(i, j) = Complex(s * re, s * im);
        }
    }
    return g;
}

ComplexMatrix ginibre(std::size_t d, SeededStream &src) {
    return ginibre(d, d, src);
}

ComplexMatrix haar_unitary(std::size_t d, SeededStream &src) {
    if (d == 0) {
        throw PreconditionError("haar_unitary: dimension must be positive");
    }
    ComplexMatrix g = ginibre(d, src);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix &r = qr.matrixQR();
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
        const Complex diag = r(k, k);
        const double mag = std::abs(diag);
        const Complex phase = mag > 0.0 ? diag / mag : Complex(1.0, 0.0);
        q.col(k) *= phase;
    }
    return q;
}

namespace {

// Applies a 4x4 gate to qubits (q, q+1) of an n-qubit operator from the left.
// Qubit 0 is the most significant bit of the basis index.
void apply_two_qubit_left(ComplexMatrix &u, const ComplexMatrix &gate, std::size_t q, std::size_t n) {
    const std::size_t dim = std::size_t{1} << n;
    const std::size_t hi = n - 1 - q;  // bit position of qubit q
    const std::size_t lo = hi - 1;     // bit position of qubit q+1
    for (std::size_t base = 0; base < dim; ++base) {
        if ((base >> hi) & 1U || (base >> lo) & 1U) {
            continue;
        }
        const std::size_t idx[4] = {
            base, base | (std::size_t{1} << lo), base | (std::size_t{1} << hi),
            base | (std::size_t{1} << hi) | (std::size_t{1} << lo)};
        for (Eigen::Index c = 0; c < u.cols(); ++c) {
            Complex in[4];
            for (int k = 0; k < 4; ++k) {
                in[k] = u(static_cast<Eigen::Index>(idx[k]), c);
            }
            for (int r = 0; r < 4; ++r) {
                Complex acc{0.0, 0.0};
                for (int k = 0; k < 4; ++k) {
                    acc += gate(r, k) * in[k];
                }
                u(static_cast<Eigen::Index>(idx[r]), c) = acc;
            }
        }
    }
}

}  // namespace

ComplexMatrix sample_unitary(std::size_t d, UnitaryEnsemble ensemble, SeededStream &src, std::size_t depth) {
    if (ensemble == UnitaryEnsemble::Haar) {
        return haar_unitary(d, src);
    }
    if (d == 0 || !std::has_single_bit(d)) {
        throw PreconditionError("brickwork ensemble requires a power-of-two dimension");
    }
    const auto n = static_cast<std::size_t>(std::countr_zero(d));
    if (n < 2) {
        return haar_unitary(d, src);
    }
    if (depth == 0) {
        depth = 4 * n;
    }
    ComplexMatrix u = identity(d);
    for (std::size_t layer = 0; layer < depth; ++layer) {
        for (std::size_t q = layer % 2; q + 1 < n; q += 2) {
            apply_two_qubit_left(u, haar_unitary(4, src), q, n);
        }
    }
    return u;
}

std::vector<int> rademacher_vector(std::size_t len, SeededStream &src) {
    std::vector<int> z(len);
    for (auto &zi : z) {
        zi = (src.engine()() >> 63) != 0 ? 1 : -1;
    }
    return z;
}

DensityMatrix random_density(std::size_t d, SeededStream &src) {
    ComplexMatrix g = ginibre(d, src);
    ComplexMatrix m = g * g.adjoint();
    m /= m.trace().real();
    return DensityMatrix(0.5 * (m + m.adjoint()));
}

DensityMatrix random_pure_state(std::size_t d, SeededStream &src) {
    ComplexMatrix g = ginibre(d, 1, src);
    return DensityMatrix::pure(g.col(0));
}

ComplexMatrix random_hermitian(std::size_t d, SeededStream &src) {
    ComplexMatrix g = ginibre(d, src);
    return 0.5 * (g + g.adjoint());
}

ComplexMatrix random_traceless_hermitian(std::size_t d, SeededStream &src) {
    ComplexMatrix h = random_hermitian(d, src);
    h -= (h.trace() / static_cast<double>(d)) * identity(d);
    const double n = h.norm();
    return n > 0.0 ? ComplexMatrix(h / n) : h;
}

}  // namespace qdcert

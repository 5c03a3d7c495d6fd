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

#ifndef QDCERT_RANDOM_HPP
#define QDCERT_RANDOM_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "qdcert/linalg.hpp"

namespace qdcert {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// A reproducible random stream identified by (master_seed, stream_id).
///
/// Public coins are modelled by nodes sharing one stream id, private coins by
/// distinct ids. Streams are not thread-safe; give each worker its own.
class SeededStream {
   public:
    SeededStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t master_seed() const noexcept {
        return master_;
    }
    std::uint64_t stream_id() const noexcept {
        return id_;
    }

    /// Independent sub-stream. Children of different ids never share state
    /// with each other or with the parent.
    SeededStream child(std::uint64_t id) const;

    double normal();
    double uniform();
    std::uint64_t uniform_int(std::uint64_t bound);  // in [0, bound)
    std::mt19937_64 &engine() noexcept {
        return engine_;
    }

   private:
    std::uint64_t master_;
    std::uint64_t id_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Complex Ginibre matrix with i.i.d. entries (N(0,1) + i N(0,1)) / sqrt(2).
ComplexMatrix ginibre(std::size_t rows, std::size_t cols, SeededStream &src);
ComplexMatrix ginibre(std::size_t d, SeededStream &src);

/// Haar-distributed unitary: QR of a Ginibre matrix with the diagonal phase of R
/// folded back into Q.
ComplexMatrix haar_unitary(std::size_t d, SeededStream &src);

/// Which ensemble the protocol's shared unitaries come from.
enum class UnitaryEnsemble {
    Haar,
    /// Brickwork of Haar-random two-qubit gates on log2(d) qubits. Approaches a
    /// 4-design as depth grows; requires d a power of two.
    Brickwork,
};

ComplexMatrix sample_unitary(std::size_t d, UnitaryEnsemble ensemble, SeededStream &src, std::size_t depth = 0);

/// z uniform on {-1, +1}^len.
std::vector<int> rademacher_vector(std::size_t len, SeededStream &src);

/// G G^dagger / tr(G G^dagger) for Ginibre G (full-rank with probability one).
DensityMatrix random_density(std::size_t d, SeededStream &src);

/// Haar-random pure state.
DensityMatrix random_pure_state(std::size_t d, SeededStream &src);

/// Random Hermitian matrix (G + G^dagger) / 2.
ComplexMatrix random_hermitian(std::size_t d, SeededStream &src);

/// Random traceless Hermitian matrix with unit Hilbert-Schmidt norm.
ComplexMatrix random_traceless_hermitian(std::size_t d, SeededStream &src);

}  // namespace qdcert

#endif

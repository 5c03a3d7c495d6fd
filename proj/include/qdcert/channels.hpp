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

#ifndef QDCERT_CHANNELS_HPP
#define QDCERT_CHANNELS_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qdcert/linalg.hpp"
#include "qdcert/random.hpp"

namespace qdcert {

/// Trace-preserving map X -> sum_k A_k X A_k^dagger with A_k of shape d_out x d_in.
class KrausChannel {
   public:
    /// Throws DimensionError on inconsistent shapes and PreconditionError if
    /// sum_k A_k^dagger A_k deviates from the identity by more than 1e-9.
    KrausChannel(std::size_t d_in, std::size_t d_out, std::vector<ComplexMatrix> kraus);

    std::size_t d_in() const noexcept {
        return d_in_;
    }
    std::size_t d_out() const noexcept {
        return d_out_;
    }
    const std::vector<ComplexMatrix> &operators() const noexcept {
        return kraus_;
    }

    ComplexMatrix apply(const ComplexMatrix &x) const;
    /// Heisenberg-picture adjoint Y -> sum_k A_k^dagger Y A_k (unital, CP).
    ComplexMatrix apply_adjoint(const ComplexMatrix &y) const;

   private:
    std::size_t d_in_;
    std::size_t d_out_;
    std::vector<ComplexMatrix> kraus_;
};

/// Liouville (transfer) matrix M with vec(Phi(X)) = M vec(X), row-major vec.
struct LiouvilleMatrix {
    std::size_t d_in;
    std::size_t d_out;
    ComplexMatrix mat;  // d_out^2 x d_in^2
};

/// Choi matrix J = sum_ij |i><j| (x) Phi(|i><j|), input register first.
struct ChoiMatrix {
    std::size_t d_in;
    std::size_t d_out;
    ComplexMatrix mat;  // (d_in d_out) x (d_in d_out)
};

LiouvilleMatrix kraus_to_liouville(const KrausChannel &ch);
ChoiMatrix liouville_to_choi(const LiouvilleMatrix &m);
ChoiMatrix kraus_to_choi(const KrausChannel &ch);
/// Eigendecomposition of J; eigenvalues below 1e-10 are discarded.
KrausChannel choi_to_kraus(const ChoiMatrix &j);

/// One channel held in all three representations, plus the Liouville norms.
class ChannelBundle {
   public:
    explicit ChannelBundle(KrausChannel kraus);

    const KrausChannel &kraus() const noexcept {
        return kraus_;
    }
    const LiouvilleMatrix &liouville() const noexcept {
        return liouville_;
    }
    const ChoiMatrix &choi() const noexcept {
        return choi_;
    }
    std::size_t d_in() const noexcept {
        return kraus_.d_in();
    }
    std::size_t d_out() const noexcept {
        return kraus_.d_out();
    }
    double liouville_fro_norm() const noexcept {
        return fro_norm_;
    }
    double liouville_op_norm() const noexcept {
        return op_norm_;
    }

    ComplexMatrix apply(const ComplexMatrix &x) const {
        return kraus_.apply(x);
    }
    DensityMatrix apply(const DensityMatrix &rho) const;
    ComplexMatrix apply_adjoint(const ComplexMatrix &y) const {
        return kraus_.apply_adjoint(y);
    }

   private:
    KrausChannel kraus_;
    LiouvilleMatrix liouville_;
    ChoiMatrix choi_;
    double fro_norm_;
    double op_norm_;
};

/// Phi_U(rho) = tr_B(U rho U^dagger). Kraus operators (1_A (x) <k|_B) U.
ChannelBundle compression_channel(const ComplexMatrix &u, const Bipartition &part);
/// The compression output for a single state, without building the channel.
ComplexMatrix compress(const ComplexMatrix &rho, const ComplexMatrix &u, const Bipartition &part);

ChannelBundle identity_channel(std::size_t d);
ChannelBundle unitary_channel(const ComplexMatrix &u);
/// rho -> tr(rho) 1/d_out.
ChannelBundle depolarizing_channel(std::size_t d_in, std::size_t d_out);
/// rho -> tr(rho) tau.
ChannelBundle replacement_channel(std::size_t d_in, const DensityMatrix &tau);
/// Convex combination sum_i w_i Phi_i. Weights must be nonnegative and sum to 1.
ChannelBundle mixture_channel(const std::vector<std::pair<double, KrausChannel>> &parts);

/// Random mixedness-preserving channel C^{d x d} -> C^{d_q x d_q}: a convex
/// mixture of `components` compression channels with random weights; when
/// d_q == d the components are unitary conjugations.
ChannelBundle random_mixedness_preserving_channel(
    std::size_t d, std::size_t d_q, SeededStream &src, std::size_t components = 3);

/// ||Phi(1/d) - 1/d_out||_2 <= tol.
bool is_mixedness_preserving(const ChannelBundle &ch, double tol = 1e-9);

struct NormBoundReport {
    bool mixedness_preserving;
    double fro_norm;
    double fro_bound;  // sqrt(d d_q)
    double op_norm;
    double op_bound;  // sqrt(d / d_q)
    bool fro_ok;
    bool op_ok;
};

/// Liouville norms against sqrt(d d_q) and sqrt(d/d_q) with 1e-9 slack. When the
/// channel is not mixedness-preserving the flags are advisory only.
NormBoundReport norm_bound_check(const ChannelBundle &ch);

/// Smallest eigenvalue of Phi*(Y^dagger Y) - Phi*(Y)^dagger Phi*(Y).
double kadison_schwarz_probe(const ChannelBundle &ch, const ComplexMatrix &y);

/// Maximum of ||vec(Phi(X)) - M vec(X)|| and of the Choi/Kraus-reconstruction
/// discrepancy over `probes` random inputs.
double representation_discrepancy(const ChannelBundle &ch, SeededStream &src, std::size_t probes = 20);

/// Smallest multiple of d_q that is >= d.
std::size_t padded_dimension(std::size_t d, std::size_t d_q);

std::string channel_to_json(const KrausChannel &ch);
KrausChannel channel_from_json(const std::string &text);

}  // namespace qdcert

#endif

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


#ifndef QDCERT_BELL_HPP
#define QDCERT_BELL_HPP

// Weyl operators, the n-qubit Bell basis, Bell sampling of rho (x) rho and the
// two-node Bell-sampling protocol built on shared EPR pairs.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qdcert/linalg.hpp"
#include "qdcert/protocol.hpp"
#include "qdcert/random.hpp"

namespace qdcert {

/// x = (a, b) in {0,1}^{2n}. Bit j of a string is qubit j, with qubit 0 stored
/// in the most significant of the n low bits.
struct WeylLabel {
    std::size_t n = 1;
    std::uint32_t a = 0;
    std::uint32_t b = 0;

    /// Position in the enumeration order (a << n) | b.
    std::uint64_t index() const noexcept {
        return (std::uint64_t{a} << n) | b;
    }
    static WeylLabel from_index(std::size_t n, std::uint64_t index);

    /// Parity of a . b.
    int symplectic_sign() const noexcept;

    bool operator==(const WeylLabel &) const = default;
};

WeylLabel operator^(const WeylLabel &x, const WeylLabel &y);

/// Hex encoding of the 2n bits a || b, most significant first.
std::string to_hex(const WeylLabel &x);

struct BellOutcome {
    WeylLabel label;
    double probability;
};

/// W_x = i^{a.b} (X^{a_1} Z^{b_1}) (x) ... (x) (X^{a_n} Z^{b_n}). Requires n <= 6.
ComplexMatrix weyl_operator(const WeylLabel &x);

/// (W_x (x) 1)|EPR_n>, with |EPR_n> = 2^{-n/2} sum_k |k>|k>.
ComplexVector bell_state(const WeylLabel &x);

/// p_rho(x) = <psi_x| rho (x) rho |psi_x> = tr(W_x rho W_x rho^T) / 2^n for a
/// single label.
double bell_probability(const DensityMatrix &rho, const WeylLabel &x);

/// All 4^n outcomes in index order. Requires n <= 4.
std::vector<BellOutcome> bell_distribution(const DensityMatrix &rho);

/// Number of qubits of a 2^n-dimensional state; throws for other dimensions.
std::size_t qubit_count(std::size_t d);

struct DistributedBellSample {
    WeylLabel z;   // z1 ^ z2, the protocol output
    WeylLabel z1;  // first node's message
    WeylLabel z2;  // second node's message
};

/// Protocol parameters of the two-node scheme: m = 2, n_c = 2n, n_q = 0,
/// private coins and E = n shared EPR pairs.
ProtocolConfig bell_protocol_config(std::size_t n, std::uint64_t seed);

/// One run of the two-node protocol. The first node's Bell measurement on its
/// copy and its EPR halves gives z1, uniform over {0,1}^{2n}; teleportation
/// leaves W_{z1} rho W_{z1} with the second node, whose Bell measurement gives
/// z2 with Pr(z2 | z1) = p_rho(z1 ^ z2). Both messages pass the budget check of
/// `cfg`, which must match bell_protocol_config.
DistributedBellSample distributed_bell_sampling(const DensityMatrix &rho, const ProtocolConfig &cfg, SeededStream &src);

/// Same, with bell_protocol_config(n, src.master_seed()).
DistributedBellSample distributed_bell_sampling(const DensityMatrix &rho, SeededStream &src);

/// Output law of the protocol computed from its two sampling stages:
/// law(z) = sum_{z1} 4^{-n} <psi_{z1^z}| W_{z1} rho W_{z1} (x) rho |psi_{z1^z}>.
/// Requires n <= 2.
std::vector<double> analytic_output_law(const DensityMatrix &rho);

struct ExactStateLaw {
    std::vector<double> joint;   // Pr(z1, z2) at z1 * 4 + z2
    std::vector<double> output;  // law of z1 ^ z2
};

/// Single-qubit cross-check: the registers A1 B1 B2 A2 hold rho (x) EPR (x) rho,
/// node one measures A1 B1 and node two measures B2 A2 in the Bell basis.
ExactStateLaw exact_state_law_n1(const DensityMatrix &rho);

/// Empirical mean of (-1)^{a.b}; its expectation is tr(rho^2).
double purity_from_bell(std::span<const WeylLabel> samples);

enum class PurityVerdict { Pure, MaximallyMixed };

struct PurityTestResult {
    PurityVerdict verdict;
    double estimate;
    double threshold;  // (1 + 2^{-n}) / 2
    std::size_t samples;
};

/// Runs the two-node protocol `samples` times and thresholds the purity estimate.
PurityTestResult purity_test(const DensityMatrix &rho, std::size_t samples, SeededStream &src);

}  // namespace qdcert

#endif

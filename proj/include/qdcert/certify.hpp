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

#ifndef QDCERT_CERTIFY_HPP
#define QDCERT_CERTIFY_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "qdcert/linalg.hpp"
#include "qdcert/protocol.hpp"
#include "qdcert/random.hpp"

namespace qdcert {

/// Absolute constants of the certification protocol. The asymptotic analysis
/// only fixes them up to existence; these are engineering defaults.
struct CertifyConstants {
    double c_hs = 64.0;   // tester copies per (1/eps^2) per log(1/delta)
    double kappa = 16.0;  // batch size m' = ceil(kappa d^2 / (d_q eps^2))
    double kappa_r = 8.0; // batches R = ceil(kappa_r log(1/delta))
    double c2 = 16.0;     // compression anti-concentration constant
};

enum class HsOutcome { Close, Far };

struct HsResult {
    HsOutcome outcome;
    double statistic;  // median-of-means estimate of ||rho - sigma||_2^2, clipped to [0, 2]
    double threshold;  // eps^2 / 2
    std::size_t groups;
};

/// Copies the tester needs: ceil(c_hs log(1/delta) / eps^2), and at least two per group.
std::size_t hs_required_copies(double eps, double delta, const CertifyConstants &k = {});

/// Finest Hilbert-Schmidt precision resolvable from `copies` copies.
double hs_resolvable_eps(std::size_t copies, double delta, const CertifyConstants &k = {});

/// Median-of-means group count for failure probability delta (odd, >= 1).
std::size_t hs_group_count(double delta);

/// Hilbert-Schmidt certification of a known sigma from copies of an unknown state.
///
/// Every copy is measured once in an independent Haar-random basis. The
/// outcomes give classical-shadow snapshots S_i with E[S_i] = rho; the pairwise
/// U-statistic of tr((S_i - sigma)(S_j - sigma)) is unbiased for
/// ||rho - sigma||_2^2. Groups are combined by their median and the result is
/// compared against eps^2 / 2.
HsResult hs_certify(
    std::span<const DensityMatrix> copies,
    const DensityMatrix &sigma,
    double eps,
    double delta,
    SeededStream &src,
    const CertifyConstants &k = {});

/// Derived parameters of the batched public-coin protocol.
struct Algorithm1Plan {
    std::size_t d_padded;     // d rounded up to a multiple of d_q
    std::size_t d_q;
    std::size_t batch_size;   // m'
    std::size_t batches;      // R
    std::size_t nodes_required;
    double eps_prime;         // sqrt(d_q) eps / (2 d)
    double eps_test;          // max(eps_prime, resolvable precision of one batch)
    double delta_prime;       // 1 / (4 C2)
    double tau;               // 1 / (2 C2)
};

Algorithm1Plan plan_algorithm1(const ProtocolConfig &cfg, const CertifyConstants &k = {});

enum class Decision { Accept, Reject };

struct BatchRecord {
    bool far;
    double statistic;
    double threshold;
};

struct Verdict {
    Decision decision;
    Algorithm1Plan plan;
    std::vector<BatchRecord> batches;
    std::size_t far_count;
    double far_limit;  // tau * R; reject iff far_count > far_limit
    std::size_t messages_checked;
};

/// Shared unitary of batch r, derived from the public coin of `cfg.seed`.
ComplexMatrix public_batch_unitary(const ProtocolConfig &cfg, std::size_t d, std::size_t batch,
                                   UnitaryEnsemble ensemble = UnitaryEnsemble::Haar);

/// A node's message: its copy compressed by the batch's shared unitary.
NodeMessage compression_node_message(const DensityMatrix &rho, const ComplexMatrix &u, const Bipartition &part);

/// Runs the batched public-coin certification protocol end to end.
///
/// Requires cfg.coin == Public, n_c == 0, E == 0, d_q >= 2 and m >= m' R.
/// Exactly m' R nodes take part; any surplus nodes stay idle.
Verdict run_algorithm1(
    const DensityMatrix &rho,
    const DensityMatrix &sigma,
    const ProtocolConfig &cfg,
    const CertifyConstants &k = {},
    UnitaryEnsemble ensemble = UnitaryEnsemble::Haar);

struct C2Calibration {
    double c2_estimate;       // worst 4 E[X^2] / E[X]^2 over the sampled pairs
    double min_pz_fraction;   // smallest empirical Pr[X >= (d_A / 4d) ||rho - sigma||_2^2]
    double max_c1_ratio;      // largest E[X^2] / ((d_A/d)^2 ||rho - sigma||_2^4)
    std::size_t pairs;
    std::size_t trials;
};

/// Estimates C2 from the Paley-Zygmund ratio of X = ||Phi_U(rho) - Phi_U(sigma)||_2^2
/// over random state pairs.
C2Calibration calibrate_c2(const Bipartition &part, std::size_t pairs, std::size_t trials, SeededStream &src);

}  // namespace qdcert

#endif

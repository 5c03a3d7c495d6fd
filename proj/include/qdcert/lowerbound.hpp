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

#ifndef QDCERT_LOWERBOUND_HPP
#define QDCERT_LOWERBOUND_HPP

// Numerical laboratory for the chi-squared lower-bound machinery: the
// perturbation ensemble around the maximally mixed state, the quantum
// chi-squared divergence, the Ingster-Suslina expansion, Liouville quadratic
// forms, adversarial perturbation bases and second/fourth Haar moments.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qdcert/channels.hpp"
#include "qdcert/linalg.hpp"
#include "qdcert/random.hpp"

namespace qdcert {

// ---------------------------------------------------------------------------
// Traceless orthonormal bases and the perturbation ensemble.

enum class BasisKind {
    GellMann,  // generalized Gell-Mann matrices, any d
    Pauli,     // Pauli strings, d a power of two
};

/// The d^2 - 1 traceless elements of a Hilbert-Schmidt orthonormal basis,
/// each with unit HS norm.
std::vector<ComplexMatrix> traceless_orthonormal_basis(std::size_t d, BasisKind kind);

/// Range checks applied to the perturbation count.
enum class RangeMode {
    Theorem,  // d^2/2 <= ell <= d^2 - 1 and eps < eps_threshold
    Relaxed,  // 1 <= ell <= d^2 - 1
};

struct HardInstanceOptions {
    RangeMode range = RangeMode::Relaxed;
    double eps_threshold = 0.3;
};

class HardInstance {
   public:
    std::size_t d;
    std::size_t ell;
    double eps;
    double c;
    std::vector<ComplexMatrix> basis;  // V_1 .. V_ell
    ComplexMatrix isometry;            // [vec V_1, ..., vec V_ell], d^2 x ell

    /// Scale c eps / sqrt(d ell) applied to sum_i z_i V_i.
    double scale() const;
};

/// Uses the first `ell` elements of the default basis (Pauli when d is a power of
/// two and kind == Pauli, otherwise Gell-Mann).
HardInstance build_hard_instance(
    std::size_t d, std::size_t ell, double eps, double c, BasisKind kind, const HardInstanceOptions &opt = {});

/// Uses a caller-supplied basis; throws if it is not traceless and orthonormal within 1e-10.
HardInstance build_hard_instance(
    std::size_t d, double eps, double c, std::vector<ComplexMatrix> basis, const HardInstanceOptions &opt = {});

struct PerturbedState {
    std::vector<int> z;
    ComplexMatrix delta;      // Delta_z
    ComplexMatrix delta_bar;  // N_z Delta_z
    double clamp;             // N_z = min{1, 1 / (d ||Delta_z||_inf)}
    DensityMatrix rho;        // 1/d + Delta_bar_z
};

PerturbedState perturbed_state(const HardInstance &inst, std::span<const int> z);

/// Sign vector number `index` of {-1,+1}^ell: bit i set means z_i = -1.
std::vector<int> sign_vector(std::size_t ell, std::uint64_t index);

/// Fraction of sampled z with ||rho_z - 1/d||_1 >= eps.
double farness_fraction(const HardInstance &inst, std::size_t samples, SeededStream &src);

// ---------------------------------------------------------------------------
// Quantum chi-squared divergence.

/// supp(rho) within supp(sigma): every eigenvector of rho with eigenvalue
/// > 1e-10 keeps squared overlap >= 1 - 1e-8 with sigma's support.
bool support_contained(const ComplexMatrix &rho, const ComplexMatrix &sigma);

/// tr(sigma^+ rho^2) - 1 on the support of sigma, +infinity when the support
/// condition fails.
double quantum_chi2(const ComplexMatrix &rho, const ComplexMatrix &sigma);
double quantum_chi2(const DensityMatrix &rho, const DensityMatrix &sigma);

// ---------------------------------------------------------------------------
// Ingster-Suslina expansion.

struct IngsterSuslinaReport {
    double lhs;             // chi2 of the mixture of products against the product reference
    double rhs_exact;       // E[prod (1 + Z_i)] - 1
    double rhs_mgf_bound;   // E[prod exp(Z_i)]
    std::size_t sign_vectors;
};

/// Exhaustive version over all of {-1,+1}^ell (ell <= 12, at most 3 channels).
IngsterSuslinaReport ingster_suslina_check(const HardInstance &inst, std::span<const ChannelBundle> channels);

/// Same identity for the empirical ensemble of `samples` random sign vectors.
/// The expansion is exact for any ensemble, so lhs == rhs_exact still holds.
IngsterSuslinaReport ingster_suslina_sampled(
    const HardInstance &inst, std::span<const ChannelBundle> channels, std::size_t samples, SeededStream &src);

// ---------------------------------------------------------------------------
// Liouville quadratic form and the T operator.

struct ZQuadratic {
    double direct;     // tr(Phi(1/d)^{-1} Phi(Dbar_z) Phi(Dbar_z'))
    double quadratic;  // (d_q c^2 eps^2 N_z N_z' / (d ell)) z^T V^dag M^dag M V z'
};

ZQuadratic z_quadratic_identity(const HardInstance &inst, const ChannelBundle &ch, std::span<const int> z, std::span<const int> zp);

/// T = (1/m) sum_i M_i^dagger M_i, d^2 x d^2.
ComplexMatrix t_operator(std::span<const ChannelBundle> channels);

struct SandwichNorms {
    double fro;
    double op;
};

/// Norms of V^dagger T V.
SandwichNorms sandwich_norms(const ComplexMatrix &t, const ComplexMatrix &isometry);

struct AdversarialBasis {
    std::vector<ComplexMatrix> basis;
    ComplexMatrix isometry;
    RealVector eigenvalues;  // the ell selected eigenvalues, ascending
    SandwichNorms norms;
    double bound;            // sqrt(ell) d d_q / (d^2 - ell - 1), +inf at ell = d^2 - 1
};

/// Columns are the eigenvectors of T restricted to the traceless subspace with
/// the ell smallest eigenvalues. Ties are ordered lexicographically after each
/// vector's largest-magnitude entry is rotated to be real positive.
AdversarialBasis adversarial_basis(std::span<const ChannelBundle> channels, std::size_t ell);

/// Random isometry onto ell orthonormal traceless directions.
ComplexMatrix random_traceless_isometry(std::size_t d, std::size_t ell, SeededStream &src);

// ---------------------------------------------------------------------------
// Haar moments.

double weingarten_identity(std::size_t d);  // 1 / (d^2 - 1)
double weingarten_swap(std::size_t d);      // -1 / (d (d^2 - 1))

/// E_U tr(U^{(x)2} (A1 (x) A2) U^{dag (x)2} (B1 (x) B2)) in closed form.
Complex weingarten_second_order(
    const ComplexMatrix &a1, const ComplexMatrix &a2, const ComplexMatrix &b1, const ComplexMatrix &b2);

/// E_U ||Phi_U(Delta)||_2^2 = tr(Delta^2) (d_A^2 d_B - d_B) / (d^2 - 1) for traceless Hermitian Delta.
double compression_moment_exact(const ComplexMatrix &delta, const Bipartition &part);

struct MonteCarloEstimate {
    double mean;
    double stderr_;
    std::size_t samples;
};

MonteCarloEstimate compression_moment_monte_carlo(
    const ComplexMatrix &delta, const Bipartition &part, std::size_t trials, SeededStream &src);

struct FourthMomentReport {
    double mean_second;   // empirical E ||Phi_U(Delta)||_2^2
    double mean_fourth;   // empirical E ||Phi_U(Delta)||_2^4
    double ratio;         // mean_fourth / ((d_A/d)^2 ||Delta||_2^4)
    double pz_fraction;   // empirical Pr[||Phi_U(Delta)||_2 >= (1/2) sqrt(d_A/d) ||Delta||_2]
    std::size_t trials;
};

FourthMomentReport fourth_moment_probe(
    const ComplexMatrix &delta, const Bipartition &part, std::size_t trials, SeededStream &src);

// ---------------------------------------------------------------------------
// Centralized bound.

enum class CentralizedMode { Exact, Sampled };

struct CentralizedReport {
    CentralizedMode mode;
    double value;          // chi2(E_z rho_z^{(x)n} || (1/d)^{(x)n}); estimate in sampled mode
    double value_stderr;   // zero in exact mode
    double expansion;      // E_{z,z'} (1 + d tr(Dbar_z Dbar_z'))^n - 1 (enumerated or sampled)
    double bound;          // exp(n^2 c^4 eps^4 / (2 ell)) - 1 + 4 e^{-d}
};

/// Exact mode builds the n-fold mixture explicitly (d^n <= 4096, ell <= 12);
/// otherwise throws EnumerationTooLarge. Sampled mode draws `samples` pairs.
CentralizedReport centralized_chi2_bound(
    const HardInstance &inst, std::size_t n, CentralizedMode mode = CentralizedMode::Exact,
    std::size_t samples = 0, SeededStream *src = nullptr);

double centralized_bound(std::size_t d, std::size_t ell, double eps, double c, std::size_t n);

struct MgfProbe {
    double lambda;
    bool lambda_admissible;   // lambda <= 1 / (2 ||A||_inf)
    double empirical_mgf;     // mean of exp(lambda z^T A z')
    double fitted_constant;   // log(mgf) / (lambda^2 ||A||_F^2)
};

/// Samples E exp(lambda z^T A z') for Rademacher z, z' and fits the constant C.
MgfProbe mgf_bound_probe(const RealMatrix &a, double lambda, std::size_t samples, SeededStream &src);

}  // namespace qdcert

#endif

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

#include "qdcert/lowerbound.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace qdcert {

namespace {

constexpr double kBasisTol = 1e-10;
constexpr double kSupportCutoff = 1e-10;
constexpr double kSupportOverlap = 1e-8;
constexpr std::size_t kMaxEnumerationEll = 12;
constexpr std::size_t kMaxChannels = 3;
constexpr std::size_t kMaxCentralizedDim = 4096;

Eigen::Index idx(std::size_t v) {
    return static_cast<Eigen::Index>(v);
}

ComplexMatrix unit(std::size_t d, std::size_t r, std::size_t c) {
    ComplexMatrix m = ComplexMatrix::Zero(idx(d), idx(d));
    m(idx(r), idx(c)) = 1.0;
    return m;
}

std::vector<ComplexMatrix> gell_mann(std::size_t d) {
    std::vector<ComplexMatrix> out;
    out.reserve(d * d - 1);
    const double s = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = j + 1; k < d; ++k) {
            out.push_back(s * (unit(d, j, k) + unit(d, k, j)));
            out.push_back(s * (-i * unit(d, j, k) + i * unit(d, k, j)));
        }
    }
    for (std::size_t l = 1; l < d; ++l) {
        ComplexMatrix m = ComplexMatrix::Zero(idx(d), idx(d));
        for (std::size_t j = 0; j < l; ++j) {
            m(idx(j), idx(j)) = 1.0;
        }
        m(idx(l), idx(l)) = -static_cast<double>(l);
        out.push_back(m / std::sqrt(static_cast<double>(l * (l + 1))));
    }
    return out;
}

std::vector<ComplexMatrix> pauli_strings(std::size_t d) {
    if (!std::has_single_bit(d) || d < 2) {
        throw PreconditionError("Pauli basis requires d a power of two, d >= 2");
    }
    const auto n = static_cast<std::size_t>(std::countr_zero(d));
    ComplexMatrix single[4];
    single[0] = identity(2);
    single[1] = ComplexMatrix::Zero(2, 2);
    single[1](0, 1) = single[1](1, 0) = 1.0;
    single[2] = ComplexMatrix::Zero(2, 2);
    single[2](0, 1) = Complex(0.0, -1.0);
    single[2](1, 0) = Complex(0.0, 1.0);
    single[3] = ComplexMatrix::Zero(2, 2);
    single[3](0, 0) = 1.0;
    single[3](1, 1) = -1.0;
    std::vector<ComplexMatrix> out;
    const std::size_t count = std::size_t{1} << (2 * n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t code = 1; code < count; ++code) {
        ComplexMatrix m = ComplexMatrix::Ones(1, 1);
        for (std::size_t q = 0; q < n; ++q) {
            const std::size_t digit = (code >> (2 * (n - 1 - q))) & 3U;
            m = kron(m, single[digit]);
        }
        out.push_back(norm * m);
    }
    return out;
}

ComplexMatrix stack_vectorized(const std::vector<ComplexMatrix> &basis, std::size_t d) {
    ComplexMatrix v(idx(d * d), idx(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        v.col(idx(i)) = vectorize(basis[i]);
    }
    return v;
}

void validate_basis(const std::vector<ComplexMatrix> &basis, std::size_t d) {
    for (const auto &v : basis) {
        if (v.rows() != idx(d) || v.cols() != idx(d)) {
            throw DimensionError("hard instance basis element dimension", d, static_cast<std::size_t>(v.rows()));
        }
        if (std::abs(v.trace()) > kBasisTol) {
            throw PreconditionError("hard instance basis element is not traceless");
        }
        if (hermiticity_defect(v) > kBasisTol) {
            throw PreconditionError("hard instance basis element is not Hermitian");
        }
    }
    const ComplexMatrix v = stack_vectorized(basis, d);
    const ComplexMatrix gram = v.adjoint() * v;
    const double defect = (gram - ComplexMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    if (defect > kBasisTol) {
        throw PreconditionError("hard instance basis is not orthonormal (defect " + std::to_string(defect) + ")");
    }
}

void check_range(std::size_t d, std::size_t ell, double eps, double c, const HardInstanceOptions &opt) {
    const std::size_t full = d * d - 1;
    if (ell < 1 || ell > full) {
        throw PreconditionError("hard instance: ell must lie in [1, d^2 - 1]");
    }
    if (opt.range == RangeMode::Theorem) {
        if (2 * ell < d * d) {
            throw PreconditionError("hard instance: theorem mode needs ell >= d^2 / 2");
        }
        if (!(eps < opt.eps_threshold)) {
            throw PreconditionError("hard instance: theorem mode needs eps below the threshold");
        }
    }
    if (eps < 0.0 || c < 0.0) {
        throw PreconditionError("hard instance: eps and c must be nonnegative");
    }
}

double chi2_from_eigs(const ComplexMatrix &rho, const HermitianEigen &sig) {
    const ComplexMatrix rho2 = rho * rho;
    double acc = 0.0;
    for (Eigen::Index k = 0; k < sig.values.size(); ++k) {
        if (sig.values(k) > kSupportCutoff) {
            const ComplexVector v = sig.vectors.col(k);
            acc += (v.adjoint() * rho2 * v)(0, 0).real() / sig.values(k);
        }
    }
    return acc - 1.0;
}

bool support_contained_eig(const ComplexMatrix &rho, const HermitianEigen &sig) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < sig.values.size(); ++k) {
        if (sig.values(k) > kSupportCutoff) {
            keep.push_back(k);
        }
    }
    ComplexMatrix basis(sig.vectors.rows(), idx(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        basis.col(idx(i)) = sig.vectors.col(keep[i]);
    }
    const auto re = hermitian_eigen(0.5 * (rho + rho.adjoint()));
    for (Eigen::Index k = 0; k < re.values.size(); ++k) {
        if (re.values(k) > kSupportCutoff) {
            const double overlap = (basis.adjoint() * re.vectors.col(k)).squaredNorm();
            if (overlap < 1.0 - kSupportOverlap) {
                return false;
            }
        }
    }
    return true;
}

void check_channels(const HardInstance &inst, std::span<const ChannelBundle> channels, std::size_t max_channels) {
    if (channels.empty() || channels.size() > max_channels) {
        throw PreconditionError("Ingster-Suslina check needs between 1 and " + std::to_string(max_channels) + " channels");
    }
    for (const auto &ch : channels) {
        if (ch.d_in() != inst.d) {
            throw DimensionError("channel input dimension", inst.d, ch.d_in());
        }
        if (!is_mixedness_preserving(ch)) {
            throw PreconditionError("Ingster-Suslina check needs mixedness-preserving channels");
        }
    }
}

// Shared core: the ensemble is the uniform distribution over `signs`.
IngsterSuslinaReport ingster_suslina_core(
    const HardInstance &inst, std::span<const ChannelBundle> channels, const std::vector<std::vector<int>> &signs) {
    const std::size_t m = channels.size();
    const std::size_t count = signs.size();
    const ComplexMatrix mixed = identity(inst.d) / static_cast<double>(inst.d);

    std::vector<ComplexMatrix> reference(m);
    std::vector<ComplexMatrix> reference_inv(m);
    for (std::size_t i = 0; i < m; ++i) {
        reference[i] = channels[i].apply(mixed);
        reference_inv[i] = hermitian_pinv(reference[i]);
    }
    // outputs[z][i] = Phi_i(rho_z) - Phi_i(1/d); weighted[z][i] = reference_inv * outputs
    std::vector<std::vector<ComplexMatrix>> diff(count, std::vector<ComplexMatrix>(m));
    std::vector<std::vector<ComplexMatrix>> weighted_t(count, std::vector<ComplexMatrix>(m));
    ComplexMatrix product_dim = ComplexMatrix::Ones(1, 1);
    for (std::size_t i = 0; i < m; ++i) {
        product_dim = kron(product_dim, reference[i]);
    }
    ComplexMatrix mixture = ComplexMatrix::Zero(product_dim.rows(), product_dim.cols());
    for (std::size_t zi = 0; zi < count; ++zi) {
        const PerturbedState ps = perturbed_state(inst, signs[zi]);
        ComplexMatrix prod = ComplexMatrix::Ones(1, 1);
        for (std::size_t i = 0; i < m; ++i) {
            const ComplexMatrix out = channels[i].apply(ps.rho.matrix());
            prod = kron(prod, out);
            diff[zi][i] = out - reference[i];
            weighted_t[zi][i] = (reference_inv[i] * diff[zi][i]).transpose();
        }
        mixture += prod;
    }
    mixture /= static_cast<double>(count);

    IngsterSuslinaReport rep{};
    rep.sign_vectors = count;
    rep.lhs = quantum_chi2(mixture, product_dim);

    // Sum over ordered pairs, accumulated per first index to limit rounding.
    double exact = 0.0;
    double mgf = 0.0;
    for (std::size_t a = 0; a < count; ++a) {
        double row_exact = 0.0;
        double row_mgf = 0.0;
        for (std::size_t b = 0; b < count; ++b) {
            double prod_exact = 1.0;
            double sum_z = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                // tr(S^{-1} D_a D_b) = sum_jk (S^{-1} D_a)_{jk} (D_b)_{kj}
                const double z = weighted_t[a][i].cwiseProduct(diff[b][i]).sum().real();
                prod_exact *= 1.0 + z;
                sum_z += z;
            }
            row_exact += prod_exact;
            row_mgf += std::exp(sum_z);
        }
        exact += row_exact;
        mgf += row_mgf;
    }
    const double pairs = static_cast<double>(count) * static_cast<double>(count);
    rep.rhs_exact = exact / pairs - 1.0;
    rep.rhs_mgf_bound = mgf / pairs;
    return rep;
}

// Real-symmetric eigenvectors sorted ascending, ties ordered lexicographically
// after fixing each vector's largest-magnitude entry to be positive.
std::vector<Eigen::Index> ordered_eigen(RealVector &values, RealMatrix &vectors) {
    const Eigen::Index n = values.size();
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index arg = 0;
        vectors.col(k).cwiseAbs().maxCoeff(&arg);
        if (vectors(arg, k) < 0.0) {
            vectors.col(k) *= -1.0;
        }
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    constexpr double kTie = 1e-9;
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (std::abs(values(a) - values(b)) > kTie) {
            return values(a) < values(b);
        }
        for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
            if (std::abs(vectors(r, a) - vectors(r, b)) > kTie) {
                return vectors(r, a) < vectors(r, b);
            }
        }
        return false;
    });
    return order;
}

}  // namespace

std::vector<ComplexMatrix> traceless_orthonormal_basis(std::size_t d, BasisKind kind) {
    if (d < 2) {
        throw PreconditionError("traceless basis needs d >= 2");
    }
    return kind == BasisKind::Pauli ? pauli_strings(d) : gell_mann(d);
}

double HardInstance::scale() const {
    return c * eps / std::sqrt(static_cast<double>(d) * static_cast<double>(ell));
}

HardInstance build_hard_instance(
    std::size_t d, std::size_t ell, double eps, double c, BasisKind kind, const HardInstanceOptions &opt) {
    if (d < 2) {
        throw PreconditionError("hard instance needs d >= 2");
    }
    check_range(d, ell, eps, c, opt);
    auto full = traceless_orthonormal_basis(d, kind);
    full.resize(ell);
    HardInstance inst{d, ell, eps, c, std::move(full), {}};
    inst.isometry = stack_vectorized(inst.basis, d);
    return inst;
}

HardInstance build_hard_instance(
    std::size_t d, double eps, double c, std::vector<ComplexMatrix> basis, const HardInstanceOptions &opt) {
    if (d < 2) {
        throw PreconditionError("hard instance needs d >= 2");
    }
    check_range(d, basis.size(), eps, c, opt);
    validate_basis(basis, d);
    HardInstance inst{d, basis.size(), eps, c, std::move(basis), {}};
    inst.isometry = stack_vectorized(inst.basis, d);
    return inst;
}

std::vector<int> sign_vector(std::size_t ell, std::uint64_t index) {
    std::vector<int> z(ell);
    for (std::size_t i = 0; i < ell; ++i) {
        z[i] = ((index >> i) & 1U) != 0 ? -1 : 1;
    }
    return z;
}

PerturbedState perturbed_state(const HardInstance &inst, std::span<const int> z) {
    if (z.size() != inst.ell) {
        throw DimensionError("perturbed_state: sign vector length", inst.ell, z.size());
    }
    const auto d = idx(inst.d);
    ComplexMatrix delta = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < inst.ell; ++i) {
        if (z[i] != 1 && z[i] != -1) {
            throw PreconditionError("perturbed_state: sign entries must be +1 or -1");
        }
        delta += static_cast<double>(z[i]) * inst.basis[i];
    }
    delta *= inst.scale();
    const double op = delta.norm() > 0.0 ? schatten_norm(delta, Schatten::Inf) : 0.0;
    const double clamp = op > 0.0 ? std::min(1.0, 1.0 / (static_cast<double>(inst.d) * op)) : 1.0;
    ComplexMatrix bar = clamp * delta;
    ComplexMatrix rho = identity(inst.d) / static_cast<double>(inst.d) + bar;
    return {std::vector<int>(z.begin(), z.end()), std::move(delta), std::move(bar), clamp,
            DensityMatrix(0.5 * (rho + rho.adjoint()))};
}

double farness_fraction(const HardInstance &inst, std::size_t samples, SeededStream &src) {
    if (samples == 0) {
        throw PreconditionError("farness_fraction: samples must be positive");
    }
    std::size_t far = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        const auto z = rademacher_vector(inst.ell, src);
        const PerturbedState ps = perturbed_state(inst, z);
        if (schatten_norm(ps.delta_bar, Schatten::One) >= inst.eps) {
            ++far;
        }
    }
    return static_cast<double>(far) / static_cast<double>(samples);
}

bool support_contained(const ComplexMatrix &rho, const ComplexMatrix &sigma) {
    return support_contained_eig(rho, hermitian_eigen(0.5 * (sigma + sigma.adjoint())));
}

double quantum_chi2(const ComplexMatrix &rho, const ComplexMatrix &sigma) {
    require_square(rho, "quantum_chi2");
    require_square(sigma, "quantum_chi2");
    if (rho.rows() != sigma.rows()) {
        throw DimensionError(
            "quantum_chi2: state dimensions differ", static_cast<std::size_t>(sigma.rows()), static_cast<std::size_t>(rho.rows()));
    }
    const auto sig = hermitian_eigen(0.5 * (sigma + sigma.adjoint()));
    if (!support_contained_eig(rho, sig)) {
        return std::numeric_limits<double>::infinity();
    }
    return chi2_from_eigs(rho, sig);
}

double quantum_chi2(const DensityMatrix &rho, const DensityMatrix &sigma) {
    return quantum_chi2(rho.matrix(), sigma.matrix());
}

IngsterSuslinaReport ingster_suslina_check(const HardInstance &inst, std::span<const ChannelBundle> channels) {
    if (inst.ell > kMaxEnumerationEll) {
        throw EnumerationTooLarge(
            "ingster_suslina_check: ell = " + std::to_string(inst.ell) +
            " is too large to enumerate; use ingster_suslina_sampled");
    }
    check_channels(inst, channels, kMaxChannels);
    std::vector<std::vector<int>> signs;
    const std::uint64_t count = std::uint64_t{1} << inst.ell;
    signs.reserve(count);
    for (std::uint64_t s = 0; s < count; ++s) {
        signs.push_back(sign_vector(inst.ell, s));
    }
    return ingster_suslina_core(inst, channels, signs);
}

IngsterSuslinaReport ingster_suslina_sampled(
    const HardInstance &inst, std::span<const ChannelBundle> channels, std::size_t samples, SeededStream &src) {
    if (samples == 0) {
        throw PreconditionError("ingster_suslina_sampled: samples must be positive");
    }
    check_channels(inst, channels, kMaxChannels);
    std::vector<std::vector<int>> signs;
    signs.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        signs.push_back(rademacher_vector(inst.ell, src));
    }
    return ingster_suslina_core(inst, channels, signs);
}

ZQuadratic z_quadratic_identity(const HardInstance &inst, const ChannelBundle &ch, std::span<const int> z, std::span<const int> zp) {
    if (ch.d_in() != inst.d) {
        throw DimensionError("z_quadratic_identity: channel input dimension", inst.d, ch.d_in());
    }
    if (!is_mixedness_preserving(ch)) {
        throw PreconditionError("z_quadratic_identity: channel is not mixedness-preserving");
    }
    const PerturbedState a = perturbed_state(inst, z);
    const PerturbedState b = perturbed_state(inst, zp);
    const ComplexMatrix ref_inv = hermitian_pinv(ch.apply(identity(inst.d) / static_cast<double>(inst.d)));
    const double direct = (ref_inv * ch.apply(a.delta_bar) * ch.apply(b.delta_bar)).trace().real();

    Eigen::VectorXd zv(idx(inst.ell));
    Eigen::VectorXd zpv(idx(inst.ell));
    for (std::size_t i = 0; i < inst.ell; ++i) {
        zv(idx(i)) = z[i];
        zpv(idx(i)) = zp[i];
    }
    const ComplexVector left = ch.liouville().mat * (inst.isometry * zv.cast<Complex>());
    const ComplexVector right = ch.liouville().mat * (inst.isometry * zpv.cast<Complex>());
    const double coeff = static_cast<double>(ch.d_out()) * inst.c * inst.c * inst.eps * inst.eps * a.clamp * b.clamp /
                         (static_cast<double>(inst.d) * static_cast<double>(inst.ell));
    return {direct, coeff * left.dot(right).real()};
}

ComplexMatrix t_operator(std::span<const ChannelBundle> channels) {
    if (channels.empty()) {
        throw PreconditionError("t_operator: no channels");
    }
    const std::size_t d = channels.front().d_in();
    ComplexMatrix t = ComplexMatrix::Zero(idx(d * d), idx(d * d));
    for (const auto &ch : channels) {
        if (ch.d_in() != d) {
            throw DimensionError("t_operator: channel input dimensions differ", d, ch.d_in());
        }
        t.noalias() += ch.liouville().mat.adjoint() * ch.liouville().mat;
    }
    t /= static_cast<double>(channels.size());
    return t;
}

SandwichNorms sandwich_norms(const ComplexMatrix &t, const ComplexMatrix &isometry) {
    ComplexMatrix s = isometry.adjoint() * t * isometry;
    s = 0.5 * (s + s.adjoint());
    return {s.norm(), singular_values(s)(0)};
}

AdversarialBasis adversarial_basis(std::span<const ChannelBundle> channels, std::size_t ell) {
    const ComplexMatrix t = t_operator(channels);
    const std::size_t d = channels.front().d_in();
    if (d < 2 || ell < 1 || ell > d * d - 1) {
        throw PreconditionError("adversarial_basis: ell must lie in [1, d^2 - 1]");
    }
    for (const auto &ch : channels) {
        if (!is_mixedness_preserving(ch)) {
            throw PreconditionError("adversarial_basis: channels must be mixedness-preserving");
        }
    }
    // T preserves Hermiticity, so in the Hermitian traceless Gell-Mann frame it is
    // real symmetric and its eigenvectors give Hermitian basis elements.
    const auto gm = gell_mann(d);
    const ComplexMatrix frame = stack_vectorized(gm, d);
    const ComplexMatrix restricted = frame.adjoint() * t * frame;
    RealMatrix sym = restricted.real();
    sym = 0.5 * (sym + sym.transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw Error("adversarial_basis: eigensolver did not converge");
    }
    RealVector values = solver.eigenvalues();
    RealMatrix vectors = solver.eigenvectors();
    const auto order = ordered_eigen(values, vectors);

    AdversarialBasis out;
    out.eigenvalues.resize(idx(ell));
    RealMatrix chosen(vectors.rows(), idx(ell));
    for (std::size_t i = 0; i < ell; ++i) {
        chosen.col(idx(i)) = vectors.col(order[i]);
        out.eigenvalues(idx(i)) = values(order[i]);
    }
    out.isometry = frame * chosen.cast<Complex>();
    for (std::size_t i = 0; i < ell; ++i) {
        ComplexMatrix v = devectorize(out.isometry.col(idx(i)));
        out.basis.push_back(0.5 * (v + v.adjoint()));
    }
    out.norms = sandwich_norms(t, out.isometry);
    const double dd = static_cast<double>(d);
    const double denom = dd * dd - static_cast<double>(ell) - 1.0;
    out.bound = denom > 0.0 ? std::sqrt(static_cast<double>(ell)) * dd * static_cast<double>(channels.front().d_out()) / denom
                            : std::numeric_limits<double>::infinity();
    return out;
}

ComplexMatrix random_traceless_isometry(std::size_t d, std::size_t ell, SeededStream &src) {
    if (d < 2 || ell < 1 || ell > d * d - 1) {
        throw PreconditionError("random_traceless_isometry: ell must lie in [1, d^2 - 1]");
    }
    const std::size_t k = d * d - 1;
    RealMatrix g(idx(k), idx(ell));
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            g(i, j) = src.normal();
        }
    }
    Eigen::HouseholderQR<RealMatrix> qr(g);
    RealMatrix q = qr.householderQ() * RealMatrix::Identity(idx(k), idx(ell));
    return stack_vectorized(gell_mann(d), d) * q.cast<Complex>();
}

double weingarten_identity(std::size_t d) {
    if (d < 2) {
        throw PreconditionError("Weingarten coefficients need d >= 2");
    }
    const double dd = static_cast<double>(d);
    return 1.0 / (dd * dd - 1.0);
}

double weingarten_swap(std::size_t d) {
    if (d < 2) {
        throw PreconditionError("Weingarten coefficients need d >= 2");
    }
    const double dd = static_cast<double>(d);
    return -1.0 / (dd * (dd * dd - 1.0));
}

Complex weingarten_second_order(
    const ComplexMatrix &a1, const ComplexMatrix &a2, const ComplexMatrix &b1, const ComplexMatrix &b2) {
    require_square(a1, "weingarten_second_order");
    const auto d = static_cast<std::size_t>(a1.rows());
    for (const ComplexMatrix *m : {&a2, &b1, &b2}) {
        require_square(*m, "weingarten_second_order");
        if (static_cast<std::size_t>(m->rows()) != d) {
            throw DimensionError("weingarten_second_order: operand dimension", d, static_cast<std::size_t>(m->rows()));
        }
    }
    const Complex tr_a_swap = (a1 * a2).trace();
    const Complex tr_b_swap = (b1 * b2).trace();
    const Complex tr_a_id = a1.trace() * a2.trace();
    const Complex tr_b_id = b1.trace() * b2.trace();
    return weingarten_identity(d) * (tr_a_swap * tr_b_swap + tr_a_id * tr_b_id) +
           weingarten_swap(d) * (tr_a_swap * tr_b_id + tr_a_id * tr_b_swap);
}

double compression_moment_exact(const ComplexMatrix &delta, const Bipartition &part) {
    require_square(delta, "compression_moment_exact");
    if (static_cast<std::size_t>(delta.rows()) != part.total()) {
        throw DimensionError("compression_moment_exact: operator dimension", part.total(), static_cast<std::size_t>(delta.rows()));
    }
    if (std::abs(delta.trace()) > 1e-10) {
        throw PreconditionError("compression_moment_exact: Delta must be traceless");
    }
    if (!is_hermitian(delta)) {
        throw PreconditionError("compression_moment_exact: Delta must be Hermitian");
    }
    const double d = static_cast<double>(part.total());
    if (d < 2.0) {
        throw PreconditionError("compression_moment_exact: needs d >= 2");
    }
    const double da = static_cast<double>(part.dim_a);
    const double db = static_cast<double>(part.dim_b);
    const double tr2 = (delta * delta).trace().real();
    return tr2 * (da * da * db - db) / (d * d - 1.0);
}

MonteCarloEstimate compression_moment_monte_carlo(
    const ComplexMatrix &delta, const Bipartition &part, std::size_t trials, SeededStream &src) {
    if (trials < 2) {
        throw PreconditionError("compression_moment_monte_carlo: need at least two trials");
    }
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const ComplexMatrix u = haar_unitary(part.total(), src);
        const double x = compress(delta, u, part).squaredNorm();
        sum += x;
        sum2 += x * x;
    }
    const double n = static_cast<double>(trials);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
    return {mean, std::sqrt(var / n), trials};
}

FourthMomentReport fourth_moment_probe(
    const ComplexMatrix &delta, const Bipartition &part, std::size_t trials, SeededStream &src) {
    if (trials == 0) {
        throw PreconditionError("fourth_moment_probe: trials must be positive");
    }
    require_square(delta, "fourth_moment_probe");
    if (static_cast<std::size_t>(delta.rows()) != part.total()) {
        throw DimensionError("fourth_moment_probe: operator dimension", part.total(), static_cast<std::size_t>(delta.rows()));
    }
    const double d = static_cast<double>(part.total());
    const double da = static_cast<double>(part.dim_a);
    const double norm2 = delta.squaredNorm();
    const double pz_level = da / (4.0 * d) * norm2;  // (1/2 sqrt(d_A/d) ||Delta||)^2
    double s2 = 0.0;
    double s4 = 0.0;
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const ComplexMatrix u = haar_unitary(part.total(), src);
        const double x = compress(delta, u, part).squaredNorm();
        s2 += x;
        s4 += x * x;
        hits += x >= pz_level ? 1 : 0;
    }
    const double n = static_cast<double>(trials);
    FourthMomentReport rep{};
    rep.trials = trials;
    rep.mean_second = s2 / n;
    rep.mean_fourth = s4 / n;
    rep.ratio = rep.mean_fourth / ((da / d) * (da / d) * norm2 * norm2);
    rep.pz_fraction = static_cast<double>(hits) / n;
    return rep;
}

double centralized_bound(std::size_t d, std::size_t ell, double eps, double c, std::size_t n) {
    const double nn = static_cast<double>(n);
    const double c4e4 = std::pow(c * eps, 4.0);
    return std::exp(nn * nn * c4e4 / (2.0 * static_cast<double>(ell))) - 1.0 + 4.0 * std::exp(-static_cast<double>(d));
}

CentralizedReport centralized_chi2_bound(
    const HardInstance &inst, std::size_t n, CentralizedMode mode, std::size_t samples, SeededStream *src) {
    if (n == 0) {
        throw PreconditionError("centralized_chi2_bound: n must be positive");
    }
    CentralizedReport rep{};
    rep.mode = mode;
    rep.bound = centralized_bound(inst.d, inst.ell, inst.eps, inst.c, n);
    const double dd = static_cast<double>(inst.d);
    const double nn = static_cast<double>(n);

    if (mode == CentralizedMode::Exact) {
        double dim = std::pow(dd, nn);
        if (dim > static_cast<double>(kMaxCentralizedDim) || inst.ell > kMaxEnumerationEll) {
            throw EnumerationTooLarge(
                "centralized_chi2_bound: d^n = " + std::to_string(static_cast<long long>(dim)) + ", ell = " +
                std::to_string(inst.ell) + " exceed the exact limits (4096, 12); use sampled mode");
        }
        const std::uint64_t count = std::uint64_t{1} << inst.ell;
        std::vector<ComplexMatrix> bars;
        bars.reserve(count);
        const auto big = idx(static_cast<std::size_t>(dim));
        ComplexMatrix mixture = ComplexMatrix::Zero(big, big);
        for (std::uint64_t s = 0; s < count; ++s) {
            const PerturbedState ps = perturbed_state(inst, sign_vector(inst.ell, s));
            ComplexMatrix prod = ps.rho.matrix();
            for (std::size_t k = 1; k < n; ++k) {
                prod = kron(prod, ps.rho.matrix());
            }
            mixture += prod;
            bars.push_back(ps.delta_bar);
        }
        mixture /= static_cast<double>(count);
        rep.value = quantum_chi2(mixture, identity(static_cast<std::size_t>(dim)) / dim);
        double acc = 0.0;
        for (const auto &a : bars) {
            double row = 0.0;
            for (const auto &b : bars) {
                const double z = dd * a.cwiseProduct(b.transpose()).sum().real();
                row += std::pow(1.0 + z, nn);
            }
            acc += row;
        }
        rep.expansion = acc / (static_cast<double>(count) * static_cast<double>(count)) - 1.0;
        return rep;
    }

    if (src == nullptr || samples < 2) {
        throw PreconditionError("centralized_chi2_bound: sampled mode needs a stream and at least two samples");
    }
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const PerturbedState a = perturbed_state(inst, rademacher_vector(inst.ell, *src));
        const PerturbedState b = perturbed_state(inst, rademacher_vector(inst.ell, *src));
        const double z = dd * a.delta_bar.cwiseProduct(b.delta_bar.transpose()).sum().real();
        const double x = std::pow(1.0 + z, nn) - 1.0;
        sum += x;
        sum2 += x * x;
    }
    const double k = static_cast<double>(samples);
    rep.value = sum / k;
    rep.value_stderr = std::sqrt(std::max(0.0, (sum2 - k * rep.value * rep.value) / (k - 1.0)) / k);
    rep.expansion = rep.value;
    return rep;
}

MgfProbe mgf_bound_probe(const RealMatrix &a, double lambda, std::size_t samples, SeededStream &src) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw PreconditionError("mgf_bound_probe: A must be square and non-empty");
    }
    if (samples == 0) {
        throw PreconditionError("mgf_bound_probe: samples must be positive");
    }
    Eigen::JacobiSVD<RealMatrix> svd(a);
    const double op = svd.singularValues()(0);
    const double fro2 = a.squaredNorm();
    const auto ell = static_cast<std::size_t>(a.rows());
    double acc = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const auto z = rademacher_vector(ell, src);
        const auto zp = rademacher_vector(ell, src);
        Eigen::VectorXd zv(a.rows());
        Eigen::VectorXd zpv(a.rows());
        for (std::size_t i = 0; i < ell; ++i) {
            zv(idx(i)) = z[i];
            zpv(idx(i)) = zp[i];
        }
        acc += std::exp(lambda * zv.dot(a * zpv));
    }
    MgfProbe p{};
    p.lambda = lambda;
    p.lambda_admissible = op == 0.0 || lambda <= 1.0 / (2.0 * op);
    p.empirical_mgf = acc / static_cast<double>(samples);
    p.fitted_constant = (lambda == 0.0 || fro2 == 0.0) ? 0.0 : std::log(p.empirical_mgf) / (lambda * lambda * fro2);
    return p;
}

}  // namespace qdcert

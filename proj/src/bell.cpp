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


#include "qdcert/bell.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace qdcert {

namespace {

constexpr std::size_t kMaxWeylQubits = 6;
constexpr std::size_t kMaxDistributionQubits = 4;
constexpr std::size_t kMaxLawQubits = 2;
constexpr std::uint64_t kFirstNode = 1;
constexpr std::uint64_t kSecondNode = 2;

void check_label(const WeylLabel &x) {
    if (x.n == 0 || x.n > 16) {
        throw PreconditionError("WeylLabel: n must lie in [1, 16]");
    }
    const std::uint32_t mask = (std::uint32_t{1} << x.n) - 1;
    if ((x.a & ~mask) != 0 || (x.b & ~mask) != 0) {
        throw DimensionError("WeylLabel: bit string longer than n", x.n, static_cast<std::size_t>(std::bit_width(x.a | x.b)));
    }
}

// p_rho(x) given rho and its transpose.
double probability_from(const ComplexMatrix &rho, const ComplexMatrix &rho_t, const WeylLabel &x) {
    const ComplexMatrix w = weyl_operator(x);
    return (w * rho * w * rho_t).trace().real() / static_cast<double>(rho.rows());
}

WeylLabel sample_from(const std::vector<double> &probs, std::size_t n, SeededStream &src) {
    double r = src.uniform();
    for (std::size_t k = 0; k < probs.size(); ++k) {
        r -= probs[k];
        if (r < 0.0) {
            return WeylLabel::from_index(n, k);
        }
    }
    // Rounding left r marginally positive: take the last label with mass.
    std::size_t k = probs.size() - 1;
    while (k > 0 && probs[k] <= 0.0) {
        --k;
    }
    return WeylLabel::from_index(n, k);
}

std::vector<bool> label_bits(const WeylLabel &x) {
    std::vector<bool> bits;
    bits.reserve(2 * x.n);
    const std::uint64_t packed = x.index();
    for (std::size_t i = 0; i < 2 * x.n; ++i) {
        bits.push_back(((packed >> (2 * x.n - 1 - i)) & 1U) != 0);
    }
    return bits;
}

}  // namespace

WeylLabel WeylLabel::from_index(std::size_t n, std::uint64_t index) {
    const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
    WeylLabel x{n, static_cast<std::uint32_t>((index >> n) & mask), static_cast<std::uint32_t>(index & mask)};
    check_label(x);
    return x;
}

int WeylLabel::symplectic_sign() const noexcept {
    return std::popcount(a & b) % 2 == 0 ? 1 : -1;
}

WeylLabel operator^(const WeylLabel &x, const WeylLabel &y) {
    if (x.n != y.n) {
        throw DimensionError("WeylLabel xor: qubit counts differ", x.n, y.n);
    }
    return {x.n, x.a ^ y.a, x.b ^ y.b};
}

std::string to_hex(const WeylLabel &x) {
    static constexpr char kDigits[] = "0123456789abcdef";
    const std::size_t bits = 2 * x.n;
    const std::size_t digits = (bits + 3) / 4;
    const std::uint64_t packed = x.index();
    std::string out(digits, '0');
    for (std::size_t i = 0; i < digits; ++i) {
        out[digits - 1 - i] = kDigits[(packed >> (4 * i)) & 0xFU];
    }
    return out;
}

std::size_t qubit_count(std::size_t d) {
    if (d < 2 || !std::has_single_bit(d)) {
        throw DimensionError("Bell sampling needs a power-of-two dimension", std::bit_ceil(d), d);
    }
    return static_cast<std::size_t>(std::countr_zero(d));
}

ComplexMatrix weyl_operator(const WeylLabel &x) {
    check_label(x);
    if (x.n > kMaxWeylQubits) {
        throw PreconditionError("weyl_operator: n exceeds the dense limit of 6 qubits");
    }
    const Complex i(0.0, 1.0);
    ComplexMatrix out = ComplexMatrix::Ones(1, 1);
    for (std::size_t q = 0; q < x.n; ++q) {
        const unsigned shift = static_cast<unsigned>(x.n - 1 - q);
        const bool aq = ((x.a >> shift) & 1U) != 0;
        const bool bq = ((x.b >> shift) & 1U) != 0;
        ComplexMatrix p = ComplexMatrix::Zero(2, 2);
        // X^a Z^b, then the i^{a b} phase.
        const Complex z1 = bq ? Complex(-1.0) : Complex(1.0);
        if (aq) {
            p(0, 1) = z1;
            p(1, 0) = 1.0;
        } else {
            p(0, 0) = 1.0;
            p(1, 1) = z1;
        }
        if (aq && bq) {
            p *= i;
        }
        out = kron(out, p);
    }
    return out;
}

ComplexVector bell_state(const WeylLabel &x) {
    const ComplexMatrix w = weyl_operator(x);
    // (W (x) 1) vec(1) = vec(W) in row-major order.
    return vectorize(w) / std::sqrt(static_cast<double>(w.rows()));
}

double bell_probability(const DensityMatrix &rho, const WeylLabel &x) {
    if (qubit_count(rho.dim()) != x.n) {
        throw DimensionError("bell_probability: label qubit count", qubit_count(rho.dim()), x.n);
    }
    return probability_from(rho.matrix(), rho.matrix().transpose(), x);
}

std::vector<BellOutcome> bell_distribution(const DensityMatrix &rho) {
    const std::size_t n = qubit_count(rho.dim());
    if (n > kMaxDistributionQubits) {
        throw PreconditionError("bell_distribution: n exceeds the dense limit of 4 qubits");
    }
    const ComplexMatrix rt = rho.matrix().transpose();
    const std::uint64_t count = std::uint64_t{1} << (2 * n);
    std::vector<BellOutcome> out;
    out.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        const WeylLabel x = WeylLabel::from_index(n, k);
        out.push_back({x, probability_from(rho.matrix(), rt, x)});
    }
    return out;
}

ProtocolConfig bell_protocol_config(std::size_t n, std::uint64_t seed) {
    ProtocolConfig cfg;
    cfg.m = 2;
    cfg.d = std::size_t{1} << n;
    cfg.n_c = 2 * n;
    cfg.n_q = 0;
    cfg.coin = CoinModel::Private;
    cfg.bell_pairs = n;
    cfg.eps = 1.0;
    cfg.delta = 1.0;
    cfg.seed = seed;
    return cfg;
}

DistributedBellSample distributed_bell_sampling(const DensityMatrix &rho, const ProtocolConfig &cfg, SeededStream &src) {
    const std::size_t n = qubit_count(rho.dim());
    if (n > kMaxDistributionQubits) {
        throw PreconditionError("distributed_bell_sampling: n exceeds the dense limit of 4 qubits");
    }
    if (cfg.m != 2 || cfg.n_c != 2 * n || cfg.n_q != 0 || cfg.bell_pairs != n || cfg.coin != CoinModel::Private ||
        cfg.d != rho.dim()) {
        throw BudgetViolation("distributed_bell_sampling: protocol needs m = 2, n_c = 2n, n_q = 0, E = n, private coins");
    }
    // Private coins: each node draws from its own stream, keyed by this round.
    const std::uint64_t round = src.engine()();
    SeededStream first(round, kFirstNode);
    SeededStream second(round, kSecondNode);

    const std::uint64_t count = std::uint64_t{1} << (2 * n);
    const WeylLabel z1 = WeylLabel::from_index(n, first.uniform_int(count));

    // Second node holds W_{z1} rho W_{z1} after teleportation and its own copy.
    const ComplexMatrix w = weyl_operator(z1);
    const ComplexMatrix moved = w * rho.matrix() * w;
    const ComplexMatrix own_t = rho.matrix().transpose();
    std::vector<double> cond(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        const ComplexMatrix wk = weyl_operator(WeylLabel::from_index(n, k));
        cond[k] = (wk * moved * wk * own_t).trace().real() / static_cast<double>(rho.dim());
    }
    const WeylLabel z2 = sample_from(cond, n, second);

    budget_enforcer(NodeMessage{label_bits(z1), std::nullopt}, cfg);
    budget_enforcer(NodeMessage{label_bits(z2), std::nullopt}, cfg);
    return {z1 ^ z2, z1, z2};
}

DistributedBellSample distributed_bell_sampling(const DensityMatrix &rho, SeededStream &src) {
    return distributed_bell_sampling(rho, bell_protocol_config(qubit_count(rho.dim()), src.master_seed()), src);
}

std::vector<double> analytic_output_law(const DensityMatrix &rho) {
    const std::size_t n = qubit_count(rho.dim());
    if (n > kMaxLawQubits) {
        throw PreconditionError("analytic_output_law: n exceeds 2");
    }
    const std::uint64_t count = std::uint64_t{1} << (2 * n);
    const double uniform = 1.0 / static_cast<double>(count);
    const ComplexMatrix own_t = rho.matrix().transpose();
    std::vector<double> law(count, 0.0);
    for (std::uint64_t k1 = 0; k1 < count; ++k1) {
        const ComplexMatrix w1 = weyl_operator(WeylLabel::from_index(n, k1));
        const ComplexMatrix moved = w1 * rho.matrix() * w1;
        for (std::uint64_t k2 = 0; k2 < count; ++k2) {
            const ComplexMatrix w2 = weyl_operator(WeylLabel::from_index(n, k2));
            const double cond = (w2 * moved * w2 * own_t).trace().real() / static_cast<double>(rho.dim());
            law[k1 ^ k2] += uniform * cond;
        }
    }
    return law;
}

ExactStateLaw exact_state_law_n1(const DensityMatrix &rho) {
    if (rho.dim() != 2) {
        throw DimensionError("exact_state_law_n1: single-qubit state required", 2, rho.dim());
    }
    const ComplexVector epr = bell_state(WeylLabel{1, 0, 0});
    const ComplexMatrix pair = epr * epr.adjoint();
    const ComplexMatrix total = kron(kron(rho.matrix(), pair), rho.matrix());  // A1 B1 B2 A2
    ExactStateLaw out{std::vector<double>(16, 0.0), std::vector<double>(4, 0.0)};
    for (std::uint64_t k1 = 0; k1 < 4; ++k1) {
        const ComplexVector s1 = bell_state(WeylLabel::from_index(1, k1));
        for (std::uint64_t k2 = 0; k2 < 4; ++k2) {
            const ComplexVector s2 = bell_state(WeylLabel::from_index(1, k2));
            const ComplexVector joint = kron(s1, s2);
            const double p = (joint.adjoint() * total * joint)(0, 0).real();
            out.joint[k1 * 4 + k2] = p;
            out.output[k1 ^ k2] += p;
        }
    }
    return out;
}

double purity_from_bell(std::span<const WeylLabel> samples) {
    if (samples.empty()) {
        throw PreconditionError("purity_from_bell: no samples");
    }
    double acc = 0.0;
    for (const auto &x : samples) {
        acc += x.symplectic_sign();
    }
    return acc / static_cast<double>(samples.size());
}

PurityTestResult purity_test(const DensityMatrix &rho, std::size_t samples, SeededStream &src) {
    if (samples == 0) {
        throw PreconditionError("purity_test: no samples");
    }
    const std::size_t n = qubit_count(rho.dim());
    const ProtocolConfig cfg = bell_protocol_config(n, src.master_seed());
    std::vector<WeylLabel> labels;
    labels.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        labels.push_back(distributed_bell_sampling(rho, cfg, src).z);
    }
    const double estimate = purity_from_bell(labels);
    const double threshold = 0.5 * (1.0 + std::ldexp(1.0, -static_cast<int>(n)));
    return {estimate >= threshold ? PurityVerdict::Pure : PurityVerdict::MaximallyMixed, estimate, threshold, samples};
}

}  // namespace qdcert

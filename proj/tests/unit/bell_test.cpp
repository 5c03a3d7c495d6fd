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

#include <gtest/gtest.h>

#include <array>
#include <cmath>

using namespace qdcert;

namespace {

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
    ComplexMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

TEST(weyl, single_qubit_operators) {
    const Complex i(0.0, 1.0);
    EXPECT_LT((weyl_operator({1, 0, 0}) - identity(2)).norm(), 1e-15);
    EXPECT_LT((weyl_operator({1, 1, 0}) - mat2(0, 1, 1, 0)).norm(), 1e-15);
    EXPECT_LT((weyl_operator({1, 0, 1}) - mat2(1, 0, 0, -1)).norm(), 1e-15);
    EXPECT_LT((weyl_operator({1, 1, 1}) - mat2(0, -i, i, 0)).norm(), 1e-15);
}

TEST(weyl, hermitian_unitary_orthogonal) {
    for (std::size_t n = 1; n <= 3; ++n) {
        const std::size_t d = std::size_t{1} << n;
        const std::uint64_t count = std::uint64_t{1} << (2 * n);
        for (std::uint64_t x = 0; x < count; ++x) {
            const ComplexMatrix w = weyl_operator(WeylLabel::from_index(n, x));
            EXPECT_LT(hermiticity_defect(w), 1e-15);
            EXPECT_LT((w * w - identity(d)).norm(), 1e-14);
            for (std::uint64_t y = 0; y < count; ++y) {
                const ComplexMatrix v = weyl_operator(WeylLabel::from_index(n, y));
                EXPECT_NEAR(std::abs(hs_inner(w, v)), x == y ? static_cast<double>(d) : 0.0, 1e-13);
            }
        }
    }
    EXPECT_THROW(weyl_operator({7, 0, 0}), PreconditionError);
}

TEST(weyl, bell_states_orthonormal) {
    const std::size_t n = 2;
    for (std::uint64_t x = 0; x < 16; ++x) {
        const ComplexVector bx = bell_state(WeylLabel::from_index(n, x));
        for (std::uint64_t y = 0; y < 16; ++y) {
            EXPECT_NEAR(std::abs(bx.dot(bell_state(WeylLabel::from_index(n, y)))), x == y ? 1.0 : 0.0, 1e-14);
        }
    }
}

TEST(weyl, label_algebra) {
    const WeylLabel x{3, 5, 2};
    EXPECT_EQ(x.index(), 0b101010U);
    EXPECT_EQ(WeylLabel::from_index(3, x.index()), x);
    EXPECT_EQ(x.symplectic_sign(), 1);
    EXPECT_EQ((WeylLabel{1, 1, 1}).symplectic_sign(), -1);
    EXPECT_EQ((x ^ WeylLabel{3, 1, 3}), (WeylLabel{3, 4, 1}));
    EXPECT_EQ(to_hex(x), "2a");
    EXPECT_EQ(to_hex(WeylLabel{1, 1, 1}), "3");
    EXPECT_EQ(to_hex(WeylLabel{2, 0, 1}), "1");
    EXPECT_EQ(to_hex(WeylLabel{4, 0xF, 0x1}), "f1");
}

TEST(bell_distribution, single_qubit_examples) {
    const auto zero = bell_distribution(DensityMatrix::basis_state(2, 0));
    const std::array<double, 4> expect_zero{0.5, 0.5, 0.0, 0.0};  // I, Z, X, Y
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_EQ(zero[k].label.index(), k);
        EXPECT_NEAR(zero[k].probability, expect_zero[k], 1e-15);
    }
    for (const auto &o : bell_distribution(DensityMatrix::maximally_mixed(2))) {
        EXPECT_NEAR(o.probability, 0.25, 1e-15);
    }
}

TEST(bell_distribution, normalized_with_purity_identity) {
    SeededStream src(1, 0);
    for (std::size_t n = 1; n <= 3; ++n) {
        const std::size_t d = std::size_t{1} << n;
        for (int t = 0; t < 5; ++t) {
            const DensityMatrix rho = t % 2 == 0 ? random_density(d, src) : random_pure_state(d, src);
            double total = 0.0;
            double signed_sum = 0.0;
            for (const auto &o : bell_distribution(rho)) {
                EXPECT_GE(o.probability, -1e-15);
                total += o.probability;
                signed_sum += o.label.symplectic_sign() * o.probability;
            }
            EXPECT_NEAR(total, 1.0, 1e-12);
            EXPECT_NEAR(signed_sum, rho.purity(), 1e-12);
        }
    }
}

TEST(bell_distribution, dimension_checks) {
    EXPECT_EQ(qubit_count(8), 3U);
    EXPECT_THROW(qubit_count(6), DimensionError);
    EXPECT_THROW(qubit_count(1), DimensionError);
    EXPECT_THROW(bell_distribution(DensityMatrix::maximally_mixed(3)), DimensionError);
}

TEST(distributed_bell, analytic_law_matches_exact_state) {
    SeededStream src(2, 0);
    for (int t = 0; t < 10; ++t) {
        const DensityMatrix rho = t == 0 ? DensityMatrix::basis_state(2, 0) : random_density(2, src);
        const auto analytic = analytic_output_law(rho);
        const ExactStateLaw exact = exact_state_law_n1(rho);
        ASSERT_EQ(analytic.size(), 4U);
        double tv = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            tv += 0.5 * std::abs(analytic[k] - exact.output[k]);
        }
        EXPECT_LT(tv, 1e-10);
        double joint_total = 0.0;
        for (std::size_t k1 = 0; k1 < 4; ++k1) {
            double marginal = 0.0;
            for (std::size_t k2 = 0; k2 < 4; ++k2) {
                marginal += exact.joint[k1 * 4 + k2];
            }
            // The first node's outcome is uniform.
            EXPECT_NEAR(marginal, 0.25, 1e-12);
            joint_total += marginal;
        }
        EXPECT_NEAR(joint_total, 1.0, 1e-12);
    }
}

TEST(distributed_bell, output_law_is_bell_sampling) {
    SeededStream src(3, 0);
    for (std::size_t n : {1U, 2U}) {
        const DensityMatrix rho = random_density(std::size_t{1} << n, src);
        const auto analytic = analytic_output_law(rho);
        const auto direct = bell_distribution(rho);
        for (std::size_t k = 0; k < analytic.size(); ++k) {
            EXPECT_NEAR(analytic[k], direct[k].probability, 1e-12);
        }
    }
}

TEST(distributed_bell, empirical_frequencies) {
    SeededStream src(4, 0);
    const DensityMatrix rho = random_density(2, src);
    const auto law = analytic_output_law(rho);
    const int samples = 20000;
    std::array<int, 4> z_counts{};
    std::array<int, 4> z1_counts{};
    for (int t = 0; t < samples; ++t) {
        const DistributedBellSample s = distributed_bell_sampling(rho, src);
        EXPECT_EQ((s.z1 ^ s.z2), s.z);
        ++z_counts[s.z.index()];
        ++z1_counts[s.z1.index()];
    }
    double chi2 = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        const double sigma = std::sqrt(samples * law[k] * (1.0 - law[k]));
        EXPECT_LT(std::abs(z_counts[k] - samples * law[k]), 4.0 * sigma + 1.0);
        const double expected = samples / 4.0;
        chi2 += (z1_counts[k] - expected) * (z1_counts[k] - expected) / expected;
    }
    // 3 degrees of freedom, upper 0.1% point.
    EXPECT_LT(chi2, 16.27);
}

TEST(distributed_bell, budget) {
    SeededStream src(5, 0);
    const ProtocolConfig cfg = bell_protocol_config(2, 9);
    EXPECT_EQ(cfg.m, 2U);
    EXPECT_EQ(cfg.n_c, 4U);
    EXPECT_EQ(cfg.n_q, 0U);
    EXPECT_EQ(cfg.coin, CoinModel::Private);
    EXPECT_EQ(cfg.bell_pairs, 2U);
    const DensityMatrix rho = random_density(4, src);
    EXPECT_NO_THROW(distributed_bell_sampling(rho, cfg, src));
    ProtocolConfig tight = cfg;
    tight.n_c = 3;
    EXPECT_THROW(distributed_bell_sampling(rho, tight, src), BudgetViolation);
    ProtocolConfig few_pairs = cfg;
    few_pairs.bell_pairs = 1;
    EXPECT_THROW(distributed_bell_sampling(rho, few_pairs, src), BudgetViolation);
}

TEST(distributed_bell, reproducible) {
    const DensityMatrix rho = DensityMatrix::maximally_mixed(4);
    SeededStream a(6, 0);
    SeededStream b(6, 0);
    for (int t = 0; t < 50; ++t) {
        const auto sa = distributed_bell_sampling(rho, a);
        const auto sb = distributed_bell_sampling(rho, b);
        EXPECT_EQ(sa.z1, sb.z1);
        EXPECT_EQ(sa.z2, sb.z2);
    }
}

TEST(purity_test, verdicts) {
    SeededStream src(7, 0);
    const PurityTestResult pure = purity_test(random_pure_state(4, src), 400, src);
    EXPECT_EQ(pure.verdict, PurityVerdict::Pure);
    EXPECT_NEAR(pure.estimate, 1.0, 1e-12);
    EXPECT_NEAR(pure.threshold, 0.625, 1e-15);
    EXPECT_EQ(pure.samples, 400U);
    const PurityTestResult mixed = purity_test(DensityMatrix::maximally_mixed(4), 400, src);
    EXPECT_EQ(mixed.verdict, PurityVerdict::MaximallyMixed);
    EXPECT_LT(std::abs(mixed.estimate - 0.25), 0.25);
    EXPECT_THROW(purity_from_bell({}), PreconditionError);
}

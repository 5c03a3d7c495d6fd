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

#include <gtest/gtest.h>

#include <cmath>

using namespace qdcert;

TEST(seeded_stream, reproducible) {
    SeededStream a(42, 3);
    SeededStream b(42, 3);
    const ComplexMatrix ua = haar_unitary(5, a);
    const ComplexMatrix ub = haar_unitary(5, b);
    EXPECT_EQ(ua, ub);
    EXPECT_EQ(a.engine()(), b.engine()());
}

TEST(seeded_stream, streams_differ) {
    SeededStream a(42, 3);
    SeededStream b(42, 4);
    SeededStream c(43, 3);
    const auto x = a.engine()();
    EXPECT_NE(x, b.engine()());
    EXPECT_NE(x, c.engine()());
    EXPECT_NE(SeededStream(1, 0).child(0).engine()(), SeededStream(1, 0).child(1).engine()());
    EXPECT_NE(SeededStream(1, 0).child(0).engine()(), SeededStream(1, 0).engine()());
}

TEST(seeded_stream, uniform_int_range) {
    SeededStream s(9, 0);
    for (int i = 0; i < 1000; ++i) {
        EXPECT_LT(s.uniform_int(7), 7U);
    }
}

TEST(haar_unitary, scalar_case) {
    SeededStream s(1, 0);
    const ComplexMatrix u = haar_unitary(1, s);
    EXPECT_NEAR(std::abs(u(0, 0)), 1.0, 1e-14);
    EXPECT_THROW(haar_unitary(0, s), PreconditionError);
}

TEST(haar_unitary, unitarity) {
    SeededStream s(2, 0);
    for (int t = 0; t < 100; ++t) {
        const ComplexMatrix u = haar_unitary(8, s);
        EXPECT_LT((u.adjoint() * u - identity(8)).norm(), 1e-12);
    }
}

TEST(haar_unitary, first_moment) {
    // E tr(U A U^dagger B) = tr(A) tr(B) / d.
    SeededStream s(3, 0);
    const std::size_t d = 4;
    const ComplexMatrix a = random_hermitian(d, s) + 0.7 * identity(d);
    const ComplexMatrix b = random_hermitian(d, s) - 0.4 * identity(d);
    const double expect = (a.trace() * b.trace()).real() / static_cast<double>(d);
    const int n = 100000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int t = 0; t < n; ++t) {
        const ComplexMatrix u = haar_unitary(d, s);
        const double x = (u * a * u.adjoint() * b).trace().real();
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    EXPECT_LT(std::abs(mean - expect), 3.0 * se);
}

TEST(haar_unitary, entry_moments) {
    // |U_00|^2 is Beta(1, d-1): mean 1/d, second moment 2/(d(d+1)). Without the
    // QR phase correction the off-diagonal phases would not be uniform; check
    // E[U_00] = 0 as well.
    SeededStream s(4, 0);
    const std::size_t d = 3;
    const int n = 50000;
    double m1 = 0.0;
    double m2 = 0.0;
    Complex mean_entry(0.0);
    for (int t = 0; t < n; ++t) {
        const ComplexMatrix u = haar_unitary(d, s);
        const double p = std::norm(u(0, 0));
        m1 += p;
        m2 += p * p;
        mean_entry += u(0, 0);
    }
    m1 /= n;
    m2 /= n;
    mean_entry /= static_cast<double>(n);
    EXPECT_NEAR(m1, 1.0 / 3.0, 4.0 * std::sqrt(2.0 / 12.0 - 1.0 / 9.0) / std::sqrt(n));
    EXPECT_NEAR(m2, 2.0 / 12.0, 0.005);
    EXPECT_LT(std::abs(mean_entry), 4.0 * std::sqrt(1.0 / 3.0 / n));
}

TEST(sample_unitary, brickwork_is_unitary_and_seeded) {
    SeededStream a(5, 1);
    SeededStream b(5, 1);
    const ComplexMatrix u = sample_unitary(8, UnitaryEnsemble::Brickwork, a);
    EXPECT_LT((u.adjoint() * u - identity(8)).norm(), 1e-12);
    EXPECT_EQ(u, sample_unitary(8, UnitaryEnsemble::Brickwork, b));
    EXPECT_THROW(sample_unitary(6, UnitaryEnsemble::Brickwork, a), PreconditionError);
}

TEST(rademacher_vector, signs_and_mean) {
    SeededStream s(6, 0);
    const std::size_t n = 100000;
    const auto z = rademacher_vector(n, s);
    double sum = 0.0;
    for (int v : z) {
        ASSERT_TRUE(v == 1 || v == -1);
        sum += v;
    }
    EXPECT_LT(std::abs(sum / n), 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST(random_states, valid_and_full_rank) {
    SeededStream s(7, 0);
    for (std::size_t d : {2, 4, 7}) {
        const DensityMatrix rho = random_density(d, s);
        EXPECT_GT(hermitian_eigenvalues(rho.matrix())(0), 0.0);
        EXPECT_NEAR(random_pure_state(d, s).purity(), 1.0, 1e-12);
        const ComplexMatrix t = random_traceless_hermitian(d, s);
        EXPECT_LT(std::abs(t.trace()), 1e-12);
        EXPECT_NEAR(t.norm(), 1.0, 1e-12);
    }
}

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


#include "qdcert/channels.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "qdcert/random.hpp"

using namespace qdcert;

namespace {

ComplexMatrix unit(std::size_t d, std::size_t i, std::size_t j) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
    return m;
}

// Choi matrix assembled from the channel action alone.
ComplexMatrix choi_by_action(const ChannelBundle &ch) {
    ComplexMatrix j = ComplexMatrix::Zero(static_cast<Eigen::Index>(ch.d_in() * ch.d_out()),
                                          static_cast<Eigen::Index>(ch.d_in() * ch.d_out()));
    for (std::size_t a = 0; a < ch.d_in(); ++a) {
        for (std::size_t b = 0; b < ch.d_in(); ++b) {
            j += kron(unit(ch.d_in(), a, b), ch.apply(unit(ch.d_in(), a, b)));
        }
    }
    return j;
}

}  // namespace

TEST(compression_channel, maps_mixed_to_mixed) {
    SeededStream s(1, 0);
    for (int t = 0; t < 10; ++t) {
        const ComplexMatrix u = haar_unitary(8, s);
        const ComplexMatrix out = compress(identity(8) / 8.0, u, Bipartition(2, 4));
        EXPECT_LT((out - identity(2) / 2.0).norm(), 1e-10);
    }
}

TEST(compression_channel, identity_unitary_is_partial_trace) {
    SeededStream s(2, 0);
    const DensityMatrix rho = random_density(6, s);
    const Bipartition part(3, 2);
    EXPECT_LT((compress(rho.matrix(), identity(6), part) - partial_trace(rho.matrix(), part, Subsystem::A)).norm(), 1e-13);
}

TEST(compression_channel, trace_preserving) {
    SeededStream s(3, 0);
    for (int t = 0; t < 50; ++t) {
        const ComplexMatrix u = haar_unitary(8, s);
        const DensityMatrix rho = random_density(8, s);
        const ComplexMatrix out = compress(rho.matrix(), u, Bipartition(2, 4));
        EXPECT_NEAR(out.trace().real(), 1.0, 1e-12);
    }
}

TEST(compression_channel, rejects_non_unitary) {
    ComplexMatrix u = identity(4);
    u(0, 0) = 1.1;
    EXPECT_THROW(compression_channel(u, Bipartition(2, 2)), PreconditionError);
    EXPECT_THROW(compression_channel(identity(4), Bipartition(2, 3)), DimensionError);
}

TEST(compression_channel, bundle_matches_compress) {
    SeededStream s(4, 0);
    const ComplexMatrix u = haar_unitary(8, s);
    const ChannelBundle ch = compression_channel(u, Bipartition(2, 4));
    const DensityMatrix rho = random_density(8, s);
    EXPECT_LT((ch.apply(rho.matrix()) - compress(rho.matrix(), u, Bipartition(2, 4))).norm(), 1e-12);
}

TEST(liouville, identity_channel_is_identity_matrix) {
    const ChannelBundle ch = identity_channel(3);
    EXPECT_LT((ch.liouville().mat - identity(9)).norm(), 1e-14);
}

TEST(liouville, depolarizing_rank_one_norm) {
    const ChannelBundle ch = depolarizing_channel(4, 2);
    // M = vec(1_2 / 2) vec(1_4)^dagger, so ||M||_2 = (1/sqrt 2) * 2.
    const ComplexMatrix expect = vectorize(identity(2) / 2.0) * vectorize(identity(4)).adjoint();
    EXPECT_LT((ch.liouville().mat - expect).norm(), 1e-12);
    EXPECT_NEAR(ch.liouville_fro_norm(), std::sqrt(2.0), 1e-12);
}

TEST(liouville, defining_identity_on_random_inputs) {
    SeededStream s(5, 0);
    const ChannelBundle ch = random_mixedness_preserving_channel(6, 2, s);
    for (int t = 0; t < 20; ++t) {
        const ComplexMatrix x = ginibre(6, s);
        EXPECT_LT((vectorize(ch.apply(x)) - ch.liouville().mat * vectorize(x)).norm(), 1e-10);
    }
    EXPECT_LT(representation_discrepancy(ch, s), 1e-9);
}

TEST(choi, matches_action_and_choi_facts) {
    SeededStream s(6, 0);
    for (int t = 0; t < 5; ++t) {
        const ChannelBundle ch = compression_channel(haar_unitary(8, s), Bipartition(2, 4));
        EXPECT_LT((ch.choi().mat - choi_by_action(ch)).norm(), 1e-10);
        EXPECT_LT((liouville_to_choi(ch.liouville()).mat - ch.choi().mat).norm(), 1e-12);
        // Tracing the output register gives the input identity; tr J = d.
        const ComplexMatrix reduced = partial_trace(ch.choi().mat, Bipartition(8, 2), Subsystem::A);
        EXPECT_LT((reduced - identity(8)).norm(), 1e-9);
        EXPECT_NEAR(ch.choi().mat.trace().real(), 8.0, 1e-9);
    }
}

TEST(choi, round_trip_reproduces_action) {
    SeededStream s(7, 0);
    const ChannelBundle ch = random_mixedness_preserving_channel(4, 2, s);
    const KrausChannel rebuilt = choi_to_kraus(ch.choi());
    EXPECT_EQ(rebuilt.d_in(), 4U);
    EXPECT_EQ(rebuilt.d_out(), 2U);
    for (int t = 0; t < 20; ++t) {
        const ComplexMatrix x = ginibre(4, s);
        EXPECT_LT((rebuilt.apply(x) - ch.apply(x)).norm(), 1e-9);
    }
}

TEST(kraus_channel, validation) {
    EXPECT_THROW(KrausChannel(2, 2, {identity(3)}), DimensionError);
    EXPECT_THROW(KrausChannel(2, 2, {identity(2) * 0.5}), PreconditionError);
    EXPECT_NO_THROW(KrausChannel(2, 2, {identity(2)}));
}

TEST(mixedness, classification) {
    SeededStream s(8, 0);
    EXPECT_TRUE(is_mixedness_preserving(compression_channel(haar_unitary(4, s), Bipartition(2, 2))));
    EXPECT_TRUE(is_mixedness_preserving(depolarizing_channel(4, 2)));
    EXPECT_FALSE(is_mixedness_preserving(replacement_channel(4, DensityMatrix::basis_state(2, 0))));
    EXPECT_TRUE(is_mixedness_preserving(identity_channel(3)));
}

TEST(norm_bound_check, identity_is_tight) {
    const NormBoundReport r = norm_bound_check(identity_channel(4));
    EXPECT_NEAR(r.fro_norm, 4.0, 1e-12);
    EXPECT_NEAR(r.fro_bound, 4.0, 1e-12);
    EXPECT_NEAR(r.op_norm, 1.0, 1e-12);
    EXPECT_NEAR(r.op_bound, 1.0, 1e-12);
    EXPECT_TRUE(r.fro_ok && r.op_ok && r.mixedness_preserving);
}

TEST(norm_bound_check, depolarizing_values) {
    const NormBoundReport r = norm_bound_check(depolarizing_channel(4, 2));
    EXPECT_NEAR(r.fro_norm, std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(r.fro_bound, std::sqrt(8.0), 1e-12);
    EXPECT_NEAR(r.op_norm, std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(r.op_bound, std::sqrt(2.0), 1e-12);
    EXPECT_TRUE(r.fro_ok && r.op_ok);
}

TEST(norm_bound_check, random_compressions) {
    SeededStream s(9, 0);
    for (int t = 0; t < 100; ++t) {
        const NormBoundReport r = norm_bound_check(compression_channel(haar_unitary(8, s), Bipartition(2, 4)));
        EXPECT_TRUE(r.fro_ok) << r.fro_norm << " vs " << r.fro_bound;
        EXPECT_TRUE(r.op_ok) << r.op_norm << " vs " << r.op_bound;
    }
}

TEST(kadison_schwarz, nonnegative_on_random_inputs) {
    SeededStream s(10, 0);
    for (int t = 0; t < 50; ++t) {
        const ChannelBundle ch = random_mixedness_preserving_channel(4, 2, s);
        EXPECT_GE(kadison_schwarz_probe(ch, ginibre(2, s)), -1e-9);
    }
}

TEST(data_processing, trace_distance_contracts) {
    SeededStream s(11, 0);
    for (int t = 0; t < 30; ++t) {
        const ChannelBundle ch = random_mixedness_preserving_channel(8, 4, s);
        const DensityMatrix rho = random_density(8, s);
        const DensityMatrix sigma = random_density(8, s);
        const double before = schatten_norm(rho.matrix() - sigma.matrix(), Schatten::One);
        const double after = schatten_norm(ch.apply(rho.matrix()) - ch.apply(sigma.matrix()), Schatten::One);
        EXPECT_LE(after, before + 1e-9);
    }
}

TEST(random_channel, unitary_components_at_full_dimension) {
    SeededStream s(12, 0);
    const ChannelBundle ch = random_mixedness_preserving_channel(4, 4, s);
    EXPECT_EQ(ch.d_out(), 4U);
    EXPECT_TRUE(is_mixedness_preserving(ch));
    EXPECT_THROW(random_mixedness_preserving_channel(6, 4, s), PreconditionError);
}

TEST(padded_dimension, rounds_up) {
    EXPECT_EQ(padded_dimension(5, 2), 6U);
    EXPECT_EQ(padded_dimension(8, 2), 8U);
    EXPECT_EQ(padded_dimension(3, 4), 4U);
}

TEST(channel_json, round_trip) {
    SeededStream s(13, 0);
    const ChannelBundle ch = random_mixedness_preserving_channel(4, 2, s);
    const KrausChannel back = channel_from_json(channel_to_json(ch.kraus()));
    ASSERT_EQ(back.operators().size(), ch.kraus().operators().size());
    for (std::size_t k = 0; k < back.operators().size(); ++k) {
        EXPECT_EQ(back.operators()[k], ch.kraus().operators()[k]);
    }
    EXPECT_THROW(channel_from_json("{\"d_in\": 2}"), Error);
}

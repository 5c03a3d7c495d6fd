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


#include "qdcert/certify.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "qdcert/channels.hpp"

using namespace qdcert;

namespace {

ProtocolConfig protocol(std::size_t d, std::size_t n_q, double eps, double delta, std::uint64_t seed) {
    ProtocolConfig cfg;
    cfg.d = d;
    cfg.n_q = n_q;
    cfg.n_c = 0;
    cfg.coin = CoinModel::Public;
    cfg.bell_pairs = 0;
    cfg.eps = eps;
    cfg.delta = delta;
    cfg.seed = seed;
    cfg.m = plan_algorithm1(cfg).nodes_required;
    return cfg;
}

double hs_frequency(const DensityMatrix &rho, const DensityMatrix &sigma, double eps, double delta, HsOutcome want,
                    int trials, std::uint64_t seed) {
    const std::vector<DensityMatrix> copies(hs_required_copies(eps, delta), rho);
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
        SeededStream src(seed, static_cast<std::uint64_t>(t));
        hits += hs_certify(copies, sigma, eps, delta, src).outcome == want ? 1 : 0;
    }
    return static_cast<double>(hits) / trials;
}

}  // namespace

TEST(hs_certify, copy_count_formula) {
    // ceil(64 ln(10) / 0.09) = 1638.
    EXPECT_EQ(hs_required_copies(0.3, 0.1), 1638U);
    EXPECT_EQ(hs_group_count(0.1), 3U);
    EXPECT_EQ(hs_group_count(0.2), 3U);
    EXPECT_EQ(hs_group_count(1.0 / 64.0), 5U);
    for (std::size_t n : {100, 1638, 2048, 4097}) {
        EXPECT_EQ(hs_required_copies(hs_resolvable_eps(n, 0.1), 0.1), n);
    }
    EXPECT_THROW(hs_required_copies(0.0, 0.1), PreconditionError);
}

TEST(hs_certify, identical_states_close) {
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(4);
    EXPECT_GE(hs_frequency(mixed, mixed, 0.3, 0.1, HsOutcome::Close, 200, 1), 0.9);
}

TEST(hs_certify, far_states_far) {
    // ||diag(1,0,0,0) - 1/4||_2 = sqrt(3)/2 >= 0.3.
    const DensityMatrix rho = DensityMatrix::basis_state(4, 0);
    const DensityMatrix sigma = DensityMatrix::maximally_mixed(4);
    EXPECT_NEAR((rho.matrix() - sigma.matrix()).norm(), std::sqrt(3.0) / 2.0, 1e-15);
    EXPECT_GE(hs_frequency(rho, sigma, 0.3, 0.1, HsOutcome::Far, 200, 2), 0.9);
}

TEST(hs_certify, beyond_diameter_always_close) {
    const DensityMatrix rho = DensityMatrix::basis_state(3, 1);
    EXPECT_EQ(hs_frequency(rho, rho, 2.5, 0.1, HsOutcome::Close, 50, 3), 1.0);
}

TEST(hs_certify, insufficient_copies) {
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(2);
    const std::vector<DensityMatrix> copies(10, mixed);
    SeededStream src(1, 0);
    try {
        hs_certify(copies, mixed, 0.3, 0.1, src);
        FAIL() << "expected InsufficientCopiesError";
    } catch (const InsufficientCopiesError &e) {
        EXPECT_EQ(e.required(), 1638U);
        EXPECT_NE(std::string(e.what()).find("1638"), std::string::npos);
    }
}

TEST(hs_certify, statistic_is_unbiased) {
    // Average of the group estimates tracks ||rho - sigma||_2^2.
    SeededStream gen(4, 0);
    const DensityMatrix rho = random_density(3, gen);
    const DensityMatrix sigma = DensityMatrix::maximally_mixed(3);
    const double truth = (rho.matrix() - sigma.matrix()).squaredNorm();
    const std::vector<DensityMatrix> copies(hs_required_copies(0.2, 0.3), rho);
    double sum = 0.0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        SeededStream src(5, static_cast<std::uint64_t>(t));
        sum += hs_certify(copies, sigma, 0.2, 0.3, src).statistic;
    }
    EXPECT_NEAR(sum / trials, truth, 0.01);
}

TEST(plan_algorithm1, desk_scale_numbers) {
    const ProtocolConfig cfg = protocol(8, 1, 0.5, 0.2, 0);
    const Algorithm1Plan p = plan_algorithm1(cfg);
    EXPECT_EQ(p.d_padded, 8U);
    EXPECT_EQ(p.batch_size, 2048U);  // ceil(16 * 64 / (2 * 0.25))
    EXPECT_EQ(p.batches, 13U);       // ceil(8 ln 5)
    EXPECT_EQ(p.nodes_required, 26624U);
    EXPECT_NEAR(p.eps_prime, std::sqrt(2.0) * 0.5 / 16.0, 1e-15);
    EXPECT_NEAR(p.delta_prime, 1.0 / 64.0, 1e-15);
    EXPECT_NEAR(p.tau, 1.0 / 32.0, 1e-15);
    EXPECT_GE(p.eps_test, p.eps_prime);
}

TEST(plan_algorithm1, pads_indivisible_dimension) {
    ProtocolConfig cfg = protocol(6, 2, 0.5, 0.2, 0);
    EXPECT_EQ(plan_algorithm1(cfg).d_padded, 8U);
}

TEST(run_algorithm1, rejects_bad_configs) {
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(8);
    ProtocolConfig cfg = protocol(8, 1, 0.5, 0.2, 1);
    cfg.m -= 1;
    try {
        run_algorithm1(mixed, mixed, cfg);
        FAIL() << "expected PreconditionError";
    } catch (const PreconditionError &e) {
        EXPECT_NE(std::string(e.what()).find("26624"), std::string::npos);
    }
    cfg = protocol(8, 1, 0.5, 0.2, 1);
    cfg.coin = CoinModel::Private;
    EXPECT_THROW(run_algorithm1(mixed, mixed, cfg), PreconditionError);
    cfg = protocol(8, 1, 0.5, 0.2, 1);
    EXPECT_THROW(run_algorithm1(DensityMatrix::maximally_mixed(4), mixed, cfg), DimensionError);
}

TEST(run_algorithm1, deterministic_and_budgeted) {
    const DensityMatrix zero = DensityMatrix::basis_state(4, 0);
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(4);
    const ProtocolConfig cfg = protocol(4, 1, 0.5, 0.2, 99);
    const Verdict a = run_algorithm1(zero, mixed, cfg);
    const Verdict b = run_algorithm1(zero, mixed, cfg);
    EXPECT_EQ(a.decision, b.decision);
    EXPECT_EQ(a.far_count, b.far_count);
    ASSERT_EQ(a.batches.size(), b.batches.size());
    for (std::size_t r = 0; r < a.batches.size(); ++r) {
        EXPECT_EQ(a.batches[r].statistic, b.batches[r].statistic);
    }
    EXPECT_EQ(a.messages_checked, a.plan.nodes_required);
}

TEST(run_algorithm1, public_coin_shared_within_batch) {
    const ProtocolConfig cfg = protocol(8, 1, 0.5, 0.2, 5);
    const ComplexMatrix u0 = public_batch_unitary(cfg, 8, 0);
    EXPECT_EQ(u0, public_batch_unitary(cfg, 8, 0));
    EXPECT_NE(u0, public_batch_unitary(cfg, 8, 1));
}

TEST(budget_enforcer, limits) {
    ProtocolConfig cfg;
    cfg.d = 8;
    cfg.n_q = 1;
    cfg.n_c = 2;
    EXPECT_NO_THROW(budget_enforcer({{true, false}, DensityMatrix::maximally_mixed(2)}, cfg));
    EXPECT_THROW(budget_enforcer({{true, false, true}, std::nullopt}, cfg), BudgetViolation);
    EXPECT_THROW(budget_enforcer({{}, DensityMatrix::maximally_mixed(4)}, cfg), BudgetViolation);
    cfg.n_q = 0;
    EXPECT_THROW(budget_enforcer({{}, DensityMatrix::maximally_mixed(2)}, cfg), BudgetViolation);
}

TEST(protocol_config, validation) {
    ProtocolConfig cfg;
    cfg.d = 4;
    cfg.n_q = 3;
    EXPECT_THROW(cfg.validate(), PreconditionError);
    cfg.n_q = 1;
    cfg.eps = 0.0;
    EXPECT_THROW(cfg.validate(), PreconditionError);
    cfg.eps = 0.5;
    EXPECT_NO_THROW(cfg.validate());
}

// Soundness and completeness at desk scale: success >= 1 - delta - 3 binomial
// standard errors in both regimes over 50 runs.
class algorithm1_grid : public ::testing::TestWithParam<std::pair<std::size_t, std::size_t>> {};

TEST_P(algorithm1_grid, success_rates) {
    const auto [d, n_q] = GetParam();
    const double delta = 0.2;
    const int runs = 50;
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(d);
    const DensityMatrix zero = DensityMatrix::basis_state(d, 0);
    int accepts = 0;
    int rejects = 0;
    for (int r = 0; r < runs; ++r) {
        const ProtocolConfig cfg = protocol(d, n_q, 0.5, delta, 1000 + static_cast<std::uint64_t>(r));
        accepts += run_algorithm1(mixed, mixed, cfg).decision == Decision::Accept ? 1 : 0;
        rejects += run_algorithm1(zero, mixed, cfg).decision == Decision::Reject ? 1 : 0;
    }
    const double floor = 1.0 - delta - 3.0 * std::sqrt(delta * (1.0 - delta) / runs);
    EXPECT_GE(static_cast<double>(accepts) / runs, floor);
    EXPECT_GE(static_cast<double>(rejects) / runs, floor);
}

INSTANTIATE_TEST_SUITE_P(desk, algorithm1_grid,
                         ::testing::Values(std::make_pair(4, 1), std::make_pair(8, 1), std::make_pair(8, 2)));

TEST(run_algorithm1, full_message_dimension) {
    // d_q = d: each node forwards U rho U^dagger.
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(4);
    const DensityMatrix zero = DensityMatrix::basis_state(4, 0);
    const ProtocolConfig cfg = protocol(4, 2, 0.5, 0.2, 3);
    EXPECT_EQ(run_algorithm1(mixed, mixed, cfg).decision, Decision::Accept);
    EXPECT_EQ(run_algorithm1(zero, mixed, cfg).decision, Decision::Reject);
}

TEST(calibrate_c2, sane_ranges) {
    SeededStream src(8, 0);
    const C2Calibration cal = calibrate_c2(Bipartition(2, 4), 3, 2000, src);
    EXPECT_GE(cal.c2_estimate, 4.0);
    EXPECT_GT(cal.min_pz_fraction, 0.02);
    EXPECT_LE(cal.min_pz_fraction, 1.0);
    EXPECT_LE(cal.max_c1_ratio, 10.0);
}

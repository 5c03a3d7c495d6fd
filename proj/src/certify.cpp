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

#include <algorithm>
#include <cmath>
#include <string>

#include "qdcert/channels.hpp"
#include "qdcert/lowerbound.hpp"

namespace qdcert {

namespace {

constexpr std::uint64_t kPublicCoinStream = 0;
constexpr std::uint64_t kCentralStream = 1;

double log_inv(double delta) {
    return std::log(1.0 / delta);
}

// Shadow snapshot minus sigma, flattened: (d+1) |phi><phi| - 1 - sigma.
void snapshot_residual(
    const ComplexMatrix &rho, const ComplexMatrix &sigma, SeededStream &src, ComplexVector &out) {
    const auto d = rho.rows();
    const ComplexMatrix u = haar_unitary(static_cast<std::size_t>(d), src);
    // Outcome b with probability <b| U rho U^dagger |b>.
    const ComplexMatrix rotated = u * rho * u.adjoint();
    double r = src.uniform();
    Eigen::Index b = d - 1;
    for (Eigen::Index k = 0; k < d; ++k) {
        r -= rotated(k, k).real();
        if (r < 0.0) {
            b = k;
            break;
        }
    }
    const ComplexVector phi = u.adjoint().col(b);
    const double scale = static_cast<double>(d + 1);
    out.resize(d * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            out(i * d + j) = scale * phi(i) * std::conj(phi(j)) - (i == j ? 1.0 : 0.0) - sigma(i, j);
        }
    }
}

}  // namespace

std::size_t hs_group_count(double delta) {
    auto k = static_cast<std::size_t>(std::ceil(log_inv(delta)));
    k = std::max<std::size_t>(k, 1);
    if (k % 2 == 0) {
        ++k;
    }
    return k;
}

std::size_t hs_required_copies(double eps, double delta, const CertifyConstants &k) {
    if (!(eps > 0.0) || !(delta > 0.0 && delta <= 1.0)) {
        throw PreconditionError("hs_required_copies: eps must be positive and delta in (0, 1]");
    }
    // The small offset keeps hs_required_copies(hs_resolvable_eps(n)) == n under rounding.
    const auto base = static_cast<std::size_t>(std::ceil(k.c_hs * log_inv(delta) / (eps * eps) - 1e-9));
    return std::max(base, 2 * hs_group_count(delta));
}

double hs_resolvable_eps(std::size_t copies, double delta, const CertifyConstants &k) {
    if (copies == 0) {
        throw PreconditionError("hs_resolvable_eps: no copies");
    }
    return std::sqrt(k.c_hs * log_inv(delta) / static_cast<double>(copies));
}

HsResult hs_certify(
    std::span<const DensityMatrix> copies,
    const DensityMatrix &sigma,
    double eps,
    double delta,
    SeededStream &src,
    const CertifyConstants &k) {
    const std::size_t need = hs_required_copies(eps, delta, k);
    if (copies.size() < need) {
        throw InsufficientCopiesError(need, copies.size());
    }
    for (const auto &c : copies) {
        if (c.dim() != sigma.dim()) {
            throw DimensionError("hs_certify: copy dimension differs from sigma", sigma.dim(), c.dim());
        }
    }
    const std::size_t groups = hs_group_count(delta);
    const std::size_t per_group = copies.size() / groups;
    const auto d2 = static_cast<Eigen::Index>(sigma.dim() * sigma.dim());

    std::vector<double> estimates;
    estimates.reserve(groups);
    ComplexVector residual(d2);
    for (std::size_t g = 0; g < groups; ++g) {
        ComplexVector sum = ComplexVector::Zero(d2);
        double diag = 0.0;
        for (std::size_t i = 0; i < per_group; ++i) {
            snapshot_residual(copies[g * per_group + i].matrix(), sigma.matrix(), src, residual);
            sum += residual;
            diag += residual.squaredNorm();
        }
        const double n = static_cast<double>(per_group);
        estimates.push_back((sum.squaredNorm() - diag) / (n * (n - 1.0)));
    }
    std::nth_element(estimates.begin(), estimates.begin() + static_cast<std::ptrdiff_t>(groups / 2), estimates.end());
    const double median = std::clamp(estimates[groups / 2], 0.0, 2.0);
    const double threshold = 0.5 * eps * eps;
    return {median > threshold ? HsOutcome::Far : HsOutcome::Close, median, threshold, groups};
}

Algorithm1Plan plan_algorithm1(const ProtocolConfig &cfg, const CertifyConstants &k) {
    cfg.validate();
    Algorithm1Plan p{};
    p.d_q = cfg.d_q();
    if (p.d_q < 2) {
        throw PreconditionError("run_algorithm1: needs d_q >= 2 (n_q >= 1)");
    }
    p.d_padded = padded_dimension(cfg.d, p.d_q);
    const double d = static_cast<double>(p.d_padded);
    const double dq = static_cast<double>(p.d_q);
    p.batch_size = static_cast<std::size_t>(std::ceil(k.kappa * d * d / (dq * cfg.eps * cfg.eps)));
    p.batches = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(k.kappa_r * log_inv(cfg.delta))));
    p.nodes_required = p.batch_size * p.batches;
    p.eps_prime = std::sqrt(dq) * cfg.eps / (2.0 * d);
    p.delta_prime = 1.0 / (4.0 * k.c2);
    p.tau = 1.0 / (2.0 * k.c2);
    p.eps_test = std::max(p.eps_prime, hs_resolvable_eps(p.batch_size, p.delta_prime, k));
    return p;
}

ComplexMatrix public_batch_unitary(const ProtocolConfig &cfg, std::size_t d, std::size_t batch, UnitaryEnsemble ensemble) {
    SeededStream coin = SeededStream(cfg.seed, kPublicCoinStream).child(batch);
    return sample_unitary(d, ensemble, coin);
}

NodeMessage compression_node_message(const DensityMatrix &rho, const ComplexMatrix &u, const Bipartition &part) {
    ComplexMatrix out = compress(rho.matrix(), u, part);
    return NodeMessage{{}, DensityMatrix(0.5 * (out + out.adjoint()))};
}

Verdict run_algorithm1(
    const DensityMatrix &rho,
    const DensityMatrix &sigma,
    const ProtocolConfig &cfg,
    const CertifyConstants &k,
    UnitaryEnsemble ensemble) {
    if (cfg.coin != CoinModel::Public || cfg.n_c != 0 || cfg.bell_pairs != 0) {
        throw PreconditionError("run_algorithm1: requires public coins, n_c = 0 and E = 0");
    }
    if (rho.dim() != cfg.d || sigma.dim() != cfg.d) {
        throw DimensionError("run_algorithm1: state dimension", cfg.d, rho.dim() != cfg.d ? rho.dim() : sigma.dim());
    }
    const Algorithm1Plan plan = plan_algorithm1(cfg, k);
    if (cfg.m < plan.nodes_required) {
        throw PreconditionError(
            "run_algorithm1: m = " + std::to_string(cfg.m) + " is below the required " +
            std::to_string(plan.nodes_required) + " nodes");
    }
    const DensityMatrix rho_p = embed_state(rho, plan.d_padded);
    const DensityMatrix sigma_p = embed_state(sigma, plan.d_padded);
    const Bipartition part(plan.d_q, plan.d_padded / plan.d_q);

    Verdict v{};
    v.plan = plan;
    v.batches.reserve(plan.batches);
    SeededStream central(cfg.seed, kCentralStream);
    std::vector<DensityMatrix> received;
    received.reserve(plan.batch_size);
    for (std::size_t r = 0; r < plan.batches; ++r) {
        const ComplexMatrix u = public_batch_unitary(cfg, plan.d_padded, r, ensemble);
        received.clear();
        for (std::size_t node = 0; node < plan.batch_size; ++node) {
            NodeMessage msg = compression_node_message(rho_p, u, part);
            budget_enforcer(msg, cfg);
            ++v.messages_checked;
            received.push_back(std::move(*msg.quantum));
        }
        const ComplexMatrix reference = compress(sigma_p.matrix(), u, part);
        const DensityMatrix sigma_r(0.5 * (reference + reference.adjoint()));
        SeededStream tester = central.child(r);
        const HsResult res = hs_certify(received, sigma_r, plan.eps_test, plan.delta_prime, tester, k);
        const bool far = res.outcome == HsOutcome::Far;
        v.far_count += far ? 1 : 0;
        v.batches.push_back({far, res.statistic, res.threshold});
    }
    v.far_limit = plan.tau * static_cast<double>(plan.batches);
    v.decision = static_cast<double>(v.far_count) > v.far_limit ? Decision::Reject : Decision::Accept;
    return v;
}

C2Calibration calibrate_c2(const Bipartition &part, std::size_t pairs, std::size_t trials, SeededStream &src) {
    if (pairs == 0 || trials == 0) {
        throw PreconditionError("calibrate_c2: pairs and trials must be positive");
    }
    C2Calibration cal{0.0, 1.0, 0.0, pairs, trials};
    const std::size_t d = part.total();
    for (std::size_t p = 0; p < pairs; ++p) {
        const DensityMatrix rho = random_density(d, src);
        const DensityMatrix sigma = random_density(d, src);
        const ComplexMatrix delta = rho.matrix() - sigma.matrix();
        const FourthMomentReport rep = fourth_moment_probe(delta, part, trials, src);
        cal.c2_estimate = std::max(cal.c2_estimate, 4.0 * rep.mean_fourth / (rep.mean_second * rep.mean_second));
        cal.min_pz_fraction = std::min(cal.min_pz_fraction, rep.pz_fraction);
        cal.max_c1_ratio = std::max(cal.max_c1_ratio, rep.ratio);
    }
    return cal;
}

}  // namespace qdcert

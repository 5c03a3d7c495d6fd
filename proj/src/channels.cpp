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

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace qdcert {

namespace {

constexpr double kTracePreservingTol = 1e-9;
constexpr double kUnitaryTol = 1e-10;
constexpr double kChoiCutoff = 1e-10;

Eigen::Index idx(std::size_t v) {
    return static_cast<Eigen::Index>(v);
}

}  // namespace

KrausChannel::KrausChannel(std::size_t d_in, std::size_t d_out, std::vector<ComplexMatrix> kraus)
    : d_in_(d_in), d_out_(d_out), kraus_(std::move(kraus)) {
    if (d_in == 0 || d_out == 0) {
        throw PreconditionError("KrausChannel: dimensions must be positive");
    }
    if (kraus_.empty()) {
        throw PreconditionError("KrausChannel: at least one Kraus operator required");
    }
    ComplexMatrix acc = ComplexMatrix::Zero(idx(d_in), idx(d_in));
    for (const auto &a : kraus_) {
        if (static_cast<std::size_t>(a.rows()) != d_out) {
            throw DimensionError("KrausChannel: Kraus operator row count", d_out, static_cast<std::size_t>(a.rows()));
        }
        if (static_cast<std::size_t>(a.cols()) != d_in) {
            throw DimensionError("KrausChannel: Kraus operator column count", d_in, static_cast<std::size_t>(a.cols()));
        }
        require_finite(a, "KrausChannel");
        acc += a.adjoint() * a;
    }
    const double defect = (acc - identity(d_in)).cwiseAbs().maxCoeff();
    if (defect > kTracePreservingTol) {
        throw PreconditionError("KrausChannel: not trace preserving (defect " + std::to_string(defect) + ")");
    }
}

ComplexMatrix KrausChannel::apply(const ComplexMatrix &x) const {
    if (x.rows() != idx(d_in_) || x.cols() != idx(d_in_)) {
        throw DimensionError("KrausChannel::apply: input dimension", d_in_, static_cast<std::size_t>(x.rows()));
    }
    ComplexMatrix out = ComplexMatrix::Zero(idx(d_out_), idx(d_out_));
    for (const auto &a : kraus_) {
        out.noalias() += a * x * a.adjoint();
    }
    return out;
}

ComplexMatrix KrausChannel::apply_adjoint(const ComplexMatrix &y) const {
    if (y.rows() != idx(d_out_) || y.cols() != idx(d_out_)) {
        throw DimensionError(
            "KrausChannel::apply_adjoint: input dimension", d_out_, static_cast<std::size_t>(y.rows()));
    }
    ComplexMatrix out = ComplexMatrix::Zero(idx(d_in_), idx(d_in_));
    for (const auto &a : kraus_) {
        out.noalias() += a.adjoint() * y * a;
    }
    return out;
}

LiouvilleMatrix kraus_to_liouville(const KrausChannel &ch) {
    ComplexMatrix m = ComplexMatrix::Zero(idx(ch.d_out() * ch.d_out()), idx(ch.d_in() * ch.d_in()));
    for (const auto &a : ch.operators()) {
        m += kron(a, a.conjugate());
    }
    return {ch.d_in(), ch.d_out(), std::move(m)};
}

ChoiMatrix liouville_to_choi(const LiouvilleMatrix &m) {
    const auto di = idx(m.d_in);
    const auto dout = idx(m.d_out);
    if (m.mat.rows() != dout * dout || m.mat.cols() != di * di) {
        throw DimensionError(
            "liouville_to_choi: Liouville matrix shape", m.d_out * m.d_out * m.d_in * m.d_in,
            static_cast<std::size_t>(m.mat.size()));
    }
    ComplexMatrix j(di * dout, di * dout);
    for (Eigen::Index i = 0; i < di; ++i) {
        for (Eigen::Index jj = 0; jj < di; ++jj) {
            for (Eigen::Index a = 0; a < dout; ++a) {
                for (Eigen::Index b = 0; b < dout; ++b) {
                    j(i * dout + a, jj * dout + b) = m.mat(a * dout + b, i * di + jj);
                }
            }
        }
    }
    return {m.d_in, m.d_out, std::move(j)};
}

ChoiMatrix kraus_to_choi(const KrausChannel &ch) {
    const auto di = idx(ch.d_in());
    const auto dout = idx(ch.d_out());
    ComplexMatrix j = ComplexMatrix::Zero(di * dout, di * dout);
    for (const auto &a : ch.operators()) {
        // |v_a> = sum_i |i> (x) A|i>
        ComplexVector v(di * dout);
        for (Eigen::Index i = 0; i < di; ++i) {
            v.segment(i * dout, dout) = a.col(i);
        }
        j.noalias() += v * v.adjoint();
    }
    return {ch.d_in(), ch.d_out(), std::move(j)};
}

KrausChannel choi_to_kraus(const ChoiMatrix &j) {
    const auto di = idx(j.d_in);
    const auto dout = idx(j.d_out);
    if (j.mat.rows() != di * dout || j.mat.cols() != di * dout) {
        throw DimensionError("choi_to_kraus: Choi matrix dimension", j.d_in * j.d_out, static_cast<std::size_t>(j.mat.rows()));
    }
    auto eig = hermitian_eigen(0.5 * (j.mat + j.mat.adjoint()));
    std::vector<ComplexMatrix> ops;
    for (Eigen::Index k = eig.values.size() - 1; k >= 0; --k) {
        const double lam = eig.values(k);
        if (lam <= kChoiCutoff) {
            continue;
        }
        ComplexMatrix a(dout, di);
        const double s = std::sqrt(lam);
        for (Eigen::Index i = 0; i < di; ++i) {
            for (Eigen::Index o = 0; o < dout; ++o) {
                a(o, i) = s * eig.vectors(i * dout + o, k);
            }
        }
        ops.push_back(std::move(a));
    }
    return KrausChannel(j.d_in, j.d_out, std::move(ops));
}

ChannelBundle::ChannelBundle(KrausChannel kraus)
    : kraus_(std::move(kraus)),
      liouville_(kraus_to_liouville(kraus_)),
      choi_(liouville_to_choi(liouville_)),
      fro_norm_(liouville_.mat.norm()),
      op_norm_(singular_values(liouville_.mat)(0)) {
}

DensityMatrix ChannelBundle::apply(const DensityMatrix &rho) const {
    return DensityMatrix(kraus_.apply(rho.matrix()));
}

ComplexMatrix compress(const ComplexMatrix &rho, const ComplexMatrix &u, const Bipartition &part) {
    if (static_cast<std::size_t>(u.rows()) != part.total() || u.rows() != u.cols()) {
        throw DimensionError("compress: unitary dimension", part.total(), static_cast<std::size_t>(u.rows()));
    }
    return partial_trace(u * rho * u.adjoint(), part, Subsystem::A);
}

ChannelBundle compression_channel(const ComplexMatrix &u, const Bipartition &part) {
    require_square(u, "compression_channel");
    const auto d = static_cast<std::size_t>(u.rows());
    if (d != part.total()) {
        throw DimensionError("compression_channel: unitary dimension does not match bipartition", part.total(), d);
    }
    const double defect = (u.adjoint() * u - identity(d)).norm();
    if (defect > kUnitaryTol) {
        throw PreconditionError("compression_channel: U is not unitary (defect " + std::to_string(defect) + ")");
    }
    const auto da = idx(part.dim_a);
    const auto db = idx(part.dim_b);
    std::vector<ComplexMatrix> ops;
    ops.reserve(part.dim_b);
    for (Eigen::Index k = 0; k < db; ++k) {
        // (1_A (x) <k|_B) U picks rows a*d_B + k of U.
        ComplexMatrix a(da, idx(d));
        for (Eigen::Index r = 0; r < da; ++r) {
            a.row(r) = u.row(r * db + k);
        }
        ops.push_back(std::move(a));
    }
    return ChannelBundle(KrausChannel(d, part.dim_a, std::move(ops)));
}

ChannelBundle identity_channel(std::size_t d) {
    return ChannelBundle(KrausChannel(d, d, {identity(d)}));
}

ChannelBundle unitary_channel(const ComplexMatrix &u) {
    require_square(u, "unitary_channel");
    return ChannelBundle(KrausChannel(static_cast<std::size_t>(u.rows()), static_cast<std::size_t>(u.rows()), {u}));
}

ChannelBundle depolarizing_channel(std::size_t d_in, std::size_t d_out) {
    std::vector<ComplexMatrix> ops;
    const double s = 1.0 / std::sqrt(static_cast<double>(d_out));
    for (std::size_t a = 0; a < d_out; ++a) {
        for (std::size_t i = 0; i < d_in; ++i) {
            ComplexMatrix k = ComplexMatrix::Zero(idx(d_out), idx(d_in));
            k(idx(a), idx(i)) = s;
            ops.push_back(std::move(k));
        }
    }
    return ChannelBundle(KrausChannel(d_in, d_out, std::move(ops)));
}

ChannelBundle replacement_channel(std::size_t d_in, const DensityMatrix &tau) {
    auto eig = hermitian_eigen(tau.matrix());
    const auto dout = idx(tau.dim());
    std::vector<ComplexMatrix> ops;
    for (Eigen::Index k = 0; k < dout; ++k) {
        const double mu = eig.values(k);
        if (mu <= kChoiCutoff) {
            continue;
        }
        for (std::size_t i = 0; i < d_in; ++i) {
            ComplexMatrix a = ComplexMatrix::Zero(dout, idx(d_in));
            a.col(idx(i)) = std::sqrt(mu) * eig.vectors.col(k);
            ops.push_back(std::move(a));
        }
    }
    return ChannelBundle(KrausChannel(d_in, tau.dim(), std::move(ops)));
}

ChannelBundle mixture_channel(const std::vector<std::pair<double, KrausChannel>> &parts) {
    if (parts.empty()) {
        throw PreconditionError("mixture_channel: no components");
    }
    double total = 0.0;
    std::vector<ComplexMatrix> ops;
    const std::size_t d_in = parts.front().second.d_in();
    const std::size_t d_out = parts.front().second.d_out();
    for (const auto &[w, ch] : parts) {
        if (w < 0.0) {
            throw PreconditionError("mixture_channel: negative weight");
        }
        if (ch.d_in() != d_in || ch.d_out() != d_out) {
            throw DimensionError("mixture_channel: component dimensions differ", d_in, ch.d_in());
        }
        total += w;
        for (const auto &a : ch.operators()) {
            ops.push_back(std::sqrt(w) * a);
        }
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw PreconditionError("mixture_channel: weights must sum to one");
    }
    return ChannelBundle(KrausChannel(d_in, d_out, std::move(ops)));
}

ChannelBundle random_mixedness_preserving_channel(
    std::size_t d, std::size_t d_q, SeededStream &src, std::size_t components) {
    if (d_q == 0 || d_q > d || d % d_q != 0) {
        throw PreconditionError("random_mixedness_preserving_channel: d_q must divide d");
    }
    if (components == 0) {
        components = 1;
    }
    std::vector<double> w(components);
    double total = 0.0;
    for (auto &wi : w) {
        wi = -std::log(1.0 - src.uniform());  // flat Dirichlet via exponentials
        total += wi;
    }
    std::vector<std::pair<double, KrausChannel>> parts;
    const Bipartition part(d_q, d / d_q);
    for (std::size_t i = 0; i < components; ++i) {
        ComplexMatrix u = haar_unitary(d, src);
        parts.emplace_back(w[i] / total, compression_channel(u, part).kraus());
    }
    return mixture_channel(parts);
}

bool is_mixedness_preserving(const ChannelBundle &ch, double tol) {
    const ComplexMatrix out = ch.apply(identity(ch.d_in()) / static_cast<double>(ch.d_in()));
    return (out - identity(ch.d_out()) / static_cast<double>(ch.d_out())).norm() <= tol;
}

NormBoundReport norm_bound_check(const ChannelBundle &ch) {
    constexpr double kSlack = 1e-9;
    NormBoundReport r{};
    const double d = static_cast<double>(ch.d_in());
    const double dq = static_cast<double>(ch.d_out());
    r.mixedness_preserving = is_mixedness_preserving(ch);
    r.fro_norm = ch.liouville_fro_norm();
    r.fro_bound = std::sqrt(d * dq);
    r.op_norm = ch.liouville_op_norm();
    r.op_bound = std::sqrt(d / dq);
    r.fro_ok = r.fro_norm <= r.fro_bound + kSlack;
    r.op_ok = r.op_norm <= r.op_bound + kSlack;
    return r;
}

double kadison_schwarz_probe(const ChannelBundle &ch, const ComplexMatrix &y) {
    const ComplexMatrix py = ch.apply_adjoint(y);
    ComplexMatrix gap = ch.apply_adjoint(y.adjoint() * y) - py.adjoint() * py;
    gap = 0.5 * (gap + gap.adjoint());
    return hermitian_eigenvalues(gap)(0);
}

double representation_discrepancy(const ChannelBundle &ch, SeededStream &src, std::size_t probes) {
    const KrausChannel rebuilt = choi_to_kraus(ch.choi());
    double worst = 0.0;
    for (std::size_t p = 0; p < probes; ++p) {
        const ComplexMatrix x = ginibre(ch.d_in(), src);
        const ComplexMatrix direct = ch.apply(x);
        const ComplexVector via_liouville = ch.liouville().mat * vectorize(x);
        worst = std::max(worst, (vectorize(direct) - via_liouville).norm());
        worst = std::max(worst, (rebuilt.apply(x) - direct).norm());
    }
    return worst;
}

std::size_t padded_dimension(std::size_t d, std::size_t d_q) {
    if (d_q == 0) {
        throw PreconditionError("padded_dimension: d_q must be positive");
    }
    return d_q * ((d + d_q - 1) / d_q);
}

std::string channel_to_json(const KrausChannel &ch) {
    nlohmann::json j;
    j["d_in"] = ch.d_in();
    j["d_out"] = ch.d_out();
    auto &ops = j["kraus"] = nlohmann::json::array();
    for (const auto &a : ch.operators()) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < a.cols(); ++c) {
                row.push_back({a(r, c).real(), a(r, c).imag()});
            }
            rows.push_back(std::move(row));
        }
        ops.push_back(std::move(rows));
    }
    return j.dump();
}

KrausChannel channel_from_json(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw PreconditionError(std::string("channel_from_json: ") + e.what());
    }
    try {
        const auto d_in = j.at("d_in").get<std::size_t>();
        const auto d_out = j.at("d_out").get<std::size_t>();
        std::vector<ComplexMatrix> ops;
        for (const auto &rows : j.at("kraus")) {
            ComplexMatrix a(static_cast<Eigen::Index>(rows.size()), idx(rows.empty() ? 0 : rows[0].size()));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != static_cast<std::size_t>(a.cols())) {
                    throw DimensionError("channel_from_json: ragged Kraus row", static_cast<std::size_t>(a.cols()), rows[r].size());
                }
                for (std::size_t c = 0; c < rows[r].size(); ++c) {
                    a(idx(r), idx(c)) = Complex(rows[r][c].at(0).get<double>(), rows[r][c].at(1).get<double>());
                }
            }
            ops.push_back(std::move(a));
        }
        return KrausChannel(d_in, d_out, std::move(ops));
    } catch (const nlohmann::json::exception &e) {
        throw PreconditionError(std::string("channel_from_json: ") + e.what());
    }
}

}  // namespace qdcert

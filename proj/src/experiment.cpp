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


#include "qdcert/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qdcert/bell.hpp"
#include "qdcert/certify.hpp"
#include "qdcert/channels.hpp"
#include "qdcert/lowerbound.hpp"
#include "qdcert/random.hpp"

#ifndef QDCERT_BUILD_ID
#define QDCERT_BUILD_ID "unknown"
#endif

namespace qdcert {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::uint64_t kGridStreamBase = 0x100;
constexpr double kIdentityTol = 1e-8;
constexpr double kBoundSlack = 1e-9;
constexpr double kZLimit = 3.0;
constexpr double kPzFloor = 0.02;
constexpr double kAcceptFloor = 0.8;
constexpr std::size_t kMaxBellDim = 16;

// ---------------------------------------------------------------------------
// Grid.

struct GridPoint {
    std::size_t d = 0;
    std::size_t d_q = 0;
    double eps = 0.0;
    double delta = 0.0;
    std::size_t ell = 0;
    double c = 0.0;
    std::size_t m = 0;
    std::size_t n = 0;
};

struct Axes {
    bool d_q = false, eps = false, delta = false, ell = false, c = false, m = false, n = false;
    bool trials = false, runs = false;
};

Axes axes_of(const ExperimentConfig &cfg) {
    switch (cfg.subcommand) {
        case Subcommand::Certify:
            return {true, true, true, false, false, true, false, false, true};
        case Subcommand::Compress:
            return {true, false, false, false, false, false, false, true, true};
        case Subcommand::Chi2Lab:
            if (cfg.chi2_mode == Chi2Mode::Centralized) {
                return {false, true, false, true, true, false, true, true, false};
            }
            return {true, true, false, true, true, true, false, true, false};
        case Subcommand::NormCheck:
            return {true, false, false, false, false, false, false, true, false};
        case Subcommand::Bell:
            return {false, false, false, false, false, false, false, true, false};
        case Subcommand::Calibrate:
            return {true, false, false, false, false, false, false, true, true};
    }
    return {};
}

template <typename T>
std::vector<T> or_unit(const std::vector<T> &v) {
    return v.empty() ? std::vector<T>{T{}} : v;
}

std::vector<GridPoint> expand_grid(const ExperimentConfig &cfg) {
    std::vector<GridPoint> out;
    for (std::size_t d : cfg.d) {
        for (std::size_t dq : or_unit(cfg.d_q)) {
            for (double eps : or_unit(cfg.eps)) {
                for (double delta : or_unit(cfg.delta)) {
                    for (std::size_t ell : or_unit(cfg.ell)) {
                        for (double c : or_unit(cfg.c)) {
                            for (std::size_t m : or_unit(cfg.m)) {
                                for (std::size_t n : or_unit(cfg.n)) {
                                    out.push_back({d, dq, eps, delta, ell, c, m, n});
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

bool power_of_two(std::size_t v) {
    return v >= 1 && std::has_single_bit(v);
}

std::size_t log2_exact(std::size_t v) {
    return static_cast<std::size_t>(std::countr_zero(v));
}

template <typename T>
void require_empty(const std::vector<T> &v, bool used, const char *field, Subcommand s) {
    if (!used && !v.empty()) {
        throw ConfigError(field, "not used by subcommand " + std::string(to_string(s)));
    }
}

template <typename T>
void default_if_empty(std::vector<T> &v, bool used, std::vector<T> fallback) {
    if (used && v.empty()) {
        v = std::move(fallback);
    }
}

void check_point(const ExperimentConfig &cfg, const GridPoint &p) {
    const Axes ax = axes_of(cfg);
    if (p.d < 2) {
        throw ConfigError("d", "must be at least 2");
    }
    if (ax.d_q) {
        if (!power_of_two(p.d_q) || p.d_q < 2 || p.d_q > p.d) {
            throw ConfigError("d_q", "must be a power of two in [2, d]");
        }
        if (cfg.subcommand != Subcommand::Certify && p.d % p.d_q != 0) {
            throw ConfigError("d_q", "must divide d for this subcommand");
        }
    }
    if (ax.eps && !(p.eps > 0.0 && p.eps <= 1.0)) {
        throw ConfigError("eps", "must lie in (0, 1]");
    }
    if (ax.delta && !(p.delta > 0.0 && p.delta < 1.0)) {
        throw ConfigError("delta", "must lie in (0, 1)");
    }
    if (ax.ell && (p.ell < 1 || p.ell > p.d * p.d - 1)) {
        throw ConfigError("ell", "must lie in [1, d^2 - 1]");
    }
    if (ax.c && !(p.c > 0.0)) {
        throw ConfigError("c", "must be positive");
    }
    switch (cfg.subcommand) {
        case Subcommand::Certify: {
            ProtocolConfig pc;
            pc.d = p.d;
            pc.n_q = log2_exact(p.d_q);
            pc.n_c = 0;
            pc.eps = p.eps;
            pc.delta = p.delta;
            const Algorithm1Plan plan = plan_algorithm1(pc);
            if (p.m != 0 && p.m < plan.nodes_required) {
                throw ConfigError("m", "below the " + std::to_string(plan.nodes_required) + " nodes the protocol needs");
            }
            break;
        }
        case Subcommand::Chi2Lab:
            if (cfg.chi2_mode == Chi2Mode::IngsterSuslina) {
                if (p.m < 1 || p.m > 3) {
                    throw ConfigError("m", "channel count must lie in [1, 3]");
                }
                if (cfg.trials == 0 && p.ell > 12) {
                    throw ConfigError("ell", "exhaustive enumeration needs ell <= 12; set trials to sample");
                }
            } else {
                if (p.n < 1) {
                    throw ConfigError("n", "must be at least 1");
                }
                if (cfg.trials == 0 && (p.ell > 12 || std::pow(static_cast<double>(p.d), static_cast<double>(p.n)) > 4096.0)) {
                    throw ConfigError("n", "exact mode needs d^n <= 4096 and ell <= 12; set trials to sample");
                }
            }
            break;
        case Subcommand::Bell:
            if (!power_of_two(p.d) || p.d > kMaxBellDim) {
                throw ConfigError("d", "must be a power of two in [2, 16]");
            }
            break;
        default:
            break;
    }
}

// ---------------------------------------------------------------------------
// Experiments. Each returns rows for one grid point.

struct PointOutput {
    std::vector<Json> rows;
    std::vector<std::string> samples;
};

Json row_prefix(const ExperimentConfig &cfg, const GridPoint &p) {
    const Axes ax = axes_of(cfg);
    Json row;
    row["subcommand"] = std::string(to_string(cfg.subcommand));
    row["build_id"] = std::string(build_id());
    row["seed"] = cfg.seed;
    row["d"] = p.d;
    if (ax.d_q) row["d_q"] = p.d_q;
    if (ax.eps) row["eps"] = p.eps;
    if (ax.delta) row["delta"] = p.delta;
    if (ax.ell) row["ell"] = p.ell;
    if (ax.c) row["c"] = p.c;
    if (ax.m) row["m"] = p.m;
    if (ax.n) row["n"] = p.n;
    if (ax.trials) row["trials"] = cfg.trials;
    if (ax.runs) row["runs"] = cfg.runs;
    return row;
}

PointOutput run_certify(const ExperimentConfig &cfg, const GridPoint &p, SeededStream &src) {
    ProtocolConfig pc;
    pc.d = p.d;
    pc.n_q = log2_exact(p.d_q);
    pc.n_c = 0;
    pc.coin = CoinModel::Public;
    pc.bell_pairs = 0;
    pc.eps = p.eps;
    pc.delta = p.delta;
    const Algorithm1Plan plan = plan_algorithm1(pc);
    pc.m = p.m == 0 ? plan.nodes_required : p.m;

    const DensityMatrix mixed = DensityMatrix::maximally_mixed(p.d);
    const DensityMatrix zero = DensityMatrix::basis_state(p.d, 0);
    std::size_t accepts = 0;
    std::size_t rejects = 0;
    std::size_t violations = 0;
    std::size_t messages = 0;
    double far_limit = 0.0;
    Json far_null = Json::array();
    Json far_far = Json::array();
    for (std::size_t r = 0; r < cfg.runs; ++r) {
        pc.seed = src.child(r).engine()();
        try {
            const Verdict null_case = run_algorithm1(mixed, mixed, pc);
            const Verdict far_case = run_algorithm1(zero, mixed, pc);
            accepts += null_case.decision == Decision::Accept ? 1 : 0;
            rejects += far_case.decision == Decision::Reject ? 1 : 0;
            messages += null_case.messages_checked + far_case.messages_checked;
            far_null.push_back(null_case.far_count);
            far_far.push_back(far_case.far_count);
            far_limit = null_case.far_limit;
        } catch (const BudgetViolation &) {
            ++violations;
        }
    }
    const double runs = static_cast<double>(cfg.runs);
    Json row = row_prefix(cfg, p);
    row["m"] = pc.m;
    row["d_padded"] = plan.d_padded;
    row["batch_size"] = plan.batch_size;
    row["batches"] = plan.batches;
    row["nodes_required"] = plan.nodes_required;
    row["eps_prime"] = plan.eps_prime;
    row["eps_test"] = plan.eps_test;
    row["accept_freq_null"] = static_cast<double>(accepts) / runs;
    row["reject_freq_far"] = static_cast<double>(rejects) / runs;
    row["far_limit"] = far_limit;
    row["far_counts_null"] = std::move(far_null);
    row["far_counts_far"] = std::move(far_far);
    row["budget_violations"] = violations;
    row["messages_checked"] = messages;
    row["pass"] = violations == 0 && static_cast<double>(accepts) >= kAcceptFloor * runs &&
                  static_cast<double>(rejects) >= kAcceptFloor * runs;
    return {{row}, {}};
}

PointOutput run_compress(const ExperimentConfig &cfg, const GridPoint &p, SeededStream &src) {
    const Bipartition part(p.d_q, p.d / p.d_q);
    const double ratio = static_cast<double>(p.d_q) / (2.0 * static_cast<double>(p.d));
    double max_z = 0.0;
    double min_margin = std::numeric_limits<double>::infinity();
    double min_pz = 1.0;
    for (std::size_t r = 0; r < cfg.runs; ++r) {
        SeededStream pair = src.child(r);
        const DensityMatrix rho = random_density(p.d, pair);
        const DensityMatrix sigma = random_density(p.d, pair);
        const ComplexMatrix delta = rho.matrix() - sigma.matrix();
        const double exact = compression_moment_exact(delta, part);
        const MonteCarloEstimate mc = compression_moment_monte_carlo(delta, part, cfg.trials, pair);
        max_z = std::max(max_z, std::abs(mc.mean - exact) / mc.stderr_);
        min_margin = std::min(min_margin, exact - ratio * (delta * delta).trace().real());
        min_pz = std::min(min_pz, fourth_moment_probe(delta, part, cfg.trials, pair).pz_fraction);
    }
    Json row = row_prefix(cfg, p);
    row["d_a"] = p.d_q;
    row["max_abs_z"] = max_z;
    row["min_lower_bound_margin"] = min_margin;
    row["min_pz_fraction"] = min_pz;
    row["pass"] = max_z <= kZLimit && min_margin >= -1e-12 && min_pz >= kPzFloor;
    return {{row}, {}};
}

std::vector<ChannelBundle> lab_channels(const GridPoint &p, SeededStream &src) {
    std::vector<ChannelBundle> out;
    for (std::size_t i = 0; i < p.m; ++i) {
        const ComplexMatrix u = haar_unitary(p.d, src);
        out.push_back(p.d_q == p.d ? unitary_channel(u) : compression_channel(u, Bipartition(p.d_q, p.d / p.d_q)));
    }
    return out;
}

BasisKind lab_basis(std::size_t d) {
    return power_of_two(d) ? BasisKind::Pauli : BasisKind::GellMann;
}

PointOutput run_chi2lab(const ExperimentConfig &cfg, const GridPoint &p, SeededStream &src) {
    const HardInstance inst = build_hard_instance(p.d, p.ell, p.eps, p.c, lab_basis(p.d));
    Json row = row_prefix(cfg, p);
    row["mode"] = std::string(to_string(cfg.chi2_mode));
    if (cfg.chi2_mode == Chi2Mode::Centralized) {
        const CentralizedReport rep =
            cfg.trials == 0 ? centralized_chi2_bound(inst, p.n)
                            : centralized_chi2_bound(inst, p.n, CentralizedMode::Sampled, cfg.trials, &src);
        row["value"] = rep.value;
        row["value_stderr"] = rep.value_stderr;
        row["expansion"] = rep.expansion;
        row["bound"] = rep.bound;
        row["margin"] = rep.bound - rep.value;
        const bool identity = cfg.trials != 0 || std::abs(rep.value - rep.expansion) < kIdentityTol;
        row["pass"] = identity && rep.bound - rep.value >= -kBoundSlack;
        return {{row}, {}};
    }
    const std::vector<ChannelBundle> channels = lab_channels(p, src);
    const IngsterSuslinaReport rep =
        cfg.trials == 0 ? ingster_suslina_check(inst, channels) : ingster_suslina_sampled(inst, channels, cfg.trials, src);
    const double margin = rep.rhs_exact - rep.lhs;
    row["sign_vectors"] = rep.sign_vectors;
    row["lhs"] = rep.lhs;
    row["rhs_exact"] = rep.rhs_exact;
    row["rhs_mgf_bound"] = rep.rhs_mgf_bound;
    row["margin"] = margin;
    row["pass"] = std::abs(margin) < kIdentityTol && rep.rhs_mgf_bound + kIdentityTol >= rep.rhs_exact + 1.0;
    return {{row}, {}};
}

PointOutput run_normcheck(const ExperimentConfig &cfg, const GridPoint &p, SeededStream &src) {
    double fro_ratio = 0.0;
    double op_ratio = 0.0;
    double min_ks = std::numeric_limits<double>::infinity();
    bool all_ok = true;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        SeededStream s = src.child(t);
        const ChannelBundle ch = random_mixedness_preserving_channel(p.d, p.d_q, s);
        const NormBoundReport rep = norm_bound_check(ch);
        fro_ratio = std::max(fro_ratio, rep.fro_norm / rep.fro_bound);
        op_ratio = std::max(op_ratio, rep.op_norm / rep.op_bound);
        all_ok = all_ok && rep.mixedness_preserving && rep.fro_ok && rep.op_ok;
        min_ks = std::min(min_ks, kadison_schwarz_probe(ch, ginibre(p.d_q, s)));
    }
    Json row = row_prefix(cfg, p);
    row["max_fro_ratio"] = fro_ratio;
    row["max_op_ratio"] = op_ratio;
    row["min_kadison_schwarz"] = min_ks;
    row["pass"] = all_ok && min_ks >= -kBoundSlack;
    return {{row}, {}};
}

PointOutput run_bell(const ExperimentConfig &cfg, const GridPoint &p, SeededStream &src) {
    const std::size_t n = qubit_count(p.d);
    struct Case {
        const char *name;
        DensityMatrix rho;
        int expect;  // 1 pure, 0 mixed, -1 none
    };
    SeededStream states = src.child(0);
    std::vector<Case> cases;
    cases.push_back({"basis_zero", DensityMatrix::basis_state(p.d, 0), 1});
    cases.push_back({"random_pure", random_pure_state(p.d, states), 1});
    cases.push_back({"maximally_mixed", DensityMatrix::maximally_mixed(p.d), 0});
    cases.push_back({"random_mixed", random_density(p.d, states), -1});

    PointOutput out;
    for (std::size_t k = 0; k < cases.size(); ++k) {
        const Case &cs = cases[k];
        SeededStream s = src.child(k + 1);
        const auto dist = bell_distribution(cs.rho);
        double identity = 0.0;
        for (const auto &o : dist) {
            identity += o.probability * o.label.symplectic_sign();
        }
        const double purity = cs.rho.purity();
        Json row = row_prefix(cfg, p);
        row["state"] = cs.name;
        row["purity"] = purity;
        row["bell_purity_identity"] = identity;
        row["identity_error"] = std::abs(identity - purity);
        double tv = 0.0;
        if (n <= 2) {
            const auto law = analytic_output_law(cs.rho);
            for (std::size_t i = 0; i < law.size(); ++i) {
                tv += 0.5 * std::abs(law[i] - dist[i].probability);
            }
            row["protocol_tv"] = tv;
        } else {
            row["protocol_tv"] = nullptr;
        }
        const PurityTestResult res = purity_test(cs.rho, cfg.trials, s);
        // Re-draw the same samples for the dump from an identical stream.
        SeededStream replay = src.child(k + 1);
        const ProtocolConfig pc = bell_protocol_config(n, replay.master_seed());
        row["sample_offset"] = out.samples.size();
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            out.samples.push_back(to_hex(distributed_bell_sampling(cs.rho, pc, replay).z));
        }
        row["purity_estimate"] = res.estimate;
        row["threshold"] = res.threshold;
        row["verdict"] = res.verdict == PurityVerdict::Pure ? "pure" : "maximally_mixed";
        bool ok = row["identity_error"].get<double>() < 1e-10 && tv < 1e-10;
        if (cs.expect >= 0) {
            ok = ok && (res.verdict == PurityVerdict::Pure) == (cs.expect == 1);
        }
        row["pass"] = ok;
        out.rows.push_back(std::move(row));
    }
    return out;
}

PointOutput run_calibrate(const ExperimentConfig &cfg, const GridPoint &p, SeededStream &src) {
    const C2Calibration cal = calibrate_c2(Bipartition(p.d_q, p.d / p.d_q), cfg.runs, cfg.trials, src);
    const CertifyConstants k;
    Json row = row_prefix(cfg, p);
    row["c2_estimate"] = cal.c2_estimate;
    row["c2_default"] = k.c2;
    row["min_pz_fraction"] = cal.min_pz_fraction;
    row["max_c1_ratio"] = cal.max_c1_ratio;
    row["pass"] = cal.c2_estimate <= k.c2 && cal.min_pz_fraction >= 1.0 / k.c2;
    return {{row}, {}};
}

PointOutput run_point(const ExperimentConfig &cfg, const GridPoint &p, SeededStream &src) {
    switch (cfg.subcommand) {
        case Subcommand::Certify:
            return run_certify(cfg, p, src);
        case Subcommand::Compress:
            return run_compress(cfg, p, src);
        case Subcommand::Chi2Lab:
            return run_chi2lab(cfg, p, src);
        case Subcommand::NormCheck:
            return run_normcheck(cfg, p, src);
        case Subcommand::Bell:
            return run_bell(cfg, p, src);
        case Subcommand::Calibrate:
            return run_calibrate(cfg, p, src);
    }
    return {};
}

// ---------------------------------------------------------------------------
// Rendering.

// Quotes fields containing separators, quotes or newlines (RFC 4180).
std::string csv_quote(const std::string &s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        out += ch;
        if (ch == '"') {
            out += '"';
        }
    }
    return out + '"';
}

std::string csv_cell(const Json &v) {
    if (v.is_null()) {
        return "";
    }
    if (v.is_string()) {
        return csv_quote(v.get<std::string>());
    }
    if (v.is_number_float()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    return csv_quote(v.dump());
}

std::string render_csv(const std::vector<Json> &rows) {
    std::ostringstream os;
    if (rows.empty()) {
        return {};
    }
    // Union of keys in first-seen order; rows of one subcommand share a schema.
    std::vector<std::string> keys;
    for (const auto &row : rows) {
        for (const auto &[k, v] : row.items()) {
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
                keys.push_back(k);
            }
        }
    }
    for (std::size_t i = 0; i < keys.size(); ++i) {
        os << (i ? "," : "") << keys[i];
    }
    os << '\n';
    for (const auto &row : rows) {
        for (std::size_t i = 0; i < keys.size(); ++i) {
            os << (i ? "," : "");
            if (row.contains(keys[i])) {
                os << csv_cell(row.at(keys[i]));
            }
        }
        os << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Config (de)serialization helpers.

template <typename T>
std::vector<T> read_axis(const nlohmann::json &j, const char *field) {
    auto one = [field](const nlohmann::json &v) -> T {
        if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) {
                throw ConfigError(field, "expected a number");
            }
            return v.get<double>();
        } else {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
                throw ConfigError(field, "expected a nonnegative integer");
            }
            return v.get<T>();
        }
    };
    std::vector<T> out;
    if (j.is_array()) {
        for (const auto &v : j) {
            out.push_back(one(v));
        }
    } else {
        out.push_back(one(j));
    }
    return out;
}

std::size_t read_count(const nlohmann::json &j, const char *field) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        throw ConfigError(field, "expected a nonnegative integer");
    }
    return j.get<std::size_t>();
}

std::string read_string(const nlohmann::json &j, const char *field) {
    if (!j.is_string()) {
        throw ConfigError(field, "expected a string");
    }
    return j.get<std::string>();
}

Chi2Mode parse_chi2_mode(std::string_view s) {
    if (s == "ingster_suslina") return Chi2Mode::IngsterSuslina;
    if (s == "centralized") return Chi2Mode::Centralized;
    throw ConfigError("chi2_mode", "expected ingster_suslina or centralized, got '" + std::string(s) + "'");
}

}  // namespace

std::string_view to_string(Subcommand s) noexcept {
    switch (s) {
        case Subcommand::Certify: return "certify";
        case Subcommand::Compress: return "compress";
        case Subcommand::Chi2Lab: return "chi2lab";
        case Subcommand::NormCheck: return "normcheck";
        case Subcommand::Bell: return "bell";
        case Subcommand::Calibrate: return "calibrate";
    }
    return "?";
}

std::string_view to_string(OutputFormat f) noexcept {
    return f == OutputFormat::Json ? "json" : "csv";
}

std::string_view to_string(Chi2Mode m) noexcept {
    return m == Chi2Mode::IngsterSuslina ? "ingster_suslina" : "centralized";
}

Subcommand parse_subcommand(std::string_view s) {
    for (Subcommand c : {Subcommand::Certify, Subcommand::Compress, Subcommand::Chi2Lab, Subcommand::NormCheck,
                         Subcommand::Bell, Subcommand::Calibrate}) {
        if (s == to_string(c)) {
            return c;
        }
    }
    throw ConfigError("subcommand", "unknown subcommand '" + std::string(s) + "'");
}

OutputFormat parse_format(std::string_view s) {
    if (s == "json") return OutputFormat::Json;
    if (s == "csv") return OutputFormat::Csv;
    throw ConfigError("format", "expected json or csv, got '" + std::string(s) + "'");
}

std::string_view build_id() noexcept {
    return QDCERT_BUILD_ID;
}

std::size_t worker_count() {
    if (const char *env = std::getenv("QDCERT_WORKERS")) {
        char *end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return v;
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

ExperimentConfig normalized(const ExperimentConfig &in) {
    ExperimentConfig cfg = in;
    const Axes ax = axes_of(cfg);
    const Subcommand s = cfg.subcommand;
    require_empty(cfg.d_q, ax.d_q, "d_q", s);
    require_empty(cfg.eps, ax.eps, "eps", s);
    require_empty(cfg.delta, ax.delta, "delta", s);
    require_empty(cfg.ell, ax.ell, "ell", s);
    require_empty(cfg.c, ax.c, "c", s);
    require_empty(cfg.m, ax.m, "m", s);
    require_empty(cfg.n, ax.n, "n", s);
    if (!ax.runs && cfg.runs != 0) {
        throw ConfigError("runs", "not used by subcommand " + std::string(to_string(s)));
    }
    if (!ax.trials && cfg.trials != 0) {
        throw ConfigError("trials", "not used by subcommand " + std::string(to_string(s)));
    }
    if (s != Subcommand::Chi2Lab && cfg.chi2_mode != Chi2Mode::IngsterSuslina) {
        throw ConfigError("chi2_mode", "only used by chi2lab");
    }

    switch (s) {
        case Subcommand::Certify:
            default_if_empty(cfg.d, true, {8});
            default_if_empty(cfg.d_q, true, {2});
            default_if_empty(cfg.eps, true, {0.5});
            default_if_empty(cfg.delta, true, {0.2});
            default_if_empty(cfg.m, true, {0});
            if (cfg.runs == 0) cfg.runs = 50;
            break;
        case Subcommand::Compress:
            default_if_empty(cfg.d, true, {4, 8});
            default_if_empty(cfg.d_q, true, {2});
            if (cfg.runs == 0) cfg.runs = 10;
            if (cfg.trials == 0) cfg.trials = 10000;
            break;
        case Subcommand::Chi2Lab:
            default_if_empty(cfg.d, true, {2});
            default_if_empty(cfg.ell, true, {3});
            default_if_empty(cfg.eps, true, {0.2});
            default_if_empty(cfg.c, true, {0.1});
            default_if_empty(cfg.d_q, ax.d_q, {2});
            default_if_empty(cfg.m, ax.m, {1});
            default_if_empty(cfg.n, ax.n, {1, 2, 3});
            break;
        case Subcommand::NormCheck:
            default_if_empty(cfg.d, true, {4});
            default_if_empty(cfg.d_q, true, {2});
            if (cfg.trials == 0) cfg.trials = 100;
            break;
        case Subcommand::Bell:
            default_if_empty(cfg.d, true, {2});
            if (cfg.trials == 0) cfg.trials = 64;
            break;
        case Subcommand::Calibrate:
            default_if_empty(cfg.d, true, {8});
            default_if_empty(cfg.d_q, true, {2});
            if (cfg.runs == 0) cfg.runs = 10;
            if (cfg.trials == 0) cfg.trials = 2000;
            break;
    }
    if (ax.runs && cfg.runs == 0) {
        throw ConfigError("runs", "must be positive");
    }
    if (s == Subcommand::Compress && cfg.trials < 2) {
        throw ConfigError("trials", "needs at least two draws");
    }
    for (const GridPoint &p : expand_grid(cfg)) {
        try {
            check_point(cfg, p);
        } catch (const ConfigError &) {
            throw;
        } catch (const Error &e) {
            throw ConfigError("grid", e.what());
        }
    }
    return cfg;
}

std::string config_to_json(const ExperimentConfig &cfg) {
    Json j;
    j["subcommand"] = std::string(to_string(cfg.subcommand));
    const Axes ax = axes_of(cfg);
    j["d"] = cfg.d;
    if (ax.d_q || !cfg.d_q.empty()) j["d_q"] = cfg.d_q;
    if (ax.eps || !cfg.eps.empty()) j["eps"] = cfg.eps;
    if (ax.delta || !cfg.delta.empty()) j["delta"] = cfg.delta;
    if (ax.ell || !cfg.ell.empty()) j["ell"] = cfg.ell;
    if (ax.c || !cfg.c.empty()) j["c"] = cfg.c;
    if (ax.m || !cfg.m.empty()) j["m"] = cfg.m;
    if (ax.n || !cfg.n.empty()) j["n"] = cfg.n;
    j["trials"] = cfg.trials;
    j["runs"] = cfg.runs;
    if (cfg.subcommand == Subcommand::Chi2Lab) j["chi2_mode"] = std::string(to_string(cfg.chi2_mode));
    j["seed"] = cfg.seed;
    j["output"] = cfg.output;
    j["format"] = std::string(to_string(cfg.format));
    j["timing"] = cfg.timing;
    return j.dump(2);
}

ExperimentConfig config_from_json(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError("<document>", e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("<document>", "expected a JSON object");
    }
    if (!j.contains("subcommand")) {
        throw ConfigError("subcommand", "missing");
    }
    ExperimentConfig cfg;
    for (const auto &[key, v] : j.items()) {
        if (key == "subcommand") cfg.subcommand = parse_subcommand(read_string(v, "subcommand"));
        else if (key == "d") cfg.d = read_axis<std::size_t>(v, "d");
        else if (key == "d_q") cfg.d_q = read_axis<std::size_t>(v, "d_q");
        else if (key == "eps") cfg.eps = read_axis<double>(v, "eps");
        else if (key == "delta") cfg.delta = read_axis<double>(v, "delta");
        else if (key == "ell") cfg.ell = read_axis<std::size_t>(v, "ell");
        else if (key == "c") cfg.c = read_axis<double>(v, "c");
        else if (key == "m") cfg.m = read_axis<std::size_t>(v, "m");
        else if (key == "n") cfg.n = read_axis<std::size_t>(v, "n");
        else if (key == "trials") cfg.trials = read_count(v, "trials");
        else if (key == "runs") cfg.runs = read_count(v, "runs");
        else if (key == "chi2_mode") cfg.chi2_mode = parse_chi2_mode(read_string(v, "chi2_mode"));
        else if (key == "seed") {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
                throw ConfigError("seed", "expected a nonnegative 64-bit integer");
            }
            cfg.seed = v.get<std::uint64_t>();
        } else if (key == "output") cfg.output = read_string(v, "output");
        else if (key == "format") cfg.format = parse_format(read_string(v, "format"));
        else if (key == "timing") {
            if (!v.is_boolean()) {
                throw ConfigError("timing", "expected true or false");
            }
            cfg.timing = v.get<bool>();
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    return normalized(cfg);
}

ExperimentResult run_experiment_in_memory(const ExperimentConfig &raw) {
    ExperimentConfig cfg;
    try {
        cfg = normalized(raw);
    } catch (const ConfigError &e) {
        return {2, {}, {}, {e.what()}};
    }
    const std::vector<GridPoint> grid = expand_grid(cfg);
    std::vector<PointOutput> outputs(grid.size());
    std::vector<std::exception_ptr> errors(grid.size());
    std::vector<double> wall(grid.size(), 0.0);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t g = next++; g < grid.size(); g = next++) {
            const auto start = std::chrono::steady_clock::now();
            try {
                SeededStream src(cfg.seed, kGridStreamBase + g);
                outputs[g] = run_point(cfg, grid[g], src);
            } catch (...) {
                errors[g] = std::current_exception();
            }
            wall[g] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        }
    };
    const std::size_t workers = std::min(worker_count(), grid.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }

    ExperimentResult res{0, {}, {}, {}};
    std::vector<Json> rows;
    std::vector<std::string> samples;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (errors[g]) {
            try {
                std::rethrow_exception(errors[g]);
            } catch (const std::exception &e) {
                Json row = row_prefix(cfg, grid[g]);
                row["error"] = e.what();
                row["pass"] = false;
                outputs[g].rows = {row};
            }
        }
        for (auto &row : outputs[g].rows) {
            if (row.contains("sample_offset")) {
                row["sample_offset"] = row["sample_offset"].get<std::size_t>() + samples.size();
            }
            if (cfg.timing) {
                row["wall_ms"] = wall[g];
            }
            if (!row.value("pass", true)) {
                res.exit_code = 1;
                res.failures.push_back("failed row: " + row.dump());
            }
            rows.push_back(std::move(row));
        }
        samples.insert(samples.end(), outputs[g].samples.begin(), outputs[g].samples.end());
    }

    if (cfg.format == OutputFormat::Csv) {
        res.document = render_csv(rows);
    } else {
        Json doc;
        doc["build_id"] = std::string(build_id());
        doc["config"] = Json::parse(config_to_json(cfg));
        doc["rows"] = rows;
        doc["failures"] = res.failures.size();
        res.document = doc.dump(2) + "\n";
    }
    for (const auto &s : samples) {
        res.samples += s;
        res.samples += '\n';
    }
    return res;
}

int run_experiment(const ExperimentConfig &cfg, std::ostream &out, std::ostream &err) {
    const ExperimentResult res = run_experiment_in_memory(cfg);
    if (res.exit_code == 2) {
        for (const auto &f : res.failures) {
            err << "config error: " << f << '\n';
        }
        return 2;
    }
    if (cfg.output.empty()) {
        out << res.document;
    } else {
        std::ofstream file(cfg.output, std::ios::binary);
        if (!file) {
            err << "config error: config field 'output': cannot open " << cfg.output << '\n';
            return 2;
        }
        file << res.document;
        if (!res.samples.empty()) {
            std::ofstream dump(cfg.output + ".samples", std::ios::binary);
            dump << res.samples;
        }
    }
    for (const auto &f : res.failures) {
        err << f << '\n';
    }
    return res.exit_code;
}

}  // namespace qdcert

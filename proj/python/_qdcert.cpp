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


#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qdcert/bell.hpp"
#include "qdcert/certify.hpp"
#include "qdcert/channels.hpp"
#include "qdcert/experiment.hpp"
#include "qdcert/lowerbound.hpp"

namespace py = pybind11;
using namespace qdcert;

namespace {

DensityMatrix density(const ComplexMatrix &m) {
    return DensityMatrix(m);
}

ProtocolConfig certify_config(std::size_t d, std::size_t n_q, double eps, double delta, std::uint64_t seed,
                              std::size_t m) {
    ProtocolConfig cfg;
    cfg.d = d;
    cfg.n_q = n_q;
    cfg.n_c = 0;
    cfg.coin = CoinModel::Public;
    cfg.bell_pairs = 0;
    cfg.eps = eps;
    cfg.delta = delta;
    cfg.seed = seed;
    cfg.m = m == 0 ? plan_algorithm1(cfg).nodes_required : m;
    return cfg;
}

py::dict plan_dict(const Algorithm1Plan &p) {
    py::dict out;
    out["d_padded"] = p.d_padded;
    out["d_q"] = p.d_q;
    out["batch_size"] = p.batch_size;
    out["batches"] = p.batches;
    out["nodes_required"] = p.nodes_required;
    out["eps_prime"] = p.eps_prime;
    out["eps_test"] = p.eps_test;
    out["delta_prime"] = p.delta_prime;
    out["tau"] = p.tau;
    return out;
}

std::vector<ChannelBundle> compressions(const std::vector<ComplexMatrix> &unitaries, std::size_t d_q) {
    std::vector<ChannelBundle> out;
    for (const auto &u : unitaries) {
        const auto d = static_cast<std::size_t>(u.rows());
        out.push_back(compression_channel(u, Bipartition(d_q, d / d_q)));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_qdcert, m) {
    m.doc() = "Distributed quantum state certification simulator";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    auto pre = py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<InsufficientCopiesError>(m, "InsufficientCopiesError", pre.ptr());
    py::register_exception<BudgetViolation>(m, "BudgetViolation", base.ptr());
    py::register_exception<EnumerationTooLarge>(m, "EnumerationTooLarge", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    m.def("build_id", [] { return std::string(build_id()); });

    py::class_<SeededStream>(m, "SeededStream")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id") = 0)
        .def("child", &SeededStream::child)
        .def("normal", &SeededStream::normal)
        .def("uniform", &SeededStream::uniform)
        .def_property_readonly("seed", &SeededStream::master_seed)
        .def_property_readonly("stream_id", &SeededStream::stream_id);

    // States and unitaries, as complex numpy arrays.
    m.def("haar_unitary", &haar_unitary, py::arg("d"), py::arg("stream"));
    m.def("random_density", [](std::size_t d, SeededStream &s) { return random_density(d, s).matrix(); },
          py::arg("d"), py::arg("stream"));
    m.def("random_pure_state", [](std::size_t d, SeededStream &s) { return random_pure_state(d, s).matrix(); },
          py::arg("d"), py::arg("stream"));
    m.def("partial_trace",
          [](const ComplexMatrix &x, std::size_t dim_a, std::size_t dim_b, bool keep_a) {
              return partial_trace(x, Bipartition(dim_a, dim_b), keep_a ? Subsystem::A : Subsystem::B);
          },
          py::arg("x"), py::arg("dim_a"), py::arg("dim_b"), py::arg("keep_a") = true);
    m.def("compress",
          [](const ComplexMatrix &rho, const ComplexMatrix &u, std::size_t d_q) {
              return compress(rho, u, Bipartition(d_q, static_cast<std::size_t>(rho.rows()) / d_q));
          },
          py::arg("rho"), py::arg("u"), py::arg("d_q"));

    // Divergences and moments.
    m.def("quantum_chi2", py::overload_cast<const ComplexMatrix &, const ComplexMatrix &>(&quantum_chi2),
          py::arg("rho"), py::arg("sigma"));
    m.def("weingarten_second_order", &weingarten_second_order, py::arg("a1"), py::arg("a2"), py::arg("b1"),
          py::arg("b2"));
    m.def("compression_moment_exact",
          [](const ComplexMatrix &delta, std::size_t d_q) {
              return compression_moment_exact(delta, Bipartition(d_q, static_cast<std::size_t>(delta.rows()) / d_q));
          },
          py::arg("delta"), py::arg("d_q"));

    // Lower-bound lab.
    m.def("ingster_suslina_check",
          [](std::size_t d, std::size_t ell, double eps, double c, const std::vector<ComplexMatrix> &unitaries,
             std::size_t d_q) {
              const HardInstance inst = build_hard_instance(d, ell, eps, c, BasisKind::GellMann);
              const IngsterSuslinaReport r = ingster_suslina_check(inst, compressions(unitaries, d_q));
              py::dict out;
              out["lhs"] = r.lhs;
              out["rhs_exact"] = r.rhs_exact;
              out["rhs_mgf_bound"] = r.rhs_mgf_bound;
              out["sign_vectors"] = r.sign_vectors;
              return out;
          },
          py::arg("d"), py::arg("ell"), py::arg("eps"), py::arg("c"), py::arg("unitaries"), py::arg("d_q"));
    m.def("centralized_chi2_bound",
          [](std::size_t d, std::size_t ell, double eps, double c, std::size_t n) {
              const CentralizedReport r =
                  centralized_chi2_bound(build_hard_instance(d, ell, eps, c, BasisKind::GellMann), n);
              return py::make_tuple(r.value, r.bound);
          },
          py::arg("d"), py::arg("ell"), py::arg("eps"), py::arg("c"), py::arg("n"));

    // Certification.
    m.def("plan_algorithm1",
          [](std::size_t d, std::size_t n_q, double eps, double delta) {
              return plan_dict(plan_algorithm1(certify_config(d, n_q, eps, delta, 0, 0)));
          },
          py::arg("d"), py::arg("n_q"), py::arg("eps"), py::arg("delta"));
    m.def("run_algorithm1",
          [](const ComplexMatrix &rho, const ComplexMatrix &sigma, std::size_t n_q, double eps, double delta,
             std::uint64_t seed, std::size_t nodes) {
              const auto d = static_cast<std::size_t>(rho.rows());
              const ProtocolConfig cfg = certify_config(d, n_q, eps, delta, seed, nodes);
              const Verdict v = run_algorithm1(density(rho), density(sigma), cfg);
              py::dict out;
              out["accept"] = v.decision == Decision::Accept;
              out["far_count"] = v.far_count;
              out["far_limit"] = v.far_limit;
              out["messages_checked"] = v.messages_checked;
              out["plan"] = plan_dict(v.plan);
              return out;
          },
          py::arg("rho"), py::arg("sigma"), py::arg("n_q"), py::arg("eps"), py::arg("delta"), py::arg("seed"),
          py::arg("nodes") = 0);

    // Bell sampling.
    m.def("bell_distribution",
          [](const ComplexMatrix &rho) {
              std::vector<double> out;
              for (const auto &o : bell_distribution(density(rho))) {
                  out.push_back(o.probability);
              }
              return out;
          },
          py::arg("rho"));
    m.def("distributed_bell_sampling",
          [](const ComplexMatrix &rho, std::size_t samples, SeededStream &s) {
              const DensityMatrix state = density(rho);
              std::vector<std::uint64_t> out;
              out.reserve(samples);
              for (std::size_t i = 0; i < samples; ++i) {
                  out.push_back(distributed_bell_sampling(state, s).z.index());
              }
              return out;
          },
          py::arg("rho"), py::arg("samples"), py::arg("stream"));
    m.def("purity_test",
          [](const ComplexMatrix &rho, std::size_t samples, SeededStream &s) {
              const PurityTestResult r = purity_test(density(rho), samples, s);
              return py::make_tuple(r.verdict == PurityVerdict::Pure, r.estimate, r.threshold);
          },
          py::arg("rho"), py::arg("samples"), py::arg("stream"));

    // Experiment harness.
    m.def("run_experiment",
          [](const std::string &config_json) {
              const ExperimentResult r = run_experiment_in_memory(config_from_json(config_json));
              return py::make_tuple(r.exit_code, r.document);
          },
          py::arg("config_json"));
}

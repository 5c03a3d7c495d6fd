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


// qdcert: command-line experiment runner.
//
//   qdcert certify --d 8 --nq 1 --eps 0.5 --delta 0.2 --runs 50 --seed 7
//   qdcert chi2lab --d 2 --ell 3 --m 2 --eps 0.2 --seed 1 --format csv
//   qdcert run --config experiment.json

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qdcert/experiment.hpp"

namespace {

struct Flags {
    std::vector<std::size_t> d, d_q, n_q, ell, m, n;
    std::vector<double> eps, delta, c;
    std::size_t trials = 0;
    std::size_t runs = 0;
    std::string mode = "ingster_suslina";
    std::uint64_t seed = 0;
    std::string output;
    std::string format = "json";
    bool timing = false;
    bool print_config = false;
};

void add_common(CLI::App *sub, Flags &f) {
    sub->add_option("--d", f.d, "state dimension(s)");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--out", f.output, "output file (default: stdout)");
    sub->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--timing", f.timing, "record wall-clock time per grid point");
    sub->add_flag("--print-config", f.print_config, "print the normalized config and exit");
}

void add_dq(CLI::App *sub, Flags &f) {
    sub->add_option("--dq", f.d_q, "message dimension(s) d_q");
    sub->add_option("--nq", f.n_q, "message qubits n_q (d_q = 2^n_q)");
}

qdcert::ExperimentConfig to_config(qdcert::Subcommand s, const Flags &f) {
    qdcert::ExperimentConfig cfg;
    cfg.subcommand = s;
    cfg.d = f.d;
    cfg.d_q = f.d_q;
    for (std::size_t q : f.n_q) {
        cfg.d_q.push_back(std::size_t{1} << q);
    }
    cfg.eps = f.eps;
    cfg.delta = f.delta;
    cfg.ell = f.ell;
    cfg.c = f.c;
    cfg.m = f.m;
    cfg.n = f.n;
    cfg.trials = f.trials;
    cfg.runs = f.runs;
    if (s == qdcert::Subcommand::Chi2Lab && f.mode == "centralized") {
        cfg.chi2_mode = qdcert::Chi2Mode::Centralized;
    }
    cfg.seed = f.seed;
    cfg.output = f.output;
    cfg.format = qdcert::parse_format(f.format);
    cfg.timing = f.timing;
    return cfg;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Distributed quantum state certification laboratory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(qdcert::build_id()));
    Flags f;

    auto *certify = app.add_subcommand("certify", "run the batched public-coin protocol");
    add_common(certify, f);
    add_dq(certify, f);
    certify->add_option("--eps", f.eps, "trace-distance precision");
    certify->add_option("--delta", f.delta, "failure probability");
    certify->add_option("--m", f.m, "node count (0: the minimum the protocol needs)");
    certify->add_option("--runs", f.runs, "seeded repetitions");

    auto *compress = app.add_subcommand("compress", "second moment and anti-concentration of compression");
    add_common(compress, f);
    add_dq(compress, f);
    compress->add_option("--trials", f.trials, "Haar draws per state pair");
    compress->add_option("--runs", f.runs, "random state pairs");

    auto *chi2 = app.add_subcommand("chi2lab", "chi-squared identities on the hard instance");
    add_common(chi2, f);
    add_dq(chi2, f);
    chi2->add_option("--ell", f.ell, "perturbation count");
    chi2->add_option("--eps", f.eps, "precision");
    chi2->add_option("--c", f.c, "perturbation scale constant");
    chi2->add_option("--m", f.m, "channel count (1..3)");
    chi2->add_option("--n", f.n, "copies (centralized mode)");
    chi2->add_option("--mode", f.mode, "ingster_suslina or centralized")
        ->check(CLI::IsMember({"ingster_suslina", "centralized"}));
    chi2->add_option("--trials", f.trials, "sampled sign vectors (0: enumerate)");

    auto *norm = app.add_subcommand("normcheck", "Liouville norm bounds of random channels");
    add_common(norm, f);
    add_dq(norm, f);
    norm->add_option("--trials", f.trials, "random channels per grid point");

    auto *bell = app.add_subcommand("bell", "Bell sampling and the purity test");
    add_common(bell, f);
    bell->add_option("--trials", f.trials, "protocol samples per state");

    auto *calib = app.add_subcommand("calibrate", "estimate the compression constant C2");
    add_common(calib, f);
    add_dq(calib, f);
    calib->add_option("--trials", f.trials, "Haar draws per state pair");
    calib->add_option("--runs", f.runs, "random state pairs");

    std::string config_path;
    auto *run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("--config", config_path, "config file")->required();
    run->add_flag("--print-config", f.print_config, "print the normalized config and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    qdcert::ExperimentConfig cfg;
    try {
        if (run->parsed()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "config error: cannot read " << config_path << '\n';
                return 2;
            }
            std::stringstream ss;
            ss << in.rdbuf();
            cfg = qdcert::config_from_json(ss.str());
        } else {
            CLI::App *sub = app.get_subcommands().front();
            cfg = qdcert::normalized(to_config(qdcert::parse_subcommand(sub->get_name()), f));
        }
    } catch (const qdcert::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    if (f.print_config) {
        std::cout << qdcert::config_to_json(cfg) << '\n';
        return 0;
    }
    return qdcert::run_experiment(cfg, std::cout, std::cerr);
}

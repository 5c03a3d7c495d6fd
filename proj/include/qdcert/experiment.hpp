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


#ifndef QDCERT_EXPERIMENT_HPP
#define QDCERT_EXPERIMENT_HPP

// Experiment runner shared by the command-line tool and the Python bindings.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qdcert/error.hpp"

namespace qdcert {

enum class Subcommand { Certify, Compress, Chi2Lab, NormCheck, Bell, Calibrate };
enum class OutputFormat { Json, Csv };
enum class Chi2Mode { IngsterSuslina, Centralized };

std::string_view to_string(Subcommand s) noexcept;
std::string_view to_string(OutputFormat f) noexcept;
std::string_view to_string(Chi2Mode m) noexcept;

/// Malformed configuration; `field` names the offending key.
class ConfigError : public Error {
   public:
    ConfigError(std::string field, const std::string &what)
        : Error("config field '" + field + "': " + what), field_(std::move(field)) {}
    const std::string &field() const noexcept {
        return field_;
    }

   private:
    std::string field_;
};

/// One experiment. Grid axes left empty take the subcommand's defaults when
/// normalized; the runner visits their Cartesian product.
struct ExperimentConfig {
    Subcommand subcommand = Subcommand::Certify;
    std::vector<std::size_t> d;
    std::vector<std::size_t> d_q;
    std::vector<double> eps;
    std::vector<double> delta;
    std::vector<std::size_t> ell;
    std::vector<double> c;
    std::vector<std::size_t> m;   // nodes (certify; 0 = minimum), channels (chi2lab)
    std::vector<std::size_t> n;   // copies (chi2lab centralized)
    std::size_t trials = 0;       // draws per grid point; meaning depends on the subcommand
    std::size_t runs = 0;         // repetitions (certify) or state pairs (compress, calibrate)
    Chi2Mode chi2_mode = Chi2Mode::IngsterSuslina;
    std::uint64_t seed = 0;
    std::string output;           // empty: standard output
    OutputFormat format = OutputFormat::Json;
    bool timing = false;          // adds wall-clock fields, which are not reproducible

    bool operator==(const ExperimentConfig &) const = default;
};

/// Fills defaults and checks every grid value against the module preconditions.
ExperimentConfig normalized(const ExperimentConfig &cfg);

std::string config_to_json(const ExperimentConfig &cfg);

/// Throws ConfigError on syntax errors (with line and column), unknown keys and
/// out-of-range values.
ExperimentConfig config_from_json(const std::string &text);

Subcommand parse_subcommand(std::string_view s);
OutputFormat parse_format(std::string_view s);

/// git describe of the source tree at configure time.
std::string_view build_id() noexcept;

/// Worker count from QDCERT_WORKERS, else the hardware concurrency.
std::size_t worker_count();

struct ExperimentResult {
    int exit_code;                 // 0 ok, 1 failed check, 2 config error
    std::string document;          // rendered JSON or CSV
    std::string samples;           // Bell sample dump, one hex label per line
    std::vector<std::string> failures;  // one line per failing row
};

/// Runs without touching the filesystem.
ExperimentResult run_experiment_in_memory(const ExperimentConfig &cfg);

/// Runs, writes the document to cfg.output (or `out` when empty) and any
/// sample dump next to it as <output>.samples. Diagnostics go to `err`.
int run_experiment(const ExperimentConfig &cfg, std::ostream &out, std::ostream &err);

}  // namespace qdcert

#endif

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

#ifndef QDCERT_PROTOCOL_HPP
#define QDCERT_PROTOCOL_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qdcert/linalg.hpp"

namespace qdcert {

enum class CoinModel { Public, Private };

std::string_view to_string(CoinModel c) noexcept;

/// Parameters of the (n_c, n_q, R, E) communication model plus the task.
struct ProtocolConfig {
    std::size_t m = 1;          // distributed nodes
    std::size_t d = 2;          // state dimension
    std::size_t n_c = 0;        // classical bits per message
    std::size_t n_q = 1;        // qubits per message
    CoinModel coin = CoinModel::Public;
    std::size_t bell_pairs = 0;  // EPR pairs shared per neighbouring node pair
    double eps = 0.5;
    double delta = 0.2;
    std::uint64_t seed = 0;

    /// 2^{n_q}.
    std::size_t d_q() const noexcept {
        return std::size_t{1} << n_q;
    }

    /// Throws PreconditionError unless 1 <= d_q <= d, eps and delta in (0, 1], m >= 1.
    void validate() const;
};

/// What one distributed node sends to the central node.
struct NodeMessage {
    std::vector<bool> classical;
    std::optional<DensityMatrix> quantum;
};

/// Throws BudgetViolation when a message exceeds n_c classical bits or n_q qubits.
void budget_enforcer(const NodeMessage &msg, const ProtocolConfig &cfg);

}  // namespace qdcert

#endif

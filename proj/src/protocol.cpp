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

#include "qdcert/protocol.hpp"

#include <string>

namespace qdcert {

std::string_view to_string(CoinModel c) noexcept {
    return c == CoinModel::Public ? "public" : "private";
}

void ProtocolConfig::validate() const {
    if (m < 1) {
        throw PreconditionError("ProtocolConfig: m must be at least 1");
    }
    if (n_q >= 8 * sizeof(std::size_t) - 1) {
        throw PreconditionError("ProtocolConfig: n_q too large");
    }
    if (d_q() > d) {
        throw PreconditionError(
            "ProtocolConfig: d_q = " + std::to_string(d_q()) + " exceeds d = " + std::to_string(d));
    }
    if (!(eps > 0.0 && eps <= 1.0)) {
        throw PreconditionError("ProtocolConfig: eps must lie in (0, 1]");
    }
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw PreconditionError("ProtocolConfig: delta must lie in (0, 1]");
    }
}

void budget_enforcer(const NodeMessage &msg, const ProtocolConfig &cfg) {
    if (msg.classical.size() > cfg.n_c) {
        throw BudgetViolation(
            "classical part has " + std::to_string(msg.classical.size()) + " bits, budget is " +
            std::to_string(cfg.n_c));
    }
    if (msg.quantum.has_value()) {
        if (cfg.n_q == 0) {
            throw BudgetViolation("quantum part sent with n_q = 0");
        }
        if (msg.quantum->dim() > cfg.d_q()) {
            throw BudgetViolation(
                "quantum part has dimension " + std::to_string(msg.quantum->dim()) + ", budget is " +
                std::to_string(cfg.d_q()));
        }
    }
}

}  // namespace qdcert

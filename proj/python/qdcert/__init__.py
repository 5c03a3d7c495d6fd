# Copyright 2026 The qdcert Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the qdcert simulator.

Matrices are complex numpy arrays. Randomness comes from SeededStream.
"""

from qdcert._qdcert import (
    BudgetViolation,
    ConfigError,
    DimensionError,
    EnumerationTooLarge,
    Error,
    InsufficientCopiesError,
    PreconditionError,
    SeededStream,
    bell_distribution,
    build_id,
    centralized_chi2_bound,
    compress,
    compression_moment_exact,
    distributed_bell_sampling,
    haar_unitary,
    ingster_suslina_check,
    partial_trace,
    plan_algorithm1,
    purity_test,
    quantum_chi2,
    random_density,
    random_pure_state,
    run_algorithm1,
    run_experiment,
    weingarten_second_order,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

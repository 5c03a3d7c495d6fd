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

import json

import numpy as np
import pytest

import qdcert


def test_random_density_is_a_state():
    s = qdcert.SeededStream(1)
    rho = qdcert.random_density(4, s)
    assert rho.shape == (4, 4)
    assert np.allclose(rho, rho.conj().T)
    assert abs(np.trace(rho) - 1) < 1e-12
    assert np.linalg.eigvalsh(rho).min() > -1e-12


def test_haar_unitary_is_unitary():
    u = qdcert.haar_unitary(5, qdcert.SeededStream(2))
    assert np.allclose(u @ u.conj().T, np.eye(5), atol=1e-12)


def test_streams_reproducible():
    a = qdcert.haar_unitary(3, qdcert.SeededStream(9, 4))
    b = qdcert.haar_unitary(3, qdcert.SeededStream(9, 4))
    assert np.array_equal(a, b)


def test_quantum_chi2_matches_numpy():
    s = qdcert.SeededStream(3)
    rho = qdcert.random_density(3, s)
    sigma = qdcert.random_density(3, s)
    expected = np.trace(np.linalg.inv(sigma) @ rho @ rho).real - 1
    assert qdcert.quantum_chi2(rho, sigma) == pytest.approx(expected, abs=1e-10)


def test_compress_is_partial_trace_of_conjugation():
    s = qdcert.SeededStream(4)
    rho = qdcert.random_density(8, s)
    u = qdcert.haar_unitary(8, s)
    rotated = u @ rho @ u.conj().T
    expected = np.einsum("ajbj->ab", rotated.reshape(2, 4, 2, 4))
    assert np.allclose(qdcert.compress(rho, u, 2), expected, atol=1e-12)


def test_weingarten_identity_operands():
    one = np.eye(3, dtype=complex)
    assert qdcert.weingarten_second_order(one, one, one, one) == pytest.approx(9.0)


def test_ingster_suslina_identity():
    s = qdcert.SeededStream(5)
    us = [qdcert.haar_unitary(4, s) for _ in range(2)]
    r = qdcert.ingster_suslina_check(4, 4, 0.5, 1.0, us, 2)
    assert r["lhs"] == pytest.approx(r["rhs_exact"], abs=1e-8)


def test_plan_numbers():
    plan = qdcert.plan_algorithm1(8, 1, 0.5, 0.2)
    assert plan["batch_size"] == 2048
    assert plan["batches"] == 13
    assert plan["nodes_required"] == 26624


def test_bell_distribution_and_purity():
    zero = np.diag([1.0, 0.0]).astype(complex)
    assert np.allclose(qdcert.bell_distribution(zero), [0.5, 0.5, 0.0, 0.0])
    s = qdcert.SeededStream(6)
    pure, estimate, threshold = qdcert.purity_test(qdcert.random_pure_state(4, s), 64, s)
    assert pure and estimate == pytest.approx(1.0)
    assert threshold == pytest.approx(0.625)
    assert len(qdcert.distributed_bell_sampling(zero, 10, s)) == 10


def test_errors_are_typed():
    with pytest.raises(qdcert.PreconditionError):
        qdcert.bell_distribution(np.eye(2, dtype=complex))
    with pytest.raises(qdcert.DimensionError):
        qdcert.quantum_chi2(np.eye(2, dtype=complex) / 2, np.eye(3, dtype=complex) / 3)
    with pytest.raises(qdcert.DimensionError):
        qdcert.bell_distribution(np.eye(3, dtype=complex) / 3)
    with pytest.raises(qdcert.ConfigError):
        qdcert.run_experiment(json.dumps({"subcommand": "bell", "d": [3]}))


def test_run_experiment():
    code, document = qdcert.run_experiment(
        json.dumps({"subcommand": "chi2lab", "d": [2], "ell": [3], "eps": [0.2], "c": [0.1], "seed": 7})
    )
    assert code == 0
    rows = json.loads(document)["rows"]
    assert len(rows) == 1 and rows[0]["pass"]

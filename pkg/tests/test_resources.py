from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from tetris_syk.resources import (
    LABEL,
    ResourceQuery,
    evolution_tq_count,
    log3,
    otoc_tq_count,
    parallel_factor,
    resource_table,
    round_sig,
    runtime_estimate,
)


def test_l50_count():
    assert otoc_tq_count(ResourceQuery(50)) == pytest.approx(4e6, rel=0.1)


def test_l100_count_closed_form():
    # the printed formula 8 k (L ln 2L)^2 log3(2L) at L=100
    want = 8 * 2.3 * (100 * math.log(200)) ** 2 * log3(200)
    assert otoc_tq_count(ResourceQuery(100)) == round(want)


def test_zero_sparsity():
    assert otoc_tq_count(ResourceQuery(50, sparsity=0.0)) == 0


def test_runtime_examples():
    q = ResourceQuery(50)
    n = otoc_tq_count(q)
    assert round_sig(runtime_estimate(q, n) / 3600) == 30
    par = ResourceQuery(50, parallel=True)
    assert par.parallel_factor == 14
    assert round_sig(runtime_estimate(par, n) / 3600) == 2
    assert runtime_estimate(q, 0) == 0


def test_lyapunov_preset():
    assert ResourceQuery(50).time == pytest.approx(math.log(100))
    assert ResourceQuery(50, jt=1.0).time == 1.0


@pytest.mark.parametrize("bad", [dict(n_qubits=1), dict(n_qubits=10, sparsity=-1.0), dict(n_qubits=10, jt=-0.5)])
def test_invalid_query(bad):
    with pytest.raises(ValueError):
        ResourceQuery(**bad)


def test_table():
    rows = resource_table()
    assert [r["n_qubits"] for r in rows] == [50, 100]
    assert all(r["label"] == LABEL for r in rows)


@pytest.mark.parametrize("x, d, want", [(34.1, 1, 30.0), (2.43, 1, 2.0), (24_900_000, 2, 25_000_000), (0.0, 1, 0.0)])
def test_round_sig(x, d, want):
    assert round_sig(x, d) == want


@given(st.integers(2, 500), st.floats(0.1, 10), st.floats(0.1, 10))
def test_monotone(L, k, jt):
    base = evolution_tq_count(ResourceQuery(L, k, jt))
    assert evolution_tq_count(ResourceQuery(L + 1, k, jt)) > base
    assert evolution_tq_count(ResourceQuery(L, k * 1.1, jt)) > base
    assert evolution_tq_count(ResourceQuery(L, k, jt * 1.1)) > base
    assert parallel_factor(L) >= 1

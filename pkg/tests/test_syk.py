from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tetris_syk.pauli import PauliString
from tetris_syk.syk import (
    ParameterError,
    SparseSykInstance,
    SykParams,
    build_instance,
    commutes_with_parity,
    encode_majorana_quadruple,
    expected_one_norm,
    majorana,
    one_norm,
    one_norm_scale,
    sample_ensemble,
    sample_instance,
)


def test_n24_probability_and_expected_size():
    p = SykParams(24)
    assert p.probability == pytest.approx(5.195e-3, rel=1e-3)
    assert p.probability * p.n_quadruples == pytest.approx(55.2, rel=1e-12)


def test_n4_dense_single_quadruple():
    p = SykParams(4, dense=True)
    inst = sample_instance(p)
    assert inst.n_terms == 1
    assert p.coupling_variance == pytest.approx(6 / 64)


def test_one_norm_scale_n24():
    assert one_norm_scale(SykParams(24)) == pytest.approx(15.96, abs=0.01)
    assert expected_one_norm(SykParams(24)) == pytest.approx(15.96 * math.sqrt(2 / math.pi), rel=1e-3)


def test_one_norm_ensemble_mean_matches_gaussian_mean():
    params = SykParams(24, seed=11)
    norms = np.array([one_norm(i) for i in sample_ensemble(params, 400)])
    mean, err = norms.mean(), norms.std(ddof=1) / math.sqrt(len(norms))
    assert abs(mean - expected_one_norm(params)) < 4 * err
    # the closed-form scale omits E|J| / sigma = sqrt(2/pi), so it sits far above the mean
    assert abs(mean - one_norm_scale(params)) > 10 * err


def test_first_quadruple_encoding():
    s = encode_majorana_quadruple(1, 2, 3, 4, 2)
    assert s.weight == 2 and s.support == [0, 1]
    assert s.label() == "- ZZ"


@pytest.mark.parametrize("n_qubits", [2, 3, 4])
def test_majorana_anticommutation(n_qubits):
    n = 2 * n_qubits
    eye = PauliString.identity(n_qubits)
    for a in range(1, n + 1):
        ma = majorana(a, n_qubits)
        assert ma * ma == eye and ma.is_hermitian
        for b in range(a + 1, n + 1):
            mb = majorana(b, n_qubits)
            assert not ma.commutes(mb)


def test_majorana_matrices_anticommute():
    ms = [majorana(m, 3).to_matrix() for m in range(1, 7)]
    for a in range(6):
        for b in range(6):
            anti = ms[a] @ ms[b] + ms[b] @ ms[a]
            assert np.allclose(anti, 2 * np.eye(8) * (a == b))


@pytest.mark.parametrize("bad", [dict(n_majorana=7), dict(n_majorana=2), dict(n_majorana=8, sparsity=100.0), dict(n_majorana=8, coupling=0.0)])
def test_invalid_params(bad):
    with pytest.raises(ParameterError):
        SykParams(**bad)


def test_encode_rejects_unsorted():
    with pytest.raises(ParameterError):
        encode_majorana_quadruple(2, 1, 3, 4, 2)


def test_empty_and_single_term_norms():
    params = SykParams(8)
    empty = build_instance(params, np.zeros((0, 4), dtype=int), np.zeros(0))
    assert empty.n_terms == 0 and empty.one_norm == 0.0
    one = build_instance(params, np.array([[1, 3, 5, 8]]), np.array([-0.3]))
    assert one.one_norm == pytest.approx(0.3)


def test_hamiltonian_hermitian_traceless(inst8):
    h = inst8.dense_matrix()
    assert np.allclose(h, h.conj().T)
    assert abs(np.trace(h)) < 1e-12


def test_dense_matrix_is_sum_of_majorana_products(inst8):
    nq = inst8.n_qubits
    ms = {m: majorana(m, nq).to_matrix() for m in range(1, 2 * nq + 1)}
    h = sum(j * ms[a] @ ms[b] @ ms[c] @ ms[d] for (a, b, c, d), j in zip(inst8.quadruples, inst8.couplings))
    assert np.allclose(h, inst8.dense_matrix())


def test_parity_commutation(inst12):
    assert commutes_with_parity(inst12)


def test_json_round_trip(inst8):
    back = SparseSykInstance.from_json(inst8.to_json())
    assert np.array_equal(back.coefficients, inst8.coefficients)
    assert back.strings == inst8.strings


def test_sampling_is_deterministic():
    a = sample_instance(SykParams(12, seed=3))
    b = sample_instance(SykParams(12, seed=3))
    assert np.array_equal(a.couplings, b.couplings)


@pytest.mark.property
def test_ensemble_statistics():
    params = SykParams(16, seed=2)
    insts = sample_ensemble(params, 300)
    counts = np.array([i.n_terms for i in insts])
    expect = params.probability * params.n_quadruples
    sd = math.sqrt(expect * (1 - params.probability))
    assert abs(counts.mean() - expect) < 4 * sd / math.sqrt(len(insts))
    js = np.concatenate([i.couplings for i in insts])
    assert abs(js.mean()) < 4 * math.sqrt(params.coupling_variance / len(js))
    rel_sd = math.sqrt(2 / (len(js) - 1))
    assert abs(js.var(ddof=1) / params.coupling_variance - 1) < 4 * rel_sd


@pytest.mark.property
@given(st.sampled_from([6, 8, 12, 16, 24, 40]), st.integers(0, 2**31))
def test_sampled_strings_are_hermitian_parity_even(n, seed):
    inst = sample_instance(SykParams(n, seed=seed))
    assert commutes_with_parity(inst)
    for s in inst.strings:
        assert s.is_hermitian and s.phase == 0
        assert s.weight >= 1

from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from tetris_syk.pauli import PauliString
from tetris_syk.statevector import (
    CapabilityError,
    ContractError,
    StateVector,
    Tape,
    apply_pauli_rotation,
    exact_evolve,
    loschmidt_exact,
    run_tape,
    sample_shots,
    trace_evolution,
    zero_state,
)
from tetris_syk.syk import SykParams, build_instance, sample_ensemble, sample_instance


def random_state(dim, rng):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


class TestRotation:
    def test_zero_angle(self):
        s = StateVector.initial(3, "+")
        out = apply_pauli_rotation(s, PauliString.from_label("XYZ"), 0.0)
        assert np.allclose(out.amplitudes, s.amplitudes)

    def test_z_eigenstate_phase(self):
        s = StateVector.initial(2, "0")
        out = apply_pauli_rotation(s, PauliString.from_label("ZI"), 0.3)
        assert out.amplitudes[0] == pytest.approx(np.exp(0.3j))
        assert np.allclose(np.abs(out.amplitudes) ** 2, np.abs(s.amplitudes) ** 2)

    def test_x_quarter_turn(self):
        s = StateVector.initial(2, "0")
        out = apply_pauli_rotation(s, PauliString.from_label("XI"), math.pi / 2)
        expected = np.zeros(8, dtype=complex)
        expected[1] = 1j
        assert np.allclose(out.amplitudes, expected)

    def test_non_hermitian_rejected(self):
        with pytest.raises(ContractError):
            apply_pauli_rotation(StateVector.initial(1), PauliString.from_label("i X"), 0.1)

    def test_controlled_branch_only(self):
        s = StateVector.initial(1, "+")
        out = apply_pauli_rotation(s, PauliString.from_label("X"), math.pi / 2, control=1)
        assert np.allclose(out.branches[0], s.branches[0])
        assert np.allclose(out.branches[1], [0, 1j / math.sqrt(2)])

    def test_matches_matrix_exponential(self):
        rng = np.random.default_rng(0)
        p = PauliString.from_label("-XZY")
        psi = random_state(8, rng)
        s = StateVector.from_branches(np.stack([psi, psi]) / math.sqrt(2))
        out = apply_pauli_rotation(s, p, 0.7, control=0)
        want = scipy.linalg.expm(0.7j * p.to_matrix()) @ psi / math.sqrt(2)
        assert np.allclose(out.branches[0], want)


class TestExactEvolve:
    def test_identity_at_zero(self, inst8):
        psi = random_state(16, np.random.default_rng(1))
        assert np.allclose(exact_evolve(inst8, 0.0, psi), psi)

    def test_single_term_closed_form(self, single_term):
        c = single_term.coefficients[0]
        P = single_term.strings[0].to_matrix()
        psi = random_state(4, np.random.default_rng(2))
        t = 0.9
        want = math.cos(c * t) * psi + 1j * math.sin(c * t) * P @ psi
        for method in ("dense", "krylov"):
            assert np.allclose(exact_evolve(single_term, t, psi, method), want, atol=1e-10)

    def test_against_matrix_exponential(self):
        inst = sample_instance(SykParams(8, seed=7))
        psi = random_state(16, np.random.default_rng(3))
        want = scipy.linalg.expm(0.5j * inst.dense_matrix()) @ psi
        for method in ("dense", "krylov"):
            assert np.linalg.norm(exact_evolve(inst, 0.5, psi, method) - want) < 1e-8

    def test_krylov_matches_dense_l12(self, inst12):
        psi = random_state(64, np.random.default_rng(4))
        a = exact_evolve(inst12, 1.3, psi, "dense")
        b = exact_evolve(inst12, 1.3, psi, "krylov")
        assert np.linalg.norm(a - b) < 1e-8

    def test_capability_error(self):
        big = sample_instance(SykParams(34, seed=0))
        with pytest.raises(CapabilityError):
            exact_evolve(big, 0.1, zero_state(17))


class TestLoschmidt:
    def test_zero_time(self, inst8):
        assert loschmidt_exact(inst8, 0.0) == pytest.approx(1.0)

    def test_single_term_cosine(self):
        # (1,3,5,7) maps to a string with X support, so P|0> is orthogonal to |0>
        inst = build_instance(SykParams(8), np.array([[1, 3, 5, 7]]), np.array([0.8]))
        assert inst.strings[0].x != 0
        c = inst.coefficients[0]
        for t in (0.3, 1.1, 2.5):
            assert loschmidt_exact(inst, t) == pytest.approx(math.cos(c * t), abs=1e-12)

    def test_array_and_methods_agree(self, inst8):
        ts = np.linspace(0, 2, 5)
        vals = loschmidt_exact(inst8, ts)
        kry = loschmidt_exact(inst8, ts, method="krylov")
        assert np.allclose(vals, kry, atol=1e-10)

    def test_n24_ensemble_decays_near_jt_one(self):
        pool = sample_ensemble(SykParams(24, seed=1), 6)
        ts = np.array([0.5, 1.0, 1.5])
        mean = np.mean([loschmidt_exact(i, ts).real for i in pool], axis=0)
        assert mean[0] > 0.5 and mean[2] < 0.5
        assert np.all(np.diff(mean) < 0)


class TestTrace:
    def test_zero_time(self, inst8):
        assert trace_evolution(inst8, 0.0) == pytest.approx(1.0)

    def test_single_term_cosine(self, single_term):
        c = single_term.coefficients[0]
        assert trace_evolution(single_term, 0.7) == pytest.approx(math.cos(0.7 * c))

    def test_hutchinson_consistent(self, inst8):
        rng = np.random.default_rng(5)
        for t in (0.4, 1.5):
            dense = trace_evolution(inst8, t)
            est = trace_evolution(inst8, t, method="stochastic", n_probes=64, rng=rng)
            assert abs(est.value - dense) < 3 * est.stderr * math.sqrt(2) + 1e-12


class TestShots:
    def test_plus(self):
        sh = sample_shots(StateVector.initial(3, "+"), 500, np.random.default_rng(0))
        assert np.all(sh.ancilla == 0) and np.all(sh.system == 0)

    def test_minus(self):
        sh = sample_shots(StateVector.initial(3, "-"), 500, np.random.default_rng(0))
        assert np.all(sh.ancilla == 1)

    def test_y_eigenstate_is_fair_coin(self):
        amps = np.zeros(4, dtype=complex)
        amps[0], amps[2] = 1 / math.sqrt(2), 1j / math.sqrt(2)
        n = 10_000
        sh = sample_shots(StateVector(1, amps), n, np.random.default_rng(1))
        assert abs(sh.ancilla.mean() - 0.5) < 5 * math.sqrt(0.25 / n)

    def test_zero_shots(self):
        assert len(sample_shots(StateVector.initial(2), 0, np.random.default_rng(0))) == 0


@pytest.mark.property
@given(st.integers(0, 2**32 - 1), st.integers(1, 300))
def test_norm_preserved_by_tapes(seed, n_ops):
    rng = np.random.default_rng(seed)
    L = 4
    x = rng.integers(0, 16, n_ops)
    z = rng.integers(0, 16, n_ops)
    from tetris_syk.statevector import pauli_phase_exponent

    tape = Tape(x, z, pauli_phase_exponent(x, z), rng.uniform(-3, 3, n_ops), rng.integers(-1, 2, n_ops))
    out = run_tape(StateVector.initial(L), tape)
    assert abs(out.norm() - 1) < 1e-10


@pytest.mark.property
def test_norm_preserved_long_circuit():
    rng = np.random.default_rng(9)
    n_ops, L = 10_000, 6
    from tetris_syk.statevector import pauli_phase_exponent

    x = rng.integers(0, 1 << L, n_ops)
    z = rng.integers(0, 1 << L, n_ops)
    tape = Tape(x, z, pauli_phase_exponent(x, z), rng.uniform(-3, 3, n_ops), rng.integers(-1, 2, n_ops))
    assert abs(run_tape(StateVector.initial(L), tape).norm() - 1) < 1e-10


@pytest.mark.property
@given(st.integers(0, 10_000), st.floats(0.0, 3.0))
def test_parity_superselection(seed, t):
    inst = sample_instance(SykParams(12, seed=seed))
    psi = exact_evolve(inst, t, zero_state(6))
    odd = np.array([bin(i).count("1") % 2 for i in range(64)], dtype=bool)
    assert np.sum(np.abs(psi[odd]) ** 2) < 1e-10


@pytest.mark.property
@given(st.floats(0.0, 2.0), st.floats(0.0, 2.0), st.sampled_from(["dense", "krylov"]))
def test_evolution_composes(t1, t2, method):
    inst = sample_instance(SykParams(12, seed=2))
    psi = random_state(64, np.random.default_rng(6))
    two = exact_evolve(inst, t2, exact_evolve(inst, t1, psi, method), method)
    assert np.linalg.norm(two - exact_evolve(inst, t1 + t2, psi, method)) < 1e-8

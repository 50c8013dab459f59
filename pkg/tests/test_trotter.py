from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tetris_syk.statevector import exact_evolve, loschmidt_exact, zero_state
from tetris_syk.syk import SykParams, sample_ensemble, sample_instance
from tetris_syk.trotter import (
    TrotterPlan,
    build_and_run,
    convergence_exponent,
    crossover_study,
    first_crossover,
    gate_trace,
    step_gate_count,
    tetris_optimal_tq,
    trotter_error_scale,
    trotter_loschmidt,
    trotter_relative_error,
)


def test_commuting_hamiltonian_is_exact(commuting8):
    rng = np.random.default_rng(0)
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi /= np.linalg.norm(psi)
    for steps in (1, 3):
        out = build_and_run(commuting8, 1.7, TrotterPlan.build(commuting8, steps), psi)
        assert np.linalg.norm(out - exact_evolve(commuting8, 1.7, psi)) < 1e-8
    assert trotter_relative_error(commuting8, 0.4, 1) < 1e-12


@pytest.mark.parametrize("seed", range(6))
def test_converges_with_many_steps(seed):
    inst = sample_instance(SykParams(8, seed=seed))
    diff = trotter_loschmidt(inst, 0.5, 64) - loschmidt_exact(inst, 0.5)
    assert abs(diff.real) < 1e-3
    # the imaginary part carries the first-order error and is slower
    assert abs(diff) < 2e-3


def test_more_steps_reduce_error(inst8):
    assert trotter_relative_error(inst8, 0.3, 2) < trotter_relative_error(inst8, 0.3, 1)


def test_first_order_convergence(inst8):
    assert convergence_exponent(inst8, 0.1) == pytest.approx(-1.0, abs=0.2)


def test_invalid_steps(inst8):
    with pytest.raises(ValueError):
        TrotterPlan.build(inst8, 0)


def test_default_order_descending_magnitude(inst8):
    plan = TrotterPlan.build(inst8, 1)
    mags = np.abs(inst8.coefficients)[list(plan.term_order)]
    assert np.all(np.diff(mags) <= 0)
    shuffled = TrotterPlan.build(inst8, 1, shuffle_seed=3)
    assert sorted(shuffled.term_order) == sorted(plan.term_order)
    assert shuffled == TrotterPlan.build(inst8, 1, shuffle_seed=3)


@pytest.mark.parametrize("steps", [1, 2, 5])
def test_gate_trace_matches_count(inst12, steps):
    plan = TrotterPlan.build(inst12, steps)
    trace = gate_trace(inst12, plan)
    assert len(trace) == plan.tq_gate_count == steps * step_gate_count(inst12)
    assert all(abs(a - b) >= 1 for a, b in trace)


def test_n24_step_count():
    """About a thousand gates per step once the ancilla control is included."""
    pool = sample_ensemble(SykParams(24, seed=0), 20)
    controlled = np.mean([step_gate_count(i, controlled=True) for i in pool])
    assert 1022 / 1.5 <= controlled <= 1022 * 1.5
    plain = np.mean([step_gate_count(i) for i in pool])
    assert plain < controlled


def test_early_times_favour_tetris(inst8):
    assert tetris_optimal_tq(inst8, 0.0) == 0.0
    assert tetris_optimal_tq(inst8, 0.05) < step_gate_count(inst8)


def test_late_times_favour_trotter(inst8):
    assert tetris_optimal_tq(inst8, 20.0) > step_gate_count(inst8)


def test_crossover_study():
    times = [0.1 * i for i in range(1, 21)]
    rows = crossover_study(SykParams(12, seed=1), times, ensemble_size=5)
    assert rows[0].cheaper_scheme == "tetris"
    cross = first_crossover(rows)
    assert cross is not None and cross.trotter_error_1 > 0.1
    for r in rows:
        if r.loschmidt_exact >= 0.5:
            assert r.cheaper_scheme == "tetris"
    assert all(r.tq_trotter_2 == 2 * r.tq_trotter_1 for r in rows)


def test_undefined_error_when_amplitude_vanishes(single_term):
    # Re<0|e^{iHt}|0> = cos(ct) vanishes at ct = pi/2 for P = Z Z with P|0> = |0>
    c = single_term.coefficients[0]
    assert math.isnan(trotter_relative_error(single_term, abs(math.pi / (2 * c)), 1))


def test_error_scale_guide():
    p = SykParams(24)
    assert trotter_error_scale(p, 0.5, 2) == pytest.approx(0.25 * p.probability * 24**4 / 2)


@pytest.mark.property
@given(st.integers(0, 1000), st.integers(1, 4), st.floats(0.0, 1.5))
def test_trotter_preserves_norm(seed, steps, t):
    inst = sample_instance(SykParams(10, seed=seed))
    out = build_and_run(inst, t, TrotterPlan.build(inst, steps), zero_state(5))
    assert abs(np.linalg.norm(out) - 1) < 1e-10

"""First-order Trotter circuits and the cost comparison with TETRIS."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .noise import ladder_pairs
from .statevector import apply_pauli_vec, loschmidt_exact, pauli_phase_exponent, zero_state
from .syk import SparseSykInstance, SykParams, sample_ensemble
from .tetris import TetrisConfig, gadget_cost, optimal_angle

UNDEFINED_BELOW = 1e-6


@dataclass(frozen=True)
class TrotterPlan:
    """``steps`` repetitions of the terms in ``term_order``."""

    steps: int
    term_order: tuple[int, ...]
    tq_gate_count: int

    @classmethod
    def build(
        cls,
        instance: SparseSykInstance,
        steps: int,
        shuffle_seed: int | None = None,
        controlled: bool = False,
    ) -> TrotterPlan:
        """Terms by descending ``|c_n|`` (ties by index), or a seeded shuffle."""
        if steps < 1:
            raise ValueError("steps must be a positive integer")
        if shuffle_seed is None:
            order = np.lexsort((np.arange(instance.n_terms), -np.abs(instance.coefficients)))
        else:
            order = np.random.default_rng(shuffle_seed).permutation(instance.n_terms)
        per_step = int(gadget_cost(instance.weights, controlled).sum())
        return cls(steps, tuple(int(i) for i in order), steps * per_step)


def step_gate_count(instance: SparseSykInstance, controlled: bool = False) -> int:
    return int(gadget_cost(instance.weights, controlled).sum())


def gate_trace(instance: SparseSykInstance, plan: TrotterPlan) -> list[tuple[int, int]]:
    """Qubit pairs of every two-qubit gate in the compiled circuit, in order."""
    trace = []
    for _ in range(plan.steps):
        for n in plan.term_order:
            pairs = ladder_pairs(int(instance.x_masks[n]), int(instance.z_masks[n]))
            trace.extend(pairs)
            trace.extend(reversed(pairs))
    return trace


def build_and_run(instance: SparseSykInstance, t: float, plan: TrotterPlan, state: np.ndarray) -> np.ndarray:
    """``(prod_n e^{i c_n P_n t/s})^s |state>``, the first term in ``term_order`` acting first."""
    order = np.asarray(plan.term_order, dtype=np.int64)
    x = instance.x_masks[order]
    z = instance.z_masks[order]
    k = pauli_phase_exponent(x, z)
    theta = instance.coefficients[order] * t / plan.steps
    c, s = np.cos(theta), np.sin(theta)
    psi = np.array(state, dtype=complex)
    for _ in range(plan.steps):
        for i in range(len(order)):
            psi = c[i] * psi + 1j * s[i] * apply_pauli_vec(psi, int(x[i]), int(z[i]), int(k[i]))
    return psi


def trotter_loschmidt(instance: SparseSykInstance, t: float, steps: int) -> complex:
    plan = TrotterPlan.build(instance, steps)
    return complex(build_and_run(instance, t, plan, zero_state(instance.n_qubits))[0])


def trotter_relative_error(instance: SparseSykInstance, t: float, steps: int) -> float:
    """``|Re L_trotter - Re L_exact| / |Re L_exact|``; ``nan`` when ``Re L_exact`` is ~0."""
    exact = loschmidt_exact(instance, t).real
    if abs(exact) < UNDEFINED_BELOW:
        return float("nan")
    return abs(trotter_loschmidt(instance, t, steps).real - exact) / abs(exact)


def convergence_exponent(instance: SparseSykInstance, t: float, steps: Sequence[int] = (1, 2, 4, 8, 16)) -> float:
    """Slope of ``log(error)`` against ``log(s)``."""
    errs = np.array([trotter_relative_error(instance, t, s) for s in steps])
    slope, _ = np.polyfit(np.log(steps), np.log(errs), 1)
    return float(slope)


def tetris_optimal_tq(instance: SparseSykInstance, t: float, controlled: bool = False) -> float:
    """Expected TETRIS two-qubit gates at ``tau = 1/(t mu)``; zero at ``t = 0``."""
    if t <= 0:
        return 0.0
    tau = optimal_angle(t, instance.one_norm)
    return TetrisConfig(instance, t, tau).mean_tq_gates(controlled)


@dataclass
class CrossoverRow:
    time: float
    tq_tetris_optimal: float
    tq_trotter_1: float
    tq_trotter_2: float
    cheaper_scheme: str
    trotter_error_1: float
    trotter_error_2: float
    loschmidt_exact: float

    def as_row(self) -> dict:
        return dict(self.__dict__)


def crossover_study(
    params: SykParams,
    times: Sequence[float],
    ensemble_size: int = 10,
    controlled: bool = False,
    with_errors: bool = True,
) -> list[CrossoverRow]:
    """Disorder-averaged cost of TETRIS at the optimal angle versus 1 and 2 Trotter steps.

    ``cheaper_scheme`` compares TETRIS with one Trotter step. The error
    columns are ``mean_i |Re L_trot,i - Re L_i| / |mean_i Re L_i|``, so errors
    of opposite sign in different instances do not cancel; ``nan`` when the
    ensemble-mean amplitude is ~0.
    """
    pool = sample_ensemble(params, ensemble_size)
    trot1 = float(np.mean([step_gate_count(i, controlled) for i in pool]))
    rows = []
    for t in times:
        tet = float(np.mean([tetris_optimal_tq(i, t, controlled) for i in pool]))
        e1 = e2 = ex = float("nan")
        if with_errors:
            exact = np.array([loschmidt_exact(i, t).real for i in pool])
            ex = float(exact.mean())
            if abs(ex) >= UNDEFINED_BELOW:
                errs = [
                    float(np.mean(np.abs([trotter_loschmidt(i, t, s).real for i in pool] - exact))) / abs(ex)
                    for s in (1, 2)
                ]
                e1, e2 = errs
        rows.append(CrossoverRow(float(t), tet, trot1, 2 * trot1, "tetris" if tet < trot1 else "trotter", e1, e2, ex))
    return rows


def first_crossover(rows: Sequence[CrossoverRow]) -> CrossoverRow | None:
    """Earliest row where one Trotter step costs no more than TETRIS."""
    for r in rows:
        if r.tq_trotter_1 <= r.tq_tetris_optimal:
            return r
    return None


def trotter_error_scale(params: SykParams, t: float, steps: int) -> float:
    """``t^2 p N^4 / s``: a plotting guide for the first-order error, not a bound."""
    return t**2 * params.probability * params.n_majorana**4 / steps

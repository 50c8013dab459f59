"""Standard mirror and mirror-on-average benchmarks on TETRIS circuits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .estimators import estimate_from_values, local_z_diagonal, local_z_per_shot
from .noise import NoiseSpec
from .protocols import AnglePolicy, angle_policy, chunk_size, circuit_rng
from .statevector import ANCILLA0, ANCILLA1, NO_CONTROL, Tape, evolved_zero_state, run_tapes, sample_shots, x_expectation
from .syk import SparseSykInstance
from .tetris import TetrisConfig, circuit_tape, sample_circuit

STREAM_MIRROR = 10
STREAM_MOA = 11


@dataclass
class MirrorRunSpec:
    """Shared settings of the two benchmarks.

    ``shots_per_circuit=0`` uses the exact expectation of each sampled
    trajectory instead of shot averages.
    """

    pool: Sequence[SparseSykInstance]
    time: float
    noise: NoiseSpec
    n_samples: int
    shots_per_circuit: int = 0
    policy: AnglePolicy = angle_policy("optimal")
    seed: int = 0


@dataclass
class MirrorResult:
    survival: float
    survival_err: float
    local_obs: float = float("nan")
    local_obs_err: float = float("nan")
    mean_tq_gates: float = float("nan")


def _config(run: MirrorRunSpec, c: int) -> TetrisConfig:
    inst = run.pool[c % len(run.pool)]
    tau = run.policy(run.time, inst.one_norm) if run.time > 0 else 1.0
    return TetrisConfig(inst, run.time, tau)


def mirror_on_average(run: MirrorRunSpec) -> MirrorResult:
    """``U`` on the ancilla-0 branch, an independent ``U'`` on the ancilla-1 branch.

    Returns ``lambda^-2 <X (x) I>`` (ideal 1) and ``lambda^-2 <X (x) O_loc>``
    with ``O_loc = (1/L) sum_j Z_j``.
    """
    nq = run.pool[0].n_qubits
    dim = 1 << nq
    ones = np.ones(dim)
    zloc = local_z_diagonal(nq)
    n = run.n_samples
    surv, loc, lam2, gates = np.empty(n), np.empty(n), np.empty(n), np.empty(n)
    step = chunk_size(nq)
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        tapes, rngs = [], []
        for c in range(lo, hi):
            cfg = _config(run, c)
            rng = circuit_rng(run.seed, STREAM_MOA, c)
            u = sample_circuit(cfg, rng)
            u2 = sample_circuit(cfg, rng)
            lam2[c] = cfg.attenuation**2
            gates[c] = u.tq_gate_estimate(cfg.instance) + u2.tq_gate_estimate(cfg.instance)
            tapes.append(Tape.concat([
                circuit_tape(u, cfg.instance, ANCILLA0, run.noise, rng),
                circuit_tape(u2, cfg.instance, ANCILLA1, run.noise, rng),
            ]))
            rngs.append(rng)
        states = np.zeros((hi - lo, 2, dim), dtype=complex)
        states[:, :, 0] = 1 / math.sqrt(2)
        run_tapes(states, tapes)
        if run.shots_per_circuit:
            shots = [sample_shots(st, run.shots_per_circuit, rng) for st, rng in zip(states, rngs)]
            surv[lo:hi] = [np.mean(1.0 - 2.0 * sh.ancilla) for sh in shots]
            loc[lo:hi] = [np.mean(local_z_per_shot(sh.ancilla, sh.system, nq)) for sh in shots]
        else:
            surv[lo:hi] = x_expectation(states, ones)
            loc[lo:hi] = x_expectation(states, zloc)
    a = estimate_from_values(surv, lam2)
    b = estimate_from_values(loc, lam2)
    return MirrorResult(a.mean, a.stderr, b.mean, b.stderr, float(gates.mean()))


def standard_mirror(run: MirrorRunSpec) -> MirrorResult:
    """``U`` followed by its exact gate-by-gate inverse; all-zeros survival."""
    nq = run.pool[0].n_qubits
    dim = 1 << nq
    n = run.n_samples
    gates, p0 = np.empty(n), np.empty(n)
    step = chunk_size(nq)
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        tapes, rngs = [], []
        for c in range(lo, hi):
            cfg = _config(run, c)
            rng = circuit_rng(run.seed, STREAM_MIRROR, c)
            u = sample_circuit(cfg, rng)
            gates[c] = 2 * u.tq_gate_estimate(cfg.instance)
            tapes.append(Tape.concat([
                circuit_tape(u, cfg.instance, NO_CONTROL, run.noise, rng),
                circuit_tape(u, cfg.instance, NO_CONTROL, run.noise, rng, inverse=True),
            ]))
            rngs.append(rng)
        states = np.zeros((hi - lo, 2, dim), dtype=complex)
        states[:, 0, 0] = 1.0
        run_tapes(states, tapes)
        surv = np.abs(states[:, 0, 0]) ** 2
        if run.shots_per_circuit:
            surv = np.array([rng.binomial(run.shots_per_circuit, min(p, 1.0)) / run.shots_per_circuit for rng, p in zip(rngs, surv)])
        p0[lo:hi] = surv
    a = estimate_from_values(p0)
    return MirrorResult(a.mean, a.stderr, mean_tq_gates=float(gates.mean()))


def gate_fidelity_prediction(p_dep: float, n_gates: float) -> float:
    """``(1 - 15 p/16)^G``: process fidelity of ``G`` depolarized two-qubit gates."""
    return (1 - 15 * p_dep / 16) ** n_gates


def exact_local_z(pool: Sequence[SparseSykInstance], t: float, n_samples: int) -> float:
    """Pool-weighted ``<0|e^{-iHt} O_loc e^{iHt}|0>``."""
    counts = np.bincount(np.arange(n_samples) % len(pool), minlength=len(pool))
    zloc = local_z_diagonal(pool[0].n_qubits)
    vals = np.array([np.abs(evolved_zero_state(inst, t)) ** 2 @ zloc for inst in pool])
    return float(counts @ vals / counts.sum())

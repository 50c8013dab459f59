"""Loschmidt-amplitude estimation runs over a pool of disorder instances.

Circuit ``c`` uses instance ``c % len(pool)`` and its own generator
``default_rng(SeedSequence(seed, spawn_key=(stream, c)))``, which drives
circuit sampling, noise and shots. Results are therefore independent of how
circuits are chunked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .estimators import EchoObservable, EstimateRecord, estimate_from_values, lgae_exponential, lgae_linear
from .noise import NoiseSpec
from .statevector import ANCILLA1, loschmidt_exact, measurement_probabilities, run_tapes, x_expectation
from .syk import SparseSykInstance
from .tetris import TetrisConfig, circuit_tape, optimal_angle, sample_circuit, shallow_angle

AnglePolicy = Callable[[float, float], float]

CHUNK_CIRCUITS = 2048
CHUNK_ELEMS = 1 << 22


def chunk_size(n_qubits: int) -> int:
    """Circuits per batch, bounded so a batch holds at most ``CHUNK_ELEMS`` amplitudes."""
    return max(1, min(CHUNK_CIRCUITS, CHUNK_ELEMS // (2 << n_qubits)))


def angle_policy(kind: str = "optimal", factor: float = 1.5, alpha: float = 1.0) -> AnglePolicy:
    """``tau(t, mu)`` for ``"optimal"`` (``1/(t mu)``) or ``"shallow"`` (``factor/(t mu)``), times ``alpha``."""
    if kind == "optimal":
        return lambda t, mu: optimal_angle(t, mu) * alpha
    if kind == "shallow":
        return lambda t, mu: shallow_angle(t, mu, factor) * alpha
    raise ValueError(f"unknown angle policy {kind!r}")


def circuit_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, index)))


@dataclass
class CircuitResults:
    """Per-circuit outputs of one run."""

    instance_index: np.ndarray
    attenuation: np.ndarray
    gate_angle: np.ndarray
    rotations: np.ndarray
    tq_gates: np.ndarray
    shot_values: dict = field(default_factory=dict)  # observable -> (n_circ, shots)
    exact_values: dict = field(default_factory=dict)  # observable -> (n_circ,)

    @property
    def n_circuits(self) -> int:
        return len(self.attenuation)


def run_circuits(
    pool: Sequence[SparseSykInstance],
    t: float,
    policy: AnglePolicy,
    n_circuits: int,
    shots_per_circuit: int,
    noise: NoiseSpec | None = None,
    seed: int = 0,
    stream: int = 0,
    observables: Sequence[EchoObservable] = tuple(EchoObservable),
    extra_diagonals: dict | None = None,
) -> CircuitResults:
    """Sample, noisily execute and measure ``n_circuits`` Hadamard-test circuits.

    ``U`` acts on the ancilla-1 branch of ``|+>|0...0>``. For each
    observable the per-shot values ``(-1)^a O(s)`` are kept, together with the
    exact per-circuit ``<X (x) O>`` of the final state.
    """
    nq = pool[0].n_qubits
    dim = 1 << nq
    diags = {o: o.diagonal(nq) for o in observables}
    diags.update(extra_diagonals or {})
    inst_idx = np.arange(n_circuits) % len(pool)
    lam = np.empty(n_circuits)
    taus = np.empty(n_circuits)
    rot = np.empty(n_circuits, dtype=np.int64)
    tq = np.empty(n_circuits, dtype=np.int64)
    shot_vals = {o: np.empty((n_circuits, shots_per_circuit)) for o in diags}
    exact_vals = {o: np.empty(n_circuits) for o in diags}
    step = chunk_size(nq)
    for lo in range(0, n_circuits, step):
        hi = min(n_circuits, lo + step)
        tapes, rngs = [], []
        for c in range(lo, hi):
            inst = pool[inst_idx[c]]
            rng = circuit_rng(seed, stream, c)
            mu = inst.one_norm
            tau = policy(t, mu) if t > 0 else 1.0
            cfg = TetrisConfig(inst, t, tau)
            circ = sample_circuit(cfg, rng)
            lam[c], taus[c] = cfg.attenuation, tau
            rot[c], tq[c] = circ.rotation_count, circ.tq_gate_estimate(inst)
            tapes.append(circuit_tape(circ, inst, ANCILLA1, noise, rng))
            rngs.append(rng)
        states = np.zeros((hi - lo, 2, dim), dtype=complex)
        states[:, :, 0] = 1 / math.sqrt(2)
        run_tapes(states, tapes)
        for o, d in diags.items():
            exact_vals[o][lo:hi] = x_expectation(states, d)
        if shots_per_circuit:
            probs = measurement_probabilities(states).reshape(hi - lo, -1)
            cdf = np.cumsum(probs, axis=1)
            cdf /= cdf[:, -1:]
            for j, rng in enumerate(rngs):
                draws = np.searchsorted(cdf[j], rng.random(shots_per_circuit), side="right")
                draws = np.minimum(draws, 2 * dim - 1)
                anc, sysb = draws // dim, draws % dim
                sign = 1.0 - 2.0 * anc
                for o, d in diags.items():
                    shot_vals[o][lo + j] = sign * d[sysb]
    return CircuitResults(inst_idx, lam, taus, rot, tq, shot_vals, exact_vals)


def records_from_results(
    res: CircuitResults, t: float, use_exact: bool = False, alpha: float = float("nan"), seeds: dict | None = None
) -> dict:
    """One :class:`EstimateRecord` per observable, rescaled per circuit by ``1/lambda``."""
    out = {}
    for o in res.shot_values:
        name = o.value if isinstance(o, EchoObservable) else str(o)
        if use_exact or res.shot_values[o].shape[1] == 0:
            means, spc = res.exact_values[o], 0
        else:
            means, spc = res.shot_values[o].mean(axis=1), res.shot_values[o].shape[1]
        out[o] = estimate_from_values(
            means,
            res.attenuation,
            observable=name,
            shots_per_circuit=spc,
            gate_angle=float(np.mean(res.gate_angle)),
            alpha=alpha,
            time=t,
            seeds=dict(seeds or {}),
        )
    return out


def exact_target(pool: Sequence[SparseSykInstance], t: float, n_circuits: int) -> float:
    """Mean of ``Re<0|e^{iHt}|0>`` over the instances the circuits actually used."""
    counts = np.bincount(np.arange(n_circuits) % len(pool), minlength=len(pool))
    vals = np.array([loschmidt_exact(inst, t).real for inst in pool])
    return float(counts @ vals / counts.sum())


@dataclass
class LgaePoint:
    """Shallow, deep and extrapolated estimates at one time for one observable."""

    time: float
    observable: str
    shallow: EstimateRecord
    deep: EstimateRecord
    linear: tuple
    exponential: tuple | None
    exact: float


def lgae_protocol(
    pool: Sequence[SparseSykInstance],
    t: float,
    n_circuits: int,
    shots_per_circuit: int,
    noise: NoiseSpec | None,
    alpha: float = 1 / 3,
    shallow_factor: float = 1.5,
    seed: int = 0,
    deep_noise: NoiseSpec | None = None,
) -> list[LgaePoint]:
    """Shallow (``tau0 = factor/(t mu)``) and deep (``alpha tau0``) runs plus LGAE."""
    shallow = run_circuits(pool, t, angle_policy("shallow", shallow_factor), n_circuits, shots_per_circuit, noise, seed, stream=0)
    deep = run_circuits(
        pool, t, angle_policy("shallow", shallow_factor, alpha), n_circuits, shots_per_circuit,
        noise if deep_noise is None else deep_noise, seed, stream=1,
    )
    rs = records_from_results(shallow, t, alpha=1.0, seeds={"circuit": seed})
    rd = records_from_results(deep, t, alpha=alpha, seeds={"circuit": seed})
    exact = exact_target(pool, t, n_circuits)
    out = []
    for o in rs:
        a, b = rs[o], rd[o]
        lin = lgae_linear(a.mean, a.stderr, b.mean, b.stderr, alpha)
        try:
            expo = lgae_exponential(a.mean, a.stderr, b.mean, b.stderr, alpha)
        except ValueError:
            expo = None
        out.append(LgaePoint(t, a.observable, a, b, lin, expo, exact))
    return out

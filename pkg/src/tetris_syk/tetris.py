"""TETRIS random circuits for a Pauli-sum Hamiltonian.

Each term ``c_n P_n`` contributes rotations ``e^{i s_n tau P_n}``
(``s_n = sign(c_n)``) at the events of a Poisson process of rate
``|c_n| / sin(tau)`` on ``[0, t]``. The random product ``U`` then satisfies
``E[U] = lambda e^{iHt}`` with ``lambda = exp(-t mu tan(tau/2))``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .noise import GLOBAL, PER_GATE, NoiseSpec, error_tape, ladder_pairs, sample_gate_errors, sample_global_errors
from .statevector import NO_CONTROL, StateVector, Tape, pauli_phase_exponent, run_tape
from .syk import SparseSykInstance

MAX_ANGLE = math.pi / 2 - 1e-6


def gadget_cost(weights, controlled: bool = False):
    """Two-qubit gates for Pauli gadgets of the given weights.

    A weight-``w`` gadget is a CNOT ladder down and back up, ``2(w-1)``
    gates. With ``controlled=True`` the central Z rotation is controlled on
    the ancilla, which adds two more, ``2w``.
    """
    w = np.asarray(weights, dtype=np.int64)
    cost = np.where(w >= 1, 2 * (w - 1), 0)
    if controlled:
        cost = cost + 2 * (w >= 1)
    return cost


@dataclass(frozen=True)
class TetrisConfig:
    """Gate angle ``tau`` in ``(0, pi/2)`` and physical time ``t``."""

    instance: SparseSykInstance
    time: float
    gate_angle: float

    def __post_init__(self):
        if not 0 < self.gate_angle < math.pi / 2:
            raise ValueError(f"gate angle must lie in (0, pi/2), got {self.gate_angle}")
        if self.time < 0:
            raise ValueError("time must be non-negative")

    @property
    def rate(self) -> float:
        """Total event rate ``mu / sin(tau)``."""
        return self.instance.one_norm / math.sin(self.gate_angle)

    @property
    def mean_rotations(self) -> float:
        return self.time * self.rate

    @property
    def attenuation(self) -> float:
        return attenuation(self.time, self.instance.one_norm, self.gate_angle)

    def mean_tq_gates(self, controlled: bool = False) -> float:
        inst = self.instance
        if inst.one_norm == 0:
            return 0.0
        per_rot = np.abs(inst.coefficients) @ gadget_cost(inst.weights, controlled) / inst.one_norm
        return self.mean_rotations * float(per_rot)


def attenuation(t: float, mu: float, tau: float) -> float:
    """``exp(-t mu tan(tau/2))``."""
    return math.exp(-t * mu * math.tan(tau / 2))


def optimal_angle(t: float, mu: float) -> float:
    """``1/(t mu)``, clamped just below ``pi/2``."""
    if t * mu <= 0:
        raise ValueError("t * mu must be positive")
    return min(1.0 / (t * mu), MAX_ANGLE)


def shallow_angle(t: float, mu: float, factor: float = 1.5) -> float:
    """``factor/(t mu)`` clamped below ``pi/2``; ``factor=1.5`` gives the shallow circuits."""
    return min(factor / (t * mu), MAX_ANGLE)


@dataclass(frozen=True)
class TetrisCircuit:
    """One sampled ``U``: events ``(terms[i], signs[i])`` at ``times[i]``, in order."""

    terms: np.ndarray
    signs: np.ndarray
    times: np.ndarray
    gate_angle: float
    duration: float

    @property
    def rotation_count(self) -> int:
        return len(self.terms)

    def tq_gate_estimate(self, instance: SparseSykInstance, controlled: bool = False) -> int:
        return int(gadget_cost(instance.weights[self.terms], controlled).sum())

    def to_json(self, seed=None) -> str:
        return json.dumps(
            {
                "terms": self.terms.tolist(),
                "signs": self.signs.tolist(),
                "times": [float(t).hex() for t in self.times],
                "gate_angle": float(self.gate_angle).hex(),
                "duration": float(self.duration).hex(),
                "seed": seed,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> TetrisCircuit:
        d = json.loads(text)
        return cls(
            np.array(d["terms"], dtype=np.int64),
            np.array(d["signs"], dtype=np.int64),
            np.array([float.fromhex(t) for t in d["times"]]),
            float.fromhex(d["gate_angle"]),
            float.fromhex(d["duration"]),
        )


def sample_circuit(config: TetrisConfig, rng: np.random.Generator) -> TetrisCircuit:
    """Draw ``M ~ Poisson(t mu / sin tau)`` events with term ``n`` w.p. ``|c_n|/mu``.

    Events get sorted uniform times on ``[0, t]``; their labels are i.i.d.,
    which is the law of the merged per-term Poisson processes.
    """
    inst = config.instance
    if inst.n_terms == 0:
        raise ValueError("instance has no terms")
    m = int(rng.poisson(config.mean_rotations))
    probs = np.abs(inst.coefficients) / inst.one_norm
    terms = rng.choice(inst.n_terms, size=m, p=probs)
    times = np.sort(rng.uniform(0.0, config.time, size=m))
    signs = np.sign(inst.coefficients[terms]).astype(np.int64)
    return TetrisCircuit(terms, signs, times, config.gate_angle, config.time)


def circuit_tape(
    circuit: TetrisCircuit,
    instance: SparseSykInstance,
    control: int = NO_CONTROL,
    noise: NoiseSpec | None = None,
    rng: np.random.Generator | None = None,
    inverse: bool = False,
) -> Tape:
    """Compile a circuit (optionally its exact inverse) into a tape with sampled noise.

    Per-gate errors of the compute half of a gadget's ladder are placed just
    before its rotation and those of the uncompute half just after.
    """
    terms, signs = circuit.terms, circuit.signs
    if inverse:
        terms, signs = terms[::-1], -signs[::-1]
    x = instance.x_masks[terms]
    z = instance.z_masks[terms]
    k = pauli_phase_exponent(x, z)
    angle = signs * circuit.gate_angle
    ctrl = np.full(len(terms), control, dtype=np.int64)
    base = Tape(x, z, k, angle.astype(float), ctrl)
    if noise is None or noise.is_noiseless:
        return base
    if rng is None:
        raise ValueError("noisy compilation needs an rng")
    if noise.mode == PER_GATE:
        return _with_gate_errors(base, instance.weights[terms], noise.p_dep, rng)
    if noise.mode == GLOBAL:
        if inverse:
            raise ValueError("global-clock noise is defined for forward circuits only")
        etimes, errs = sample_global_errors(instance.n_qubits, noise.q, circuit.duration, rng)
        etape = error_tape(errs)
        both = Tape.concat([base, etape])
        when = np.concatenate([circuit.times, etimes])
        order = np.argsort(when, kind="stable")
        return Tape(*(getattr(both, f)[order] for f in ("x", "z", "k", "angle", "control")))
    return base


def _with_gate_errors(base: Tape, weights: np.ndarray, p_dep: float, rng: np.random.Generator) -> Tape:
    npairs = np.maximum(weights - 1, 0)
    ends = np.cumsum(2 * npairs)
    total = int(ends[-1]) if len(ends) else 0
    hits = np.flatnonzero(rng.random(total) < p_dep)
    if len(hits) == 0:
        return base
    event = np.searchsorted(ends, hits, side="right")
    local = hits - (ends[event] - 2 * npairs[event])
    errors, keys = [], []
    for ev, loc in zip(event, local):
        pairs = ladder_pairs(int(base.x[ev]), int(base.z[ev]))
        half, j = divmod(int(loc), len(pairs))
        errors.extend(sample_gate_errors([pairs[j]], 1.0, rng))
        keys.append(3 * ev + (0 if half == 0 else 2))
    etape = error_tape(errors)
    both = Tape.concat([base, etape])
    order = np.argsort(np.concatenate([3 * np.arange(len(base)) + 1, keys]), kind="stable")
    return Tape(*(getattr(both, f)[order] for f in ("x", "z", "k", "angle", "control")))


def run_conditional(
    circuit: TetrisCircuit,
    config: TetrisConfig,
    state: StateVector,
    branch: int = 1,
    noise: NoiseSpec | None = None,
    rng: np.random.Generator | None = None,
) -> StateVector:
    """Apply ``U`` on the ancilla-``branch`` subspace, with noise per ``noise``."""
    tape = circuit_tape(circuit, config.instance, control=branch, noise=noise, rng=rng)
    return run_tape(state, tape)


def sampled_unitary(circuit: TetrisCircuit, instance: SparseSykInstance) -> np.ndarray:
    """Dense matrix of the sampled ``U`` (small systems; for oracles)."""
    dim = 1 << instance.n_qubits
    u = np.eye(dim, dtype=complex)
    mats = {}
    for n, s in zip(circuit.terms, circuit.signs):
        if n not in mats:
            mats[n] = instance.strings[n].to_matrix()
        th = s * circuit.gate_angle
        # the first event acts first, as in the compiled tape
        u = (math.cos(th) * np.eye(dim) + 1j * math.sin(th) * mats[n]) @ u
    return u

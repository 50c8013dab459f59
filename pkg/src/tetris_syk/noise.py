"""Stochastic Pauli noise for trajectory simulation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import PauliString
from .statevector import NO_CONTROL, StateVector, Tape, apply_pauli, pauli_phase_exponent

NONE = "none"
PER_GATE = "per_gate"
GLOBAL = "global"


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model.

    ``per_gate``: after each accounted two-qubit gate, with probability
    ``p_dep`` one of the 15 non-identity two-qubit Paulis on that gate's pair.
    ``global``: errors at the events of a Poisson process of rate ``q`` per
    unit physical time; each event applies a uniformly random ``L``-qubit
    Pauli (identity included), i.e. the full depolarizing channel.
    """

    mode: str = NONE
    p_dep: float = 0.0
    q: float = 0.0

    def __post_init__(self):
        if self.mode not in (NONE, PER_GATE, GLOBAL):
            raise ValueError(f"unknown noise mode {self.mode!r}")
        if not 0.0 <= self.p_dep <= 1.0:
            raise ValueError("p_dep must be a probability")
        if self.q < 0:
            raise ValueError("q must be non-negative")

    @classmethod
    def per_gate(cls, p_dep: float) -> NoiseSpec:
        return cls(PER_GATE, p_dep=p_dep)

    @classmethod
    def global_depolarizing(cls, q: float) -> NoiseSpec:
        return cls(GLOBAL, q=q)

    @property
    def is_noiseless(self) -> bool:
        return (
            self.mode == NONE
            or (self.mode == PER_GATE and self.p_dep == 0)
            or (self.mode == GLOBAL and self.q == 0)
        )


def ladder_pairs(x: int, z: int) -> list[tuple[int, int]]:
    """Qubit pairs of the CNOT ladder for a Pauli gadget on the support of ``x|z``."""
    s = x | z
    support = [q for q in range(s.bit_length()) if s >> q & 1]
    return list(zip(support[:-1], support[1:]))


def _pair_pauli(code: int, qa: int, qb: int) -> tuple[int, int]:
    """Masks of two-qubit Pauli number ``code`` in 1..15 on qubits ``qa, qb``."""
    xa, za, xb, zb = code & 1, code >> 1 & 1, code >> 2 & 1, code >> 3 & 1
    return (xa << qa) | (xb << qb), (za << qa) | (zb << qb)


def sample_gate_errors(
    pairs: list[tuple[int, int]], p_dep: float, rng: np.random.Generator
) -> list[tuple[int, int]]:
    """Pauli errors (as masks) for one pass over ``pairs``."""
    if p_dep == 0 or not pairs:
        return []
    hits = np.flatnonzero(rng.random(len(pairs)) < p_dep)
    out = []
    for h in hits:
        code = int(rng.integers(1, 16))
        out.append(_pair_pauli(code, *pairs[h]))
    return out


def sample_global_errors(
    n_qubits: int, q: float, duration: float, rng: np.random.Generator
) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """Poisson error times on ``[0, duration)`` and a uniform ``L``-qubit Pauli for each."""
    n = rng.poisson(q * duration) if q > 0 and duration > 0 else 0
    times = np.sort(rng.uniform(0.0, duration, size=n))
    dim = 1 << n_qubits
    paulis = [(int(rng.integers(dim)), int(rng.integers(dim))) for _ in range(n)]
    return times, paulis


def error_tape(errors: list[tuple[int, int]]) -> Tape:
    if not errors:
        return Tape.empty()
    x = np.array([e[0] for e in errors], dtype=np.int64)
    z = np.array([e[1] for e in errors], dtype=np.int64)
    k = pauli_phase_exponent(x, z)
    return Tape(x, z, k, np.full(len(errors), math.pi / 2), np.full(len(errors), NO_CONTROL))


def inject_noise(
    state: StateVector,
    noise: NoiseSpec,
    rng: np.random.Generator,
    pair: tuple[int, int] | None = None,
    duration: float = 0.0,
) -> StateVector:
    """One trajectory step of the noise channel on the system register.

    With ``per_gate`` noise, ``pair`` names the gate's qubits. With ``global``
    noise, errors are drawn over a clock interval of length ``duration``.
    """
    if noise.is_noiseless:
        return state.copy()
    if noise.mode == PER_GATE:
        if pair is None:
            raise ValueError("per-gate noise needs the gate's qubit pair")
        errors = sample_gate_errors([pair], noise.p_dep, rng)
    else:
        _, errors = sample_global_errors(state.n_qubits, noise.q, duration, rng)
    out = state
    for x, z in errors:
        out = apply_pauli(out, PauliString(state.n_qubits, x, z))
    return out if errors else state.copy()

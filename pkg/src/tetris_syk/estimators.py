"""Echo-verification observables, shot estimators and gate-angle extrapolation."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .statevector import Shots


class DomainError(ValueError):
    """Inputs outside the domain of an extrapolation formula."""


class EchoObservable(str, enum.Enum):
    """Diagonal system observables measured alongside ``X`` on the ancilla."""

    IDENTITY = "I"
    PROJECT_ZERO = "P0"
    PROJECT_ZERO_MIT = "P0mit"

    def diagonal(self, n_qubits: int) -> np.ndarray:
        s = np.arange(1 << n_qubits, dtype=np.int64)
        if self is EchoObservable.IDENTITY:
            return np.ones(len(s))
        if self is EchoObservable.PROJECT_ZERO:
            return (s == 0).astype(float)
        return (np.bitwise_count(s) <= 1).astype(float)

    def per_shot(self, ancilla: np.ndarray, system: np.ndarray) -> np.ndarray:
        """``(-1)**ancilla * O(system)`` for each shot."""
        ancilla = np.asarray(ancilla)
        system = np.asarray(system, dtype=np.int64)
        sign = 1.0 - 2.0 * ancilla
        if self is EchoObservable.IDENTITY:
            return sign
        if self is EchoObservable.PROJECT_ZERO:
            return sign * (system == 0)
        return sign * (np.bitwise_count(system) <= 1)


OBSERVABLES = tuple(EchoObservable)


def local_z_diagonal(n_qubits: int) -> np.ndarray:
    """Diagonal of ``(1/L) sum_j Z_j``."""
    s = np.arange(1 << n_qubits, dtype=np.int64)
    return (n_qubits - 2.0 * np.bitwise_count(s)) / n_qubits


def local_z_per_shot(ancilla: np.ndarray, system: np.ndarray, n_qubits: int) -> np.ndarray:
    system = np.asarray(system, dtype=np.int64)
    return (1.0 - 2.0 * np.asarray(ancilla)) * (n_qubits - 2.0 * np.bitwise_count(system)) / n_qubits


@dataclass
class EstimateRecord:
    """One estimated point.

    ``mean`` is the rescaled estimate, ``stderr`` its standard error over
    circuit-level means (``nan`` when fewer than two circuits).
    """

    observable: str
    mean: float
    stderr: float
    circuits: int
    shots_per_circuit: int
    attenuation: float = float("nan")
    gate_angle: float = float("nan")
    alpha: float = float("nan")
    time: float = float("nan")
    seeds: dict = field(default_factory=dict)

    @property
    def stderr_defined(self) -> bool:
        return math.isfinite(self.stderr)

    def as_row(self) -> dict:
        row = asdict(self)
        row.update({f"seed_{k}": v for k, v in row.pop("seeds").items()})
        return row


def estimate_from_values(
    circuit_means: Sequence[float],
    lam: float | Sequence[float] = 1.0,
    observable: str = "",
    shots_per_circuit: int = 1,
    **meta,
) -> EstimateRecord:
    """Rescale per-circuit means by ``1/lambda`` and average over circuits."""
    vals = np.asarray(circuit_means, dtype=float)
    if vals.size == 0:
        raise ValueError("no circuits to estimate from")
    lam_arr = np.broadcast_to(np.asarray(lam, dtype=float), vals.shape)
    scaled = vals / lam_arr
    n = len(scaled)
    stderr = float(scaled.std(ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
    lam_rep = float(lam_arr[0]) if np.all(lam_arr == lam_arr[0]) else float(np.mean(lam_arr))
    return EstimateRecord(
        observable=observable,
        mean=float(scaled.mean()),
        stderr=stderr,
        circuits=n,
        shots_per_circuit=shots_per_circuit,
        attenuation=lam_rep,
        **meta,
    )


def estimate(
    shots_by_circuit: Sequence[Shots],
    observable: EchoObservable,
    lam: float | Sequence[float] = 1.0,
    **meta,
) -> EstimateRecord:
    """``lambda^-1 <X (x) O>`` from shots grouped by circuit.

    Circuits are the independent unit: each circuit's shots are averaged
    first, and the standard error comes from the spread of those means.
    """
    if len(shots_by_circuit) == 0:
        raise ValueError("no circuits to estimate from")
    means = [observable.per_shot(s.ancilla, s.system).mean() for s in shots_by_circuit]
    spc = len(shots_by_circuit[0])
    return estimate_from_values(means, lam, observable=observable.value, shots_per_circuit=spc, **meta)


def lgae_linear(y0: float, s0: float, ya: float, sa: float, alpha: float) -> tuple[float, float]:
    """Linear extrapolation in gate count from angles ``tau0`` and ``alpha tau0``."""
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    y = (y0 - alpha * ya) / (1 - alpha)
    s = math.sqrt(s0**2 + alpha**2 * sa**2) / (1 - alpha)
    return y, s


def lgae_exponential(y0: float, s0: float, ya: float, sa: float, alpha: float) -> tuple[float, float]:
    """Exponential extrapolation; needs positive ``y0, ya``."""
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if y0 <= 0 or ya <= 0:
        raise DomainError(f"exponential extrapolation needs positive inputs, got {y0}, {ya}")
    y = math.exp((math.log(y0) - alpha * math.log(ya)) / (1 - alpha))
    s = y / (1 - alpha) * math.sqrt(alpha**2 * sa**2 / ya**2 + s0**2 / y0**2)
    return y, s


def lgae_low_confidence(y: float, s: float, threshold: float = 1.0) -> bool:
    """Flag extrapolations whose relative error exceeds ``threshold``."""
    return not math.isfinite(s) or s > threshold * abs(y)


def optimal_shot_split(s0: float, sa: float, alpha: float, total_shots: float = 1.0) -> tuple[float, float]:
    """Shot fraction ``x`` for the shallow circuits and the resulting minimal sigma.

    Per-shot spreads ``s0, sa`` mean ``sigma0^2 = s0^2 / (x T)`` and
    ``sigma_a^2 = sa^2 / ((1-x) T)`` for ``T = total_shots``. With ``T = 1``
    the minimum is ``(s0 + alpha sa) / (1 - alpha)``.
    """
    if s0 <= 0 or sa <= 0:
        raise ValueError("spreads must be positive")
    x = s0 / (s0 + alpha * sa)
    sigma = (s0 + alpha * sa) / (1 - alpha) / math.sqrt(total_shots)
    return x, sigma


def lgae_sigma_for_split(x: float, s0: float, sa: float, alpha: float, total_shots: float = 1.0) -> float:
    return math.sqrt(s0**2 / x + alpha**2 * sa**2 / (1 - x)) / (1 - alpha) / math.sqrt(total_shots)

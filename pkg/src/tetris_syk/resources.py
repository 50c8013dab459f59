"""Closed-form order-of-magnitude resource estimates for OTOC runs at scale.

Nothing here builds circuits. With a ternary-tree encoding, each fermion
operator maps to a Pauli string of weight ``log_3(2L)``. One evolution
``e^{+-iHt}`` then costs about ``t^2 mu^2 log_3(2L) ~ 2 k (Jt)^2 L^2 log_3(2L)``
two-qubit gates, and an OTOC needs four of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

LABEL = "order-of-magnitude estimate"
EVOLUTIONS_PER_OTOC = 4


@dataclass(frozen=True)
class ResourceQuery:
    """Inputs of the estimate.

    Attributes:
        n_qubits: ``L``; the model has ``2L`` Majoranas.
        sparsity: ``k``.
        jt: Dimensionless time. ``None`` selects the Lyapunov preset ``Jt = ln(2L)``.
        depth_time: Seconds per unit of circuit depth.
        parallel: Divide the runtime by ``floor(L / log_3 L)``.
    """

    n_qubits: int
    sparsity: float = 2.3
    jt: float | None = None
    depth_time: float = 0.030
    parallel: bool = False

    def __post_init__(self):
        if self.n_qubits < 2:
            raise ValueError("n_qubits must be at least 2")
        if self.sparsity < 0 or self.depth_time < 0 or (self.jt is not None and self.jt < 0):
            raise ValueError("sparsity, jt and depth_time must be non-negative")

    @property
    def time(self) -> float:
        return math.log(2 * self.n_qubits) if self.jt is None else self.jt

    @property
    def parallel_factor(self) -> int:
        return parallel_factor(self.n_qubits)


def log3(x: float) -> float:
    return math.log(x) / math.log(3)


def parallel_factor(n_qubits: int) -> int:
    """``floor(L / log_3 L)``, at least 1."""
    return max(1, math.floor(n_qubits / log3(n_qubits)))


def evolution_tq_count(query: ResourceQuery) -> float:
    """``2 k (Jt)^2 L^2 log_3(2L)`` for a single evolution."""
    L = query.n_qubits
    return 2 * query.sparsity * query.time**2 * L**2 * log3(2 * L)


def otoc_tq_count(query: ResourceQuery) -> int:
    """Four evolutions; with the Lyapunov preset this is ``8 k (L ln 2L)^2 log_3(2L)``."""
    return round(EVOLUTIONS_PER_OTOC * evolution_tq_count(query))


def runtime_estimate(query: ResourceQuery, tq_count: float) -> float:
    """Seconds: one depth unit per gate, divided by the parallel factor if enabled."""
    serial = tq_count * query.depth_time
    return serial / query.parallel_factor if query.parallel else serial


def round_sig(x: float, digits: int = 1) -> float:
    """Round to ``digits`` significant figures."""
    if x == 0:
        return 0.0
    return round(x, digits - 1 - math.floor(math.log10(abs(x))))


def resource_table(sizes=(50, 100), sparsity: float = 2.3, depth_time: float = 0.030) -> list[dict]:
    rows = []
    for L in sizes:
        q = ResourceQuery(L, sparsity, None, depth_time)
        n = otoc_tq_count(q)
        rows.append(
            {
                "n_qubits": L,
                "sparsity": sparsity,
                "jt": q.time,
                "tq_count": n,
                "serial_hours": runtime_estimate(q, n) / 3600,
                "parallel_factor": q.parallel_factor,
                "parallel_hours": runtime_estimate(ResourceQuery(L, sparsity, None, depth_time, True), n) / 3600,
                "label": LABEL,
            }
        )
    return rows

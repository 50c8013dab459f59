"""Signed Pauli strings in symplectic (x-mask, z-mask) form.

A string over ``n`` qubits is stored as two integer bit masks plus a phase
exponent ``k`` so that the operator is

    i**k * prod_q  sigma_q,   sigma_q = I, X, Y, Z

with qubit ``q`` carrying X iff only bit ``q`` of ``x`` is set, Z iff only bit
``q`` of ``z`` is set, and Y iff both are set. Internally ``Y = i X Z`` is
used, which gives the ``|x & z|`` correction in the product rule below.

Qubit ``q`` corresponds to bit ``q`` of a computational-basis index, so qubit 0
is the least significant bit. Text labels list qubit 0 first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 64

_PHASE_LABELS = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_LABEL_PHASES = {"+": 0, "": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class DimensionError(ValueError):
    """Raised when two Pauli strings live on different qubit counts."""


def _popcount(v: int) -> int:
    return int(v).bit_count()


@dataclass(frozen=True)
class PauliString:
    """Immutable Pauli operator ``i**phase * P`` on ``n_qubits`` qubits."""

    n_qubits: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if not 0 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [0, {MAX_QUBITS}], got {self.n_qubits}")
        full = (1 << self.n_qubits) - 1
        if self.x & ~full or self.z & ~full or self.x < 0 or self.z < 0:
            raise ValueError("mask has bits outside the qubit range")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n_qubits: int) -> PauliString:
        return cls(n_qubits)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, kind: str) -> PauliString:
        """One-qubit Pauli ``kind`` in {"X", "Y", "Z"} acting on ``qubit``."""
        bit = 1 << qubit
        x = bit if kind in ("X", "Y") else 0
        z = bit if kind in ("Y", "Z") else 0
        if kind not in ("X", "Y", "Z", "I"):
            raise ValueError(f"unknown Pauli {kind!r}")
        return cls(n_qubits, x, z)

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        """Parse labels such as ``"+i XZIY"`` or ``"-ZZ"`` (qubit 0 first)."""
        label = label.strip()
        body = label.lstrip("+-i ")
        sign = label[: len(label) - len(body)].replace(" ", "")
        if sign not in _LABEL_PHASES:
            raise ValueError(f"cannot parse phase prefix {sign!r}")
        x = z = 0
        for q, ch in enumerate(body):
            if ch not in "IXYZ":
                raise ValueError(f"bad Pauli letter {ch!r} in {label!r}")
            if ch in "XY":
                x |= 1 << q
            if ch in "YZ":
                z |= 1 << q
        return cls(len(body), x, z, _LABEL_PHASES[sign])

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def support(self) -> list[int]:
        s = self.x | self.z
        return [q for q in range(self.n_qubits) if s >> q & 1]

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian strings."""
        if not self.is_hermitian:
            raise ValueError(f"{self.label()} is not Hermitian")
        return 1 - self.phase

    def unsigned(self) -> PauliString:
        return PauliString(self.n_qubits, self.x, self.z, 0)

    def letters(self) -> str:
        out = []
        for q in range(self.n_qubits):
            xb, zb = self.x >> q & 1, self.z >> q & 1
            out.append("IZXY"[xb * 2 + zb])
        return "".join(out)

    def label(self) -> str:
        return f"{_PHASE_LABELS[self.phase]} {self.letters()}"

    def __str__(self) -> str:
        return self.label()

    def _check(self, other: PauliString):
        if self.n_qubits != other.n_qubits:
            raise DimensionError(
                f"qubit counts differ: {self.n_qubits} vs {other.n_qubits}"
            )

    def __mul__(self, other: PauliString) -> PauliString:
        self._check(other)
        x, z = self.x ^ other.x, self.z ^ other.z
        # i^(p1 + p2 + |x1z1| + |x2z2| + 2|z1x2| - |xz|)
        k = (
            self.phase
            + other.phase
            + _popcount(self.x & self.z)
            + _popcount(other.x & other.z)
            + 2 * _popcount(self.z & other.x)
            - _popcount(x & z)
        )
        return PauliString(self.n_qubits, x, z, k)

    def commutes(self, other: PauliString) -> bool:
        self._check(other)
        return (_popcount(self.x & other.z) + _popcount(self.z & other.x)) % 2 == 0

    def to_matrix(self) -> np.ndarray:
        """Dense ``2**n x 2**n`` matrix (qubit 0 is the least significant bit)."""
        m = np.ones((1, 1), dtype=complex)
        for ch in reversed(self.letters()):
            m = np.kron(m, _SINGLE[ch])
        return (1j**self.phase) * m

    def apply_to_basis(self, index: int) -> tuple[complex, int]:
        """Return ``(amp, j)`` such that ``P|index> = amp |j>``."""
        k = self.phase + _popcount(self.x & self.z) + 2 * _popcount(index & self.z)
        return 1j ** (k % 4), index ^ self.x


def multiply(a: PauliString, b: PauliString) -> PauliString:
    return a * b


def commutes(a: PauliString, b: PauliString) -> bool:
    return a.commutes(b)


def parity_string(n_qubits: int) -> PauliString:
    """``Z`` on every qubit, the fermion-parity operator under Jordan-Wigner."""
    return PauliString(n_qubits, 0, (1 << n_qubits) - 1)

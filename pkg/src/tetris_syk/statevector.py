"""Statevector engine for one ancilla plus ``L`` system qubits.

Amplitudes are indexed ``a * 2**L + s`` with ``a`` the ancilla bit (the
highest qubit) and ``s`` the system basis index, system qubit ``q`` being bit
``q`` of ``s``. Internally states are handled as ``(2, 2**L)`` arrays, one row
per ancilla branch, and many circuits are evolved at once as ``(n, 2, 2**L)``
stacks.

Every evolution operator here uses the ``e^{+iHt}`` sign convention.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .pauli import PauliString
from .syk import SparseSykInstance

MAX_EXACT_QUBITS = 16
DENSE_QUBITS = 10
KRYLOV_TOL = 1e-12

_IPOW = np.array([1, 1j, -1, -1j], dtype=complex)

# control codes for rotations
NO_CONTROL = -1
ANCILLA0 = 0
ANCILLA1 = 1


class CapabilityError(RuntimeError):
    """Requested system is too large for the exact paths."""


class ContractError(ValueError):
    """An operation was called outside its contract."""


@functools.lru_cache(maxsize=32)
def _arange(dim: int) -> np.ndarray:
    a = np.arange(dim, dtype=np.int64)
    a.setflags(write=False)
    return a


def parity_sign(v: np.ndarray) -> np.ndarray:
    """``(-1)**popcount(v)`` as floats."""
    return 1.0 - 2.0 * (np.bitwise_count(v) & 1)


def pauli_phase_exponent(x, z, phase=0):
    """Exponent ``k`` with ``P|s> = i**k (-1)**|s&z| |s^x>``."""
    return (np.asarray(phase, dtype=np.int64) + np.bitwise_count(np.asarray(x) & np.asarray(z)).astype(np.int64)) % 4


def apply_pauli_vec(vec: np.ndarray, x: int, z: int, k: int) -> np.ndarray:
    """``P @ vec`` for a vector over the register whose masks are ``x, z``."""
    ar = _arange(vec.shape[-1])
    idx = ar ^ x
    sign = parity_sign(idx & z)
    return _IPOW[k % 4] * sign * vec[..., idx]


@dataclass
class StateVector:
    """Joint ancilla + system state.

    Attributes:
        n_qubits: Number of system qubits ``L``.
        amplitudes: Complex array of length ``2**(L+1)``.
    """

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2 << self.n_qubits,):
            raise ValueError("amplitude array has the wrong length")

    @classmethod
    def initial(cls, n_qubits: int, ancilla: str = "+") -> StateVector:
        """``|ancilla> (x) |0...0>`` with ancilla one of ``"0"``, ``"1"``, ``"+"``, ``"-"``."""
        amps = np.zeros(2 << n_qubits, dtype=complex)
        a0, a1 = {"0": (1, 0), "1": (0, 1), "+": (1, 1), "-": (1, -1)}[ancilla]
        norm = math.sqrt(abs(a0) ** 2 + abs(a1) ** 2)
        amps[0] = a0 / norm
        amps[1 << n_qubits] = a1 / norm
        return cls(n_qubits, amps)

    @classmethod
    def from_branches(cls, branches: np.ndarray) -> StateVector:
        branches = np.asarray(branches)
        n = int(branches.shape[-1]).bit_length() - 1
        return cls(n, branches.reshape(-1).copy())

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    @property
    def branches(self) -> np.ndarray:
        """View of shape ``(2, 2**L)``: row ``a`` is the ancilla-``a`` branch."""
        return self.amplitudes.reshape(2, self.dim)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> StateVector:
        return StateVector(self.n_qubits, self.amplitudes.copy())


def apply_pauli_rotation(
    state: StateVector, string: PauliString, angle: float, control: int | None = None
) -> StateVector:
    """Return ``e^{i angle P}`` applied to the system register.

    ``control`` restricts the rotation to the ancilla-0 or ancilla-1 branch;
    ``None`` applies it to both.
    """
    if not string.is_hermitian:
        raise ContractError(f"rotation generator {string} is not Hermitian")
    if string.n_qubits != state.n_qubits:
        raise ContractError("string and state have different qubit counts")
    out = state.copy()
    br = out.branches
    k = int(pauli_phase_exponent(string.x, string.z, string.phase))
    rows = [0, 1] if control is None or control == NO_CONTROL else [control]
    c, s = math.cos(angle), math.sin(angle)
    for a in rows:
        br[a] = c * br[a] + 1j * s * apply_pauli_vec(br[a], string.x, string.z, k)
    return out


def apply_pauli(state: StateVector, string: PauliString) -> StateVector:
    """Apply a (not necessarily Hermitian) Pauli string to the system register."""
    out = state.copy()
    br = out.branches
    k = int(pauli_phase_exponent(string.x, string.z, string.phase))
    br[:] = apply_pauli_vec(br, string.x, string.z, k)
    return out


# ---------------------------------------------------------------------------
# Batched tape execution
# ---------------------------------------------------------------------------


@dataclass
class Tape:
    """Flat op list for one circuit: rotations ``e^{i angle P}`` with a control.

    A Pauli error ``E`` is stored as the uncontrolled rotation by ``pi/2``
    about ``E``, which is ``iE``; the global phase is harmless.
    """

    x: np.ndarray
    z: np.ndarray
    k: np.ndarray
    angle: np.ndarray
    control: np.ndarray

    def __len__(self) -> int:
        return len(self.x)

    @classmethod
    def empty(cls) -> Tape:
        z = np.zeros(0, dtype=np.int64)
        return cls(z, z, z, np.zeros(0), z)

    @classmethod
    def concat(cls, tapes: list[Tape]) -> Tape:
        if not tapes:
            return cls.empty()
        return cls(*(np.concatenate([getattr(t, f) for t in tapes]) for f in ("x", "z", "k", "angle", "control")))


def run_tapes(states: np.ndarray, tapes: list[Tape], chunk_elems: int = 1 << 20) -> np.ndarray:
    """Evolve a stack of states ``(n, 2, D)`` in place, circuit ``i`` by ``tapes[i]``."""
    n, _, dim = states.shape
    if n == 0:
        return states
    rows_per_chunk = max(1, chunk_elems // (2 * dim))
    order = np.argsort([-len(t) for t in tapes], kind="stable")
    for lo in range(0, n, rows_per_chunk):
        sel = order[lo : lo + rows_per_chunk]
        block = states[sel]
        _run_block(block, [tapes[i] for i in sel])
        states[sel] = block
    return states


def _run_block(block: np.ndarray, tapes: list[Tape]):
    n, _, dim = block.shape
    lengths = np.array([len(t) for t in tapes])
    T = int(lengths.max(initial=0))
    if T == 0:
        return
    X = np.zeros((n, T), dtype=np.int64)
    Z = np.zeros((n, T), dtype=np.int64)
    K = np.zeros((n, T), dtype=np.int64)
    A = np.zeros((n, T))
    C = np.full((n, T), NO_CONTROL, dtype=np.int64)
    for i, t in enumerate(tapes):
        m = len(t)
        X[i, :m], Z[i, :m], K[i, :m], A[i, :m], C[i, :m] = t.x, t.z, t.k, t.angle, t.control
    ar = _arange(dim)
    # tapes arrive sorted by length (descending), so active rows form a prefix
    active = np.searchsorted(-lengths, -np.arange(T), side="right")
    for step in range(T):
        m = int(active[step])
        S = block[:m]
        x, z = X[:m, step], Z[:m, step]
        idx = ar[None, :] ^ x[:, None]
        sign = parity_sign(idx & z[:, None])
        ph = _IPOW[K[:m, step]][:, None] * sign
        PS = np.take_along_axis(S, np.broadcast_to(idx[:, None, :], S.shape), axis=2)
        PS *= ph[:, None, :]
        c, s = np.cos(A[:m, step]), np.sin(A[:m, step])
        ctrl = C[:m, step]
        cb = np.ones((m, 2))
        sb = np.zeros((m, 2))
        for a in (0, 1):
            on = (ctrl == NO_CONTROL) | (ctrl == a)
            cb[on, a] = c[on]
            sb[on, a] = s[on]
        S *= cb[:, :, None]
        S += (1j * sb)[:, :, None] * PS


def run_tape(state: StateVector, tape: Tape) -> StateVector:
    out = state.copy()
    stack = out.branches[None].copy()
    run_tapes(stack, [tape])
    out.amplitudes = stack[0].reshape(-1)
    return out


# ---------------------------------------------------------------------------
# Exact evolution oracle
# ---------------------------------------------------------------------------


def _check_size(instance: SparseSykInstance):
    if instance.n_qubits > MAX_EXACT_QUBITS:
        raise CapabilityError(
            f"exact evolution supports L <= {MAX_EXACT_QUBITS}, got L={instance.n_qubits}"
        )


@functools.lru_cache(maxsize=64)
def spectrum(instance: SparseSykInstance) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of ``H`` (dense path, ``L <= 12``)."""
    if instance.n_qubits > 12:
        raise CapabilityError("dense spectrum only for L <= 12")
    return np.linalg.eigh(instance.dense_matrix())


@functools.lru_cache(maxsize=16)
def sparse_hamiltonian(instance: SparseSykInstance) -> sp.csr_matrix:
    dim = 1 << instance.n_qubits
    ar = _arange(dim)
    rows, cols, data = [], [], []
    for c, s in zip(instance.coefficients, instance.strings):
        k = int(pauli_phase_exponent(s.x, s.z, s.phase))
        # (P psi)[r] = i^k (-1)^{|(r^x)&z|} psi[r^x]
        col = ar ^ s.x
        sign = parity_sign(col & s.z)
        rows.append(ar)
        cols.append(col)
        data.append(c * _IPOW[k] * sign)
    return sp.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )


def hamiltonian_matvec(instance: SparseSykInstance, vec: np.ndarray) -> np.ndarray:
    out = np.zeros_like(vec, dtype=complex)
    for c, s in zip(instance.coefficients, instance.strings):
        k = int(pauli_phase_exponent(s.x, s.z, s.phase))
        out += c * apply_pauli_vec(vec, s.x, s.z, k)
    return out


def lanczos_expm(matvec, vec: np.ndarray, t: float, tol: float = KRYLOV_TOL, max_dim: int = 30) -> np.ndarray:
    """``e^{iAt} v`` for Hermitian ``A`` by adaptive Lanczos time stepping.

    Each step builds a Krylov basis of at most ``max_dim`` vectors and shrinks
    the step until the a-posteriori error estimate is below ``tol``.
    """
    v = np.asarray(vec, dtype=complex).copy()
    if t == 0 or not np.any(v):
        return v
    sgn = 1.0 if t > 0 else -1.0
    remaining = abs(t)
    h = remaining
    while remaining > 1e-15:
        nrm = np.linalg.norm(v)
        basis = [v / nrm]
        alphas, betas = [], []
        resid = 0.0
        for j in range(max_dim):
            w = matvec(basis[j])
            a = np.vdot(basis[j], w).real
            alphas.append(a)
            w = w - a * basis[j]
            if j > 0:
                w -= betas[-1] * basis[j - 1]
            for u in basis:  # full reorthogonalization
                w -= np.vdot(u, w) * u
            resid = np.linalg.norm(w)
            if resid < 1e-13 or j == max_dim - 1:
                break
            betas.append(resid)
            basis.append(w / resid)
        m = len(alphas)
        tri = np.diag(alphas) + np.diag(betas[: m - 1], 1) + np.diag(betas[: m - 1], -1)
        evals, evecs = np.linalg.eigh(tri)
        exact_space = resid < 1e-13
        h = min(h, remaining)
        while True:
            coef = evecs @ (np.exp(1j * sgn * h * evals) * evecs[0].conj())
            err = 0.0 if exact_space else resid * abs(coef[-1])
            if err <= tol or h < 1e-12:
                break
            h *= 0.5
        v = nrm * (coef @ np.array(basis))
        remaining -= h
        h *= 2.0
    return v


def exact_evolve(
    instance: SparseSykInstance, t: float, state_in: np.ndarray, method: str = "auto"
) -> np.ndarray:
    """``e^{iHt} |psi>`` for a system-register vector (or a stack of them, last axis)."""
    _check_size(instance)
    psi = np.asarray(state_in, dtype=complex)
    if t == 0:
        return psi.copy()
    if method == "auto":
        method = "dense" if instance.n_qubits <= DENSE_QUBITS else "krylov"
    if method == "dense":
        evals, evecs = spectrum(instance)
        return ((psi @ evecs.conj()) * np.exp(1j * evals * t)) @ evecs.T
    if method == "krylov":
        H = sparse_hamiltonian(instance)
        if psi.ndim == 1:
            return lanczos_expm(H.dot, psi, t)
        return np.array([lanczos_expm(H.dot, p, t) for p in psi.reshape(-1, psi.shape[-1])]).reshape(psi.shape)
    raise ValueError(f"unknown method {method!r}")


def zero_state(n_qubits: int) -> np.ndarray:
    v = np.zeros(1 << n_qubits, dtype=complex)
    v[0] = 1
    return v


def loschmidt_exact(instance: SparseSykInstance, t, method: str = "auto"):
    """``<0|e^{iHt}|0>``; ``t`` may be a scalar or an array."""
    _check_size(instance)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if method == "auto" and instance.n_qubits <= DENSE_QUBITS:
        evals, evecs = spectrum(instance)
        w = np.abs(evecs[0]) ** 2
        out = np.exp(1j * np.outer(ts, evals)) @ w
    else:
        out = np.array([exact_evolve(instance, ti, zero_state(instance.n_qubits), method)[0] for ti in ts])
    return out if np.ndim(t) else complex(out[0])


def evolved_zero_state(instance: SparseSykInstance, t: float) -> np.ndarray:
    return exact_evolve(instance, t, zero_state(instance.n_qubits))


class TraceEstimate(NamedTuple):
    value: complex
    stderr: float


def trace_evolution(
    instance: SparseSykInstance,
    t,
    method: str = "auto",
    n_probes: int = 64,
    rng: np.random.Generator | None = None,
):
    """``Tr[e^{iHt}] / 2**L``.

    The dense path (``L <= 12``) returns complex values; the stochastic path
    returns a :class:`TraceEstimate` (Hutchinson with random-phase probes).
    """
    if method == "auto":
        method = "dense" if instance.n_qubits <= 12 else "stochastic"
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if method == "dense":
        evals, _ = spectrum(instance)
        out = np.exp(1j * np.outer(ts, evals)).mean(axis=1)
        return out if np.ndim(t) else complex(out[0])
    if method != "stochastic":
        raise ValueError(f"unknown method {method!r}")
    _check_size(instance)
    rng = np.random.default_rng() if rng is None else rng
    dim = 1 << instance.n_qubits
    probes = np.exp(2j * np.pi * rng.random((n_probes, dim)))
    results = []
    for ti in ts:
        vals = np.array(
            [np.vdot(p, exact_evolve(instance, ti, p, method="krylov" if instance.n_qubits > DENSE_QUBITS else "dense")) / dim for p in probes]
        )
        results.append(TraceEstimate(complex(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_probes))))
    return results if np.ndim(t) else results[0]


# ---------------------------------------------------------------------------
# Measurement
# ---------------------------------------------------------------------------


class Shots(NamedTuple):
    """Shot records: ancilla X-basis bits and system Z-basis integers."""

    ancilla: np.ndarray
    system: np.ndarray

    def __len__(self):
        return len(self.ancilla)


def measurement_probabilities(branches: np.ndarray) -> np.ndarray:
    """Born probabilities after a Hadamard on the ancilla, shape ``(..., 2, D)``."""
    plus = (branches[..., 0, :] + branches[..., 1, :]) / math.sqrt(2)
    minus = (branches[..., 0, :] - branches[..., 1, :]) / math.sqrt(2)
    return np.stack([np.abs(plus) ** 2, np.abs(minus) ** 2], axis=-2)


def sample_shots(state: StateVector | np.ndarray, n_shots: int, rng: np.random.Generator) -> Shots:
    """Hadamard the ancilla, then draw ``n_shots`` Born samples of all bits."""
    br = state.branches if isinstance(state, StateVector) else np.asarray(state)
    dim = br.shape[-1]
    if n_shots == 0:
        return Shots(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))
    p = measurement_probabilities(br).reshape(-1)
    cdf = np.cumsum(p)
    cdf /= cdf[-1]
    draws = np.searchsorted(cdf, rng.random(n_shots), side="right")
    draws = np.minimum(draws, 2 * dim - 1)
    return Shots(draws // dim, draws % dim)


def x_expectation(branches: np.ndarray, diagonal: np.ndarray) -> np.ndarray:
    """Exact ``<X (x) O>`` for diagonal ``O`` over a stack ``(..., 2, D)``."""
    return 2 * np.real(np.sum(branches[..., 0, :].conj() * diagonal * branches[..., 1, :], axis=-1))

"""Dense and sparse SYK disorder realizations encoded as Pauli sums.

Majorana indices run over ``1..N``. Majorana ``m`` lives on qubit
``(m - 1) // 2`` (0-based); odd ``m`` is the X-type operator and even ``m`` the
Y-type one, each carrying a Jordan-Wigner tail of Z on all lower qubits::

    psi_{2j+1} = X_j Z_{j-1} ... Z_0
    psi_{2j+2} = Y_j Z_{j-1} ... Z_0

This is the usual ``psi_{2j}, psi_{2j+1}`` assignment shifted to a 1-based
Majorana label and a 0-based qubit label.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .pauli import PauliString, parity_string

ZERO_COUPLING_CUTOFF = 1e-15


class ParameterError(ValueError):
    """Invalid model parameters."""


@dataclass(frozen=True)
class SykParams:
    """Parameters of one SYK ensemble.

    Attributes:
        n_majorana: Number of Majorana fermions ``N`` (even, at least 4).
        coupling: Energy scale ``J``; all couplings are in these units.
        sparsity: Sparsity parameter ``k``; the keep probability is
            ``p = k N / C(N, 4)``.
        dense: Keep every quadruple (``p = 1``) and use the dense variance.
        seed: Disorder seed.
    """

    n_majorana: int
    coupling: float = 1.0
    sparsity: float = 2.3
    dense: bool = False
    seed: int = 0

    def __post_init__(self):
        n = self.n_majorana
        if n < 4 or n % 2:
            raise ParameterError(f"n_majorana must be even and >= 4, got {n}")
        if self.coupling <= 0:
            raise ParameterError("coupling must be positive")
        if not self.dense:
            if self.sparsity <= 0:
                raise ParameterError("sparsity must be positive")
            if self.probability > 1:
                raise ParameterError(
                    f"keep probability {self.probability:.3g} > 1 for N={n}, k={self.sparsity}"
                )

    @property
    def n_qubits(self) -> int:
        return self.n_majorana // 2

    @property
    def n_quadruples(self) -> int:
        return math.comb(self.n_majorana, 4)

    @property
    def probability(self) -> float:
        if self.dense:
            return 1.0
        return self.sparsity * self.n_majorana / self.n_quadruples

    @property
    def coupling_variance(self) -> float:
        """``3! J^2 / (p N^3)``; the dense model has ``p = 1``."""
        return 6.0 * self.coupling**2 / (self.probability * self.n_majorana**3)

    def with_seed(self, seed: int) -> SykParams:
        return SykParams(self.n_majorana, self.coupling, self.sparsity, self.dense, seed)


def majorana(m: int, n_qubits: int) -> PauliString:
    """Jordan-Wigner image of Majorana ``m`` (1-based)."""
    if not 1 <= m <= 2 * n_qubits:
        raise ParameterError(f"Majorana index {m} outside 1..{2 * n_qubits}")
    q = (m - 1) // 2
    tail = (1 << q) - 1
    bit = 1 << q
    if m % 2:
        return PauliString(n_qubits, bit, tail)
    return PauliString(n_qubits, bit, tail | bit)


def encode_majorana_quadruple(i: int, j: int, k: int, l: int, n_qubits: int) -> PauliString:
    """Pauli string of ``psi_i psi_j psi_k psi_l`` for ``i < j < k < l``.

    The product of four distinct Majoranas is Hermitian, so the returned string
    has phase 0 or 2 (a real sign).
    """
    if not (1 <= i < j < k < l <= 2 * n_qubits):
        raise ParameterError(f"need 1 <= i<j<k<l <= {2 * n_qubits}, got {(i, j, k, l)}")
    out = majorana(i, n_qubits) * majorana(j, n_qubits)
    out = out * majorana(k, n_qubits) * majorana(l, n_qubits)
    assert out.is_hermitian
    return out


@functools.lru_cache(maxsize=8)
def _all_quadruples(n: int) -> np.ndarray:
    arr = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(1, n + 1), 4)),
        dtype=np.int64,
    )
    arr = arr.reshape(-1, 4)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SparseSykInstance:
    """One disorder realization ``H = sum_n c_n P_n``.

    ``coefficients[n]`` is ``J_ijkl`` times the sign produced by the
    encoding, and ``strings[n]`` is the corresponding unsigned Pauli string.
    """

    params: SykParams
    quadruples: np.ndarray
    couplings: np.ndarray
    coefficients: np.ndarray
    strings: tuple[PauliString, ...]
    x_masks: np.ndarray = field(repr=False)
    z_masks: np.ndarray = field(repr=False)

    @property
    def n_qubits(self) -> int:
        return self.params.n_qubits

    @property
    def n_terms(self) -> int:
        return len(self.strings)

    @functools.cached_property
    def one_norm(self) -> float:
        return float(np.abs(self.coefficients).sum())

    @functools.cached_property
    def weights(self) -> np.ndarray:
        return np.array([s.weight for s in self.strings], dtype=np.int64)

    def dense_matrix(self) -> np.ndarray:
        if self.n_qubits > 12:
            raise ValueError("dense matrix only for L <= 12")
        dim = 1 << self.n_qubits
        h = np.zeros((dim, dim), dtype=complex)
        for c, s in zip(self.coefficients, self.strings):
            h += c * s.to_matrix()
        return h

    def to_json(self) -> str:
        doc = {
            "params": asdict(self.params),
            "quadruples": self.quadruples.tolist(),
            "couplings": [float(c).hex() for c in self.couplings],
            "one_norm": self.one_norm,
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> SparseSykInstance:
        doc = json.loads(text)
        params = SykParams(**doc["params"])
        quads = np.array(doc["quadruples"], dtype=np.int64).reshape(-1, 4)
        couplings = np.array([float.fromhex(c) for c in doc["couplings"]])
        return build_instance(params, quads, couplings)


def build_instance(
    params: SykParams, quadruples: np.ndarray, couplings: np.ndarray
) -> SparseSykInstance:
    """Encode given quadruples and couplings; tiny couplings are dropped."""
    quadruples = np.asarray(quadruples, dtype=np.int64).reshape(-1, 4)
    couplings = np.asarray(couplings, dtype=float)
    keep = np.abs(couplings) >= ZERO_COUPLING_CUTOFF * params.coupling
    quadruples, couplings = quadruples[keep], couplings[keep]
    nq = params.n_qubits
    merged: dict[tuple[int, int], float] = {}
    strings: dict[tuple[int, int], PauliString] = {}
    for quad, jc in zip(quadruples, couplings):
        s = encode_majorana_quadruple(*map(int, quad), n_qubits=nq)
        key = (s.x, s.z)
        # distinct quadruples never collide, so this is a pure safety net
        assert key not in merged, "distinct quadruples produced identical strings"
        merged[key] = merged.get(key, 0.0) + s.sign * float(jc)
        strings[key] = s.unsigned()
    keys = list(merged)
    coeffs = np.array([merged[k] for k in keys], dtype=float)
    strs = tuple(strings[k] for k in keys)
    quadruples.setflags(write=False)
    couplings.setflags(write=False)
    coeffs.setflags(write=False)
    return SparseSykInstance(
        params=params,
        quadruples=quadruples,
        couplings=couplings,
        coefficients=coeffs,
        strings=strs,
        x_masks=np.array([s.x for s in strs], dtype=np.int64),
        z_masks=np.array([s.z for s in strs], dtype=np.int64),
    )


def sample_instance(params: SykParams, rng: np.random.Generator | None = None) -> SparseSykInstance:
    """Draw one disorder realization.

    Every quadruple ``i<j<k<l`` is kept independently with probability ``p``
    and kept couplings are i.i.d. normal with variance ``3! J^2 / (p N^3)``.
    ``rng`` defaults to a generator seeded from ``params.seed``.
    """
    if rng is None:
        rng = np.random.default_rng(params.seed)
    allq = _all_quadruples(params.n_majorana)
    if params.dense:
        quads = allq
    else:
        quads = allq[rng.random(len(allq)) < params.probability]
    couplings = rng.normal(0.0, math.sqrt(params.coupling_variance), size=len(quads))
    return build_instance(params, quads.copy(), couplings)


def sample_ensemble(params: SykParams, size: int) -> list[SparseSykInstance]:
    """``size`` independent instances; member ``i`` uses stream ``(seed, i)``."""
    return [
        sample_instance(params, np.random.default_rng(np.random.SeedSequence(params.seed, spawn_key=(i,))))
        for i in range(size)
    ]


def one_norm(instance: SparseSykInstance) -> float:
    return instance.one_norm


def one_norm_scale(params: SykParams) -> float:
    """Closed-form disorder scale of the 1-norm, ``sqrt(6p) J / 24 * N! / (N^1.5 (N-4)!)``.

    This equals ``p C(N,4) sigma`` with ``sigma`` the coupling standard
    deviation; the true disorder mean carries an extra ``sqrt(2/pi)``
    (see :func:`expected_one_norm`).
    """
    n = params.n_majorana
    falling = math.perm(n, 4)
    return math.sqrt(6 * params.probability) * params.coupling / 24 * falling / n**1.5


def expected_one_norm(params: SykParams) -> float:
    """Exact disorder mean of ``sum |J_ijkl|`` for Gaussian couplings."""
    return math.sqrt(2 / math.pi) * one_norm_scale(params)


def commutes_with_parity(instance: SparseSykInstance) -> bool:
    par = parity_string(instance.n_qubits)
    return all(s.commutes(par) for s in instance.strings)

"""Analytic model of echo-verified estimates under global depolarizing noise.

Errors strike the system register at the events of a Poisson process of rate
``q``, and each one fully depolarizes it. Averaging over TETRIS circuits and
error histories gives

    <X (x) O> + i <Y (x) O> = lambda e^{-qt} g(t)
                             + lambda q e^{-qt} int_0^t h_O(t - s) F(s) ds,
    F(t) = g(t) + q int_0^t h(t - s) F(s) ds,

with ``g(t) = <0|e^{iHt}|0>``, ``h(t) = Tr[e^{iHt}] / 2^L`` and
``h_O = h`` for ``O = I`` or ``g / 2^L`` for ``O = |0><0|``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from .statevector import loschmidt_exact, trace_evolution
from .syk import SparseSykInstance

IDENTITY = "I"
PROJECT_ZERO = "P0"
SUPPORTED = (IDENTITY, PROJECT_ZERO)
DEEP_RATE_FACTOR = 3.0
GRID_RTOL = 1e-9


class ModelError(ValueError):
    """Invalid inputs to the noise model or the fit."""


@dataclass
class NoiseModelInputs:
    """Tabulated kernels on a uniform grid ``0 = t_0 < ... < t_n = t``."""

    times: np.ndarray
    g: np.ndarray
    h: np.ndarray
    q: float
    n_qubits: int
    attenuation: float = 1.0
    observable: str = PROJECT_ZERO

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.g = np.asarray(self.g, dtype=complex)
        self.h = np.asarray(self.h, dtype=complex)
        if self.times.ndim != 1 or len(self.times) < 2:
            raise ModelError("need a grid of at least two times")
        if not (len(self.g) == len(self.h) == len(self.times)):
            raise ModelError("g and h must be tabulated on the grid")
        if self.times[0] != 0.0:
            raise ModelError("grid must start at t = 0")
        steps = np.diff(self.times)
        if steps.min() <= 0 or np.ptp(steps) > GRID_RTOL * steps.mean():
            raise ModelError("grid must be uniform and increasing")
        if abs(self.g[0] - 1) > 1e-9 or abs(self.h[0] - 1) > 1e-9:
            raise ModelError("g(0) and h(0) must equal 1")
        if self.q < 0:
            raise ModelError("q must be non-negative")
        if self.observable not in SUPPORTED:
            raise ModelError(f"unsupported observable {self.observable!r}; expected one of {SUPPORTED}")

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    @property
    def h_observable(self) -> np.ndarray:
        """``Tr[O e^{iHs}] / 2^L`` on the grid."""
        if self.observable == IDENTITY:
            return self.h
        return self.g / (1 << self.n_qubits)


def _trapezoid_conv(a: np.ndarray, b: np.ndarray, step: float) -> np.ndarray:
    """``c_n = int_0^{t_n} a(t_n - s) b(s) ds`` by the trapezoidal rule, all ``n``."""
    n = len(a)
    full = np.convolve(a, b)[:n]
    out = full - 0.5 * (a * b[0] + a[0] * b)
    out[0] = 0.0
    return step * out


def solve_F(inputs: NoiseModelInputs) -> np.ndarray:
    """Trapezoidal marching for the Volterra equation of the second kind."""
    g, h, q, dt = inputs.g, inputs.h, inputs.q, inputs.step
    n = len(g)
    F = np.empty(n, dtype=complex)
    F[0] = g[0]
    if q == 0:
        return g.copy()
    denom = 1 - 0.5 * q * dt * h[0]
    hr = h[::-1]
    for i in range(1, n):
        # weights 1/2 at s=0, 1 inside; the s=t_i end is moved to the left side
        inner = hr[n - i : n - 1] @ F[1:i] if i > 1 else 0.0
        rhs = g[i] + q * dt * (0.5 * h[i] * F[0] + inner)
        F[i] = rhs / denom
    return F


def noisy_expectation(inputs: NoiseModelInputs, F: np.ndarray | None = None) -> complex:
    """``<X (x) O> + i <Y (x) O>`` at the final grid time."""
    if F is None:
        F = solve_F(inputs)
    if len(F) != len(inputs.times):
        raise ModelError("F must live on the inputs grid")
    q, t, lam = inputs.q, inputs.final_time, inputs.attenuation
    tail = _trapezoid_conv(inputs.h_observable, F, inputs.step)[-1]
    return complex(lam * math.exp(-q * t) * (inputs.g[-1] + q * tail))


def picard_terms(inputs: NoiseModelInputs, order: int = 2) -> list[complex]:
    """Terms ``n = 0..order`` of the expansion in powers of ``q`` (with ``lambda e^{-qt}``)."""
    lam_e = inputs.attenuation * math.exp(-inputs.q * inputs.final_time)
    dt = inputs.step
    terms = [complex(lam_e * inputs.g[-1])]
    chain = inputs.g
    for n in range(1, order + 1):
        if n > 1:
            chain = _trapezoid_conv(inputs.h, chain, dt)
        terms.append(complex(lam_e * inputs.q**n * _trapezoid_conv(inputs.h_observable, chain, dt)[-1]))
    return terms


def picard_expansion(inputs: NoiseModelInputs, order: int = 2) -> complex:
    return complex(sum(picard_terms(inputs, order)))


def second_order_quadrature(inputs: NoiseModelInputs) -> list[complex]:
    """The three terms of the order-``q^2`` formula by direct nested quadrature.

    Independent of :func:`picard_terms`: the double integral over
    ``0 < t_2 < t_1 < t`` is evaluated with explicit trapezoid weights.
    """
    g, h, ho = inputs.g, inputs.h, inputs.h_observable
    dt, n = inputs.step, len(inputs.times) - 1
    lam_e = inputs.attenuation * math.exp(-inputs.q * inputs.final_time)
    q = inputs.q

    def weights(m):
        w = np.ones(m + 1)
        w[0] = w[-1] = 0.5
        return w * dt if m > 0 else np.zeros(1)

    w_out = weights(n)
    first = sum(w_out[i] * g[i] * ho[n - i] for i in range(n + 1))
    second = 0.0
    for i in range(n + 1):
        wi = weights(i)
        inner = sum(wi[j] * g[j] * h[i - j] for j in range(i + 1))
        second += w_out[i] * inner * ho[n - i]
    return [complex(lam_e * g[n]), complex(lam_e * q * first), complex(lam_e * q**2 * second)]


# ---------------------------------------------------------------------------
# Kernels from SYK instances
# ---------------------------------------------------------------------------


def tabulate_kernels(pool: Sequence[SparseSykInstance], t: float, n_steps: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pool-averaged ``g`` and ``h`` on ``linspace(0, t, n_steps + 1)``."""
    times = np.linspace(0.0, t, n_steps + 1)
    g = np.mean([loschmidt_exact(inst, times) for inst in pool], axis=0)
    h = np.mean([trace_evolution(inst, times, method="dense") for inst in pool], axis=0)
    return times, g, h


class EnsembleModel:
    """Model curves for a fixed disorder pool, with cached kernel tables."""

    def __init__(self, pool: Sequence[SparseSykInstance], n_steps: int = 400):
        self.pool = list(pool)
        self.n_steps = n_steps
        self.n_qubits = self.pool[0].n_qubits

    @functools.lru_cache(maxsize=256)
    def kernels(self, t: float):
        return tabulate_kernels(self.pool, t, self.n_steps)

    def inputs(self, t: float, q: float, observable: str, attenuation: float = 1.0) -> NoiseModelInputs:
        times, g, h = self.kernels(float(t))
        return NoiseModelInputs(times, g, h, q, self.n_qubits, attenuation, observable)

    def rescaled(self, t: float, q: float, observable: str) -> float:
        """``lambda^{-1} <X (x) O>``, which does not depend on ``lambda``."""
        return noisy_expectation(self.inputs(t, q, observable)).real

    def noiseless(self, t: float) -> float:
        return float(self.kernels(float(t))[1][-1].real)


# ---------------------------------------------------------------------------
# Fit of the error-rate slope
# ---------------------------------------------------------------------------


@dataclass
class BetaFit:
    """Least-squares fit of ``q = beta t`` for shallow circuits.

    ``residual`` is the weighted sum of squared residuals and ``covariance``
    the ``1x1`` inverse of ``J^T W J`` at the optimum.
    """

    beta: float
    covariance: np.ndarray
    residual: float
    n_points: int
    model: EnsembleModel = field(repr=False)

    @property
    def stderr(self) -> float:
        return float(math.sqrt(self.covariance[0, 0]))

    def rate(self, t: float, deep: bool = False) -> float:
        return (DEEP_RATE_FACTOR if deep else 1.0) * self.beta * t

    def predict(self, t: float, observable: str, deep: bool = False, eps: float = 1e-6) -> tuple[float, float]:
        """Rescaled prediction and its delta-method standard error."""
        k = DEEP_RATE_FACTOR if deep else 1.0
        f = lambda b: self.model.rescaled(t, k * b * t, observable)
        y = f(self.beta)
        d = (f(self.beta + eps) - f(max(self.beta - eps, 0.0))) / (self.beta + eps - max(self.beta - eps, 0.0))
        return y, abs(d) * self.stderr


def fit_beta(
    times: Sequence[float],
    values: Sequence[float],
    sigmas: Sequence[float],
    model: EnsembleModel,
    observable: str = PROJECT_ZERO,
    beta0: float = 1.0,
) -> BetaFit:
    """Inverse-variance weighted fit of rescaled shallow-circuit data.

    Args:
        times: Physical times of the data points (at least three).
        values: ``lambda^{-1} <X (x) O>`` estimates.
        sigmas: Their standard errors; all must be positive and finite.
        model: Kernel provider for the disorder pool.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    if len(times) < 3:
        raise ModelError("need at least three time points")
    if not (len(times) == len(values) == len(sigmas)):
        raise ModelError("times, values and sigmas must have equal length")
    if not np.all(np.isfinite(sigmas)) or np.any(sigmas <= 0):
        raise ModelError("degenerate weights: sigmas must be positive and finite")

    def resid(b):
        return np.array([(model.rescaled(t, b[0] * t, observable) - y) / s for t, y, s in zip(times, values, sigmas)])

    sol = least_squares(resid, x0=[beta0], bounds=([0.0], [np.inf]), x_scale=[1.0])
    J = sol.jac
    jtj = J.T @ J
    if jtj[0, 0] <= 0:
        raise ModelError("fit is insensitive to beta")
    cov = np.linalg.inv(jtj)
    return BetaFit(float(sol.x[0]), cov, float(2 * sol.cost), len(times), model)


def errors_per_gate(beta: float, t: float, tq_gates: float) -> float:
    """``q t / #TQ`` with ``q = beta t``: mean number of errors per two-qubit gate."""
    return beta * t * t / tq_gates

"""Desk-scale simulation of sparse SYK dynamics with TETRIS random circuits."""

from __future__ import annotations

__version__ = "0.1.0"

from .estimators import EchoObservable, EstimateRecord, estimate, lgae_exponential, lgae_linear, optimal_shot_split
from .mirror import MirrorRunSpec, mirror_on_average, standard_mirror
from .noise import NoiseSpec
from .noise_theory import BetaFit, NoiseModelInputs, fit_beta, noisy_expectation, solve_F
from .pauli import PauliString
from .resources import ResourceQuery, otoc_tq_count, runtime_estimate
from .statevector import StateVector, exact_evolve, loschmidt_exact, trace_evolution
from .syk import SparseSykInstance, SykParams, encode_majorana_quadruple, sample_ensemble, sample_instance
from .tetris import TetrisCircuit, TetrisConfig, circuit_tape, run_conditional, sample_circuit
from .trotter import TrotterPlan, build_and_run, crossover_study, trotter_relative_error

__all__ = [
    "BetaFit",
    "EchoObservable",
    "EstimateRecord",
    "MirrorRunSpec",
    "NoiseModelInputs",
    "NoiseSpec",
    "PauliString",
    "ResourceQuery",
    "SparseSykInstance",
    "StateVector",
    "SykParams",
    "TetrisCircuit",
    "TetrisConfig",
    "TrotterPlan",
    "build_and_run",
    "circuit_tape",
    "crossover_study",
    "encode_majorana_quadruple",
    "estimate",
    "exact_evolve",
    "fit_beta",
    "lgae_exponential",
    "lgae_linear",
    "loschmidt_exact",
    "mirror_on_average",
    "noisy_expectation",
    "optimal_shot_split",
    "otoc_tq_count",
    "run_conditional",
    "runtime_estimate",
    "sample_circuit",
    "sample_ensemble",
    "sample_instance",
    "solve_F",
    "standard_mirror",
    "trace_evolution",
    "trotter_relative_error",
]

"""Fit the global-depolarizing error-rate slope ``beta`` from shallow-circuit data.

The "data" here are trajectory simulations at rate ``q = beta t``; the fit uses
only the shallow ``|0><0|`` points and then predicts the identity observable
and the deep circuits (rate ``3 beta t``).
"""

from __future__ import annotations

import numpy as np

from tetris_syk import SykParams, sample_ensemble
from tetris_syk.estimators import EchoObservable
from tetris_syk.noise import NoiseSpec
from tetris_syk.noise_theory import IDENTITY, PROJECT_ZERO, EnsembleModel, fit_beta
from tetris_syk.protocols import angle_policy, records_from_results, run_circuits


def main():
    pool = sample_ensemble(SykParams(8, seed=2), 6)
    model = EnsembleModel(pool, n_steps=200)
    beta_true = 2.46
    times = np.array([0.2, 0.35, 0.5, 0.65, 0.8])
    ys, ss = [], []
    for t in times:
        res = run_circuits(pool, t, angle_policy("shallow"), 3000, 0, NoiseSpec.global_depolarizing(beta_true * t), seed=5)
        r = records_from_results(res, t, use_exact=True)[EchoObservable.PROJECT_ZERO]
        ys.append(r.mean)
        ss.append(r.stderr)
    fit = fit_beta(times, ys, ss, model)
    print(f"fitted beta = {fit.beta:.2f} +- {fit.stderr:.2f} (simulated with {beta_true})")
    for t in times:
        y, s = fit.predict(t, IDENTITY, deep=True)
        print(f"Jt={t:.2f}  deep I prediction {y:+.3f}+-{s:.3f}   shallow P0 model {model.rescaled(t, fit.rate(t), PROJECT_ZERO):+.3f}")


if __name__ == "__main__":
    main()

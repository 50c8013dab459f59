from __future__ import annotations

import numpy as np
import pytest

from tetris_syk.mirror import (
    MirrorRunSpec,
    exact_local_z,
    gate_fidelity_prediction,
    mirror_on_average,
    standard_mirror,
)
from tetris_syk.noise import NoiseSpec
from tetris_syk.protocols import angle_policy
from tetris_syk.syk import SykParams, sample_ensemble


@pytest.fixture(scope="module")
def pool8():
    return sample_ensemble(SykParams(8, seed=30), 5)


def spec(pool, t=0.8, p=0.0, n=2000, **kw):
    return MirrorRunSpec(pool, t, NoiseSpec.per_gate(p), n, **kw)


def test_zero_time_is_trivial(pool8):
    moa = mirror_on_average(spec(pool8, t=0.0, n=20))
    assert moa.survival == pytest.approx(1.0, abs=1e-12)
    assert moa.local_obs == pytest.approx(1.0, abs=1e-12)
    assert standard_mirror(spec(pool8, t=0.0, n=20)).survival == 1.0


@pytest.mark.parametrize("t, scale", [(0.4, 1.0), (0.8, 1.0), (0.8, 0.5)])
def test_noiseless_mirror_on_average_survives(pool8, t, scale):
    r = mirror_on_average(spec(pool8, t=t, policy=angle_policy("optimal", alpha=scale)))
    assert abs(r.survival - 1) < 5 * r.survival_err


def test_noiseless_standard_mirror_exact(pool8):
    r = standard_mirror(spec(pool8, n=200))
    assert r.survival == pytest.approx(1.0, abs=1e-10)


def test_local_observable_matches_oracle(pool8):
    n = 4000
    r = mirror_on_average(spec(pool8, n=n))
    assert abs(r.local_obs - exact_local_z(pool8, 0.8, n)) < 5 * r.local_obs_err


def test_shot_mode(pool8):
    r = mirror_on_average(spec(pool8, n=1000, shots_per_circuit=4))
    assert abs(r.survival - 1) < 5 * r.survival_err
    s = standard_mirror(spec(pool8, p=2e-3, n=300, shots_per_circuit=10))
    assert 0 <= s.survival <= 1


def test_noise_ordering(pool8):
    p = 5e-3
    std = standard_mirror(spec(pool8, p=p, n=1000))
    moa = mirror_on_average(spec(pool8, p=p, n=1000))
    assert std.survival < moa.survival + 2 * moa.survival_err
    assert moa.survival < 1


def test_standard_mirror_tracks_gate_fidelity(pool8):
    p = 2e-3
    r = standard_mirror(spec(pool8, p=p, n=1000))
    assert abs(r.survival - gate_fidelity_prediction(p, r.mean_tq_gates)) < 0.1


def test_gate_fidelity_prediction():
    assert gate_fidelity_prediction(0.0, 500) == 1.0
    assert gate_fidelity_prediction(0.016, 1) == pytest.approx(0.985)


def test_replay_deterministic(pool8):
    a = mirror_on_average(spec(pool8, p=1e-3, n=50, seed=4))
    b = mirror_on_average(spec(pool8, p=1e-3, n=50, seed=4))
    assert a == b

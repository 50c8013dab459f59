"""Experiment kinds as lists of independent tasks, with resumable persistence.

Each kind splits into tasks (usually one per time point or sweep value).
Task ``i`` draws its randomness from ``SeedSequence(circuit_seed,
spawn_key=(i,))``, so results do not depend on execution order or worker
count. Finished tasks are written to ``parts/`` and listed in the manifest;
a rerun with the same config skips them.
"""

from __future__ import annotations

import csv
import datetime as _dt
import functools
import io
import json
import math
import os
import subprocess
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, Seeds, config_hash
from .estimators import EchoObservable, lgae_low_confidence
from .mirror import MirrorRunSpec, exact_local_z, gate_fidelity_prediction, mirror_on_average, standard_mirror
from .noise import NoiseSpec
from .noise_theory import EnsembleModel, ModelError, errors_per_gate, fit_beta
from .protocols import angle_policy, exact_target, lgae_protocol, records_from_results, run_circuits
from .resources import resource_table
from .statevector import MAX_EXACT_QUBITS, CapabilityError
from .syk import SykParams, sample_ensemble
from .trotter import crossover_study

PROVENANCE = ["seed", "instance_id", "circuit_id"]

COLUMNS = {
    "loschmidt_scan": [
        "task_id", "time", "observable", "mean", "stderr", "exact", "z_score", "circuits",
        "shots_per_circuit", "gate_angle", "attenuation", "mean_rotations", "mean_tq_gates",
    ],
    "variance_study": [
        "task_id", "time", "angle_scale", "observable", "shots_per_circuit", "circuits", "total_shots",
        "mean", "stderr", "sigma_circuit", "exact", "mean_tq_gates",
    ],
    "angle_sweep": [
        "task_id", "time", "factor", "observable", "mean", "stderr", "exact", "z_score", "gate_angle",
        "attenuation", "mean_rotations", "mean_tq_gates", "circuits", "shots_per_circuit",
    ],
    "lgae_hardware_protocol": [
        "task_id", "time", "observable", "stage", "mean", "stderr", "exact", "z_score", "low_confidence",
        "mean_tq_gates", "circuits", "shots_per_circuit",
    ],
    "noise_model_overlay": [
        "task_id", "time", "observable", "stage", "source", "q", "mean", "stderr", "exact",
        "mean_tq_gates", "errors_per_gate",
    ],
    "trotter_crossover": [
        "task_id", "time", "tq_tetris_optimal", "tq_trotter_1", "tq_trotter_2", "cheaper_scheme",
        "trotter_error_1", "trotter_error_2", "loschmidt_exact",
    ],
    "mirror_sweep": [
        "task_id", "time", "p_dep", "benchmark", "mean", "stderr", "reference", "mean_tq_gates", "circuits",
    ],
    "resources": [
        "task_id", "n_qubits", "sparsity", "jt", "tq_count", "serial_hours", "parallel_factor",
        "parallel_hours", "label",
    ],
}
COLUMNS = {k: v + PROVENANCE for k, v in COLUMNS.items()}

ORACLE_LIMITS = {"noise_model_overlay": 12, "resources": None}


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def task_seed(cfg: dict, task_id: int) -> int:
    ss = np.random.SeedSequence(cfg["seeds"]["circuits"], spawn_key=(task_id,))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def syk_params(cfg: dict) -> SykParams:
    s = cfg["syk"]
    return SykParams(s["n_majorana"], s["coupling"], s["sparsity"], s["dense"], s["seed"])


@functools.lru_cache(maxsize=8)
def _pool(n_majorana, coupling, sparsity, dense, seed, size):
    return tuple(sample_ensemble(SykParams(n_majorana, coupling, sparsity, dense, seed), size))


def pool_of(cfg: dict):
    s = cfg["syk"]
    return _pool(s["n_majorana"], s["coupling"], s["sparsity"], s["dense"], s["seed"], cfg["ensemble_size"])


def noise_of(cfg: dict, **override) -> NoiseSpec:
    n = dict(cfg["noise"], **override)
    return NoiseSpec(n["mode"], n["p_dep"], n["q"])


def policy_of(cfg: dict):
    a = cfg["angle"]
    if a["policy"] == "optimal":
        return angle_policy("optimal", alpha=a["alpha"])
    if a["policy"] == "shallow":
        return angle_policy("shallow", a["factor"])
    return angle_policy("shallow", a["factor"], a["alpha"])


def _prov(cfg: dict, seed: int, n_circuits: int) -> dict:
    return {
        "seed": seed,
        "instance_id": f"{cfg['syk']['seed']}:0-{cfg['ensemble_size'] - 1}",
        "circuit_id": f"0-{n_circuits - 1}",
    }


def _z(mean, stderr, exact):
    return (mean - exact) / stderr if stderr and math.isfinite(stderr) and stderr > 0 else float("nan")


def check_capability(cfg: dict):
    kind = cfg["experiment"]
    limit = ORACLE_LIMITS.get(kind, MAX_EXACT_QUBITS)
    nq = cfg["syk"]["n_majorana"] // 2
    if limit is not None and nq > limit:
        raise CapabilityError(f"{kind} needs the exact oracle, available up to {limit} qubits; got {nq}")


# ---------------------------------------------------------------------------
# Task lists and task bodies
# ---------------------------------------------------------------------------


def task_list(cfg: dict) -> list[dict]:
    kind, opts = cfg["experiment"], cfg["options"]
    times = cfg["times"]
    if kind == "variance_study":
        return [{"time": t, "angle_scale": a} for t in times for a in opts["angle_scales"]]
    if kind == "angle_sweep":
        return [{"time": t, "factor": f} for t in times for f in opts["factors"]]
    if kind == "mirror_sweep":
        return [{"time": t, "p_dep": p} for t in times for p in opts["p_dep_list"]]
    if kind == "resources":
        return [{}]
    return [{"time": t} for t in times]


def _estimate_rows(cfg, res, t, seed, extra=None):
    recs = records_from_results(res, t, use_exact=cfg["shots_per_circuit"] == 0)
    exact = exact_target(pool_of(cfg), t, res.n_circuits)
    rows = []
    for o, r in recs.items():
        row = {
            "time": t, "observable": o.value, "mean": r.mean, "stderr": r.stderr, "exact": exact,
            "z_score": _z(r.mean, r.stderr, exact), "circuits": r.circuits, "shots_per_circuit": r.shots_per_circuit,
            "gate_angle": float(np.mean(res.gate_angle)), "attenuation": float(np.mean(res.attenuation)),
            "mean_rotations": float(np.mean(res.rotations)), "mean_tq_gates": float(np.mean(res.tq_gates)),
        }
        row.update(extra or {})
        row.update(_prov(cfg, seed, res.n_circuits))
        rows.append(row)
    return rows


def run_task(cfg: dict, task_id: int) -> list[dict]:
    kind, opts = cfg["experiment"], cfg["options"]
    task = task_list(cfg)[task_id]
    seed = task_seed(cfg, task_id)
    n_circ, shots = cfg["circuits"], cfg["shots_per_circuit"]
    if kind == "resources":
        rows = resource_table(opts["sizes"], opts["sparsity"], opts["depth_time"])
        return [dict(r, seed=seed, instance_id="", circuit_id="") for r in rows]
    t = task["time"]
    if kind == "trotter_crossover":
        rows = crossover_study(syk_params(cfg), [t], cfg["ensemble_size"], opts["controlled"])
        inst = f"{cfg['syk']['seed']}:0-{cfg['ensemble_size'] - 1}"
        return [dict(r.as_row(), seed=seed, instance_id=inst, circuit_id="") for r in rows]
    pool = pool_of(cfg)
    if kind == "loschmidt_scan":
        res = run_circuits(pool, t, policy_of(cfg), n_circ, shots, noise_of(cfg), seed)
        return _estimate_rows(cfg, res, t, seed)
    if kind == "angle_sweep":
        res = run_circuits(pool, t, angle_policy("shallow", task["factor"]), n_circ, shots, noise_of(cfg), seed)
        return _estimate_rows(cfg, res, t, seed, {"factor": task["factor"]})
    if kind == "variance_study":
        pol = angle_policy("optimal", alpha=task["angle_scale"])
        res = run_circuits(pool, t, pol, n_circ, max(opts["shots_list"]), noise_of(cfg), seed)
        exact = exact_target(pool, t, n_circ)
        rows = []
        for s in opts["shots_list"]:
            for o in res.shot_values:
                means = res.shot_values[o][:, :s].mean(axis=1) / res.attenuation
                se = float(means.std(ddof=1) / math.sqrt(len(means)))
                rows.append({
                    "time": t, "angle_scale": task["angle_scale"], "observable": o.value, "shots_per_circuit": s,
                    "circuits": n_circ, "total_shots": s * n_circ, "mean": float(means.mean()), "stderr": se,
                    "sigma_circuit": se * math.sqrt(n_circ), "exact": exact,
                    "mean_tq_gates": float(np.mean(res.tq_gates)), **_prov(cfg, seed, n_circ),
                })
        return rows
    if kind == "lgae_hardware_protocol":
        points = lgae_protocol(pool, t, n_circ, shots, noise_of(cfg), opts["alpha"], opts["shallow_factor"], seed)
        rows = []
        for p in points:
            stages = [("shallow", p.shallow.mean, p.shallow.stderr), ("deep", p.deep.mean, p.deep.stderr),
                      ("lgae_linear", *p.linear)]
            if p.exponential is not None:
                stages.append(("lgae_exponential", *p.exponential))
            for stage, m, s in stages:
                rows.append({
                    "time": t, "observable": p.observable, "stage": stage, "mean": m, "stderr": s, "exact": p.exact,
                    "z_score": _z(m, s, p.exact), "low_confidence": lgae_low_confidence(m, s),
                    "mean_tq_gates": float("nan"), "circuits": n_circ, "shots_per_circuit": shots,
                    **_prov(cfg, seed, n_circ),
                })
        return rows
    if kind == "noise_model_overlay":
        beta, alpha, f0 = opts["beta"], opts["alpha"], opts["shallow_factor"]
        exact = exact_target(pool, t, n_circ)
        rows = []
        for stage, k, pol, stream in (("shallow", 1.0, angle_policy("shallow", f0), 0),
                                       ("deep", 3.0, angle_policy("shallow", f0, alpha), 1)):
            q = k * beta * t
            obs = (EchoObservable.IDENTITY, EchoObservable.PROJECT_ZERO)
            res = run_circuits(pool, t, pol, n_circ, shots, NoiseSpec.global_depolarizing(q), seed, stream, obs)
            recs = records_from_results(res, t, use_exact=shots == 0)
            for o, r in recs.items():
                rows.append({
                    "time": t, "observable": o.value, "stage": stage, "source": "trajectory", "q": q,
                    "mean": r.mean, "stderr": r.stderr, "exact": exact, "mean_tq_gates": float(np.mean(res.tq_gates)),
                    "errors_per_gate": errors_per_gate(k * beta, t, float(np.mean(res.tq_gates))), **_prov(cfg, seed, n_circ),
                })
        return rows
    if kind == "mirror_sweep":
        run = MirrorRunSpec(pool, t, NoiseSpec.per_gate(task["p_dep"]), n_circ, shots, policy_of(cfg), seed)
        moa, std = mirror_on_average(run), standard_mirror(run)
        base = {"time": t, "p_dep": task["p_dep"], "circuits": n_circ, **_prov(cfg, seed, n_circ)}
        return [
            dict(base, benchmark="mirror", mean=std.survival, stderr=std.survival_err,
                 reference=gate_fidelity_prediction(task["p_dep"], std.mean_tq_gates), mean_tq_gates=std.mean_tq_gates),
            dict(base, benchmark="mirror_on_average", mean=moa.survival, stderr=moa.survival_err, reference=1.0,
                 mean_tq_gates=moa.mean_tq_gates),
            dict(base, benchmark="local_obs", mean=moa.local_obs, stderr=moa.local_obs_err,
                 reference=exact_local_z(pool, t, n_circ), mean_tq_gates=moa.mean_tq_gates),
        ]
    raise ConfigError("experiment", f"unknown kind {kind!r}")


def finalize(cfg: dict, rows: list[dict]) -> tuple[list[dict], dict]:
    """Extra rows derived from all task rows, plus the JSON summary."""
    kind = cfg["experiment"]
    summary: dict = {"experiment": kind, "rows": len(rows)}
    extra: list[dict] = []
    if kind in ("loschmidt_scan", "angle_sweep"):
        z = [abs(r["z_score"]) for r in rows if math.isfinite(r["z_score"])]
        summary["max_abs_z"] = max(z) if z else float("nan")
        summary["all_within_5sigma"] = bool(z) and max(z) <= 5
    elif kind == "variance_study":
        ratios, better, total = [], 0, 0
        key = lambda r: (r["time"], r["angle_scale"])
        groups = {}
        for r in rows:
            groups.setdefault(key(r), {})[(r["observable"], r["shots_per_circuit"])] = r
        shots = sorted({r["shots_per_circuit"] for r in rows})
        for g in groups.values():
            for s in shots:
                total += 1
                better += g[("P0", s)]["sigma_circuit"] <= g[("I", s)]["sigma_circuit"]
            if len(shots) > 1:
                for o in ("I", "P0", "P0mit"):
                    ratios.append(g[(o, shots[0])]["stderr"] / g[(o, shots[-1])]["stderr"])
        summary["p0_not_noisier_fraction"] = better / total if total else float("nan")
        summary["sigma_ratios_first_vs_last_shots"] = ratios
    elif kind == "lgae_hardware_protocol":
        z = {str(r["time"]): r["z_score"] for r in rows if r["observable"] == "P0mit" and r["stage"] == "lgae_linear"}
        summary["p0mit_linear_z"] = z
        summary["p0mit_within_2sigma"] = all(abs(v) <= 2 for v in z.values())
    elif kind == "noise_model_overlay":
        extra, summary2 = _overlay_model_rows(cfg, rows)
        summary.update(summary2)
    elif kind == "trotter_crossover":
        first = next((r for r in rows if r["tq_trotter_1"] <= r["tq_tetris_optimal"]), None)
        summary["first_crossover"] = first
    elif kind == "mirror_sweep":
        by_p = {}
        for r in rows:
            by_p.setdefault(r["p_dep"], {})[r["benchmark"]] = r
        summary["ordering_holds"] = all(
            v["mirror"]["mean"] <= v["mirror_on_average"]["mean"] <= 1 + 5 * v["mirror_on_average"]["stderr"]
            for v in by_p.values()
        )
    elif kind == "resources":
        summary["table"] = rows
    return extra, summary


def _overlay_model_rows(cfg, rows):
    opts = cfg["options"]
    pool = pool_of(cfg)
    model = EnsembleModel(pool, opts["grid_steps"])
    fit_rows = sorted(
        (r for r in rows if r["stage"] == "shallow" and r["observable"] == "P0"), key=lambda r: r["time"]
    )
    summary = {"beta_true": opts["beta"]}
    try:
        fit = fit_beta([r["time"] for r in fit_rows], [r["mean"] for r in fit_rows], [r["stderr"] for r in fit_rows], model)
    except ModelError as exc:
        summary["fit_error"] = str(exc)
        return [], summary
    summary.update(beta_fit=fit.beta, beta_stderr=fit.stderr, residual=fit.residual)
    extra = []
    for t in cfg["times"]:
        for stage, deep in (("shallow", False), ("deep", True)):
            for obs in ("I", "P0"):
                y, s = fit.predict(t, obs, deep)
                extra.append({
                    "task_id": -1, "time": t, "observable": obs, "stage": stage, "source": "model_fit",
                    "q": fit.rate(t, deep), "mean": y, "stderr": s, "exact": model.noiseless(t),
                    "mean_tq_gates": float("nan"), "errors_per_gate": float("nan"),
                    "seed": "", "instance_id": f"{cfg['syk']['seed']}:0-{cfg['ensemble_size'] - 1}", "circuit_id": "",
                })
    return extra, summary


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def git_describe() -> str:
    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"], cwd=here, capture_output=True, text=True, timeout=10
        )
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(path: Path, columns: list[str], rows: list[dict]):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        unknown = set(r) - set(columns)
        if unknown:
            raise KeyError(f"row has columns outside the frozen schema: {sorted(unknown)}")
        w.writerow([_fmt(r.get(c, "")) for c in columns])
    path.write_text(buf.getvalue())


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


def run_experiment(cfg: dict, out_dir: str | Path, workers: int = 1, log=print) -> dict:
    """Run (or resume) all tasks, then write ``results.csv``, ``summary.json`` and the manifest."""
    check_capability(cfg)
    out = Path(out_dir)
    parts = out / "parts"
    parts.mkdir(parents=True, exist_ok=True)
    man_path = out / "manifest.json"
    digest = config_hash(cfg)
    tasks = task_list(cfg)
    if man_path.exists():
        manifest = json.loads(man_path.read_text())
        if manifest.get("config_hash") != digest:
            raise ConfigError("output", f"{out} holds a run with a different config; choose another --out")
    else:
        manifest = {
            "config": cfg, "config_hash": digest, "code_version": git_describe(), "package_version": __version__,
            "seeds": {"disorder": Seeds.of(cfg).disorder, "circuits": Seeds.of(cfg).circuits,
                      "tasks": [task_seed(cfg, i) for i in range(len(tasks))]},
            "created": _now(), "completed_tasks": [], "status": "running",
        }
    done = set(manifest["completed_tasks"])
    todo = [i for i in range(len(tasks)) if i not in done]
    if done:
        log(f"resuming: {len(done)} of {len(tasks)} tasks already complete")

    def record(i, rows):
        (parts / f"task_{i:04d}.json").write_text(json.dumps(_jsonable([dict(r, task_id=i) for r in rows])))
        manifest["completed_tasks"] = sorted(set(manifest["completed_tasks"]) | {i})
        manifest["updated"] = _now()
        man_path.write_text(json.dumps(_jsonable(manifest), indent=1))
        log(f"task {i + 1}/{len(tasks)} done")

    man_path.write_text(json.dumps(_jsonable(manifest), indent=1))
    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futures = {i: ex.submit(run_task, cfg, i) for i in todo}
            for i in todo:
                record(i, futures[i].result())
    else:
        for i in todo:
            record(i, run_task(cfg, i))

    rows = []
    for i in range(len(tasks)):
        rows.extend(json.loads((parts / f"task_{i:04d}.json").read_text()))
    extra, summary = finalize(cfg, rows)
    write_csv(out / "results.csv", COLUMNS[cfg["experiment"]], rows + extra)
    (out / "summary.json").write_text(json.dumps(_jsonable(summary), indent=1, sort_keys=True))
    manifest["status"] = "complete"
    manifest["finished"] = _now()
    man_path.write_text(json.dumps(_jsonable(manifest), indent=1))
    return summary


def default_out(cfg: dict) -> str:
    return cfg.get("output") or os.path.join("runs", cfg["experiment"])

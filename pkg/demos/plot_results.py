"""Plot a ``results.csv`` written by the ``tetris-syk`` command.

Usage: ``python demos/plot_results.py runs/loschmidt_scan [out.png]``. Only the
CSV is read, so plots can be redrawn without rerunning anything.
"""

from __future__ import annotations

import csv
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(run_dir: Path) -> list[dict]:
    with open(run_dir / "results.csv") as fh:
        return list(csv.DictReader(fh))


def num(v):
    try:
        return float(v)
    except (TypeError, ValueError):
        return float("nan")


def series(rows, key, x="time", y="mean", err="stderr"):
    out = defaultdict(lambda: ([], [], []))
    for r in rows:
        xs, ys, es = out[key(r)]
        xs.append(num(r[x]))
        ys.append(num(r[y]))
        es.append(num(r.get(err, "nan")))
    return out


def plot(rows, ax):
    cols = rows[0].keys()
    if "tq_trotter_1" in cols:
        t = [num(r["time"]) for r in rows]
        ax.plot(t, [num(r["tq_tetris_optimal"]) for r in rows], label="TETRIS (optimal angle)")
        ax.plot(t, [num(r["tq_trotter_1"]) for r in rows], label="Trotter, 1 step")
        ax.plot(t, [num(r["tq_trotter_2"]) for r in rows], label="Trotter, 2 steps")
        ax.set_ylabel("two-qubit gates")
    elif "benchmark" in cols:
        for name, (xs, ys, es) in series(rows, lambda r: r["benchmark"], x="p_dep").items():
            ax.errorbar(xs, ys, es, marker="o", label=name)
        ax.set_xlabel("p_dep")
    elif "tq_count" in cols:
        ax.loglog([num(r["n_qubits"]) for r in rows], [num(r["tq_count"]) for r in rows], "o-")
        ax.set_xlabel("L")
        ax.set_ylabel("two-qubit gates")
        return
    elif "stage" in cols:
        label = (lambda r: f"{r['observable']} {r['stage']} {r['source']}") if "source" in cols else (lambda r: f"{r['observable']} {r['stage']}")
        for name, (xs, ys, es) in series(rows, label).items():
            ax.errorbar(xs, ys, es, marker="o", capsize=2, label=name)
        exact = sorted({(num(r["time"]), num(r["exact"])) for r in rows if r["exact"] not in ("", "nan")})
        if exact:
            ax.plot(*zip(*exact), "k--", label="exact")
    else:
        group = (lambda r: f"{r['observable']} x{r['angle_scale']} {r['shots_per_circuit']} shots") if "angle_scale" in cols else (lambda r: r["observable"])
        for name, (xs, ys, es) in series(rows, group).items():
            ax.errorbar(xs, ys, es, marker="o", capsize=2, label=name)
        exact = sorted({(num(r["time"]), num(r["exact"])) for r in rows})
        ax.plot(*zip(*exact), "k--", label="exact")
    ax.set_xlabel(ax.get_xlabel() or "Jt")
    ax.legend(fontsize=7)


def main(argv):
    if not argv:
        print(__doc__)
        return 2
    run_dir = Path(argv[0])
    out = Path(argv[1]) if len(argv) > 1 else run_dir / "results.png"
    fig, ax = plt.subplots(figsize=(6, 4))
    plot(load(run_dir), ax)
    ax.set_title(run_dir.name)
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))

"""Two-qubit gate cost of TETRIS at the optimal angle against one Trotter step."""

from __future__ import annotations

from tetris_syk import SykParams
from tetris_syk.trotter import crossover_study, first_crossover


def main():
    times = [0.1 * i for i in range(1, 16)]
    rows = crossover_study(SykParams(12, seed=0), times, ensemble_size=8)
    print(" Jt   TETRIS   Trotter(s=1)  cheaper   Trotter error   Re L")
    for r in rows:
        print(f"{r.time:4.1f} {r.tq_tetris_optimal:8.0f} {r.tq_trotter_1:10.0f}     {r.cheaper_scheme:<8} {r.trotter_error_1:10.3f}   {r.loschmidt_exact:+.3f}")
    cross = first_crossover(rows)
    if cross:
        print(f"one Trotter step becomes cheaper at Jt={cross.time:.1f}, where its error is already {cross.trotter_error_1:.0%}")


if __name__ == "__main__":
    main()

"""Order-of-magnitude gate counts and runtimes for OTOC experiments at scale."""

from __future__ import annotations

from tetris_syk.resources import LABEL, resource_table


def main():
    print(f"({LABEL})")
    for row in resource_table((25, 50, 100, 200)):
        print(
            f"L={row['n_qubits']:>3}  Jt={row['jt']:.2f}  gates {row['tq_count']:.2e}  "
            f"serial {row['serial_hours']:8.1f} h  parallel x{row['parallel_factor']:<3} {row['parallel_hours']:7.1f} h"
        )


if __name__ == "__main__":
    main()

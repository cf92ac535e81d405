"""Compare the quoted Omega = 0 amplitudes and the exact nilpotent solution with RK4."""

import numpy as np

from pfcs.evolution import degenerate_amplitudes, degenerate_solution, ode_integrate
from pfcs.twolevel import SystemParams


def main() -> None:
    p = SystemParams(2.0, 0.0, 1.0)  # delta = |omega| = 1
    tr = ode_integrate(p, (1, 0), 5.0, 1e-4, stride=5000)
    print(f"{'t':>5s} {'RK4 Ca':>22s} {'quoted Ca':>10s} {'exact Ca':>10s}   RK4 Cb / quoted Cb / exact Cb")
    for t, c in zip(tr.times, tr.samples):
        q, e = degenerate_amplitudes(p, t), degenerate_solution(p, t)
        print(f"{t:5.2f} {c[0].real:22.15f} {q[0].real:10.5f} {e[0].real:10.5f}   "
              f"{c[1]:.5f} / {q[1]:.5f} / {e[1]:.5f}")
    full = ode_integrate(p, (1, 0), 5.0, 1e-4)
    quoted = degenerate_amplitudes(p, full.times)
    exact = degenerate_solution(p, full.times)
    print(f"max |RK4 - quoted| = {np.max(np.abs(full.samples - quoted)):.3e}")
    print(f"max |RK4 - exact|  = {np.max(np.abs(full.samples - exact)):.3e}")


if __name__ == "__main__":
    main()

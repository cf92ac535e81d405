"""RK4 error against the closed-form propagator as the step is halved repeatedly."""

import math

from pfcs.evolution import rk4_vs_propagator
from pfcs.twolevel import SystemParams


def main() -> None:
    p = SystemParams(1.6, 0.4, 1)
    prev = None
    print(f"{'dt':>10s} {'max error':>12s} {'order':>8s}")
    for k in range(7):
        dt = 0.2 / 2 ** k
        err = rk4_vs_propagator(p, (1, 0), 10.0, dt)
        order = "" if prev is None else f"{math.log2(prev / err):8.3f}"
        print(f"{dt:10.5f} {err:12.3e} {order}")
        prev = err
    # near dt ~ 3e-3 the error approaches round-off and the ratio stops meaning anything


if __name__ == "__main__":
    main()

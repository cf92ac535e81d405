"""Run the full verification suite at one parameter point and print a per-family summary."""

import argparse

from pfcs.cli import family_summary, verify_suite
from pfcs.twolevel import SystemParams


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma-a", type=float, default=1.6)
    ap.add_argument("--gamma-b", type=float, default=0.4)
    ap.add_argument("--omega-re", type=float, default=1.0)
    ap.add_argument("--omega-im", type=float, default=0.0)
    ns = ap.parse_args()
    p = SystemParams(ns.gamma_a, ns.gamma_b, complex(ns.omega_re, ns.omega_im))
    rep = verify_suite(p)
    print(f"delta={p.delta:.6g} Gamma={p.Gamma:.6g} Omega={p.Omega:.6g}  checks={len(rep.entries)}")
    for fam, res in family_summary(rep).items():
        print(f"  {fam:<20s} max residual {res:.3e}")
    for e in rep.failures():
        print(f"  FAILED {e.check_id}: {e.residual:.3e} > {e.tol:.1e}")
    print("all pass" if rep.passed else "failures present")


if __name__ == "__main__":
    main()

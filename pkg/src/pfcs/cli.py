"""Command-line front end: ``verify``, ``sweep``, ``evolve`` and ``ode-check``.

Exit codes: 0 all checks pass, 1 some check fails, 2 regime or argument
error (a JSON error object is printed), 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import __version__
from . import twolevel as tl
from .coherent import Flavor, coherent_report
from .errors import ArgumentError, PfcsError, RegimeError
from .evolution import evolution_report, evolve_cs, numeric_residual, ode_check, propagate
from .report import CheckReport
from .twolevel import DEFAULT_TOL, SystemParams

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
COMMANDS = ("verify", "sweep", "evolve", "ode-check")
FAMILIES = ("hamiltonian", "spectrum", "metric", "algebra", "ladder", "number", "factorization",
            "pseudo_hermiticity", "bsharp", "bdagger", "dual_algebra", "symmetry", "dyads",
            "displacement", "coherent", "overlap", "resolution", "evolution", "propagator")


@dataclass
class RunConfig:
    command: str
    params: SystemParams
    tol: float | None = None
    delta_steps: int = 10
    arg_steps: int = 8
    delta_max: float = 0.9
    t_max: float = 10.0
    dt: float = 1e-3
    stride: int = 100
    out: str | None = None
    json_path: str | None = None
    timestamp: str | None = None

    def tolerance(self) -> float:
        if self.tol is not None:
            return self.tol
        return 1e-6 if self.command == "ode-check" else DEFAULT_TOL


# suites ------------------------------------------------------------------------

def verify_suite(p: SystemParams, tol: float = DEFAULT_TOL, exact: bool = True) -> CheckReport:
    rep = tl.system_report(p, tol)
    rep.extend(coherent_report(p, tol))
    rep.extend(evolution_report(p, tol, exact=exact))
    return rep


def family_summary(rep: CheckReport) -> dict[str, float]:
    """Largest residual per check family (the id prefix before the first dot)."""
    out: dict[str, float] = {}
    for e in rep.entries:
        fam = e.check_id.split(".", 1)[0]
        out[fam] = max(out.get(fam, 0.0), e.residual)
    return out


def _fmt(x: Any) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".16e")
    if isinstance(x, int):
        return str(x)
    return str(x)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _document(cfg: RunConfig, body: dict[str, Any]) -> dict[str, Any]:
    doc: dict[str, Any] = {"version": __version__, "params": cfg.params.as_dict()}
    if cfg.timestamp is not None:
        doc["timestamp"] = cfg.timestamp
    doc.update(body)
    return doc


def _json_text(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


# commands ------------------------------------------------------------------------

def cmd_verify(cfg: RunConfig) -> tuple[int, str, str | None]:
    rep = verify_suite(cfg.params, cfg.tolerance())
    text = _json_text(_document(cfg, rep.to_dict()))
    return (EXIT_OK if rep.passed else EXIT_FAIL), text, None


SWEEP_HEADER = ["index", "delta_over_omega", "arg_omega", "gamma_a", "gamma_b", "omega_re", "omega_im",
                "Omega", "status", *[f"max_{f}" for f in FAMILIES], "pass"]


def sweep_points(cfg: RunConfig) -> list[tuple[float, float, SystemParams]]:
    p = cfg.params
    if cfg.delta_steps < 1 or cfg.arg_steps < 1:
        raise ArgumentError("sweep grid must have at least one point")
    if cfg.delta_steps == 1 and cfg.arg_steps == 1:
        tl.require_coupling(p)
        pts = [(p.delta / p.abs_omega, float(np.angle(p.omega)), p)]
    else:
        ratios = np.linspace(0.0, cfg.delta_max, cfg.delta_steps)
        args = np.linspace(0.0, 2 * math.pi, cfg.arg_steps, endpoint=False)
        pts = [(float(r), float(a), SystemParams.from_ratio(float(r), float(a), p.abs_omega, p.gamma_b))
               for r in ratios for a in args]
    # degenerate points become flagged rows; strong damping is refused outright
    for _, _, q in pts:
        if q.regime == "strong_damping":
            tl.require_real_spectrum(q)
    return pts


def sweep_rows(cfg: RunConfig) -> tuple[list[list[Any]], list[CheckReport]]:
    """One row per grid point; a single point reruns the exact verify suite."""
    tol = cfg.tolerance()
    pts = sweep_points(cfg)
    exact = len(pts) == 1
    rows, reports = [], []
    for k, (r, a, p) in enumerate(pts):
        head = [k, r, a, p.gamma_a, p.gamma_b, p.omega.real, p.omega.imag]
        regime = p.regime
        if regime == "degenerate":
            rows.append(head + [0.0, regime] + [""] * len(FAMILIES) + [""])
            continue
        rep = verify_suite(p, tol, exact)
        reports.append(rep)
        fams = family_summary(rep)
        rows.append(head + [p.Omega, "pass" if rep.passed else "fail"]
                    + [fams.get(f, "") for f in FAMILIES] + [rep.passed])
    return rows, reports


def cmd_sweep(cfg: RunConfig) -> tuple[int, str, str | None]:
    rows, reports = sweep_rows(cfg)
    ok = all(r.passed for r in reports)
    side = None
    if cfg.json_path:
        checks = []
        for row in rows:
            checks.append({"index": row[0], "delta_over_omega": row[1], "arg_omega": row[2], "status": row[8]})
        side = _json_text(_document(cfg, {"rows": checks, "pass": ok}))
    return (EXIT_OK if ok else EXIT_FAIL), _csv_text(SWEEP_HEADER, rows), side


EVOLVE_HEADER = ["t", "factor_re", "factor_im", "abs_factor_minus_1", "ratio_re", "ratio_im",
                 "factorization_residual", "xi_law_residual", "Ca_re", "Ca_im", "Cb_re", "Cb_im"]


def evolve_rows(cfg: RunConfig) -> tuple[list[list[Any]], CheckReport]:
    p = cfg.params
    tl.require_real_spectrum(p)
    if not (cfg.dt > 0 and cfg.t_max > 0 and cfg.stride >= 1):
        raise ArgumentError("need dt > 0, t_max > 0 and stride >= 1")
    tol = cfg.tolerance()
    n = max(1, round(cfg.t_max / cfg.dt))
    h = cfg.t_max / n
    times = [k * h for k in range(0, n + 1, cfg.stride)]
    if times[-1] != n * h:
        times.append(n * h)
    amps = propagate(p, times, (1, 0))
    rep = CheckReport(params_echo=p)
    rows = []
    for t, c in zip(times, amps):
        ev = evolve_cs(p, Flavor.PRIMAL, t)
        fact = numeric_residual(ev.residual)
        law = abs(ev.ratio - complex(np.exp(-2j * p.E * t)))
        phase = abs(abs(ev.factor) - 1)
        rows.append([t, ev.factor.real, ev.factor.imag, phase, ev.ratio.real, ev.ratio.imag, fact, law,
                     c[0].real, c[0].imag, c[1].real, c[1].imag])
        key = f"evolve.t={t:.6g}"
        rep.add(f"{key}.phase", "|exp(iEt)| = 1", phase, tol, "|exp(iEt)| = 1")
        rep.add(f"{key}.factorization", "exp(-iHt)|ξ> = exp(iEt)|ξ(t)>", fact, tol, "exp(-iHt)|ξ> = exp(iEt)|ξ(t)>")
        rep.add(f"{key}.xi_law", "ξ(t)/ξ = exp(-2iEt)", law, tol, "ξ(t) = exp(-2iEt) ξ")
    return rows, rep


def cmd_evolve(cfg: RunConfig) -> tuple[int, str, str | None]:
    rows, rep = evolve_rows(cfg)
    side = _json_text(_document(cfg, rep.to_dict())) if cfg.json_path else None
    return (EXIT_OK if rep.passed else EXIT_FAIL), _csv_text(EVOLVE_HEADER, rows), side


def cmd_ode_check(cfg: RunConfig) -> tuple[int, str, str | None]:
    if not (cfg.dt > 0 and cfg.t_max > 0):
        raise ArgumentError("need dt > 0 and t_max > 0")
    rep = ode_check(cfg.params, cfg.t_max, cfg.dt, cfg.tolerance())
    body = rep.to_dict()
    body["settings"] = {"t_max": cfg.t_max, "dt": cfg.dt, "regime": cfg.params.regime}
    return (EXIT_OK if rep.passed else EXIT_FAIL), _json_text(_document(cfg, body)), None


HANDLERS = {"verify": cmd_verify, "sweep": cmd_sweep, "evolve": cmd_evolve, "ode-check": cmd_ode_check}


# argument handling ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pfcs", description="Pseudo-fermionic coherent state verifier.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp_ = sub.add_parser(name)
        sp_.add_argument("--gamma-a", type=float, default=1.6)
        sp_.add_argument("--gamma-b", type=float, default=0.4)
        sp_.add_argument("--omega-re", type=float, default=1.0)
        sp_.add_argument("--omega-im", type=float, default=0.0)
        sp_.add_argument("--tol", type=float, default=None,
                         help="check tolerance (default 1e-12; 1e-6 for ode-check)")
        sp_.add_argument("--out", default=None, help="output file (default: stdout)")
        sp_.add_argument("--json", dest="json_path", default=None, help="extra JSON report (sweep, evolve)")
        sp_.add_argument("--fixed-timestamp", default=None,
                         help="timestamp written into JSON output; without it the current UTC time is used")
        if name == "sweep":
            sp_.add_argument("--grid-delta-steps", type=int, default=10)
            sp_.add_argument("--grid-arg-steps", type=int, default=8)
            sp_.add_argument("--grid-delta-max", type=float, default=0.9)
        if name in ("evolve", "ode-check"):
            sp_.add_argument("--t-max", type=float, default=10.0)
            sp_.add_argument("--dt", type=float, default=1e-3)
        if name == "evolve":
            sp_.add_argument("--stride", type=int, default=100)
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = SystemParams(ns.gamma_a, ns.gamma_b, complex(ns.omega_re, ns.omega_im))
    stamp = ns.fixed_timestamp
    if stamp is None:
        stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return RunConfig(
        command=ns.command, params=params, tol=ns.tol,
        delta_steps=getattr(ns, "grid_delta_steps", 10), arg_steps=getattr(ns, "grid_arg_steps", 8),
        delta_max=getattr(ns, "grid_delta_max", 0.9),
        t_max=getattr(ns, "t_max", 10.0), dt=getattr(ns, "dt", 1e-3), stride=getattr(ns, "stride", 100),
        out=ns.out, json_path=ns.json_path, timestamp=stamp,
    )


def _error_object(exc: Exception) -> str:
    kind = "ArgumentError" if not isinstance(exc, PfcsError) else type(exc).__name__
    return json.dumps({"error": kind, "message": str(exc)}) + "\n"


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def run(cfg: RunConfig) -> int:
    try:
        code, text, side = HANDLERS[cfg.command](cfg)
    except (RegimeError, ArgumentError, ValueError) as exc:
        sys.stdout.write(_error_object(exc))
        return EXIT_USAGE
    try:
        _write(cfg.out, text)
        if side is not None:
            _write(cfg.json_path, side)
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": "IOError", "message": str(exc)}) + "\n")
        return EXIT_IO
    return code


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except (PfcsError, ValueError) as exc:
        sys.stdout.write(_error_object(exc))
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

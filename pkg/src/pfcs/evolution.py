"""Time evolution: propagators, stability of the coherent-state families, RK4 oracle.

Amplitude conventions: the primed amplitudes obey ``i dC'/dt = M C'`` with
``M = H - iΓ``; the unprimed ones ``C = exp(Γt) C'`` obey ``i dC/dt = H C``.

Coherent states are evolved on the graded side with the spectral propagator
``sum_i exp(-i E_i t) |e_i><f_i|``.  With ``exact=True`` the scalars are sympy
expressions in a positive symbol ``E`` and a rational ``t``, so the
factorization ``exp(iEt) CS(exp(-2iEt) ξ)`` can be confirmed as an identity
of polynomials rather than up to rounding.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np
import sympy as sp

from . import twolevel as tl
from .coherent import MEASURE, XI, CoherentState, Flavor, coherent_state_closed, eigenbasis, ladder_operators
from .errors import ArgumentError, NotDegenerate, StrongDamping
from .graded import (
    BasisTag,
    GradedOperator,
    GradedVector,
    berezin_integrate_dyad,
    gop_apply,
    gv_dagger,
    gv_pair,
    outer,
    to_matrix,
)
from .grassmann import GrassmannElement as GE
from .report import CheckReport, mat_residual
from .twolevel import DEFAULT_TOL, SystemParams

E_SYMBOL = sp.Symbol("E", positive=True)
SERIES_CUTOFF = 1e-6


# propagators ------------------------------------------------------------------

def _omega_or_raise(p: SystemParams) -> float:
    tl.require_coupling(p)
    d = p.omega_sq_minus_delta_sq
    if d < 0:
        raise StrongDamping(f"|omega|^2 - delta^2 = {d:.6g} < 0: no real propagator frequency")
    return math.sqrt(d)


def _cos_sinc(om: float, t: float) -> tuple[float, float]:
    """``cos(Ωt/2)`` and ``sin(Ωt/2) / (Ω/2)``, by series when ``|Ω t|`` is tiny."""
    x = om * t / 2
    if abs(om * t) < SERIES_CUTOFF:
        x2 = x * x
        return 1 - x2 / 2 + x2 * x2 / 24, t * (1 - x2 / 6 + x2 * x2 / 120)
    return math.cos(x), math.sin(x) / (om / 2)


def propagator(p: SystemParams, t: float, dual: bool = False) -> np.ndarray:
    """``exp(-iHt)`` (or ``exp(-iH^dagger t)``) from ``H^2 = (Ω^2/4) 1``."""
    om = _omega_or_raise(p)
    h = tl.build_hamiltonian(p)
    if dual:
        h = h.conj().T
    c, s = _cos_sinc(om, float(t))
    return c * tl.I2 - 1j * s * h


def propagate(p: SystemParams, times: Sequence[float] | np.ndarray, c0: Sequence[complex]) -> np.ndarray:
    """Unprimed amplitudes ``exp(-iHt) c0`` on a grid of times, shape ``(len(times), 2)``."""
    c0 = np.asarray(c0, dtype=complex)
    h = tl.build_hamiltonian(p)
    om = _omega_or_raise(p)
    hc = h @ c0
    rows = []
    for t in np.asarray(times, dtype=float):
        c, s = _cos_sinc(om, float(t))
        rows.append(c * c0 - 1j * s * hc)
    return np.array(rows, dtype=complex).reshape(-1, 2)


def graded_propagator(energies: tuple[Any, Any], t: Any, flavor: Flavor | str = Flavor.PRIMAL,
                      sig=XI, exp=cmath.exp) -> GradedOperator:
    """``sum_i exp(-i E_i t) |e_i><f_i|`` over the basis of ``flavor``.

    ``exp`` selects the scalar ring: ``cmath.exp`` for numbers, ``sympy.exp``
    for exact expressions (the imaginary unit follows the choice).
    """
    flavor = Flavor(flavor)
    unit = sp.I if exp is sp.exp else 1j
    out = GradedOperator.zero(sig, flavor.tag)
    for i, e in enumerate(energies):
        out = out + GradedOperator.dyad(sig, flavor.tag, flavor.tag.dual, i, i, exp(-unit * e * t))
    return out


# coherent-state evolution ------------------------------------------------------

@dataclass(frozen=True)
class EvolvedState:
    t: Any
    flavor: Flavor
    evolved: GradedVector
    factor: Any
    ratio: Any
    state: CoherentState
    residual: GradedVector  # evolved - factor * state, should vanish
    exact: bool


def _exact_time(t: float) -> sp.Rational:
    return sp.Rational(repr(float(t)))


def evolve_cs(p: SystemParams, flavor: Flavor | str, t: float, exact: bool = False) -> EvolvedState:
    """Evolve ``|ξ>`` (or ``|ξ~>``) to time ``t`` and split off the overall factor.

    The dual family evolves with ``exp(-iH^dagger t)``, whose spectral form
    over the phi basis carries the same real energies.
    """
    tl.require_real_spectrum(p)
    flavor = Flavor(flavor)
    if exact:
        e, tt, one, exp = E_SYMBOL, _exact_time(t), sp.Integer(1), sp.exp
    else:
        e, tt, one, exp = p.E, float(t), 1, cmath.exp
    xi = GE.generator(XI, "xi", one)
    start = coherent_state_closed(flavor, xi)
    u = graded_propagator((-e, e), tt, flavor, XI, exp)
    evolved = gop_apply(u, start.base)

    factor = evolved.comp[0].body
    ratio = -evolved.comp[1].coefficient(["xi"]) / factor
    if exact:
        ratio = sp.simplify(ratio)
    state = coherent_state_closed(flavor, xi * ratio)
    residual = evolved - state.base.lmul(GE.scalar(XI, factor))
    return EvolvedState(tt, flavor, evolved, factor, ratio, state, residual, exact)


def _coefficients(x: Any) -> Iterable[Any]:
    if isinstance(x, GE):
        yield from x.terms.values()
    elif isinstance(x, GradedVector):
        for c in x.comp:
            yield from c.terms.values()
    elif isinstance(x, GradedOperator):
        for row in x.comp:
            for c in row:
                yield from c.terms.values()
    else:
        yield x


def symbolic_residual(x: Any, energy: float) -> float:
    """0.0 when every coefficient simplifies to zero, else the largest magnitude at ``E = energy``."""
    worst = 0.0
    for c in _coefficients(x):
        c = sp.simplify(sp.sympify(c))
        if c == 0:
            continue
        worst = max(worst, abs(complex(sp.N(c.subs(E_SYMBOL, energy)))), 1e-300)
    return worst


def numeric_residual(x: Any) -> float:
    return max((abs(complex(c)) for c in _coefficients(x)), default=0.0)


def stability_check(p: SystemParams, t_grid: Sequence[float] = (0.0, 0.7, 3.1),
                    tol: float = DEFAULT_TOL, exact: bool = True) -> CheckReport:
    """Per time: eigenstate, binormalization, resolution and factor identities,
    plus the numeric propagator identities at the physical energy.

    With ``exact`` the state identities are confirmed symbolically (tolerance
    0); otherwise they are evaluated in floating point against ``tol``.
    """
    tl.require_real_spectrum(p)
    rep = CheckReport(params_echo=p)
    s = tl.spectrum(p)
    basis = eigenbasis(s)
    lad = ladder_operators()
    energy = p.E
    eta = tl.metric_eta(p)
    if exact:
        resid, state_tol, conj, phase = (lambda x: symbolic_residual(x, energy)), 0.0, sp.conjugate, \
            (lambda t: sp.exp(-2 * sp.I * E_SYMBOL * t))
    else:
        resid, state_tol, conj, phase = numeric_residual, tol, (lambda z: z.conjugate()), \
            (lambda t: cmath.exp(-2j * energy * t))
    how = "exactly" if exact else "numerically"
    rep.add("evolution.energies", "E2 = -E1 = Ω/2",
            abs(s.E2 - p.Omega / 2) + abs(s.E1 + p.Omega / 2), tol, "E = Ω/2, E1 = -E, E2 = E")
    for t in t_grid:
        key = f"evolution.t={float(t):g}"
        ev = {f: evolve_cs(p, f, t, exact=exact) for f in Flavor}
        prim, dual = ev[Flavor.PRIMAL], ev[Flavor.DUAL]
        xi_t = GE.generator(XI, "xi", prim.ratio)

        for f, lower in ((Flavor.PRIMAL, lad.b), (Flavor.DUAL, lad.b_tilde)):
            e = ev[f]
            rep.add(f"{key}.factorization.{f.value}", f"evolved state = exp(iEt) CS(exp(-2iEt) ξ) {how}",
                    resid(e.residual), state_tol, "exp(-iHt)|ξ> = exp(iEt)|ξ(t)>")
            rep.add(f"{key}.xi_law.{f.value}", f"extracted parameter ratio equals exp(-2iEt) {how}",
                    resid(e.ratio - phase(e.t)), state_tol, "ξ(t) = exp(-2iEt) ξ")
            rep.add(f"{key}.eigenstate.{f.value}", "the evolved state stays an eigenstate with eigenvalue ξ(t)",
                    resid(gop_apply(lower, e.evolved) - e.evolved.lmul(xi_t)), state_tol,
                    "b|ξ;t> = ξ(t)|ξ;t>, b~|ξ~;t> = ξ(t)|ξ~;t>")

        pair = gv_pair(gv_dagger(prim.evolved), dual.evolved)
        rep.add(f"{key}.binormal", f"<t;ξ|ξ~;t> = 1 {how}", resid(pair - 1), state_tol, "<t;ξ|ξ~;t> = 1")
        r1 = berezin_integrate_dyad(outer(prim.evolved, gv_dagger(dual.evolved)), MEASURE)
        r2 = berezin_integrate_dyad(outer(dual.evolved, gv_dagger(prim.evolved)), MEASURE)
        rep.add(f"{key}.resolution.primal_dual", f"∫dξ*dξ |ξ;t><t;ξ~| = 1 {how}",
                resid(r1 - GradedOperator.identity(XI, BasisTag.PSI)), state_tol, "1 = ∫dξ*dξ |ξ;t><t;ξ~|")
        rep.add(f"{key}.resolution.dual_primal", f"∫dξ*dξ |ξ~;t><t;ξ| = 1 {how}",
                resid(r2 - GradedOperator.identity(XI, BasisTag.PHI)), state_tol, "1 = ∫dξ*dξ |ξ~;t><t;ξ|")
        rep.add(f"{key}.factor_product", f"N*(t) N~(t) = 1 {how}",
                resid(conj(prim.factor) * dual.factor - 1), state_tol, "N*(t) N~(t) = 1")

        num = evolve_cs(p, Flavor.PRIMAL, t)
        rep.add(f"{key}.phase", "|exp(iEt)| = 1", abs(abs(num.factor) - 1), tol, "|exp(iEt)| = 1")
        rep.add(f"{key}.factorization.numeric", "factorization residual at the physical energy",
                numeric_residual(num.residual), tol, "exp(-iHt)|ξ> = exp(iEt)|ξ(t)>")
        for f, dual_flag in ((Flavor.PRIMAL, False), (Flavor.DUAL, True)):
            g = graded_propagator((s.E1, s.E2), float(t), f)
            rep.add(f"{key}.propagator.{f.value}", "spectral graded propagator equals the closed form",
                    mat_residual((to_matrix(g, basis), propagator(p, t, dual_flag))), tol,
                    "exp(-iHt) = cos(Ωt/2) - i sin(Ωt/2) 2H/Ω")
        rep.add(f"{key}.intertwining", "η exp(-iHt) η^-1 = exp(-iH^dagger t)",
                mat_residual((eta @ propagator(p, t) @ np.linalg.inv(eta), propagator(p, t, True))), tol,
                "η exp(-iHt) η^-1 = exp(-iH†t)")
    return rep


# RK4 oracle ---------------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    """Sampled primed amplitudes (and optionally ``C = exp(Γt) C'``)."""

    times: np.ndarray
    samples: np.ndarray
    unprimed: np.ndarray | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.times) != len(self.samples):
            raise ValueError("one sample per time is required")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")


def _rk4_linear(a: np.ndarray, y0: np.ndarray, n: int, h: float, stride: int) -> tuple[list[int], list[np.ndarray]]:
    """Classical RK4 stages for ``y' = a y`` with plain complex scalars."""
    a00, a01, a10, a11 = (complex(a[0, 0]), complex(a[0, 1]), complex(a[1, 0]), complex(a[1, 1]))
    y0_, y1_ = complex(y0[0]), complex(y0[1])
    steps, out = [0], [np.array([y0_, y1_])]

    def f(u: complex, v: complex) -> tuple[complex, complex]:
        return a00 * u + a01 * v, a10 * u + a11 * v

    for k in range(1, n + 1):
        k1 = f(y0_, y1_)
        k2 = f(y0_ + h / 2 * k1[0], y1_ + h / 2 * k1[1])
        k3 = f(y0_ + h / 2 * k2[0], y1_ + h / 2 * k2[1])
        k4 = f(y0_ + h * k3[0], y1_ + h * k3[1])
        y0_ += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y1_ += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if k % stride == 0 or k == n:
            steps.append(k)
            out.append(np.array([y0_, y1_]))
    return steps, out


def ode_integrate(p: SystemParams, c0: Sequence[complex] = (1, 0), t_max: float = 10.0, dt: float = 1e-3,
                  representation: str = "primed", stride: int = 1) -> Trajectory:
    """Fixed-step RK4 for ``i dC'/dt = M C'``; valid for every damping regime.

    The step is shrunk to ``t_max / round(t_max / dt)`` so the grid ends at
    ``t_max`` exactly.
    """
    if not (dt > 0 and math.isfinite(dt)):
        raise ArgumentError(f"dt must be positive, got {dt}")
    if not (t_max > 0 and math.isfinite(t_max)):
        raise ArgumentError(f"t_max must be positive, got {t_max}")
    if stride < 1:
        raise ArgumentError(f"stride must be >= 1, got {stride}")
    if representation not in ("primed", "unprimed"):
        raise ArgumentError(f"unknown representation {representation!r}")
    c0 = np.asarray(c0, dtype=complex)
    if c0.shape != (2,):
        raise ArgumentError("c0 must be a complex 2-vector")
    n = max(1, round(t_max / dt))
    h = t_max / n
    steps, ys = _rk4_linear(-1j * tl.evolution_matrix(p), c0, n, h, stride)
    times = np.array(steps, dtype=float) * h
    samples = np.array(ys, dtype=complex)
    unprimed = None
    if representation == "unprimed":
        unprimed = samples * np.exp(p.Gamma * times)[:, None]
    meta = {"params": p.as_dict(), "t_max": t_max, "dt": h, "steps": n, "stride": stride,
            "method": "rk4", "representation": representation}
    return Trajectory(times, samples, unprimed, meta)


# degenerate case -----------------------------------------------------------------

def _require_degenerate(p: SystemParams) -> None:
    tl.require_coupling(p)
    if p.omega_sq_minus_delta_sq != 0:
        raise NotDegenerate(f"|omega|^2 - delta^2 = {p.omega_sq_minus_delta_sq:.6g} != 0")


def degenerate_amplitudes(p: SystemParams, t: float | np.ndarray) -> np.ndarray:
    """Quoted closed form ``((1 - δt) e^{-Γt}, (iωt/2) e^{-Γt})`` for the start ``(1, 0)``.

    Returned exactly as quoted; it does not satisfy the amplitude equation
    (see ``degenerate_solution``) and the ODE comparison reports that.
    """
    _require_degenerate(p)
    t = np.asarray(t, dtype=float)
    env = np.exp(-p.Gamma * t)
    return np.stack([(1 - p.delta * t) * env, 0.5j * p.omega * t * env], axis=-1)


def degenerate_solution(p: SystemParams, t: float | np.ndarray, c0: Sequence[complex] = (1, 0)) -> np.ndarray:
    """Primed amplitudes at ``Ω = 0``: ``H`` is nilpotent, so ``C'(t) = e^{-Γt} (1 - iHt) c0``.

    For ``c0 = (1, 0)`` this is ``((1 - δt/2) e^{-Γt}, (-iωt/2) e^{-Γt})``.
    """
    _require_degenerate(p)
    c0 = np.asarray(c0, dtype=complex)
    hc = tl.build_hamiltonian(p) @ c0
    t = np.asarray(t, dtype=float)[..., None]
    return np.exp(-p.Gamma * t) * (c0 - 1j * t * hc)


# oracle comparisons ------------------------------------------------------------

def max_deviation(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) if len(a) else 0.0


def rk4_vs_propagator(p: SystemParams, c0: Sequence[complex] = (1, 0), t_max: float = 10.0,
                      dt: float = 1e-3) -> float:
    """Max-norm gap between RK4 unprimed amplitudes and ``exp(-iHt) c0``."""
    tr = ode_integrate(p, c0, t_max, dt, "unprimed")
    return max_deviation(tr.unprimed, propagate(p, tr.times, c0))


def convergence_order(p: SystemParams, c0: Sequence[complex] = (1, 0), t_max: float = 10.0,
                      dt: float = 0.1) -> tuple[float, float, float]:
    """``(order, err(dt), err(dt/2))`` from one step-halving."""
    e1 = rk4_vs_propagator(p, c0, t_max, dt)
    e2 = rk4_vs_propagator(p, c0, t_max, dt / 2)
    return math.log2(e1 / e2), e1, e2


def ode_check(p: SystemParams, t_max: float = 10.0, dt: float = 1e-3, tol: float = 1e-6,
              order_dt: float = 0.1, c0: Sequence[complex] = (1, 0)) -> CheckReport:
    """RK4 against the closed-form propagator; at ``Ω = 0`` also against both degenerate forms."""
    _omega_or_raise(p)
    rep = CheckReport(params_echo=p)
    tr = ode_integrate(p, c0, t_max, dt, "unprimed")
    rep.add("ode.vs_propagator", f"RK4 (dt={dt:g}) vs exp(-iHt) c0, max-norm over [0, {t_max:g}]",
            max_deviation(tr.unprimed, propagate(p, tr.times, c0)), tol, "i dC/dt = H C")
    order, e1, e2 = convergence_order(p, c0, t_max, order_dt)
    rep.add("ode.convergence_order",
            f"|measured order - 4| from dt={order_dt:g} -> {order_dt / 2:g} (errors {e1:.3e}, {e2:.3e})",
            abs(order - 4.0), 0.3, "RK4 global error O(dt^4)")
    if p.regime == "degenerate":
        quoted = degenerate_amplitudes(p, tr.times)
        exact = degenerate_solution(p, tr.times, c0)
        rep.add("ode.degenerate_quoted", "quoted Ω=0 amplitudes ((1-δt), iωt/2) e^{-Γt} vs RK4",
                max_deviation(tr.samples, quoted), tol, "C'a = (1-δt)e^{-Γt}, C'b = (iωt/2)e^{-Γt}")
        rep.add("ode.degenerate_exact", "e^{-Γt}(1 - iHt) c0 vs RK4", max_deviation(tr.samples, exact), tol,
                "exp(-iHt) = 1 - iHt at Ω = 0")
    return rep


def evolution_report(p: SystemParams, tol: float = DEFAULT_TOL,
                     t_grid: Sequence[float] = (0.0, 0.7, 3.1), exact: bool = True) -> CheckReport:
    rep = stability_check(p, t_grid, tol, exact)
    for t1, t2 in ((0.3, 1.1), (2.0, -2.0)):
        rep.add(f"propagator.group.{t1:g}+{t2:g}", "exp(-iH(t1+t2)) = exp(-iHt1) exp(-iHt2)",
                mat_residual((propagator(p, t1 + t2), propagator(p, t1) @ propagator(p, t2))), tol,
                "exp(-iH(t1+t2)) = exp(-iHt1)exp(-iHt2)")
    return rep

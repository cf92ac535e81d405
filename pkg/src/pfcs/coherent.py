"""Displacement operators and the bi-normal pseudo-fermionic coherent states.

The ladder operators are represented exactly as eigenbasis dyads,

    b = |psi_1><phi_2|,   b# = |psi_2><phi_1|,
    b~ = |phi_1><psi_2|,  b~#' = |phi_2><psi_1|,

so every identity here is an exact statement about Grassmann polynomials.
``ladder_report`` ties the dyads back to the explicit 2x2 matrices of the
physical system by numeric substitution of the eigenvectors.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import twolevel as tl
from .graded import (
    BasisTag,
    GradedBra,
    GradedOperator,
    GradedVector,
    berezin_integrate_dyad,
    gb_canonicalize,
    gop_apply,
    gop_compose,
    gop_dagger,
    gv_canonicalize,
    gv_dagger,
    gv_pair,
    outer,
    to_matrix,
    twist,
)
from .errors import NonNilpotentError
from .grassmann import GeneratorSignature, GrassmannElement as GE, g_exp, g_star, g_substitute
from .report import CheckReport, mat_residual
from .twolevel import DEFAULT_TOL, SystemParams

XI = GeneratorSignature.complex_pairs("xi")
XI_ZETA = GeneratorSignature.complex_pairs("xi", "zeta")
MEASURE = ("xi*", "xi")  # ∫dξ* dξ, with dξ applied first

PSI, PHI = BasisTag.PSI, BasisTag.PHI


class Flavor(enum.Enum):
    PRIMAL = "primal"
    DUAL = "dual"

    @property
    def tag(self) -> BasisTag:
        return PSI if self is Flavor.PRIMAL else PHI


class Displacement(enum.Enum):
    D = "D"
    D_SHARP = "D_sharp"
    D_TILDE = "D_tilde"


class Ladder(NamedTuple):
    b: GradedOperator
    b_sharp: GradedOperator
    b_tilde: GradedOperator
    b_tilde_sharp: GradedOperator


def ladder_operators(sig: GeneratorSignature = XI) -> Ladder:
    return Ladder(
        GradedOperator.dyad(sig, PSI, PHI, 0, 1),
        GradedOperator.dyad(sig, PSI, PHI, 1, 0),
        GradedOperator.dyad(sig, PHI, PSI, 0, 1),
        GradedOperator.dyad(sig, PHI, PSI, 1, 0),
    )


def eigenbasis(s: tl.Spectrum) -> dict[BasisTag, tuple[np.ndarray, np.ndarray]]:
    return {PSI: s.psi, PHI: s.phi}


def parameter(sig: GeneratorSignature = XI, name: str = "xi") -> GE:
    return GE.generator(sig, name)


# operator exponentials --------------------------------------------------------

def gop_exp(x: GradedOperator) -> GradedOperator:
    """Series exponential of a graded operator whose coefficients have no body.

    Each power raises the minimal Grassmann degree, so the series stops
    after at most ``n + 1`` terms; it is cut as soon as a term is exactly 0.
    """
    if x.right_tag is not x.left_tag.dual:
        raise ValueError("exponential needs an operator mapping a basis into itself")
    if any(not x.comp[i][j].body == 0 for i in range(2) for j in range(2)):
        raise NonNilpotentError("operator exponential requires body-free coefficients")
    result = GradedOperator.identity(x.signature, x.left_tag)
    term = result
    for k in range(1, x.signature.n + 2):
        term = gop_compose(term, x).map_elements(lambda c, k=k: c / k)
        if all(c.is_zero() for row in term.comp for c in row):
            break
        result = result + term
    return result


def displacement_exponent(which: Displacement, param: GE) -> GradedOperator:
    lad = ladder_operators(param.signature)
    star = g_star(param)
    if which is Displacement.D:
        return lad.b_sharp.rmul(param) - lad.b.lmul(star)
    if which is Displacement.D_SHARP:
        return lad.b.lmul(star) - lad.b_sharp.rmul(param)
    return lad.b_tilde_sharp.rmul(param) - lad.b_tilde.lmul(star)


def displacement_closed_form(which: Displacement, param: GE) -> GradedOperator:
    """The truncated expansion ``1 ± (raise·ξ - ξ*·lower) + (raise·lower - 1/2) ξ*ξ``."""
    sig = param.signature
    lad = ladder_operators(sig)
    star = g_star(param)
    if which is Displacement.D_TILDE:
        lower, rise, one = lad.b_tilde, lad.b_tilde_sharp, GradedOperator.identity(sig, PHI)
    else:
        lower, rise, one = lad.b, lad.b_sharp, GradedOperator.identity(sig, PSI)
    linear = rise.rmul(param) - lower.lmul(star)
    if which is Displacement.D_SHARP:
        linear = -linear
    quad = (gop_compose(rise, lower) - one.lmul(GE.scalar(sig, 0.5))).rmul(star * param)
    return one + linear + quad


def displacement(p: SystemParams, which: Displacement | str, param: GE | None = None) -> GradedOperator:
    """``exp(exponent)`` by the operator series; the regime of ``p`` is validated."""
    tl.require_real_spectrum(p)
    which = Displacement(which)
    param = parameter() if param is None else param
    return gop_exp(displacement_exponent(which, param))


# coherent states ------------------------------------------------------------

@dataclass(frozen=True)
class CoherentState:
    base: GradedVector
    flavor: Flavor
    normalization_factor: GE
    parameter: GE

    @property
    def bra(self) -> GradedBra:
        return gv_dagger(self.base)


def normalization(param: GE) -> GE:
    return g_exp(-(g_star(param) * param) / 2)


def coherent_state_closed(flavor: Flavor | str, param: GE | None = None) -> CoherentState:
    """``exp(-ξ*ξ/2) (|e_1> - ξ|e_2>)`` written down directly."""
    flavor = Flavor(flavor)
    param = parameter() if param is None else param
    n = normalization(param)
    base = gv_canonicalize(flavor.tag, [(n, 0, None), (-(n * param), 1, None)], param.signature)
    return CoherentState(base, flavor, n, param)


def coherent_state(p: SystemParams, flavor: Flavor | str = Flavor.PRIMAL, param: GE | None = None) -> CoherentState:
    """Displace the ground state: ``D(ξ)|psi_1>`` or ``D~(ξ)|phi_1>``."""
    flavor = Flavor(flavor)
    param = parameter() if param is None else param
    which = Displacement.D if flavor is Flavor.PRIMAL else Displacement.D_TILDE
    d = displacement(p, which, param)
    ground = GradedVector.basis(param.signature, flavor.tag, 0)
    return CoherentState(gop_apply(d, ground), flavor, normalization(param), param)


def bra_closed(param: GE | None = None) -> GradedBra:
    """``exp(-ξ*ξ/2) (<psi_1| + ξ* <psi_2|)``."""
    param = parameter() if param is None else param
    n = normalization(param)
    return gb_canonicalize(PSI, [(None, 0, n), (n * g_star(param), 1, None)], param.signature)


def bra_times_matrix(br: GradedBra, m: np.ndarray, s: tl.Spectrum) -> GradedBra:
    """``<w| M`` re-expanded on the biorthonormal partner basis.

    ``<e_i| M = sum_k <e_i|M|e_k> <f_k|``; coefficients are moved across
    the new bra with the usual Koszul rule.
    """
    vecs = np.column_stack(s.psi if br.tag is PSI else s.phi)
    c = vecs.conj().T @ m @ vecs
    sig = br.signature
    terms = []
    for i in range(2):
        for k in range(2):
            if c[i, k] == 0:
                continue
            # <e_i| nu_i M  ->  twist(nu_i, i) <e_i| M  ->  sum_k twist(nu_i, i) c_ik <f_k|
            terms.append((complex(c[i, k]) * twist(br.comp[i], i), k, None))
    return gb_canonicalize(br.tag.dual, terms, sig)


def eta_bra(p: SystemParams, state: CoherentState) -> GradedBra:
    """``<ξ| eta``, the pseudo-adjoint bra of a primal state."""
    return bra_times_matrix(state.bra, tl.metric_eta(p), tl.spectrum(p))


# inner products -------------------------------------------------------------

def gram_closed_form(gram: np.ndarray, param: GE) -> GE:
    """``G11 + (G22 - G11) ξ*ξ - 2i Im(ξ G12)`` with ``2i Im z = z - z*``."""
    star = g_star(param)
    z = param * complex(gram[0, 1])
    return complex(gram[0, 0]) + complex(gram[1, 1] - gram[0, 0]) * (star * param) - (z - g_star(z))


def cross_closed_form(sig: GeneratorSignature = XI_ZETA) -> GE:
    """``ξ*ζ + (2 - ξ*ξ)(2 - ζ*ζ)/4``."""
    xi, zeta = GE.generator(sig, "xi"), GE.generator(sig, "zeta")
    return g_star(xi) * zeta + 0.25 * ((2 - g_star(xi) * xi) * (2 - g_star(zeta) * zeta))


class InnerProducts(NamedTuple):
    xi_xi: GE
    tilde_tilde: GE
    tilde_xi: GE
    eta_scaled: GE
    xi_zeta_tilde: GE
    report: CheckReport


def inner_products(p: SystemParams, tol: float = DEFAULT_TOL) -> InnerProducts:
    s = tl.spectrum(p)
    rep = CheckReport(params_echo=p)
    ket = coherent_state(p, Flavor.PRIMAL)
    tket = coherent_state(p, Flavor.DUAL)
    xi = parameter()

    xi_xi = gv_pair(ket.bra, ket.base, s.gram_psi())
    rep.add("overlap.primal_norm", "<ξ|ξ> matches G11 + (G22-G11)ξ*ξ - 2i Im(ξ G12)",
            (xi_xi - gram_closed_form(s.gram_psi(), xi)).max_abs(), tol,
            "<ξ|ξ> = <ψ1|ψ1> + (<ψ2|ψ2> - <ψ1|ψ1>)ξ*ξ - 2i Im(ξ<ψ1|ψ2>)")
    tt = gv_pair(tket.bra, tket.base, s.gram_phi())
    rep.add("overlap.dual_norm", "<ξ~|ξ~> matches the same form over the phi Gram matrix",
            (tt - gram_closed_form(s.gram_phi(), xi)).max_abs(), tol,
            "<ξ~|ξ~> = <φ1|φ1> + (<φ2|φ2> - <φ1|φ1>)ξ*ξ - 2i Im(ξ<φ1|φ2>)")
    tx = gv_pair(tket.bra, ket.base)
    rep.add("overlap.binormal", "<ξ~|ξ> = 1 exactly", (tx - 1).max_abs(), 0.0, "<ξ~|ξ> = 1")
    eta_scaled = (p.abs_omega / p.Omega) * gv_pair(eta_bra(p, ket), ket.base)
    rep.add("overlap.eta_form", "(|ω|/Ω) <ξ|η|ξ> = 1", (eta_scaled - 1).max_abs(), tol,
            "(|ω|/Ω)<ξ|η|ξ> = 1")

    xi4, zeta4 = parameter(XI_ZETA, "xi"), parameter(XI_ZETA, "zeta")
    cross = gv_pair(coherent_state(p, Flavor.PRIMAL, xi4).bra, coherent_state(p, Flavor.DUAL, zeta4).base)
    rep.add("overlap.cross", "<ξ|ζ~> = ξ*ζ + (2-ξ*ξ)(2-ζ*ζ)/4 coefficient-exactly",
            (cross - cross_closed_form()).max_abs(), 0.0, "<ξ|ζ~> = ξ*ζ + (2-ξ*ξ)(2-ζ*ζ)/4")
    # collapse zeta onto xi: the cross product becomes the binormal pairing
    collapsed = g_substitute(cross, {"zeta": parameter(XI, "xi"), "zeta*": parameter(XI, "xi*"),
                                     "xi": parameter(XI, "xi"), "xi*": parameter(XI, "xi*")}, XI)
    rep.add("overlap.cross_diagonal", "<ξ|ζ~> at ζ = ξ equals 1", (collapsed - 1).max_abs(), 0.0,
            "<ξ|ξ~> = 1")
    return InnerProducts(xi_xi, tt, tx, eta_scaled, cross, rep)


# checks ---------------------------------------------------------------------

def _exact_residual(a: GradedOperator | GradedVector, b: GradedOperator | GradedVector) -> float:
    return (a - b).max_abs()


def ladder_report(p: SystemParams, tol: float = DEFAULT_TOL) -> CheckReport:
    """The exact dyads reproduce the explicit ladder matrices after substitution."""
    s = tl.spectrum(p)
    basis = eigenbasis(s)
    lad = ladder_operators()
    rep = CheckReport(params_echo=p)
    for name, op, mat in (("b", lad.b, tl.op_b(p)), ("b_sharp", lad.b_sharp, tl.op_b_sharp(p)),
                          ("b_tilde", lad.b_tilde, tl.op_b_tilde(p)),
                          ("b_tilde_sharp", lad.b_tilde_sharp, tl.op_b_tilde_sharp(p)),
                          ("b_dagger", gop_dagger(lad.b), tl.op_b_dagger(p))):
        rep.add(f"dyads.{name}", f"eigenbasis dyad of {name} equals its matrix",
                mat_residual((to_matrix(op, basis), mat)), tol, f"{name} as eigenbasis dyad")
    one = GradedOperator.identity(XI, PSI)
    rep.add("dyads.graded_anticommutator", "{b, b#} = 1 on graded operators",
            _exact_residual(gop_compose(lad.b, lad.b_sharp) + gop_compose(lad.b_sharp, lad.b), one), 0.0,
            "{b, b#} = 1")
    rep.add("dyads.graded_b_squared", "b∘b = 0 on graded operators",
            gop_compose(lad.b, lad.b).max_abs(), 0.0, "b^2 = 0")
    return rep


def pseudo_unitarity_check(p: SystemParams, tol: float = DEFAULT_TOL) -> CheckReport:
    tl.require_real_spectrum(p)
    rep = CheckReport(params_echo=p)
    xi = parameter()
    one_psi, one_phi = GradedOperator.identity(XI, PSI), GradedOperator.identity(XI, PHI)
    d = displacement(p, Displacement.D)
    ds = displacement(p, Displacement.D_SHARP)
    dt = displacement(p, Displacement.D_TILDE)
    dt_dag = gop_dagger(dt)
    for which, op in ((Displacement.D, d), (Displacement.D_SHARP, ds), (Displacement.D_TILDE, dt)):
        rep.add(f"displacement.series_vs_closed.{which.value}",
                f"series exponential of {which.value} equals its truncated expansion",
                _exact_residual(op, displacement_closed_form(which, xi)), 0.0,
                "D = 1 + b#ξ - ξ*b + (b#b - 1/2)ξ*ξ")
    rep.add("displacement.pseudo_unitary_left", "D# D = 1", _exact_residual(gop_compose(ds, d), one_psi), 0.0,
            "D#(ξ)D(ξ) = 1")
    rep.add("displacement.pseudo_unitary_right", "D D# = 1", _exact_residual(gop_compose(d, ds), one_psi), 0.0,
            "D(ξ)D#(ξ) = 1")
    rep.add("displacement.bi_unitary_left", "D D~^dagger = 1",
            _exact_residual(gop_compose(d, dt_dag), one_psi), 0.0, "D(ξ)D~†(ξ) = 1")
    rep.add("displacement.bi_unitary_right", "D~^dagger D = 1",
            _exact_residual(gop_compose(dt_dag, d), one_psi), 0.0, "D~†(ξ)D(ξ) = 1")
    lad = ladder_operators()
    shifted = gop_compose(gop_compose(ds, lad.b), d)
    rep.add("displacement.shift", "D# b D = b + ξ", _exact_residual(shifted, lad.b + one_psi.lmul(xi)), 0.0,
            "D#(ξ) b D(ξ) = b + ξ")
    dt_sharp = gop_exp(-displacement_exponent(Displacement.D_TILDE, xi))
    shifted_t = gop_compose(gop_compose(dt_sharp, lad.b_tilde), dt)
    rep.add("displacement.shift_dual", "D~#' b~ D~ = b~ + ξ",
            _exact_residual(shifted_t, lad.b_tilde + one_phi.lmul(xi)), 0.0, "D~#'(ξ) b~ D~(ξ) = b~ + ξ")
    zero = GE.zero(XI)
    rep.add("displacement.at_zero", "D(0) = 1",
            _exact_residual(gop_exp(displacement_exponent(Displacement.D, zero)), one_psi), 0.0, "D(0) = 1")
    return rep


def eigenstate_check(p: SystemParams, tol: float = DEFAULT_TOL) -> CheckReport:
    tl.require_real_spectrum(p)
    rep = CheckReport(params_echo=p)
    lad = ladder_operators()
    for flavor, lower, label in ((Flavor.PRIMAL, lad.b, "b|ξ> = ξ|ξ>"), (Flavor.DUAL, lad.b_tilde, "b~|ξ~> = ξ|ξ~>")):
        cs = coherent_state(p, flavor)
        rep.add(f"coherent.eigenstate.{flavor.value}", label,
                _exact_residual(gop_apply(lower, cs.base), cs.base.lmul(cs.parameter)), 0.0, label)
        rep.add(f"coherent.expansion.{flavor.value}", "D|e1> equals exp(-ξ*ξ/2)(|e1> - ξ|e2>)",
                _exact_residual(cs.base, coherent_state_closed(flavor).base), 0.0,
                "|ξ> = exp(-ξ*ξ/2)(|ψ1> - ξ|ψ2>)")
    ket = coherent_state(p, Flavor.PRIMAL)
    diff = [(a - b).max_abs() for a, b in zip(ket.bra.comp, bra_closed().comp)]
    rep.add("coherent.bra", "<ξ| equals exp(-ξ*ξ/2)(<ψ1| + ξ*<ψ2|)", max(diff), 0.0,
            "<ξ| = exp(-ξ*ξ/2)(<ψ1| + ξ*<ψ2|)")
    return rep


class Resolution(NamedTuple):
    primal_dual: GradedOperator
    dual_primal: GradedOperator
    hermitian: GradedOperator
    eta_projector: GradedOperator
    deviation_hermitian: float
    deviation_eta: float
    report: CheckReport


def resolution_of_identity(p: SystemParams, tol: float = DEFAULT_TOL) -> Resolution:
    s = tl.spectrum(p)
    basis = eigenbasis(s)
    rep = CheckReport(params_echo=p)
    ket, tket = coherent_state(p, Flavor.PRIMAL), coherent_state(p, Flavor.DUAL)
    r1 = berezin_integrate_dyad(outer(ket.base, tket.bra), MEASURE)
    r2 = berezin_integrate_dyad(outer(tket.base, ket.bra), MEASURE)
    rep.add("resolution.primal_dual", "∫dξ*dξ |ξ><ξ~| = 1 exactly",
            _exact_residual(r1, GradedOperator.identity(XI, PSI)), 0.0, "1 = ∫dξ*dξ |ξ><ξ~|")
    rep.add("resolution.dual_primal", "∫dξ*dξ |ξ~><ξ| = 1 exactly",
            _exact_residual(r2, GradedOperator.identity(XI, PHI)), 0.0, "1 = ∫dξ*dξ |ξ~><ξ|")
    m1, m2 = to_matrix(r1, basis), to_matrix(r2, basis)
    rep.add("resolution.numeric", "both resolutions equal the 2x2 identity after substitution",
            mat_residual((m1, tl.I2), (m2, tl.I2)), tol, "1 = ∫|ξ><ξ~| = ∫|ξ~><ξ|")
    rep.add("resolution.sides_agree", "the two resolutions agree with each other", mat_residual((m1, m2)), tol,
            "∫|ξ><ξ~| = ∫|ξ~><ξ|")

    herm = berezin_integrate_dyad(outer(ket.base, ket.bra), MEASURE)
    eta_proj = berezin_integrate_dyad(outer(ket.base, eta_bra(p, ket)), MEASURE)
    mh, me = to_matrix(herm, basis), to_matrix(eta_proj, basis)
    eta = tl.metric_eta(p)
    ratio = p.Omega / p.abs_omega
    dev_h = mat_residual((mh, tl.I2))
    dev_e = mat_residual((me, tl.I2))
    rep.add("resolution.hermitian_projector",
            f"∫|ξ><ξ| = (Ω/|ω|) η^-1 (deviation from 1: {dev_h:.3e})",
            mat_residual((mh, ratio * np.linalg.inv(eta))), tol, "∫dξ*dξ |ξ><ξ| ≠ 1")
    rep.add("resolution.eta_projector",
            f"∫|ξ> <ξ|η = (Ω/|ω|) 1 (deviation from 1: {dev_e:.3e})",
            mat_residual((me, ratio * tl.I2)), tol, "∫dξ*dξ |ξ>_η<ξ| ≠ 1")
    return Resolution(r1, r2, herm, eta_proj, dev_h, dev_e, rep)


def coherent_report(p: SystemParams, tol: float = DEFAULT_TOL) -> CheckReport:
    rep = ladder_report(p, tol)
    rep.extend(pseudo_unitarity_check(p, tol))
    rep.extend(eigenstate_check(p, tol))
    rep.extend(inner_products(p, tol).report)
    rep.extend(resolution_of_identity(p, tol).report)
    return rep

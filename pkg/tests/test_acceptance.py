"""One test per acceptance criterion; each records a PASS/FAIL line for the summary."""

import json
import math

import numpy as np
import pytest

from pfcs import coherent as co
from pfcs import evolution as ev
from pfcs import twolevel as tl
from pfcs.cli import main
from pfcs.errors import StrongDamping
from pfcs.graded import BasisTag
from pfcs.twolevel import SystemParams
from acceptance_log import record

CANON = SystemParams(1.6, 0.4, 1)
GRID_RATIOS = np.linspace(0.0, 0.99, 10)
GRID_ARGS = np.linspace(0.0, 2 * math.pi, 8, endpoint=False)


@pytest.fixture(scope="module")
def grid_reports():
    out = []
    for r in GRID_RATIOS:
        for a in GRID_ARGS:
            p = SystemParams.from_ratio(float(r), float(a))
            out.append((p, tl.system_report(p)))
    return out


def worst(reports, prefixes):
    return max(e.residual for _, rep in reports for e in rep.entries if e.check_id.startswith(prefixes))


def test_criterion_1_algebra_on_grid(grid_reports):
    res = worst(grid_reports, ("algebra.", "ladder.", "number.", "dual_algebra."))
    ok = record("1", res <= 1e-12, f"pseudo-fermion algebra, worst residual {res:.2e} over {len(grid_reports)} points")
    assert ok


def test_criterion_2_factorization_and_pseudo_hermiticity(grid_reports):
    res = worst(grid_reports, ("factorization.", "pseudo_hermiticity.", "bsharp.closed_vs_metric"))
    ok = record("2", res <= 1e-12, f"H = Ω(b#b - 1/2), H† = ηHη⁻¹, closed vs metric b#: worst {res:.2e}")
    assert ok


def test_criterion_3_biorthonormality_and_metric(grid_reports):
    res = worst(grid_reports, ("spectrum.", "metric."))
    ok = record("3", res <= 1e-12, f"biorthonormality, completeness, η₊ decomposition: worst {res:.2e}")
    assert ok


def test_criterion_4_displacement():
    rep = co.pseudo_unitarity_check(CANON)
    ids = ["displacement.series_vs_closed.D", "displacement.pseudo_unitary_left",
           "displacement.pseudo_unitary_right", "displacement.bi_unitary_left"]
    res = max(rep[i].residual for i in ids)
    ok = record("4", res == 0.0 and all(rep[i].tol == 0.0 for i in ids),
                f"series = truncated expansion, D#D = DD# = 1, DD~† = 1: exact residual {res}")
    assert ok


def test_criterion_5_eigenstates():
    rep = co.eigenstate_check(CANON)
    res = max(rep["coherent.eigenstate.primal"].residual, rep["coherent.eigenstate.dual"].residual)
    ok = record("5", res == 0.0, f"b|ξ> = ξ|ξ>, b~|ξ~> = ξ|ξ~>: exact residual {res}")
    assert ok


def test_criterion_6_overcompleteness():
    res = co.resolution_of_identity(CANON)
    ip = co.inner_products(CANON)
    exact_ok = (res.primal_dual == co.GradedOperator.identity(co.XI, BasisTag.PSI)
                and res.dual_primal == co.GradedOperator.identity(co.XI, BasisTag.PHI))
    # the Hermitian and η-weighted integrals equal their closed forms, which are not 1
    differs = (res.report["resolution.hermitian_projector"].passed and res.report["resolution.eta_projector"].passed
               and res.deviation_hermitian > 1e-3 and res.deviation_eta > 1e-3)
    cross = ip.report["overlap.cross"].residual == 0.0
    binorm = ip.tilde_xi == 1
    ok = record("6", exact_ok and differs and cross and binorm,
                f"resolutions exact={exact_ok}, non-identity deviations {res.deviation_hermitian:.3f}/"
                f"{res.deviation_eta:.3f}, cross exact={cross}, <ξ~|ξ>=1: {binorm}")
    assert ok


def test_criterion_7_evolution_stability():
    rep = ev.stability_check(CANON, (0.0, 0.7, 3.1))
    exact = [e for e in rep.entries if e.tol == 0.0]
    phase = max(e.residual for e in rep.entries if e.check_id.endswith(".phase"))
    ok = record("7", rep.passed and all(e.residual == 0.0 for e in exact) and phase <= 1e-12,
                f"{len(exact)} exact identities at t in (0, 0.7, 3.1) all zero; max ||factor|-1| {phase:.1e}")
    assert ok


def test_criterion_8_hermitian_limit():
    worst_eta = worst_b = 0.0
    slotwise = True
    for a in GRID_ARGS:
        p = SystemParams.from_ratio(0.0, float(a))
        worst_eta = max(worst_eta, float(np.max(np.abs(tl.metric_eta(p) - tl.I2))))
        worst_b = max(worst_b, float(np.max(np.abs(tl.op_b_sharp(p) - tl.op_b_dagger(p)))))
        s = tl.spectrum(p)
        ket, tket = co.coherent_state(p, "primal"), co.coherent_state(p, "dual")
        same_coeffs = all(ket.base.comp[k] == tket.base.comp[k] for k in range(2))
        same_basis = float(np.max(np.abs(np.array(s.psi) - np.array(s.phi)))) <= 1e-14
        slotwise = slotwise and same_coeffs and same_basis
    ok = record("8", worst_eta <= 1e-14 and worst_b <= 1e-14 and slotwise,
                f"δ=0: |η-1| {worst_eta:.1e}, |b#-b†| {worst_b:.1e}, primal ≡ dual slotwise: {slotwise}")
    assert ok


def test_criterion_9_charge_and_pt(grid_reports):
    c_vs_h = worst(grid_reports, ("symmetry.charge_vs_h",))
    comm = worst(grid_reports, ("symmetry.charge_commutes",))
    pt = worst(grid_reports, ("symmetry.pt_commutes",))
    ok = record("9", max(c_vs_h, comm, pt) <= 1e-12,
                f"C = -(2/Ω)H {c_vs_h:.1e}, [C,H] {comm:.1e}, P conj(H) P = H {pt:.1e}")
    assert ok


def test_criterion_10_ode_oracle():
    dev = ev.rk4_vs_propagator(CANON, (1, 0), 10.0, 1e-3)
    order, _, _ = ev.convergence_order(CANON, (1, 0), 10.0, 0.1)
    tr = ev.ode_integrate(SystemParams(2, 0, 1), (1, 0), 5.0, 1e-4)
    quoted = ev.degenerate_amplitudes(SystemParams(2, 0, 1), tr.times)
    degen = float(np.max(np.abs(tr.samples - quoted)))
    ok = record("10", dev <= 1e-6 and abs(order - 4) <= 0.3 and degen <= 1e-6,
                f"RK4 vs propagator {dev:.1e}, order {order:.3f}, quoted Ω=0 form vs RK4 {degen:.3e}")
    assert ok


def test_criterion_10_exact_degenerate_solution():
    p = SystemParams(2, 0, 1)
    tr = ev.ode_integrate(p, (1, 0), 5.0, 1e-4)
    exact = ev.degenerate_solution(p, tr.times)
    degen = float(np.max(np.abs(tr.samples - exact)))
    ok = record("10 (exact Ω=0 solution)", degen <= 1e-6, f"e^(-Γt)(1 - iHt) vs RK4 {degen:.1e}")
    assert ok


def test_criterion_11_strong_damping(capsys):
    p = SystemParams(3, 0, 1)
    paths = {
        "spectrum": lambda: tl.spectrum(p), "op_b": lambda: tl.op_b(p), "op_b_sharp": lambda: tl.op_b_sharp(p),
        "symmetry_operators": lambda: tl.symmetry_operators(p), "system_report": lambda: tl.system_report(p),
        "Omega": lambda: p.Omega, "displacement": lambda: co.displacement(p, "D"),
        "coherent_state": lambda: co.coherent_state(p), "coherent_report": lambda: co.coherent_report(p),
        "propagator": lambda: ev.propagator(p, 1.0), "evolve_cs": lambda: ev.evolve_cs(p, "primal", 1.0),
        "stability_check": lambda: ev.stability_check(p), "ode_check": lambda: ev.ode_check(p),
    }
    refused = []
    for name, fn in paths.items():
        try:
            fn()
        except StrongDamping:
            refused.append(name)
    codes = []
    for cmd in ("verify", "sweep", "evolve", "ode-check"):
        extra = ["--grid-delta-steps", "1", "--grid-arg-steps", "1"] if cmd == "sweep" else []
        code = main([cmd, "--gamma-a", "3", "--gamma-b", "0", "--omega-re", "1", *extra])
        out = capsys.readouterr().out
        codes.append(code == 2 and json.loads(out)["error"] == "StrongDamping")
    ok = record("11", len(refused) == len(paths) and all(codes),
                f"{len(refused)}/{len(paths)} API paths raise StrongDamping; CLI exit 2 on {sum(codes)}/4 commands")
    assert ok

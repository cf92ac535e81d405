import cmath
import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from pfcs import evolution as ev
from pfcs import twolevel as tl
from pfcs.coherent import Flavor, coherent_state
from pfcs.errors import ArgumentError, NotDegenerate, StrongDamping
from pfcs.twolevel import SystemParams

CANON = SystemParams(1.6, 0.4, 1)
DEGEN = SystemParams(2, 0, 1)  # δ = 1 = |ω|, Γ = 0.5
RABI = SystemParams(0, 0, 1)


def expm_by_eig(h, t):
    w, v = np.linalg.eig(h)
    return v @ np.diag(np.exp(-1j * w * t)) @ np.linalg.inv(v)


# propagator -------------------------------------------------------------------

def test_propagator_at_zero_is_identity():
    assert np.array_equal(ev.propagator(CANON, 0.0), tl.I2)


@given(st.floats(-20, 20), st.floats(0.0, 0.95), st.floats(0, 2 * math.pi))
def test_propagator_matches_eigendecomposition(t, r, a):
    p = SystemParams.from_ratio(r, a)
    h = tl.build_hamiltonian(p)
    assert np.allclose(ev.propagator(p, t), expm_by_eig(h, t), atol=1e-11)
    assert np.allclose(ev.propagator(p, t, dual=True), expm_by_eig(h.conj().T, t), atol=1e-11)


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_group_property(t1, t2):
    u = ev.propagator(CANON, t1 + t2)
    assert np.max(np.abs(u - ev.propagator(CANON, t1) @ ev.propagator(CANON, t2))) <= 1e-12


def test_inverse():
    assert np.max(np.abs(ev.propagator(CANON, 2.3) @ ev.propagator(CANON, -2.3) - tl.I2)) <= 1e-12


def test_propagator_on_eigenvector():
    s = tl.spectrum(CANON)
    t = 1.7
    assert np.max(np.abs(ev.propagator(CANON, t) @ s.psi2 - cmath.exp(-1j * s.E2 * t) * s.psi2)) <= 1e-12


def test_degenerate_propagator_is_linear_in_t():
    h = tl.build_hamiltonian(DEGEN)
    assert np.allclose(h @ h, 0, atol=1e-15)
    assert np.allclose(ev.propagator(DEGEN, 3.0), tl.I2 - 3j * h, atol=1e-15)


def test_series_branch_is_continuous():
    t = 1e-7
    assert np.allclose(ev.propagator(CANON, t), expm_by_eig(tl.build_hamiltonian(CANON), t), atol=1e-15)


def test_intertwining():
    eta = tl.metric_eta(CANON)
    lhs = eta @ ev.propagator(CANON, 2.0) @ np.linalg.inv(eta)
    assert np.max(np.abs(lhs - ev.propagator(CANON, 2.0, dual=True))) <= 1e-12


def test_propagator_strong_damping():
    with pytest.raises(StrongDamping):
        ev.propagator(SystemParams(3, 0, 1), 1.0)


# coherent-state evolution -------------------------------------------------------

def test_evolve_at_zero_is_identity():
    e = ev.evolve_cs(CANON, "primal", 0.0)
    assert e.factor == 1 and e.ratio == 1
    assert e.evolved == coherent_state(CANON, "primal").base


@pytest.mark.parametrize("flavor", list(Flavor))
def test_factor_and_ratio_numeric(flavor):
    t = 2.5
    e = ev.evolve_cs(CANON, flavor, t)
    assert abs(e.factor - cmath.exp(0.4j * t)) <= 1e-15
    assert abs(e.ratio - cmath.exp(-0.8j * t)) <= 1e-15
    assert abs(abs(e.factor) - 1) <= 1e-12
    assert ev.numeric_residual(e.residual) <= 1e-15


def test_exact_factor_and_ratio():
    e = ev.evolve_cs(CANON, "primal", 0.7, exact=True)
    E = ev.E_SYMBOL
    assert sp.simplify(e.factor - sp.exp(sp.I * E * sp.Rational(7, 10))) == 0
    assert sp.simplify(e.ratio - sp.exp(-sp.I * E * sp.Rational(7, 5))) == 0
    assert ev.symbolic_residual(e.residual, CANON.E) == 0.0


def test_symbolic_residual_reports_nonzero():
    assert ev.symbolic_residual(sp.exp(sp.I * ev.E_SYMBOL) - 1, 0.4) == pytest.approx(abs(cmath.exp(0.4j) - 1))


def test_stability_canonical_grid():
    rep = ev.stability_check(CANON, (0.0, 0.7, 3.1))
    assert rep.passed, [(e.check_id, e.residual) for e in rep.failures()]
    exact = [e for e in rep.entries if e.tol == 0.0]
    assert len(exact) == 3 * 10 and all(e.residual == 0.0 for e in exact)


def test_stability_hermitian_limit():
    assert ev.stability_check(SystemParams(0.2, 0.2, 1j), (0.0, 1.3)).passed


@settings(max_examples=10)
@given(st.floats(0.0, 0.95), st.floats(0, 2 * math.pi), st.floats(0, 10))
def test_numeric_stability_everywhere(r, a, t):
    rep = ev.stability_check(SystemParams.from_ratio(r, a), (t,), exact=False)
    assert rep.passed, [(e.check_id, e.residual) for e in rep.failures()]


def test_evolve_regime():
    with pytest.raises(StrongDamping):
        ev.evolve_cs(SystemParams(3, 0, 1), "primal", 1.0)
    with pytest.raises(StrongDamping):
        ev.stability_check(SystemParams(3, 0, 1))


# RK4 oracle ----------------------------------------------------------------------

def test_rabi_oscillation():
    tr = ev.ode_integrate(RABI, (1, 0), 10.0, 1e-3)
    assert np.max(np.abs(np.abs(tr.samples[:, 1]) ** 2 - np.sin(tr.times / 2) ** 2)) <= 1e-6


def test_norm_conserved_without_damping():
    tr = ev.ode_integrate(RABI, (0.6, 0.8j), 10.0, 1e-3)
    assert np.max(np.abs(np.sum(np.abs(tr.samples) ** 2, axis=1) - 1)) <= 1e-8


def test_unprimed_matches_propagator():
    assert ev.rk4_vs_propagator(CANON, (1, 0), 10.0, 1e-3) <= 1e-6


def test_ode_runs_in_strong_damping():
    tr = ev.ode_integrate(SystemParams(3, 0, 1), (1, 0), 5.0, 1e-2, "unprimed")
    assert np.all(np.isfinite(tr.samples)) and tr.unprimed is not None


def test_trajectory_shape_and_stride():
    tr = ev.ode_integrate(CANON, (1, 0), 1.0, 0.01, stride=10)
    assert len(tr.times) == len(tr.samples) == 11
    assert tr.times[-1] == pytest.approx(1.0)
    assert tr.meta["method"] == "rk4" and tr.meta["steps"] == 100
    with pytest.raises(ValueError):
        ev.Trajectory(np.array([0.0, 0.0]), np.zeros((2, 2)))


@pytest.mark.parametrize("kwargs", [{"dt": 0.0}, {"dt": -1e-3}, {"t_max": 0.0}, {"t_max": -1.0},
                                    {"representation": "other"}, {"stride": 0}])
def test_ode_argument_errors(kwargs):
    base = {"c0": (1, 0), "t_max": 1.0, "dt": 1e-2}
    base.update(kwargs)
    with pytest.raises(ArgumentError):
        ev.ode_integrate(CANON, **base)


def test_convergence_order():
    order, e1, e2 = ev.convergence_order(CANON, (1, 0), 10.0, 0.1)
    assert abs(order - 4.0) <= 0.3
    assert e2 < e1


# degenerate case ---------------------------------------------------------------

def test_degenerate_amplitudes_examples():
    assert np.array_equal(ev.degenerate_amplitudes(DEGEN, 0.0), [1, 0])
    # substitute δ = 1, ω = 1, Γ = 0.5, t = 1 into the quoted form
    assert np.allclose(ev.degenerate_amplitudes(DEGEN, 1.0), [0, 0.5j * math.exp(-0.5)], atol=1e-16)


def test_degenerate_requires_omega_zero():
    with pytest.raises(NotDegenerate):
        ev.degenerate_amplitudes(CANON, 1.0)
    with pytest.raises(NotDegenerate):
        ev.degenerate_solution(CANON, 1.0)


def test_exact_degenerate_solution_matches_rk4():
    tr = ev.ode_integrate(DEGEN, (1, 0), 5.0, 1e-3)
    exact = ev.degenerate_solution(DEGEN, tr.times)
    assert np.max(np.abs(tr.samples - exact)) <= 1e-6
    # hand: ((1 - δt/2), -iωt/2) e^{-Γt} at t = 2
    assert np.allclose(ev.degenerate_solution(DEGEN, 2.0), [0, -1j * math.exp(-1.0)], atol=1e-15)


def test_quoted_degenerate_form_disagrees_with_rk4():
    # the quoted form starts with slope -(δ + Γ) in C'_a, the equation gives -(δ/2 + Γ)
    tr = ev.ode_integrate(DEGEN, (1, 0), 5.0, 1e-3)
    quoted = ev.degenerate_amplitudes(DEGEN, tr.times)
    assert np.max(np.abs(tr.samples - quoted)) > 0.1


@pytest.mark.parametrize("fn", [ev.degenerate_amplitudes, ev.degenerate_solution])
def test_degenerate_envelope_decays(fn):
    ts = np.linspace(5, 50, 10)
    norms = np.array([np.linalg.norm(fn(DEGEN, t)) for t in ts])
    assert np.all(np.diff(norms) < 0)
    assert norms[-1] < 1e-8
    # bounded by (1 + (|δ| + |ω|/2) t) e^{-Γt}
    assert np.all(norms <= (1 + 1.5 * ts) * np.exp(-0.5 * ts))


def test_ode_check_report():
    rep = ev.ode_check(CANON)
    assert rep.passed
    assert set(e.check_id for e in rep.entries) == {"ode.vs_propagator", "ode.convergence_order"}
    drep = ev.ode_check(DEGEN)
    assert drep["ode.degenerate_exact"].passed
    assert not drep["ode.degenerate_quoted"].passed


def test_degenerate_forms_vectorize():
    ts = np.array([0.0, 0.5, 2.0])
    assert np.array_equal(ev.degenerate_amplitudes(DEGEN, ts)[1], ev.degenerate_amplitudes(DEGEN, 0.5))
    assert np.allclose(ev.degenerate_solution(DEGEN, ts)[2], ev.degenerate_solution(DEGEN, 2.0))

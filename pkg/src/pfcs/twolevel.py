"""The damped two-level atom as a pseudo-Hermitian fermionic oscillator.

All matrices are 2x2 complex numpy arrays written in the bare-level basis
``(|+>, |->)``.  Closed forms are evaluated literally; the functions ending in
``_report`` / ``_check`` compare them against each other and against the
identities they are supposed to satisfy.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ArgumentError, DegenerateOmega, StrongDamping, ZeroCoupling
from .report import CheckReport, mat_residual, norm

DEFAULT_TOL = 1e-12
I2 = np.eye(2, dtype=complex)
PARITY = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class SystemParams:
    """Decay rates of the upper/lower level and the complex coupling (all in 1/time)."""

    gamma_a: float
    gamma_b: float
    omega: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma_a", float(self.gamma_a))
        object.__setattr__(self, "gamma_b", float(self.gamma_b))
        object.__setattr__(self, "omega", complex(self.omega))
        if not (self.gamma_a >= 0 and self.gamma_b >= 0):
            raise ArgumentError("decay rates must be non-negative")
        if not all(math.isfinite(x) for x in (self.gamma_a, self.gamma_b, self.omega.real, self.omega.imag)):
            raise ArgumentError("parameters must be finite")

    @classmethod
    def from_ratio(cls, delta_over_omega: float, arg_omega: float = 0.0, abs_omega: float = 1.0,
                   gamma_b: float = 0.4) -> SystemParams:
        """Point with given ``delta/|omega|`` and ``arg(omega)``; ``gamma_a`` absorbs delta."""
        delta = delta_over_omega * abs_omega
        return cls(gamma_b + 2 * delta, gamma_b, cmath.rect(abs_omega, arg_omega))

    @property
    def delta(self) -> float:
        return (self.gamma_a - self.gamma_b) / 2

    @property
    def Gamma(self) -> float:
        return (self.gamma_a + self.gamma_b) / 4

    @property
    def abs_omega(self) -> float:
        return abs(self.omega)

    @property
    def omega_sq_minus_delta_sq(self) -> float:
        return self.abs_omega ** 2 - self.delta ** 2

    @property
    def regime(self) -> str:
        """``"real"`` (Omega > 0), ``"degenerate"`` (Omega = 0) or ``"strong_damping"``."""
        d = self.omega_sq_minus_delta_sq
        if d > 0:
            return "real"
        if d == 0:
            return "degenerate"
        return "strong_damping"

    @property
    def Omega(self) -> float:
        """Pseudo-Rabi frequency; raises outside the real-spectrum regime."""
        require_real_spectrum(self)
        return math.sqrt(self.omega_sq_minus_delta_sq)

    @property
    def E(self) -> float:
        return self.Omega / 2

    def as_dict(self) -> dict[str, float]:
        return {"gamma_a": self.gamma_a, "gamma_b": self.gamma_b,
                "omega_re": self.omega.real, "omega_im": self.omega.imag}


def require_coupling(p: SystemParams) -> None:
    if p.omega == 0:
        raise ZeroCoupling("omega must be nonzero")


def require_real_spectrum(p: SystemParams) -> None:
    require_coupling(p)
    d = p.omega_sq_minus_delta_sq
    if d < 0:
        raise StrongDamping(f"|omega|^2 - delta^2 = {d:.6g} < 0: eigenvalues are purely imaginary")
    if d == 0:
        raise DegenerateOmega("|omega|^2 == delta^2: Omega = 0")


class Spectrum(NamedTuple):
    E1: float
    E2: float
    psi1: np.ndarray
    psi2: np.ndarray
    phi1: np.ndarray
    phi2: np.ndarray

    @property
    def psi(self) -> tuple[np.ndarray, np.ndarray]:
        return self.psi1, self.psi2

    @property
    def phi(self) -> tuple[np.ndarray, np.ndarray]:
        return self.phi1, self.phi2

    def gram_psi(self) -> np.ndarray:
        """``G[j, k] = <psi_j|psi_k>``."""
        m = np.column_stack(self.psi)
        return m.conj().T @ m

    def gram_phi(self) -> np.ndarray:
        m = np.column_stack(self.phi)
        return m.conj().T @ m

    def biorthogonality(self) -> np.ndarray:
        """``B[i, j] = <phi_i|psi_j>``; the identity for a biorthonormal system."""
        return np.column_stack(self.phi).conj().T @ np.column_stack(self.psi)


# constructions -------------------------------------------------------------

def build_hamiltonian(p: SystemParams) -> np.ndarray:
    require_coupling(p)
    d, w = p.delta, p.omega
    return 0.5 * np.array([[-1j * d, w.conjugate()], [w, 1j * d]], dtype=complex)


def evolution_matrix(p: SystemParams) -> np.ndarray:
    """Generator of the primed amplitudes: ``i dC'/dt = M C'`` with decay on the diagonal."""
    require_coupling(p)
    w = p.omega
    return 0.5 * np.array([[-1j * p.gamma_a, w.conjugate()], [w, -1j * p.gamma_b]], dtype=complex)


def spectrum(p: SystemParams) -> Spectrum:
    require_real_spectrum(p)
    d, w, aw, om = p.delta, p.omega, p.abs_omega, p.Omega
    u = w.conjugate() / aw
    sp_, sm_ = cmath.sqrt(om + 1j * d), cmath.sqrt(om - 1j * d)
    k = 1 / math.sqrt(2 * om)
    psi1 = k * np.array([-u * sp_, sm_])
    psi2 = k * np.array([u * sm_, sp_])
    # Omega is real here, so Omega* = Omega
    phi1 = k * np.array([-u * sm_, sp_])
    phi2 = k * np.array([u * sp_, sm_])
    return Spectrum(-om / 2, om / 2, psi1, psi2, phi1, phi2)


def metric_eta(p: SystemParams) -> np.ndarray:
    require_coupling(p)
    d, w, aw2 = p.delta, p.omega, p.abs_omega ** 2
    off = 1j * d * w.conjugate() / aw2
    # upper-right and lower-left are exact conjugates, so eta == eta^dagger bit for bit
    return np.array([[1, off], [off.conjugate(), 1]], dtype=complex)


def eta_plus_decomposition(p: SystemParams) -> tuple[np.ndarray, float]:
    """``(Omega/|omega|) (|phi1><phi1| + |phi2><phi2|)`` and its distance to ``metric_eta``."""
    s = spectrum(p)
    eta_plus = np.outer(s.phi1, s.phi1.conj()) + np.outer(s.phi2, s.phi2.conj())
    built = (p.Omega / p.abs_omega) * eta_plus
    return built, mat_residual((built, metric_eta(p)))


def op_b(p: SystemParams) -> np.ndarray:
    require_real_spectrum(p)
    d, w, aw, om = p.delta, p.omega, p.abs_omega, p.Omega
    return np.array([[-aw, -w.conjugate() * (om + 1j * d) / aw],
                     [w * (om - 1j * d) / aw, aw]], dtype=complex) / (2 * om)


def op_b_dagger(p: SystemParams) -> np.ndarray:
    require_real_spectrum(p)
    d, w, aw, om = p.delta, p.omega, p.abs_omega, p.Omega
    return np.array([[-aw, w.conjugate() * (om + 1j * d) / aw],
                     [-w * (om - 1j * d) / aw, aw]], dtype=complex) / (2 * om)


def op_b_sharp(p: SystemParams) -> np.ndarray:
    """Closed form of the pseudo-adjoint of b."""
    require_real_spectrum(p)
    d, w, aw, om = p.delta, p.omega, p.abs_omega, p.Omega
    return np.array([[-aw, w.conjugate() * (om - 1j * d) / aw],
                     [-w * (om + 1j * d) / aw, aw]], dtype=complex) / (2 * om)


def op_b_sharp_from_metric(p: SystemParams) -> np.ndarray:
    """``eta^-1 b^dagger eta``."""
    eta = metric_eta(p)
    return np.linalg.solve(eta, op_b_dagger(p) @ eta)


def op_b_tilde(p: SystemParams) -> np.ndarray:
    """``eta b eta^-1``: annihilates ``|phi1>``."""
    eta = metric_eta(p)
    return eta @ op_b(p) @ np.linalg.inv(eta)


def op_b_tilde_sharp(p: SystemParams) -> np.ndarray:
    """Adjoint of ``b_tilde`` with respect to ``eta' = eta^-1``: ``eta b_tilde^dagger eta^-1``."""
    eta = metric_eta(p)
    return eta @ op_b_tilde(p).conj().T @ np.linalg.inv(eta)


def number_operator(p: SystemParams) -> np.ndarray:
    return op_b_sharp(p) @ op_b(p)


class SymmetryOperators(NamedTuple):
    P: np.ndarray
    P_gen: np.ndarray
    C: np.ndarray
    U_T: np.ndarray


def symmetry_operators(p: SystemParams) -> SymmetryOperators:
    """Parity, generalized parity, charge conjugation and the unitary part of T = U K0."""
    require_real_spectrum(p)
    w, aw, d, om = p.omega, p.abs_omega, p.delta, p.Omega
    P_gen = np.array([[0, -w.conjugate() / aw], [-w / aw, 0]], dtype=complex)
    # prefactor 1/Omega: the only one compatible with C = -(2/Omega) H and C^2 = 1
    C = np.array([[1j * d, -w.conjugate()], [-w, -1j * d]], dtype=complex) / om
    U_T = (w / aw) * I2
    return SymmetryOperators(PARITY.copy(), P_gen, C, U_T)


# predicates ----------------------------------------------------------------

def is_pseudo_hermitian(h: np.ndarray, eta: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """``H^dagger = eta H eta^-1`` with ``eta`` Hermitian and invertible."""
    if mat_residual((eta, eta.conj().T)) > tol or abs(np.linalg.det(eta)) <= tol:
        return False
    return mat_residual((h.conj().T @ eta, eta @ h)) <= tol


def pt_transform(x: np.ndarray, parity: np.ndarray = PARITY) -> np.ndarray:
    """Conjugation of an operator by ``P K0`` (K0 = entrywise complex conjugation)."""
    return parity @ x.conj() @ np.linalg.inv(parity)


def is_pt_symmetric(h: np.ndarray, parity: np.ndarray = PARITY, tol: float = DEFAULT_TOL) -> bool:
    """``[H, PT] = 0``."""
    return mat_residual((pt_transform(h, parity), h)) <= tol


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


# reports -------------------------------------------------------------------

def pt_commutation_check(p: SystemParams, tol: float = DEFAULT_TOL) -> CheckReport:
    rep = CheckReport(params_echo=p)
    h = build_hamiltonian(p)
    rep.add("symmetry.pt_commutes", "P conj(H) P^-1 equals H", mat_residual((pt_transform(h), h)), tol,
            "P K0 H K0^-1 P^-1 = H")
    basis = [np.eye(2, dtype=complex)[:, [i]] @ np.eye(2, dtype=complex)[[j], :] for i in range(2) for j in range(2)]
    probes = basis + [1j * b for b in basis]
    rep.add("symmetry.pt_square", "(PT)^2 acts as the identity on operators",
            max(mat_residual((pt_transform(pt_transform(x)), x)) for x in probes), tol, "(PT)^2 = 1")
    rep.add("symmetry.k0_square", "K0^2 = 1 on complex probes",
            max(mat_residual((x.conj().conj(), x)) for x in probes), tol, "K0^2 = 1")
    return rep


def spectral_report(p: SystemParams, tol: float = DEFAULT_TOL) -> CheckReport:
    """Hamiltonian invariants, eigenpairs, biorthonormality and the metric."""
    rep = CheckReport(params_echo=p)
    h = build_hamiltonian(p)
    s = spectrum(p)
    eta = metric_eta(p)
    om = p.Omega
    rep.add("hamiltonian.trace", "trace H = 0", abs(np.trace(h)), tol, "tr H = 0")
    rep.add("hamiltonian.det", "det H = (delta^2 - |omega|^2)/4",
            abs(np.linalg.det(h) - (p.delta ** 2 - p.abs_omega ** 2) / 4), tol,
            "det H = (delta^2 - |omega|^2)/4")
    rep.add("hamiltonian.square", "H^2 = (Omega^2/4) 1", mat_residual((h @ h, om ** 2 / 4 * I2)), tol,
            "H^2 = (Omega/2)^2")
    rep.add("spectrum.eigen_psi", "H psi_i = E_i psi_i",
            max(norm(h @ v - e * v) for v, e in ((s.psi1, s.E1), (s.psi2, s.E2))), tol,
            "E1 = -Omega/2, E2 = Omega/2")
    rep.add("spectrum.eigen_phi", "H^dagger phi_i = E_i phi_i",
            max(norm(h.conj().T @ v - e * v) for v, e in ((s.phi1, s.E1), (s.phi2, s.E2))), tol,
            "H^dagger phi_i = E_i* phi_i")
    rep.add("spectrum.biorthonormality", "<phi_i|psi_j> = delta_ij",
            mat_residual((s.biorthogonality(), I2)), tol, "<phi_i|psi_j> = delta_ij")
    completeness = np.outer(s.psi1, s.phi1.conj()) + np.outer(s.psi2, s.phi2.conj())
    rep.add("spectrum.completeness", "|psi1><phi1| + |psi2><phi2| = 1", mat_residual((completeness, I2)), tol,
            "sum_i |psi_i><phi_i| = 1")
    rep.add("metric.hermitian", "eta = eta^dagger (bit-exact)", mat_residual((eta, eta.conj().T)), 0.0,
            "eta Hermitian")
    lam = np.linalg.eigvalsh(eta)
    rep.add("metric.positive", f"eta positive definite (min eigenvalue {lam.min():.6g})",
            0.0 if lam.min() > 0 else 1.0, 0.0, "eta > 0")
    rep.add("metric.eta_plus", "eta = (Omega/|omega|)(|phi1><phi1| + |phi2><phi2|)",
            eta_plus_decomposition(p)[1], tol, "eta = (Omega/|omega|) eta_+")
    return rep


def algebra_report(p: SystemParams, tol: float = DEFAULT_TOL) -> CheckReport:
    """Every pseudo-fermion identity, as a residual against its closed form."""
    require_real_spectrum(p)
    rep = CheckReport(params_echo=p)
    h = build_hamiltonian(p)
    s = spectrum(p)
    eta = metric_eta(p)
    b, bs = op_b(p), op_b_sharp(p)
    n = bs @ b
    zero = np.zeros((2, 2), dtype=complex)
    rep.add("algebra.b_squared", "b^2 = 0", mat_residual((b @ b, zero)), tol, "b^2 = 0")
    rep.add("algebra.bsharp_squared", "(b#)^2 = 0", mat_residual((bs @ bs, zero)), tol, "b#^2 = 0")
    rep.add("algebra.anticommutator", "{b, b#} = 1", mat_residual((anticommutator(b, bs), I2)), tol,
            "{b, b#} = 1")
    rep.add("ladder.b_psi1", "b psi1 = 0", norm(b @ s.psi1), tol, "b|psi1> = 0")
    rep.add("ladder.b_psi2", "b psi2 = psi1", norm(b @ s.psi2 - s.psi1), tol, "b|psi2> = |psi1>")
    rep.add("ladder.bsharp_psi2", "b# psi2 = 0", norm(bs @ s.psi2), tol, "b#|psi2> = 0")
    rep.add("ladder.bsharp_psi1", "b# psi1 = psi2", norm(bs @ s.psi1 - s.psi2), tol, "b#|psi1> = |psi2>")
    rep.add("number.anticomm_b", "{N, b} = b", mat_residual((anticommutator(n, b), b)), tol, "{N, b} = b")
    rep.add("number.anticomm_bsharp", "{N, b#} = b#", mat_residual((anticommutator(n, bs), bs)), tol,
            "{N, b#} = b#")
    rep.add("number.idempotent", "N^2 = N", mat_residual((n @ n, n)), tol, "N^2 = N")
    rep.add("factorization.hamiltonian", "H = Omega (b# b - 1/2)",
            mat_residual((h, p.Omega * (n - 0.5 * I2))), tol, "H = Omega(b#b - 1/2)")
    rep.add("pseudo_hermiticity.metric", "H^dagger eta = eta H",
            mat_residual((h.conj().T @ eta, eta @ h)), tol, "H^dagger = eta H eta^-1")
    rep.add("bsharp.closed_vs_metric", "closed-form b# equals eta^-1 b^dagger eta",
            mat_residual((bs, op_b_sharp_from_metric(p))), tol, "b# = eta^-1 b^dagger eta")
    rep.add("bdagger.closed_vs_conjugate", "closed-form b^dagger equals conj(b)^T",
            mat_residual((op_b_dagger(p), b.conj().T)), tol, "b^dagger")
    bt, bts = op_b_tilde(p), op_b_tilde_sharp(p)
    rep.add("dual_algebra.anticommutator", "b~ b~#' + b~#' b~ = 1",
            mat_residual((anticommutator(bt, bts), I2)), tol, "b~ b~#' + b~#' b~ = 1")
    rep.add("dual_algebra.b_tilde_squared", "b~^2 = 0", mat_residual((bt @ bt, zero)), tol, "b~^2 = 0")
    rep.add("dual_algebra.b_tilde_sharp_squared", "(b~#')^2 = 0", mat_residual((bts @ bts, zero)), tol,
            "(b~#')^2 = 0")
    rep.add("dual_algebra.b_tilde_phi1", "b~ phi1 = 0", norm(bt @ s.phi1), tol, "b~|phi1> = 0")
    return rep


def symmetry_report(p: SystemParams, tol: float = DEFAULT_TOL) -> CheckReport:
    rep = pt_commutation_check(p, tol)
    h = build_hamiltonian(p)
    s = spectrum(p)
    ops = symmetry_operators(p)
    rep.add("symmetry.parity_square", "P^2 = 1", mat_residual((ops.P @ ops.P, I2)), tol, "P^2 = 1")
    p_gen_dyads = np.outer(s.phi1, s.phi1.conj()) - np.outer(s.phi2, s.phi2.conj())
    rep.add("symmetry.generalized_parity", "|phi1><phi1| - |phi2><phi2| matches its closed form",
            mat_residual((p_gen_dyads, ops.P_gen)), tol, "P = |phi1><phi1| - |phi2><phi2|")
    c_dyads = np.outer(s.psi1, s.phi1.conj()) - np.outer(s.psi2, s.phi2.conj())
    rep.add("symmetry.charge_dyads", "|psi1><phi1| - |psi2><phi2| matches its closed form",
            mat_residual((c_dyads, ops.C)), tol, "C = |psi1><phi1| - |psi2><phi2|")
    rep.add("symmetry.charge_vs_h", "C = -(2/Omega) H", mat_residual((ops.C, -(2 / p.Omega) * h)), tol,
            "C = -(2/Omega) H")
    rep.add("symmetry.charge_square", "C^2 = 1", mat_residual((ops.C @ ops.C, I2)), tol, "C^2 = 1")
    rep.add("symmetry.charge_commutes", "[C, H] = 0", mat_residual((commutator(ops.C, h), np.zeros((2, 2)))),
            tol, "[C, H] = 0")
    return rep


def system_report(p: SystemParams, tol: float = DEFAULT_TOL) -> CheckReport:
    rep = spectral_report(p, tol)
    rep.extend(algebra_report(p, tol))
    rep.extend(symmetry_report(p, tol))
    return rep

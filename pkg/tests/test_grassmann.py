import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pfcs.errors import NonNilpotentError, SignatureError
from pfcs.grassmann import (
    GeneratorSignature,
    GrassmannElement as GE,
    berezin_measure,
    g_berezin,
    g_deriv_left,
    g_exp,
    g_star,
    g_substitute,
)
from strategies import SIG2, SIG4, elements, gauss, monomials


# independent route: left multiplication on the exterior algebra as 2^n x 2^n matrices

def _creation(n: int, i: int) -> np.ndarray:
    """Jordan-Wigner creation operator for generator i on occupation bitstrings."""
    dim = 2 ** n
    m = np.zeros((dim, dim))
    for s in range(dim):
        if s >> i & 1:
            continue
        below = bin(s & ((1 << i) - 1)).count("1")
        m[s | 1 << i, s] = (-1) ** below
    return m


def _rep(a: GE) -> np.ndarray:
    n = a.signature.n
    cs = [_creation(n, i) for i in range(n)]
    out = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for mono, c in a.terms.items():
        m = np.eye(2 ** n)
        for i in mono:
            m = m @ cs[i]
        out += c * m
    return out


def xi(sig=SIG2):
    return GE.generator(sig, "xi")


def xis(sig=SIG2):
    return GE.generator(sig, "xi*")


# examples ---------------------------------------------------------------------

def test_generators_anticommute_and_square_to_zero():
    assert xi() * xis() == -(xis() * xi())
    assert (xi() * xi()).is_zero()
    assert (xi() * xis()).coefficient(["xi", "xi*"]) == 1
    assert (xis() * xi()).coefficient(["xi", "xi*"]) == -1


def test_from_products_sorts_with_sign():
    a = GE.from_products(SIG4, [(2, ["zeta", "xi"]), (1, ["xi", "xi"])])
    assert a.coefficient(["xi", "zeta"]) == -2
    assert len(a.terms) == 1


def test_zero_coefficients_are_pruned_exactly():
    a = GE(SIG2, {(): 0, (0,): 1e-300})
    assert list(a.terms) == [(0,)]
    assert (xi() - xi()).is_zero()


def test_noncanonical_monomial_rejected():
    with pytest.raises(SignatureError):
        GE(SIG2, {(1, 0): 1})
    with pytest.raises(SignatureError):
        GE(SIG2, {(5,): 1})


def test_signature_validation():
    with pytest.raises(SignatureError):
        GeneratorSignature(("a", "b"), (0, 0))
    with pytest.raises(SignatureError):
        GeneratorSignature(("a", "a"), (0, 1))
    with pytest.raises(SignatureError):
        SIG2.index("eta")


def test_mixed_signatures_rejected():
    with pytest.raises(SignatureError):
        xi(SIG2) + xi(SIG4)


def test_star_of_generators_and_products():
    assert g_star(xi()) == xis()
    assert g_star(GE.scalar(SIG2, 2 + 3j)) == GE.scalar(SIG2, 2 - 3j)
    # (ξ* ξ)* = ξ* ξ ; (ξ ξ*)* = ξ ξ*
    assert g_star(xis() * xi()) == xis() * xi()


def test_parity_and_parts():
    a = 1 + xi() + 2 * xis() * xi()
    assert a.parity() is None
    assert a.even_part().parity() == 0 and a.odd_part().parity() == 1
    assert a.even_part() + a.odd_part() == a
    assert a.grade_involution() == a.even_part() - a.odd_part()
    assert GE.zero(SIG2).parity() == 0


def test_berezin_conventions():
    # ∫dξ ξ = 1, ∫dξ 1 = 0, and ∫dξ* dξ (ξ ξ*) = 1 with dξ applied first
    assert g_berezin(xi(), "xi") == 1
    assert g_berezin(GE.scalar(SIG2, 1), "xi").is_zero()
    assert berezin_measure(xi() * xis(), "xi*", "xi") == 1
    assert berezin_measure(xis() * xi(), "xi*", "xi") == -1


def test_gaussian_integral():
    # ∫dξ* dξ exp(-a ξ* ξ) = a  (hand expansion: exp = 1 - a ξ*ξ, ∫ of -aξ*ξ = a)
    a = 2 - 1j
    assert berezin_measure(g_exp(-a * (xis() * xi())), "xi*", "xi") == a


def test_exp_examples():
    e = g_exp(-(xis() * xi()) / 2)
    assert e == 1 - 0.5 * (xis() * xi())
    with pytest.raises(NonNilpotentError):
        g_exp(1 + xi())
    assert g_exp(GE.zero(SIG2)) == 1


def test_substitute_collapses_two_variables():
    z = GE.generator(SIG4, "zeta")
    a = GE.generator(SIG4, "xi*") * z
    images = {"xi": xi(), "xi*": xis(), "zeta": xi(), "zeta*": xis()}
    assert g_substitute(a, images, SIG2) == xis() * xi()


def test_deriv_examples():
    a = xis() * xi()
    assert g_deriv_left(a, "xi*") == xi()
    assert g_deriv_left(a, "xi") == -xis()


# properties -------------------------------------------------------------------

@given(elements(SIG4), elements(SIG4), elements(SIG4))
def test_multiplication_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(elements(SIG4), elements(SIG4), elements(SIG4))
def test_distributive(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a + b) * c == a * c + b * c


@given(elements(SIG4), elements(SIG4))
def test_product_matches_matrix_representation(a, b):
    assert np.array_equal(_rep(a * b), _rep(a) @ _rep(b))


@given(elements(SIG4, parity=1), elements(SIG4, parity=1), elements(SIG4, parity=0))
def test_supercommutativity(a, b, c):
    assert a * b == -(b * a)
    assert a * c == c * a
    assert (a * a).is_zero()


@given(elements(SIG4))
def test_star_is_involution(a):
    assert g_star(g_star(a)) == a


@given(elements(SIG4), elements(SIG4))
def test_star_reverses_products(a, b):
    assert g_star(a * b) == g_star(b) * g_star(a)


@given(elements(SIG4), gauss)
def test_star_antilinear(a, c):
    assert g_star(c * a) == c.conjugate() * g_star(a)


@given(elements(SIG4), st.sampled_from(SIG4.names))
def test_berezin_equals_left_derivative(a, g):
    assert g_berezin(a, g) == g_deriv_left(a, g)


@given(elements(SIG4, parity=1), elements(SIG4), st.sampled_from(SIG4.names))
def test_graded_leibniz_rule(a, b, g):
    assert g_deriv_left(a * b, g) == g_deriv_left(a, g) * b - a * g_deriv_left(b, g)


@given(elements(SIG4, parity=0), elements(SIG4), st.sampled_from(SIG4.names))
def test_leibniz_even(a, b, g):
    assert g_deriv_left(a * b, g) == g_deriv_left(a, g) * b + a * g_deriv_left(b, g)


@given(elements(SIG4, parity=0, body=False))
def test_exp_inverse(a):
    assert g_exp(a) * g_exp(-a) == 1


@given(elements(SIG4, parity=0, body=False), elements(SIG4, parity=0, body=False))
def test_exp_of_sum(a, b):
    assert g_exp(a + b) == g_exp(a) * g_exp(b)


@given(elements(SIG4), st.sampled_from(SIG4.names), st.sampled_from(SIG4.names))
def test_integrals_anticommute(a, g, h):
    assert berezin_measure(a, g, h) == -berezin_measure(a, h, g)


@given(elements(SIG4), elements(SIG4))
def test_substitution_is_homomorphism(a, b):
    # swap the two complex variables: an algebra automorphism with odd images
    images = {"xi": GE.generator(SIG4, "zeta"), "xi*": GE.generator(SIG4, "zeta*"),
              "zeta": GE.generator(SIG4, "xi"), "zeta*": GE.generator(SIG4, "xi*")}
    assert g_substitute(a * b, images) == g_substitute(a, images) * g_substitute(b, images)


def test_monomial_count():
    assert len(monomials(SIG4)) == 16

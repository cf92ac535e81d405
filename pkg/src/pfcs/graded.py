"""Z2-graded kets, bras and operators with Grassmann coefficients.

Everything lives on a two-slot basis: slot 0 is even, slot 1 is odd.  Two
basis families are tracked, ``PSI`` (eigenvectors of H) and ``PHI``
(eigenvectors of H^dagger); a ``PHI`` bra against a ``PSI`` ket pairs to
the Kronecker delta and vice versa.

Normal forms: kets keep their coefficients to the left of the ket symbol,
bras to the right of the bra symbol, and operators to the left of the dyad
``|e_i><f_j|`` (whose parity is ``i + j``).  Moving a coefficient of parity
q across a symbol of parity p costs ``(-1)**(p*q)``; for a mixed coefficient
that is the grade involution applied ``p`` times.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import BasisError, PairingError, SignatureError
from .grassmann import GeneratorSignature, GrassmannElement as GE, g_berezin

SLOT_PARITY = (0, 1)


class BasisTag(enum.Enum):
    PSI = "psi"
    PHI = "phi"

    @property
    def dual(self) -> BasisTag:
        return BasisTag.PHI if self is BasisTag.PSI else BasisTag.PSI


def twist(mu: GE, p: int) -> GE:
    """Koszul factor for carrying ``mu`` across a parity-``p`` symbol."""
    return mu if p % 2 == 0 else mu.grade_involution()


def _common_signature(elems: Iterable[GE]) -> GeneratorSignature:
    sigs = {e.signature for e in elems}
    if len(sigs) != 1:
        raise SignatureError("graded object mixes generator signatures")
    return sigs.pop()


def _as_ge(sig: GeneratorSignature, x: Any) -> GE:
    if isinstance(x, GE):
        return x
    return GE.scalar(sig, x)


def _require_cross(bra_tag: BasisTag, ket_tag: BasisTag) -> None:
    if bra_tag is ket_tag:
        raise BasisError(f"cannot contract a {bra_tag.value} bra with a {ket_tag.value} ket "
                         "without a Gram table; use gv_pair")


@dataclass(frozen=True, eq=False)
class GradedVector:
    """``comp[0] |e_0> + comp[1] |e_1>`` over the basis named by ``tag``."""

    tag: BasisTag
    comp: tuple[GE, GE]

    def __post_init__(self) -> None:
        object.__setattr__(self, "comp", tuple(self.comp))
        if len(self.comp) != 2:
            raise ValueError("a graded vector has exactly two slots")
        _common_signature(self.comp)

    @property
    def signature(self) -> GeneratorSignature:
        return self.comp[0].signature

    @classmethod
    def basis(cls, sig: GeneratorSignature, tag: BasisTag, slot: int, coef: Any = 1) -> GradedVector:
        comp = [GE.zero(sig), GE.zero(sig)]
        comp[slot] = _as_ge(sig, coef)
        return cls(tag, tuple(comp))

    def __add__(self, other: GradedVector) -> GradedVector:
        if other.tag is not self.tag:
            raise BasisError("cannot add vectors over different bases")
        return GradedVector(self.tag, (self.comp[0] + other.comp[0], self.comp[1] + other.comp[1]))

    def __neg__(self) -> GradedVector:
        return GradedVector(self.tag, (-self.comp[0], -self.comp[1]))

    def __sub__(self, other: GradedVector) -> GradedVector:
        return self + (-other)

    def lmul(self, mu: Any) -> GradedVector:
        """``mu * |v>`` with ``mu`` already standing on the left."""
        mu = _as_ge(self.signature, mu)
        return GradedVector(self.tag, (mu * self.comp[0], mu * self.comp[1]))

    def rmul(self, mu: Any) -> GradedVector:
        """``|v> * mu`` brought to normal form."""
        mu = _as_ge(self.signature, mu)
        return GradedVector(self.tag, tuple(c * twist(mu, SLOT_PARITY[i]) for i, c in enumerate(self.comp)))

    def map_coefficients(self, fn: Callable[[Any], Any]) -> GradedVector:
        return GradedVector(self.tag, tuple(c.map_coefficients(fn) for c in self.comp))

    def terms(self) -> list[tuple[GE, int, None]]:
        return [(c, i, None) for i, c in enumerate(self.comp)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedVector):
            return NotImplemented
        return self.tag is other.tag and all(a == b for a, b in zip(self.comp, other.comp))

    __hash__ = None  # type: ignore[assignment]

    def max_abs(self) -> float:
        return max(c.max_abs() for c in self.comp)


@dataclass(frozen=True, eq=False)
class GradedBra:
    """``<e_0| comp[0] + <e_1| comp[1]`` with coefficients on the right."""

    tag: BasisTag
    comp: tuple[GE, GE]

    def __post_init__(self) -> None:
        object.__setattr__(self, "comp", tuple(self.comp))
        if len(self.comp) != 2:
            raise ValueError("a graded bra has exactly two slots")
        _common_signature(self.comp)

    @property
    def signature(self) -> GeneratorSignature:
        return self.comp[0].signature

    def scale(self, c: Any) -> GradedBra:
        return GradedBra(self.tag, tuple(c * x for x in self.comp))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedBra):
            return NotImplemented
        return self.tag is other.tag and all(a == b for a, b in zip(self.comp, other.comp))

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class GradedOperator:
    """``sum_ij comp[i][j] |e_i><f_j|`` with ``e`` over ``left_tag`` and ``f`` over ``right_tag``."""

    left_tag: BasisTag
    right_tag: BasisTag
    comp: tuple[tuple[GE, GE], tuple[GE, GE]]

    def __post_init__(self) -> None:
        rows = tuple(tuple(r) for r in self.comp)
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise ValueError("a graded operator has a 2x2 coefficient array")
        object.__setattr__(self, "comp", rows)
        _common_signature(c for r in rows for c in r)

    @property
    def signature(self) -> GeneratorSignature:
        return self.comp[0][0].signature

    # constructors ------------------------------------------------------

    @classmethod
    def zero(cls, sig: GeneratorSignature, left: BasisTag = BasisTag.PSI,
             right: BasisTag | None = None) -> GradedOperator:
        z = GE.zero(sig)
        return cls(left, right or left.dual, ((z, z), (z, z)))

    @classmethod
    def dyad(cls, sig: GeneratorSignature, left: BasisTag, right: BasisTag,
             i: int, j: int, coef: Any = 1) -> GradedOperator:
        z = GE.zero(sig)
        comp = [[z, z], [z, z]]
        comp[i][j] = _as_ge(sig, coef)
        return cls(left, right, tuple(map(tuple, comp)))

    @classmethod
    def identity(cls, sig: GeneratorSignature, left: BasisTag = BasisTag.PSI) -> GradedOperator:
        """``|e_0><f_0| + |e_1><f_1|`` with ``f`` the biorthonormal partner of ``e``."""
        one, z = GE.scalar(sig, 1), GE.zero(sig)
        return cls(left, left.dual, ((one, z), (z, one)))

    @classmethod
    def from_scalars(cls, sig: GeneratorSignature, left: BasisTag, right: BasisTag,
                     array: Sequence[Sequence[Any]]) -> GradedOperator:
        return cls(left, right, tuple(tuple(GE.scalar(sig, array[i][j]) for j in range(2)) for i in range(2)))

    # arithmetic --------------------------------------------------------

    def _check_tags(self, other: GradedOperator) -> None:
        if (self.left_tag, self.right_tag) != (other.left_tag, other.right_tag):
            raise BasisError("operators act between different bases")

    def __add__(self, other: GradedOperator) -> GradedOperator:
        self._check_tags(other)
        return GradedOperator(self.left_tag, self.right_tag,
                              tuple(tuple(self.comp[i][j] + other.comp[i][j] for j in range(2)) for i in range(2)))

    def __neg__(self) -> GradedOperator:
        return self.map_elements(lambda c: -c)

    def __sub__(self, other: GradedOperator) -> GradedOperator:
        return self + (-other)

    def map_elements(self, fn: Callable[[GE], GE]) -> GradedOperator:
        return GradedOperator(self.left_tag, self.right_tag,
                              tuple(tuple(fn(self.comp[i][j]) for j in range(2)) for i in range(2)))

    def map_coefficients(self, fn: Callable[[Any], Any]) -> GradedOperator:
        return self.map_elements(lambda c: c.map_coefficients(fn))

    def lmul(self, mu: Any) -> GradedOperator:
        """``mu * A``."""
        mu = _as_ge(self.signature, mu)
        return self.map_elements(lambda c: mu * c)

    def rmul(self, mu: Any) -> GradedOperator:
        """``A * mu`` brought to normal form."""
        mu = _as_ge(self.signature, mu)
        return GradedOperator(self.left_tag, self.right_tag,
                              tuple(tuple(self.comp[i][j] * twist(mu, i + j) for j in range(2))
                                    for i in range(2)))

    def __matmul__(self, other: Any) -> Any:
        if isinstance(other, GradedOperator):
            return gop_compose(self, other)
        if isinstance(other, GradedVector):
            return gop_apply(self, other)
        return NotImplemented

    def parity(self) -> int | None:
        """Total parity (coefficient + dyad) if homogeneous, else ``None``."""
        ps = set()
        for i in range(2):
            for j in range(2):
                c = self.comp[i][j]
                if c.is_zero():
                    continue
                pc = c.parity()
                if pc is None:
                    return None
                ps.add((pc + i + j) % 2)
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedOperator):
            return NotImplemented
        return ((self.left_tag, self.right_tag) == (other.left_tag, other.right_tag)
                and all(self.comp[i][j] == other.comp[i][j] for i in range(2) for j in range(2)))

    __hash__ = None  # type: ignore[assignment]

    def max_abs(self) -> float:
        return max(self.comp[i][j].max_abs() for i in range(2) for j in range(2))


# normal forms --------------------------------------------------------------

def gv_canonicalize(tag: BasisTag, terms: Iterable[tuple[Any, int, Any]],
                    sig: GeneratorSignature | None = None) -> GradedVector:
    """Normal form of ``sum  left * |e_slot> * right``.

    Either side may be ``None`` (meaning 1).  ``terms`` can also be the
    output of ``GradedVector.terms()``, which makes the operation idempotent.
    """
    terms = list(terms)
    if sig is None:
        for left, _, right in terms:
            for x in (left, right):
                if isinstance(x, GE):
                    sig = x.signature
                    break
            if sig is not None:
                break
    if sig is None:
        raise SignatureError("cannot infer a generator signature from the terms")
    acc = [GE.zero(sig), GE.zero(sig)]
    for left, slot, right in terms:
        lhs = _as_ge(sig, 1 if left is None else left)
        rhs = _as_ge(sig, 1 if right is None else right)
        acc[slot] = acc[slot] + lhs * twist(rhs, SLOT_PARITY[slot])
    return GradedVector(tag, tuple(acc))


def gb_canonicalize(tag: BasisTag, terms: Iterable[tuple[Any, int, Any]],
                    sig: GeneratorSignature | None = None) -> GradedBra:
    """Normal form of ``sum  left * <e_slot| * right`` (coefficients moved to the right)."""
    terms = list(terms)
    if sig is None:
        sig = next(x.signature for t in terms for x in (t[0], t[2]) if isinstance(x, GE))
    acc = [GE.zero(sig), GE.zero(sig)]
    for left, slot, right in terms:
        lhs = _as_ge(sig, 1 if left is None else left)
        rhs = _as_ge(sig, 1 if right is None else right)
        acc[slot] = acc[slot] + twist(lhs, SLOT_PARITY[slot]) * rhs
    return GradedBra(tag, tuple(acc))


# contractions --------------------------------------------------------------

def gop_apply(a: GradedOperator, v: GradedVector) -> GradedVector:
    _require_cross(a.right_tag, v.tag)
    if a.signature != v.signature:
        raise SignatureError("operator and vector use different generator signatures")
    sig = a.signature
    out = [GE.zero(sig), GE.zero(sig)]
    for i in range(2):
        for j in range(2):
            # <f_j|e_k> = delta_jk
            out[i] = out[i] + a.comp[i][j] * twist(v.comp[j], i + j)
    return GradedVector(a.left_tag, tuple(out))


def gop_compose(a: GradedOperator, b: GradedOperator) -> GradedOperator:
    _require_cross(a.right_tag, b.left_tag)
    if a.signature != b.signature:
        raise SignatureError("operators use different generator signatures")
    sig = a.signature
    out = [[GE.zero(sig), GE.zero(sig)], [GE.zero(sig), GE.zero(sig)]]
    for i in range(2):
        for j in range(2):
            for l in range(2):
                out[i][l] = out[i][l] + a.comp[i][j] * twist(b.comp[j][l], i + j)
    return GradedOperator(a.left_tag, b.right_tag, tuple(map(tuple, out)))


def gb_apply(br: GradedBra, a: GradedOperator) -> GradedBra:
    """``<w| A`` in normal form (coefficients to the right of the bra)."""
    _require_cross(br.tag, a.left_tag)
    sig = a.signature
    out = [GE.zero(sig), GE.zero(sig)]
    for j in range(2):
        for i in range(2):
            # nu_i a_ij crosses <e_i| to the left, then <f_j| to the right
            out[j] = out[j] + twist(br.comp[i] * a.comp[i][j], i + j)
    return GradedBra(a.right_tag, tuple(out))


def gv_pair(br: GradedBra, v: GradedVector, gram: Sequence[Sequence[complex]] | None = None) -> GE:
    """Scalar ``<w|v>``.

    Bra and ket over different bases pair through the Kronecker delta.  Over
    the same basis a numeric Gram table ``gram[j][k] = <e_j|e_k>`` is needed.
    """
    if br.signature != v.signature:
        raise SignatureError("bra and ket use different generator signatures")
    if br.tag is v.tag:
        if gram is None:
            raise PairingError(f"pairing two {v.tag.value} states needs their Gram matrix")
        table = gram
    else:
        table = ((1, 0), (0, 1))
    sig = v.signature
    out = GE.zero(sig)
    for j in range(2):
        for k in range(2):
            g = table[j][k]
            if g == 0:
                continue
            out = out + g * twist(br.comp[j] * v.comp[k], SLOT_PARITY[j])
    return out


def outer(v: GradedVector, br: GradedBra) -> GradedOperator:
    """``|v><w|`` in normal form."""
    if v.signature != br.signature:
        raise SignatureError("ket and bra use different generator signatures")
    return GradedOperator(v.tag, br.tag,
                          tuple(tuple(v.comp[i] * twist(br.comp[j], i + j) for j in range(2))
                                for i in range(2)))


# adjoints -----------------------------------------------------------------

def gv_dagger(v: GradedVector) -> GradedBra:
    """``(mu|e>)^dagger = <e| mu*``."""
    return GradedBra(v.tag, tuple(c.star() for c in v.comp))


def gb_dagger(br: GradedBra) -> GradedVector:
    return GradedVector(br.tag, tuple(c.star() for c in br.comp))


def gop_dagger(a: GradedOperator) -> GradedOperator:
    """Conjugate transpose; starred coefficients are moved back in front of the swapped dyad."""
    return GradedOperator(a.right_tag, a.left_tag,
                          tuple(tuple(twist(a.comp[i][j].star(), i + j) for i in range(2))
                                for j in range(2)))


# integration and numeric substitution --------------------------------------

def berezin_integrate_dyad(field: GradedOperator, measure: Sequence[int | str] = ("xi*", "xi")) -> GradedOperator:
    """Apply ``∫ d m_1 ... d m_k`` coefficient-wise, innermost differential first.

    The measure acts from the far left, where the normal form keeps all
    Grassmann factors, so no sign is picked up from the dyads.
    """
    def integrate(c: GE) -> GE:
        for gen in reversed(tuple(measure)):
            c = g_berezin(c, gen)
        return c

    return field.map_elements(integrate)


def to_matrix(a: GradedOperator, basis: Mapping[BasisTag, Sequence[np.ndarray]]) -> np.ndarray:
    """Substitute concrete column vectors for the basis symbols.

    Only operators whose coefficients are pure numbers can be substituted.
    """
    out = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            c = a.comp[i][j]
            if not c.is_body_only():
                raise ValueError("cannot substitute an operator with Grassmann-valued coefficients")
            if c.is_zero():
                continue
            ket = np.asarray(basis[a.left_tag][i], dtype=complex)
            bra = np.asarray(basis[a.right_tag][j], dtype=complex)
            out += complex(c.body) * np.outer(ket, bra.conj())
    return out


def vector_to_array(v: GradedVector, basis: Mapping[BasisTag, Sequence[np.ndarray]]) -> np.ndarray:
    out = np.zeros(2, dtype=complex)
    for k in range(2):
        c = v.comp[k]
        if not c.is_body_only():
            raise ValueError("cannot substitute a vector with Grassmann-valued coefficients")
        out += complex(c.body) * np.asarray(basis[v.tag][k], dtype=complex)
    return out

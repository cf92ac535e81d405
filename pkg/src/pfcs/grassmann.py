"""Exact arithmetic in a complex Grassmann algebra with finitely many generators.

An element is a finite map from monomials to coefficients.  A monomial is a
tuple of generator indices in strictly ascending order, so ``(0, 1)`` is
``g0 g1`` and ``()`` is the unit.  Coefficients are ordinary complex numbers
in normal use, but any scalar type closed under ``+``, ``*``, ``/ int`` and
``conjugate()`` works (sympy expressions are used for symbolic time
evolution).  Zero coefficients are pruned only when they compare equal to 0
exactly; no tolerance is applied inside the algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Iterable, Mapping

from .errors import NonNilpotentError, SignatureError

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class GeneratorSignature:
    """Ordered generator labels plus the star involution pairing them."""

    names: tuple[str, ...]
    star_pairing: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "star_pairing", tuple(self.star_pairing))
        n = len(self.names)
        if len(set(self.names)) != n:
            raise SignatureError(f"generator names must be distinct: {self.names}")
        if len(self.star_pairing) != n:
            raise SignatureError("star_pairing must have one entry per generator")
        for i, j in enumerate(self.star_pairing):
            if not 0 <= j < n or self.star_pairing[j] != i:
                raise SignatureError("star_pairing must be an involution on generator indices")

    @classmethod
    def complex_pairs(cls, *bases: str) -> GeneratorSignature:
        """Signature ``(x, x*, y, y*, ...)`` with each variable paired to its conjugate."""
        names: list[str] = []
        star: list[int] = []
        for k, base in enumerate(bases):
            names += [base, base + "*"]
            star += [2 * k + 1, 2 * k]
        return cls(tuple(names), tuple(star))

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, gen: int | str) -> int:
        if isinstance(gen, str):
            try:
                return self.names.index(gen)
            except ValueError:
                raise SignatureError(f"unknown generator {gen!r}") from None
        if not isinstance(gen, int) or not 0 <= gen < self.n:
            raise SignatureError(f"generator index {gen!r} out of range for {self.names}")
        return gen


def _sort_with_sign(indices: Iterable[int]) -> tuple[Monomial | None, int]:
    """Canonical order of a product of generators, or ``None`` if it vanishes."""
    seq = list(indices)
    if len(set(seq)) != len(seq):
        return None, 0
    inversions = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    return tuple(sorted(seq)), (-1) ** inversions


def _merge_sign(a: Monomial, b: Monomial) -> int:
    # a, b already sorted and disjoint
    crossings = 0
    for x in a:
        for y in b:
            if x > y:
                crossings += 1
    return -1 if crossings % 2 else 1


def _is_zero(c: Any) -> bool:
    return c == 0


@dataclass(frozen=True, eq=False)
class GrassmannElement:
    signature: GeneratorSignature
    terms: Mapping[Monomial, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {m: c for m, c in self.terms.items() if not _is_zero(c)}
        for m in clean:
            if any(not 0 <= i < self.signature.n for i in m) or list(m) != sorted(set(m)):
                raise SignatureError(f"monomial {m} is not canonical for {self.signature.names}")
        object.__setattr__(self, "terms", MappingProxyType(clean))

    # construction -----------------------------------------------------

    @classmethod
    def zero(cls, sig: GeneratorSignature) -> GrassmannElement:
        return cls(sig, {})

    @classmethod
    def scalar(cls, sig: GeneratorSignature, c: Any) -> GrassmannElement:
        return cls(sig, {(): c})

    @classmethod
    def generator(cls, sig: GeneratorSignature, gen: int | str, c: Any = 1) -> GrassmannElement:
        return cls(sig, {(sig.index(gen),): c})

    @classmethod
    def from_products(cls, sig: GeneratorSignature,
                      products: Iterable[tuple[Any, Iterable[int | str]]]) -> GrassmannElement:
        """Sum of ``coef * g_{i1} g_{i2} ...`` with generators in any order."""
        acc: dict[Monomial, Any] = {}
        for coef, gens in products:
            mono, sign = _sort_with_sign(sig.index(g) for g in gens)
            if mono is None:
                continue
            acc[mono] = acc.get(mono, 0) + sign * coef
        return cls(sig, acc)

    # inspection -------------------------------------------------------

    def coefficient(self, mono: Iterable[int | str] = ()) -> Any:
        key = tuple(self.signature.index(g) for g in mono)
        return self.terms.get(key, 0)

    @property
    def body(self) -> Any:
        return self.terms.get((), 0)

    def is_zero(self) -> bool:
        return not self.terms

    def is_body_only(self) -> bool:
        return all(m == () for m in self.terms)

    def parity(self) -> int | None:
        """0 or 1 for homogeneous elements, ``None`` for mixed ones (zero is even)."""
        ps = {len(m) % 2 for m in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def even_part(self) -> GrassmannElement:
        return GrassmannElement(self.signature, {m: c for m, c in self.terms.items() if len(m) % 2 == 0})

    def odd_part(self) -> GrassmannElement:
        return GrassmannElement(self.signature, {m: c for m, c in self.terms.items() if len(m) % 2 == 1})

    def grade_involution(self) -> GrassmannElement:
        """Flip the sign of the odd part."""
        return GrassmannElement(self.signature,
                                {m: (-c if len(m) % 2 else c) for m, c in self.terms.items()})

    def map_coefficients(self, fn: Callable[[Any], Any]) -> GrassmannElement:
        return GrassmannElement(self.signature, {m: fn(c) for m, c in self.terms.items()})

    def max_abs(self) -> float:
        """Largest coefficient magnitude; 0.0 for the zero element."""
        return max((abs(complex(c)) for c in self.terms.values()), default=0.0)

    # operators --------------------------------------------------------

    def _coerce(self, other: Any) -> GrassmannElement:
        if isinstance(other, GrassmannElement):
            if other.signature != self.signature:
                raise SignatureError("operands have different generator signatures")
            return other
        return GrassmannElement.scalar(self.signature, other)

    def __add__(self, other: Any) -> GrassmannElement:
        return g_add(self, self._coerce(other))

    __radd__ = __add__

    def __neg__(self) -> GrassmannElement:
        return g_scale(-1, self)

    def __sub__(self, other: Any) -> GrassmannElement:
        return g_add(self, -self._coerce(other))

    def __rsub__(self, other: Any) -> GrassmannElement:
        return g_add(self._coerce(other), -self)

    def __mul__(self, other: Any) -> GrassmannElement:
        if isinstance(other, GrassmannElement):
            return g_mul(self, other)
        return g_scale(other, self)

    def __rmul__(self, other: Any) -> GrassmannElement:
        # scalars commute with everything
        return g_scale(other, self)

    def __truediv__(self, k: Any) -> GrassmannElement:
        return GrassmannElement(self.signature, {m: c / k for m, c in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrassmannElement):
            try:
                other = self._coerce(other)
            except SignatureError:
                return NotImplemented
        if other.signature != self.signature:
            return False
        return dict(self.terms) == dict(other.terms)

    __hash__ = None  # type: ignore[assignment]

    def star(self) -> GrassmannElement:
        return g_star(self)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (len(m), m)):
            mono = "*".join(f"{self.signature.names[i]}" for i in m) or "1"
            parts.append(f"({self.terms[m]})" + ("" if not m else f"·{mono}"))
        return " + ".join(parts)


def _check_same(a: GrassmannElement, b: GrassmannElement) -> None:
    if a.signature != b.signature:
        raise SignatureError("operands have different generator signatures")


def g_add(a: GrassmannElement, b: GrassmannElement) -> GrassmannElement:
    _check_same(a, b)
    acc = dict(a.terms)
    for m, c in b.terms.items():
        acc[m] = acc[m] + c if m in acc else c
    return GrassmannElement(a.signature, acc)


def g_scale(c: Any, a: GrassmannElement) -> GrassmannElement:
    return GrassmannElement(a.signature, {m: c * v for m, v in a.terms.items()})


def g_mul(a: GrassmannElement, b: GrassmannElement) -> GrassmannElement:
    _check_same(a, b)
    acc: dict[Monomial, Any] = {}
    for ma, ca in a.terms.items():
        sa = set(ma)
        for mb, cb in b.terms.items():
            if sa.intersection(mb):
                continue
            mono = tuple(sorted(ma + mb))
            term = ca * cb if _merge_sign(ma, mb) > 0 else -(ca * cb)
            acc[mono] = acc[mono] + term if mono in acc else term
    return GrassmannElement(a.signature, acc)


def g_star(a: GrassmannElement) -> GrassmannElement:
    """Antilinear involution: conjugate coefficients, swap star partners, reverse order."""
    sig = a.signature
    products = []
    for m, c in a.terms.items():
        image = [sig.star_pairing[i] for i in reversed(m)]
        products.append((c.conjugate(), image))
    return GrassmannElement.from_products(sig, products)


def g_deriv_left(a: GrassmannElement, gen: int | str) -> GrassmannElement:
    """Left derivative: anticommute ``gen`` to the front, then delete it."""
    i = a.signature.index(gen)
    acc: dict[Monomial, Any] = {}
    for m, c in a.terms.items():
        if i not in m:
            continue
        pos = m.index(i)
        acc[m[:pos] + m[pos + 1:]] = -c if pos % 2 else c
    return GrassmannElement(a.signature, acc)


def g_berezin(a: GrassmannElement, gen: int | str) -> GrassmannElement:
    """Berezin integral over one generator.

    Kept as its own function rather than an alias so that the two can be
    checked against each other; it strips the generator from each monomial
    after pulling it to the front by explicit pairwise swaps.
    """
    i = a.signature.index(gen)
    acc: dict[Monomial, Any] = {}
    for m, c in a.terms.items():
        if i not in m:
            continue  # integral of anything free of gen vanishes
        seq = list(m)
        sign = 1
        k = seq.index(i)
        while k > 0:
            seq[k - 1], seq[k] = seq[k], seq[k - 1]
            sign = -sign
            k -= 1
        acc[tuple(seq[1:])] = c if sign > 0 else -c
    return GrassmannElement(a.signature, acc)


def berezin_measure(a: GrassmannElement, *measure: int | str) -> GrassmannElement:
    """Evaluate ``∫ d g_1 d g_2 ... d g_k  a`` with the innermost differential applied first.

    ``berezin_measure(f, "xi*", "xi")`` is ``∫dξ* (∫dξ f)``.
    """
    out = a
    for gen in reversed(measure):
        out = g_berezin(out, gen)
    return out


def g_exp(a: GrassmannElement) -> GrassmannElement:
    """Exponential of a body-free element; the series stops at the nilpotency degree."""
    if not _is_zero(a.body):
        raise NonNilpotentError("exp is only defined here for elements with zero body")
    result = GrassmannElement.scalar(a.signature, 1)
    term = result
    for k in range(1, a.signature.n + 2):
        term = g_mul(term, a) / k
        if term.is_zero():
            break
        result = g_add(result, term)
    return result


def g_substitute(a: GrassmannElement, images: Mapping[int | str, GrassmannElement],
                 target: GeneratorSignature | None = None) -> GrassmannElement:
    """Algebra map sending each generator to an odd element of ``target``.

    Generators missing from ``images`` are sent to the generator with the
    same name in ``target``.  Odd images keep the anticommutation relations,
    so the map is a well-defined homomorphism.
    """
    target = target or a.signature
    src = a.signature
    image_of: list[GrassmannElement] = []
    explicit = {src.index(k): v for k, v in images.items()}
    for i, name in enumerate(src.names):
        img = explicit.get(i)
        if img is None:
            img = GrassmannElement.generator(target, name)
        if img.signature != target:
            raise SignatureError("substitution image lives in a different signature")
        if img.parity() != 1 and not img.is_zero():
            raise SignatureError(f"image of {name!r} must be odd")
        image_of.append(img)
    out = GrassmannElement.zero(target)
    for m, c in a.terms.items():
        term = GrassmannElement.scalar(target, c)
        for i in m:
            term = g_mul(term, image_of[i])
        out = g_add(out, term)
    return out

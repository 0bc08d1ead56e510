"""Exact fields: ℚ, 𝔽_p and towers of simple extensions over them.

Raw values are what the arithmetic methods consume and return:

* over ℚ, a :class:`fractions.Fraction`;
* over 𝔽_p, an ``int`` in ``range(p)``;
* in an extension step of degree d, a tuple of d raw values of the field
  below, the coordinates in the power basis of the step generator.

Raw values are canonical, so ``==`` is field equality.  :class:`FieldElement`
wraps a raw value with operator overloading for callers.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Iterator, Sequence

from ..errors import UsageError
from . import poly as P


class ExactField:
    """A base field (``parent is None``) or one simple extension step."""

    def __init__(self, *, characteristic: int = 0, parent: "ExactField | None" = None,
                 modulus: Sequence | None = None, name: str | None = None):
        self.parent = parent
        self.name = name
        if parent is None:
            self.characteristic = characteristic
            self.step_degree = 1
            self.modulus = None
            self.depth = 0
            self.degree = 1
            self.zero = Fraction(0) if characteristic == 0 else 0
            self.one = Fraction(1) if characteristic == 0 else 1
        else:
            self.characteristic = parent.characteristic
            self.modulus = tuple(modulus)
            d = len(self.modulus) - 1
            self.step_degree = d
            self.depth = parent.depth + 1
            self.degree = parent.degree * d
            self.zero = (parent.zero,) * d
            self.one = (parent.one,) + (parent.zero,) * (d - 1)

    # -- constructors ----------------------------------------------------
    # base fields are shared so that towers built separately have a common prefix
    _bases: dict[int, "ExactField"] = {}

    @classmethod
    def rationals(cls) -> "ExactField":
        if 0 not in cls._bases:
            cls._bases[0] = cls(characteristic=0, name="Q")
        return cls._bases[0]

    @classmethod
    def prime_field(cls, p: int) -> "ExactField":
        if p < 2 or any(p % k == 0 for k in range(2, int(p ** 0.5) + 1)):
            raise UsageError(f"{p} is not prime")
        if p not in cls._bases:
            cls._bases[p] = cls(characteristic=p, name=f"GF({p})")
        return cls._bases[p]

    # -- structure -------------------------------------------------------
    @property
    def is_base(self) -> bool:
        return self.parent is None

    @property
    def base(self) -> "ExactField":
        f = self
        while f.parent is not None:
            f = f.parent
        return f

    @property
    def is_finite(self) -> bool:
        return self.characteristic != 0

    @property
    def size(self) -> int | None:
        return self.characteristic ** self.degree if self.is_finite else None

    def chain(self) -> list["ExactField"]:
        """Tower from the base field up to self."""
        out = []
        f: ExactField | None = self
        while f is not None:
            out.append(f)
            f = f.parent
        return out[::-1]

    def has_prefix(self, k: "ExactField") -> bool:
        return any(f is k for f in self.chain())

    def degree_over(self, k: "ExactField") -> int:
        if not self.has_prefix(k):
            raise UsageError("field is not a tower prefix")
        return self.degree // k.degree

    def __repr__(self):
        if self.name:
            return f"<ExactField {self.name}>"
        return f"<ExactField degree {self.degree} over {self.base.name}>"

    # -- raw arithmetic --------------------------------------------------
    def add(self, a, b):
        if self.parent is None:
            return a + b if self.characteristic == 0 else (a + b) % self.characteristic
        pa = self.parent.add
        return tuple(pa(x, y) for x, y in zip(a, b))

    def neg(self, a):
        if self.parent is None:
            return -a if self.characteristic == 0 else (-a) % self.characteristic
        pn = self.parent.neg
        return tuple(pn(x) for x in a)

    def sub(self, a, b):
        if self.parent is None:
            return a - b if self.characteristic == 0 else (a - b) % self.characteristic
        ps = self.parent.sub
        return tuple(ps(x, y) for x, y in zip(a, b))

    def mul(self, a, b):
        if self.parent is None:
            return a * b if self.characteristic == 0 else (a * b) % self.characteristic
        F = self.parent
        prod = P.mul(F, P.trim(F, a), P.trim(F, b))
        return self._reduce(prod)

    def _reduce(self, coeffs):
        F, m, d = self.parent, self.modulus, self.step_degree
        c = list(coeffs)
        # modulus is monic, so no inversions are needed
        for i in range(len(c) - 1, d - 1, -1):
            t = c[i]
            if t == F.zero:
                continue
            for j in range(d):
                if m[j] != F.zero:
                    c[i - d + j] = F.sub(c[i - d + j], F.mul(t, m[j]))
        c = c[:d]
        return tuple(c) + (F.zero,) * (d - len(c))

    def inv(self, a):
        if a == self.zero:
            raise ZeroDivisionError("inverse of zero")
        if self.parent is None:
            if self.characteristic == 0:
                return 1 / a
            return pow(a, -1, self.characteristic)
        F = self.parent
        g, s, _ = P.xgcd(F, P.trim(F, a), list(self.modulus))
        if len(g) != 1:
            raise ArithmeticError("modulus is reducible: element has no inverse")
        return self._reduce(s) if s else self.zero

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        if e < 0:
            a, e = self.inv(a), -e
        result, base = self.one, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def is_zero(self, a) -> bool:
        return a == self.zero

    def from_int(self, n: int):
        if self.parent is None:
            return Fraction(n) if self.characteristic == 0 else n % self.characteristic
        return (self.parent.from_int(n),) + (self.parent.zero,) * (self.step_degree - 1)

    @property
    def gen(self):
        """Raw value of the step generator (the class of T)."""
        if self.parent is None:
            raise UsageError("a base field has no step generator")
        if self.step_degree == 1:
            return (self.parent.neg(self.modulus[0]),)
        return (self.parent.zero, self.parent.one) + (self.parent.zero,) * (self.step_degree - 2)

    def embed(self, x, source: "ExactField"):
        """Raw value of a prefix field viewed in self."""
        if source is self:
            return x
        if self.parent is None:
            raise UsageError("source field is not a prefix of this field")
        inner = self.parent.embed(x, source)
        return (inner,) + (self.parent.zero,) * (self.step_degree - 1)

    def generators_over(self, k: "ExactField") -> list:
        """Raw values (in self) of the step generators strictly above ``k``."""
        steps = self.chain()
        idx = next(i for i, f in enumerate(steps) if f is k)
        return [self.embed(f.gen, f) for f in steps[idx + 1:]]

    # -- coordinates -----------------------------------------------------
    def coords_over(self, x, k: "ExactField") -> list:
        """Coordinates of x over a prefix field k (basis θ^i · basis(parent/k))."""
        if self is k:
            return [x]
        if self.parent is None:
            raise UsageError("k is not a tower prefix of this field")
        out = []
        for c in x:
            out.extend(self.parent.coords_over(c, k))
        return out

    def from_coords_over(self, vec: Sequence, k: "ExactField"):
        if self is k:
            (x,) = vec
            return x
        n = self.parent.degree_over(k)
        return tuple(self.parent.from_coords_over(vec[i * n:(i + 1) * n], k)
                     for i in range(self.step_degree))

    # -- conversion ------------------------------------------------------
    def coerce(self, v):
        """Raw value from an int, Fraction, 'a/b' string, nested list or FieldElement."""
        if isinstance(v, FieldElement):
            if v.field is self:
                return v.value
            if self.has_prefix(v.field):
                return self.embed(v.value, v.field)
            raise UsageError("element belongs to an unrelated field")
        if isinstance(v, (list, tuple)):
            if self.parent is None:
                if len(v) == 1:
                    return self.coerce(v[0])
                raise UsageError(f"{v!r} has too many coordinates for a base field")
            if len(v) > self.step_degree:
                raise UsageError(f"{v!r} has more than {self.step_degree} coordinates")
            vals = [self.parent.coerce(c) for c in v]
            return tuple(vals) + (self.parent.zero,) * (self.step_degree - len(vals))
        if self.parent is not None:
            return self.embed(self.base.coerce(v), self.base)
        if isinstance(v, bool):
            raise UsageError("booleans are not field elements")
        if self.characteristic == 0:
            if isinstance(v, (int, Fraction)):
                return Fraction(v)
            if isinstance(v, str):
                return Fraction(v)
        else:
            if isinstance(v, int):
                return v % self.characteristic
            if isinstance(v, str) and v.lstrip("-").isdigit():
                return int(v) % self.characteristic
        raise UsageError(f"cannot read {v!r} as an element of {self!r}")

    def __call__(self, v) -> "FieldElement":
        return FieldElement(self, self.coerce(v))

    def element(self, raw) -> "FieldElement":
        return FieldElement(self, raw)

    def to_json(self, x):
        """Nested coordinate lists; rationals as ints or 'a/b' strings."""
        if self.parent is None:
            if self.characteristic:
                return int(x)
            return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        return [self.parent.to_json(c) for c in x]

    # -- enumeration and sampling ----------------------------------------
    def elements(self) -> Iterator:
        if not self.is_finite:
            raise UsageError("cannot enumerate an infinite field")
        if self.parent is None:
            yield from range(self.characteristic)
            return
        for coords in itertools.product(list(self.parent.elements()), repeat=self.step_degree):
            yield tuple(coords)

    def random(self, rng: random.Random, height: int = 5):
        if self.parent is None:
            if self.characteristic:
                return rng.randrange(self.characteristic)
            return Fraction(rng.randint(-height, height), rng.randint(1, height))
        return tuple(self.parent.random(rng, height) for _ in range(self.step_degree))


class FieldElement:
    """A raw value together with the field it lives in."""

    __slots__ = ("field", "value")

    def __init__(self, field: ExactField, value):
        self.field = field
        self.value = value

    def _other(self, o):
        return self.field.coerce(o)

    def __add__(self, o):
        return FieldElement(self.field, self.field.add(self.value, self._other(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return FieldElement(self.field, self.field.sub(self.value, self._other(o)))

    def __rsub__(self, o):
        return FieldElement(self.field, self.field.sub(self._other(o), self.value))

    def __mul__(self, o):
        return FieldElement(self.field, self.field.mul(self.value, self._other(o)))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return FieldElement(self.field, self.field.div(self.value, self._other(o)))

    def __rtruediv__(self, o):
        return FieldElement(self.field, self.field.div(self._other(o), self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.value))

    def __eq__(self, o):
        if isinstance(o, FieldElement) and o.field is not self.field:
            try:
                return self.value == self.field.coerce(o)
            except UsageError:
                return False
        try:
            return self.value == self._other(o)
        except UsageError:
            return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def is_zero(self) -> bool:
        return self.value == self.field.zero

    def coords(self, k: ExactField | None = None) -> list:
        return self.field.coords_over(self.value, k or self.field.base)

    def to_json(self):
        return self.field.to_json(self.value)

    def __repr__(self):
        return f"FieldElement({self.to_json()!r})"


# ---------------------------------------------------------------------------
# linear algebra over a field


class Span:
    """Incremental row echelon form that remembers how each row was built.

    ``add(v)`` either stores v (returns None) or returns coefficients c with
    ``v = Σ c_i · added_i`` over previously *stored* vectors.
    """

    def __init__(self, F: ExactField):
        self.F = F
        self.rows: list[tuple[int, list, list]] = []  # (pivot, reduced vector, combination)
        self.count = 0

    def reduce(self, v):
        F = self.F
        v = list(v)
        comb = [F.zero] * self.count
        for pivot, row, rcomb in self.rows:
            c = v[pivot]
            if c == F.zero:
                continue
            for i in range(pivot, len(v)):
                if row[i] != F.zero:
                    v[i] = F.sub(v[i], F.mul(c, row[i]))
            for i, rc in enumerate(rcomb):
                if rc != F.zero:
                    comb[i] = F.add(comb[i], F.mul(c, rc))
        return v, comb

    def add(self, v):
        F = self.F
        red, comb = self.reduce(v)
        pivot = next((i for i, x in enumerate(red) if x != F.zero), None)
        if pivot is None:
            return comb
        inv = F.inv(red[pivot])
        row = [F.mul(inv, x) for x in red]
        # row = (v - Σ comb·stored) / red[pivot]
        rcomb = [F.mul(inv, F.neg(c)) for c in comb] + [inv]
        for i, (p, r, rc) in enumerate(self.rows):
            rc.extend([F.zero] * (self.count + 1 - len(rc)))
        self.rows.append((pivot, row, rcomb))
        self.count += 1
        return None

    def contains(self, v) -> bool:
        red, _ = self.reduce(v)
        return all(x == self.F.zero for x in red)

    @property
    def rank(self) -> int:
        return len(self.rows)


def solve(F: ExactField, columns: Sequence[Sequence], target: Sequence):
    """Coefficients c with Σ c_j·columns[j] = target, or None if unsolvable."""
    span = Span(F)
    for col in columns:
        if span.add(col) is not None:
            raise UsageError("columns must be linearly independent")
    red, comb = span.reduce(target)
    if any(x != F.zero for x in red):
        return None
    return comb


# ---------------------------------------------------------------------------
# field operations


def extend(k: ExactField, modulus: Sequence, *, check: bool = True, name: str | None = None) -> ExactField:
    """k[T]/(modulus) for a monic, separable polynomial irreducible over k."""
    coeffs = [k.coerce(c) for c in modulus]
    coeffs = P.trim(k, coeffs)
    if len(coeffs) < 2:
        raise UsageError("extension polynomial must have degree ≥ 1")
    if coeffs[-1] != k.one:
        raise UsageError("extension polynomial must be monic")
    if check:
        from .factor import irreducible_over  # local: factor depends on this module

        verdict = irreducible_over(k, coeffs)
        if not verdict:
            raise UsageError(f"extension rejected: {verdict.reason}")
    return ExactField(parent=k, modulus=coeffs, name=name)


def finite_field(p: int, n: int = 1) -> ExactField:
    """𝔽_{p^n} as one step over 𝔽_p, using the first monic irreducible in lexicographic order."""
    base = ExactField.prime_field(p)
    if n == 1:
        return base
    from .factor import irreducible_over

    for tail in itertools.product(range(p), repeat=n):
        coeffs = list(tail) + [1]
        if coeffs[0] == 0:
            continue
        if irreducible_over(base, coeffs):
            return ExactField(parent=base, modulus=coeffs, name=f"GF({p}^{n})")
    raise AssertionError("unreachable: irreducible polynomials exist in every degree")


def powers_coords(L: ExactField, beta, k: ExactField, count: int) -> list[list]:
    out, x = [], L.one
    for _ in range(count):
        out.append(L.coords_over(x, k))
        x = L.mul(x, beta)
    return out


def minimal_polynomial(L: ExactField, beta, k: ExactField | None = None) -> list:
    """Monic minimal polynomial of ``beta`` over the prefix ``k`` (ascending raw coefficients)."""
    k = k or L.base
    if isinstance(beta, FieldElement):
        beta = L.coerce(beta)
    span = Span(k)
    x = L.one
    for _ in range(L.degree_over(k) + 1):
        comb = span.add(L.coords_over(x, k))
        if comb is not None:
            return [k.neg(c) for c in comb] + [k.one]
        x = L.mul(x, beta)
    raise AssertionError("powers must become dependent by degree [L:k]")


def in_subfield(L: ExactField, x, gamma, k: ExactField) -> list | None:
    """Coordinates of x in the basis 1, γ, γ², … of k(γ), or None if x ∉ k(γ)."""
    d = len(minimal_polynomial(L, gamma, k)) - 1
    cols = powers_coords(L, gamma, k, d)
    return solve(k, cols, L.coords_over(x, k))

"""Codes, extended codes and 2-codes of Galois data over a base field.

A code of sort (n, m) is ``a`` (the n lower coefficients of the monic
minimal polynomial p of a generator α, ascending, leading 1 implicit) and
``b₁..b_m`` (coordinates of σ_i(α) in the basis 1, α, …, α^{n−1}).
Decoding rebuilds L = K[T]/(p) and reads σ_i off as T ↦ b_i(T); letting
T range over the roots of p gives the automorphism tuples up to conjugation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import InvariantError, UsageError
from .fields import poly as P
from .fields.factor import irreducible_over, roots_in
from .fields.galois import FieldHom, GaloisExtension
from .fields.tower import ExactField, Span, in_subfield, minimal_polynomial, powers_coords


@dataclass(frozen=True)
class GaloisCode:
    n: int
    m: int
    a: tuple
    b: tuple

    def __post_init__(self):
        if len(self.a) != self.n or len(self.b) != self.m or any(len(r) != self.n for r in self.b):
            raise UsageError(f"code shape does not match the declared sort (n={self.n}, m={self.m})")

    def to_json(self, K: ExactField) -> dict:
        return {"sort": {"n": self.n, "m": self.m},
                "a": [K.to_json(x) for x in self.a],
                "b": [[K.to_json(x) for x in row] for row in self.b]}

    @classmethod
    def from_json(cls, K: ExactField, doc: dict) -> "GaloisCode":
        try:
            n, m = int(doc["sort"]["n"]), int(doc["sort"]["m"])
            a = tuple(K.coerce(x) for x in doc["a"])
            b = tuple(tuple(K.coerce(x) for x in row) for row in doc.get("b", []))
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed code: {exc}") from None
        return cls(n, m, a, b)


@dataclass(frozen=True)
class ExtendedCode:
    code: GaloisCode
    c: tuple

    def __post_init__(self):
        if len(self.c) != self.code.n:
            raise UsageError(f"marked point needs {self.code.n} coordinates")

    def to_json(self, K: ExactField) -> dict:
        d = self.code.to_json(K)
        d["c"] = [K.to_json(x) for x in self.c]
        return d

    @classmethod
    def from_json(cls, K: ExactField, doc: dict) -> "ExtendedCode":
        if "c" not in doc:
            raise UsageError("extended code needs 'c'")
        return cls(GaloisCode.from_json(K, doc), tuple(K.coerce(x) for x in doc["c"]))


@dataclass(frozen=True)
class TwoCode:
    first: ExtendedCode
    second: ExtendedCode

    def to_json(self, K: ExactField) -> dict:
        return {"first": self.first.to_json(K), "second": self.second.to_json(K)}

    @classmethod
    def from_json(cls, K: ExactField, doc: dict) -> "TwoCode":
        try:
            return cls(ExtendedCode.from_json(K, doc["first"]), ExtendedCode.from_json(K, doc["second"]))
        except KeyError as exc:
            raise UsageError(f"two-code needs {exc}") from None


@dataclass(frozen=True)
class Validation:
    valid: bool
    clause: str | None = None
    detail: str = ""
    intersection_degree: int | None = None

    def __bool__(self) -> bool:
        return self.valid

    def to_json(self) -> dict:
        d = {"valid": self.valid, "clause": self.clause, "detail": self.detail}
        if self.intersection_degree is not None:
            d["intersection_degree"] = self.intersection_degree
        return d


# ---------------------------------------------------------------------------
# encoding


def _coords_in_powers(L: ExactField, K: ExactField, alpha, x, n: int) -> tuple:
    span = Span(K)
    for v in powers_coords(L, alpha, K, n):
        span.add(v)
    red, comb = span.reduce(L.coords_over(x, K))
    if any(v != K.zero for v in red):
        raise InvariantError("element is not in K(α)")
    return tuple(comb)


def _sigma(ext: GaloisExtension, s) -> FieldHom:
    return ext.automorphisms[s] if isinstance(s, int) else s


def encode(ext: GaloisExtension, sigmas: Sequence, alpha) -> GaloisCode:
    """Code of (L, σ₁, …, σ_m) relative to the generator α of L over K."""
    L, K = ext.top, ext.base
    alpha = L.coerce(alpha)
    p = minimal_polynomial(L, alpha, K)
    n = L.degree_over(K)
    if len(p) - 1 != n:
        raise UsageError(f"α generates a subfield of degree {len(p) - 1}, not {n}")
    b = tuple(_coords_in_powers(L, K, alpha, _sigma(ext, s)(alpha), n) for s in sigmas)
    return GaloisCode(n, len(b), tuple(p[:-1]), b)


def encode_extended(ext: GaloisExtension, sigmas: Sequence, alpha, beta) -> ExtendedCode:
    code = encode(ext, sigmas, alpha)
    L, K = ext.top, ext.base
    c = _coords_in_powers(L, K, L.coerce(alpha), L.coerce(beta), code.n)
    return ExtendedCode(code, c)


def encode_two(ext1: GaloisExtension, sigmas1: Sequence, alpha1, marked1,
               ext2: GaloisExtension, sigmas2: Sequence, alpha2, marked2) -> TwoCode:
    """Validated 2-code; ``marked1``/``marked2`` are α₀ written in each field."""
    K = ext1.base
    if ext2.base is not K:
        raise UsageError("both extensions must share the base field")
    r1 = minimal_polynomial(ext1.top, ext1.top.coerce(marked1), K)
    r2 = minimal_polynomial(ext2.top, ext2.top.coerce(marked2), K)
    if r1 != r2:
        raise UsageError("marked points have different minimal polynomials")
    two = TwoCode(encode_extended(ext1, sigmas1, alpha1, marked1),
                  encode_extended(ext2, sigmas2, alpha2, marked2))
    verdict = validate_two_code(K, two)
    if not verdict:
        raise InvariantError(f"not a 2-code: {verdict.clause}: {verdict.detail}")
    return two


# ---------------------------------------------------------------------------
# validation


def code_field(K: ExactField, code: GaloisCode) -> ExactField:
    """L = K[T]/(p) without re-certifying p (callers validate first)."""
    return ExactField(parent=K, modulus=list(code.a) + [K.one])


def _element(L: ExactField, coords) -> tuple:
    return L.from_coords_over(list(coords), L.parent)


def validate_code(K: ExactField, code: GaloisCode) -> Validation:
    p = list(code.a) + [K.one]
    verdict = irreducible_over(K, p)
    if not verdict:
        return Validation(False, "irreducible", verdict.reason)
    if len(P.gcd(K, p, P.derivative(K, p))) > 1:
        return Validation(False, "separable", "p shares a factor with p'")
    L = code_field(K, code)
    roots = roots_in(L, p, K)
    if len(roots) != code.n:
        return Validation(False, "normal", f"L contains {len(roots)} of the {code.n} roots of p")
    lifted = [L.embed(c, K) for c in p]
    for i, row in enumerate(code.b):
        if P.evaluate(L, lifted, _element(L, row)) != L.zero:
            return Validation(False, "root", f"b{i + 1} does not encode a root of p")
    return Validation(True)


def _relative_minpoly(L: ExactField, K: ExactField, gamma, alpha, r_deg: int) -> list[list]:
    """Minimal polynomial of α over K(γ), coefficients as K-polynomials in γ (ascending).

    Returns rows q_j with q(γ, T) = Σ_j q_j(γ) T^j.
    """
    span = Span(K)
    labels = []
    apow = L.one
    d = 0
    while True:
        g = L.one
        found = None
        for i in range(r_deg):
            v = L.mul(g, apow)
            if i == 0:
                found = span.add(L.coords_over(v, K))
                if found is not None:
                    break
            else:
                if span.add(L.coords_over(v, K)) is not None:
                    raise InvariantError("γ-powers dependent: degree of r is wrong")
            labels.append((i, d))
            g = L.mul(g, gamma)
        if found is not None:
            rows = [[K.zero] * r_deg for _ in range(d)]
            for (i, j), c in zip(labels, found):
                rows[j][i] = K.neg(c)
            rows.append([K.one] + [K.zero] * (r_deg - 1))
            return rows
        apow = L.mul(apow, alpha)
        d += 1


def validate_two_code(K: ExactField, two: TwoCode) -> Validation:
    for side, half in (("first", two.first), ("second", two.second)):
        v = validate_code(K, half.code)
        if not v:
            return Validation(False, f"{side}: {v.clause}", v.detail)
    L1, L2 = code_field(K, two.first.code), code_field(K, two.second.code)
    gamma, delta = _element(L1, two.first.c), _element(L2, two.second.c)
    r = minimal_polynomial(L1, gamma, K)
    if minimal_polynomial(L2, delta, K) != r:
        return Validation(False, "conjugate", "γ and δ have different minimal polynomials over K")
    roots = roots_in(L1, r, K)
    if len(roots) != len(r) - 1 or any(in_subfield(L1, x, gamma, K) is None for x in roots):
        return Validation(False, "normal", "K(γ) does not contain all roots of r")
    rows = _relative_minpoly(L1, K, gamma, L1.gen, len(r) - 1)
    q_delta = []
    for row in rows:
        acc, g = L2.zero, L2.one
        for c in row:
            acc = L2.add(acc, L2.mul(L2.embed(c, K), g))
            g = L2.mul(g, delta)
        q_delta.append(acc)
    verdict = irreducible_over(L2, q_delta)
    if not verdict:
        return Validation(False, "irreducible over M", f"q(δ,T) {verdict.reason}")
    return Validation(True, intersection_degree=len(r) - 1)


# ---------------------------------------------------------------------------
# decoding


@dataclass(frozen=True)
class Decoded:
    extension: GaloisExtension      # Gal(K[T]/(p) / K), automorphism i sends T to roots[i]
    tuples: tuple                   # sorted index tuples, one per distinct decoding
    marked: tuple | None = None     # images of the marked point per decoding (extended codes)

    @property
    def orbit_size(self) -> int:
        return len(self.tuples)

    def to_json(self) -> dict:
        ext = self.extension
        return {
            "orbit_size": self.orbit_size,
            "automorphisms": [s.to_json() for s in ext.automorphisms],
            "tuples": [list(t) for t in self.tuples],
        }


def decode_all(K: ExactField, code: GaloisCode) -> Decoded:
    """Every automorphism tuple the code describes, as T runs over the roots of p."""
    v = validate_code(K, code)
    if not v:
        raise UsageError(f"not a code: {v.clause}: {v.detail}")
    L = code_field(K, code)
    p = list(code.a) + [K.one]
    roots = roots_in(L, p, K)
    ext = GaloisExtension(K, L, [FieldHom(L, L, K, [r], check=False) for r in roots])
    rows = [[L.embed(c, K) for c in row] for row in code.b]
    found = set()
    for s in ext.automorphisms:
        root = s.images[0]
        tup = []
        for row in rows:
            target = P.evaluate(L, P.trim(L, row), root)
            tup.append(next(i for i, t in enumerate(ext.automorphisms) if t(root) == target))
        found.add(tuple(tup))
    return Decoded(ext, tuple(sorted(found)))


def transport(decoded: Decoded, ext: GaloisExtension, alpha) -> set[tuple[int, ...]]:
    """Decoded tuples re-indexed in ``ext`` through the isomorphism T ↦ α."""
    L = ext.top
    phi = FieldHom(decoded.extension.top, L, ext.base, [L.coerce(alpha)])
    inv = phi.inverse()
    auts = decoded.extension.automorphisms
    return {tuple(ext.index(phi.compose(auts[i]).compose(inv)) for i in t) for t in decoded.tuples}


def conjugation_orbit(ext: GaloisExtension, sigmas: Sequence[int]) -> set[tuple[int, ...]]:
    """{(ρσ₁ρ⁻¹, …)} computed in the group table."""
    g = ext.group
    return {tuple(int(g.table[g.table[r, s], g.inv(r)]) for s in sigmas) for r in range(g.order)}

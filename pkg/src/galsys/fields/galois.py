"""Explicit Galois extensions: automorphisms as generator images, verified.

An automorphism of L over a tower prefix K is stored as the images (raw
values of L) of the step generators strictly above K.  Applying it to an
element rewrites the power-basis expansion step by step.
"""
from __future__ import annotations

import itertools
from math import gcd
from typing import Sequence

import flint
import numpy as np

from ..errors import InvariantError, UsageError
from ..groups import FiniteGroup, GroupHom
from . import poly as P
from .factor import roots_in
from .tower import ExactField, Span, extend, finite_field


class FieldHom:
    """A K-embedding source → target given by the images of source's generators above K."""

    def __init__(self, source: ExactField, target: ExactField, base: ExactField,
                 images: Sequence, check: bool = True):
        if not source.has_prefix(base) or not target.has_prefix(base):
            raise UsageError("base must be a tower prefix of both fields")
        self.source, self.target, self.base = source, target, base
        self.images = tuple(images)
        self._steps = source.chain()[source.chain().index(base) + 1:]
        if len(self.images) != len(self._steps):
            raise UsageError(f"expected {len(self._steps)} generator images, got {len(self.images)}")
        if check:
            self.verify()

    def _apply(self, x, f: ExactField):
        T = self.target
        if f is self.base:
            return T.embed(x, f)
        img = self.images[self._steps.index(f)]
        acc = T.zero
        for c in reversed(x):
            acc = T.add(T.mul(acc, img), self._apply(c, f.parent))
        return acc

    def __call__(self, x):
        return self._apply(x, self.source)

    def verify(self) -> None:
        """Each generator image is a root of the image of its step polynomial."""
        T = self.target
        for k, f in enumerate(self._steps):
            mapped = [self._apply(c, f.parent) for c in f.modulus]
            val = P.evaluate(T, mapped, self.images[k])
            if val != T.zero:
                raise InvariantError(
                    f"generator {k + 1}: image is not a root of the mapped step polynomial")

    def key(self):
        return tuple(repr(self.target.to_json(v)) for v in self.images)

    def __eq__(self, other):
        return (isinstance(other, FieldHom) and other.source is self.source
                and other.target is self.target and self.images == other.images)

    def __hash__(self):
        return hash(self.images)

    def compose(self, inner: "FieldHom") -> "FieldHom":
        """self ∘ inner."""
        if inner.target is not self.source:
            raise UsageError("composition: fields do not match")
        return FieldHom(inner.source, self.target, self.base,
                        [self(v) for v in inner.images], check=False)

    def is_bijective(self) -> bool:
        return self.source.degree == self.target.degree

    def inverse(self) -> "FieldHom":
        if not self.is_bijective():
            raise UsageError("only isomorphisms can be inverted")
        K, S, T = self.base, self.source, self.target
        n = S.degree_over(K)
        # matrix of self on the K-basis of the source
        basis = [S.from_coords_over([K.one if i == j else K.zero for i in range(n)], K) for j in range(n)]
        span = Span(K)
        for b in basis:
            if span.add(T.coords_over(self(b), K)) is not None:
                raise InvariantError("field map is not injective")
        images = []
        for g in T.generators_over(K):
            red, comb = span.reduce(T.coords_over(g, K))
            images.append(S.from_coords_over(comb, K))
        return FieldHom(T, S, K, images)

    def to_json(self):
        return [self.target.to_json(v) for v in self.images]


def identity_map(L: ExactField, K: ExactField) -> FieldHom:
    return FieldHom(L, L, K, L.generators_over(K), check=False)


class GaloisExtension:
    """L/K Galois with all automorphisms listed; index 0 is the identity.

    ``group.table[i, j]`` is the index of σ_i ∘ σ_j.
    """

    def __init__(self, base: ExactField, top: ExactField, automorphisms: Sequence[FieldHom],
                 name: str | None = None):
        self.base, self.top, self.name = base, top, name
        ident = identity_map(top, base)
        auts = list(automorphisms)
        for s in auts:
            if s.source is not top or s.target is not top or s.base is not base:
                raise UsageError("automorphisms must map the top field to itself over the base")
        if len(set(auts)) != len(auts):
            raise InvariantError("automorphism list has duplicates")
        if ident not in auts:
            raise InvariantError("automorphism list lacks the identity")
        auts.remove(ident)
        auts.insert(0, ident)
        n = top.degree_over(base)
        if len(auts) != n:
            raise InvariantError(f"{len(auts)} automorphisms for an extension of degree {n}: not Galois")
        index = {s: i for i, s in enumerate(auts)}
        table = np.empty((n, n), dtype=np.int64)
        for i, a in enumerate(auts):
            for j, b in enumerate(auts):
                c = a.compose(b)
                if c not in index:
                    raise InvariantError(f"σ{i}∘σ{j} is not in the list")
                table[i, j] = index[c]
        self.automorphisms = tuple(auts)
        self._index = index
        self.group = FiniteGroup(table, identity=0, name=name)

    @property
    def degree(self) -> int:
        return len(self.automorphisms)

    def index(self, sigma: FieldHom) -> int:
        return self._index[sigma]

    def apply(self, i: int, x):
        return self.automorphisms[i](x)

    def fixed_field_is_base(self) -> bool:
        """Only base elements are fixed by every automorphism (checked on a K-basis)."""
        K, L = self.base, self.top
        n = L.degree_over(K)
        rows = []
        for j in range(n):
            e = L.from_coords_over([K.one if i == j else K.zero for i in range(n)], K)
            rows.append([L.coords_over(L.sub(s(e), e), K) for s in self.automorphisms])
        # x = Σ x_j e_j is fixed iff Σ x_j (σ e_j − e_j) = 0 for all σ
        span = Span(K)
        rank = 0
        for j in range(n):
            if span.add([c for block in rows[j] for c in block]) is None:
                rank += 1
        return n - rank == 1

    def to_json(self):
        return {
            "degree": self.degree,
            "automorphisms": [s.to_json() for s in self.automorphisms],
            "table": self.group.table.tolist(),
        }


# ---------------------------------------------------------------------------
# construction


def enumerate_automorphisms(L: ExactField, K: ExactField) -> list[FieldHom]:
    """All K-automorphisms of L, found by sending generators to roots step by step."""
    steps = L.chain()[L.chain().index(K) + 1:]
    out = []

    def rec(k, images):
        if k == len(steps):
            out.append(FieldHom(L, L, K, images, check=False))
            return
        f = steps[k]
        partial = _Partial(L, K, steps[:k], images)
        mapped = [partial(c, f.parent) for c in f.modulus]
        for r in roots_in(L, mapped):
            rec(k + 1, images + [r])

    rec(0, [])
    return sorted(out, key=lambda s: s.key())


class _Partial:
    def __init__(self, L, K, steps, images):
        self.L, self.K, self.steps, self.images = L, K, steps, images

    def __call__(self, x, f):
        L = self.L
        if f is self.K:
            return L.embed(x, f)
        img = self.images[self.steps.index(f)]
        acc = L.zero
        for c in reversed(x):
            acc = L.add(L.mul(acc, img), self(c, f.parent))
        return acc


def galois_extension(base: ExactField, top: ExactField, mode: str = "auto",
                     images: Sequence[Sequence] | None = None, name: str | None = None) -> GaloisExtension:
    """Build a verified GaloisExtension.

    ``auto`` uses Frobenius powers over finite fields and root enumeration
    otherwise; ``supplied`` takes one list of generator images per automorphism.
    """
    if mode == "supplied":
        if images is None:
            raise UsageError("supplied mode needs automorphism images")
        auts = [FieldHom(top, top, base, [top.coerce(v) for v in im]) for im in images]
    elif mode == "auto":
        if top.is_finite:
            q = base.size
            frob = FieldHom(top, top, base, [top.pow(g, q) for g in top.generators_over(base)])
            auts, s = [], identity_map(top, base)
            for _ in range(top.degree_over(base)):
                auts.append(s)
                s = frob.compose(s)
        else:
            auts = enumerate_automorphisms(top, base)
    else:
        raise UsageError(f"unknown automorphism mode {mode!r}")
    return GaloisExtension(base, top, auts, name=name)


def frobenius(p: int, n: int) -> GaloisExtension:
    """𝔽_{p^n}/𝔽_p; automorphism i is x ↦ x^{p^i}."""
    L = finite_field(p, n)
    return galois_extension(L.base, L, "auto", name=f"Gal(GF({p}^{n})/GF({p}))")


def multiquadratic(ds: Sequence[int]) -> GaloisExtension:
    """ℚ(√d₁, …, √d_k) built as a tower; automorphisms are the sign flips."""
    Q = ExactField.rationals()
    L = Q
    for d in ds:
        L = extend(L, [-d, 0, 1])
    gens = L.generators_over(Q)
    auts = []
    for signs in itertools.product((1, -1), repeat=len(ds)):
        auts.append(FieldHom(L, L, Q, [g if s == 1 else L.neg(g) for g, s in zip(gens, signs)]))
    return GaloisExtension(Q, L, auts, name="Q(" + ", ".join(f"sqrt({d})" for d in ds) + ")")


def cyclotomic(n: int) -> GaloisExtension:
    """ℚ(ζ_n) with automorphisms ζ ↦ ζ^k, k a unit mod n."""
    Q = ExactField.rationals()
    phi = [int(c) for c in flint.fmpz_poly.cyclotomic(n).coeffs()]
    L = extend(Q, phi)
    z = L.gen
    auts = [FieldHom(L, L, Q, [L.pow(z, k)]) for k in range(1, n + 1) if gcd(k, n) == 1]
    return GaloisExtension(Q, L, auts, name=f"Q(zeta_{n})")


def kummer_cyclotomic(a: int = 2) -> GaloisExtension:
    """Splitting field ℚ(ζ₃, ∛a) of T³ − a, a not a cube: group S₃."""
    Q = ExactField.rationals()
    Z = extend(Q, [1, 1, 1])
    L = extend(Z, [-a, 0, 0, 1])
    zeta = L.embed(Z.gen, Z)
    r = L.gen
    auts = []
    for e in (1, 2):
        for k in range(3):
            auts.append(FieldHom(L, L, Q, [L.pow(zeta, e), L.mul(L.pow(zeta, k), r)]))
    return GaloisExtension(Q, L, auts, name=f"Q(zeta_3, cbrt({a}))")


def restriction_hom(big: GaloisExtension, small: GaloisExtension) -> GroupHom:
    """Gal(L/K) → Gal(M/K) for an intermediate Galois M, a tower prefix of L."""
    L, M, K = big.top, small.top, big.base
    if small.base is not K or not L.has_prefix(M):
        raise UsageError("the smaller extension must be a tower prefix over the same base")
    gens = M.generators_over(K)
    images = []
    for s in big.automorphisms:
        imgs = [s(L.embed(g, M)) for g in gens]
        proj = []
        for v in imgs:
            proj.append(_project(L, M, v))
        images.append(small.index(FieldHom(M, M, K, proj, check=False)))
    return GroupHom(big.group, small.group, images)


def _project(L: ExactField, M: ExactField, v):
    """Raw value in M of an element of L that lies in the prefix M."""
    f = L
    while f is not M:
        if any(c != f.parent.zero for c in v[1:]):
            raise InvariantError("restriction leaves the intermediate field")
        v, f = v[0], f.parent
    return v


def double_dual_map(phi: FieldHom, g1: GaloisExtension, g2: GaloisExtension):
    """σ ↦ φσφ⁻¹ as a group isomorphism, with the induced map S(Gal(L₁)) → S(Gal(L₂))."""
    from ..system import dual_embedding

    if phi.base is not g1.base or g1.base is not g2.base:
        raise UsageError("φ must fix the common base field")
    if phi.source is not g1.top or phi.target is not g2.top:
        raise UsageError("φ must map the first top field to the second")
    phi.verify()
    inv = phi.inverse()
    images = [g2.index(phi.compose(s).compose(inv)) for s in g1.automorphisms]
    psi = GroupHom(g1.group, g2.group, images)
    return psi, dual_embedding(psi.inverse())

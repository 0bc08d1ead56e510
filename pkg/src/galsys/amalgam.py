"""Fibred triple products of finite groups and the Θ-map assembly.

A :class:`FiberedInstance` is three factor groups G1, G2, G3 with edge groups
H_A (shared by G1, G2), H_B (G1, G3), H_C (G2, G3) and six epimorphisms onto
them.  The triple fibre product is the subgroup of G1×G2×G3 of triples whose
restrictions agree on every edge.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .config import get_caps
from .errors import InvariantError, UsageError
from .groups import FiniteGroup, GroupHom, NormalSubgroup, quotient


def _require_epi(name: str, f: GroupHom, dom: FiniteGroup, cod: FiniteGroup) -> None:
    if f.domain is not dom or f.codomain is not cod:
        raise InvariantError(f"{name}: domain/codomain do not match the instance")
    if not f.is_surjective:
        raise InvariantError(f"{name} is not an epimorphism")


@dataclass(frozen=True, eq=False)
class FiberedInstance:
    g1: FiniteGroup
    g2: FiniteGroup
    g3: FiniteGroup
    ha: FiniteGroup
    hb: FiniteGroup
    hc: FiniteGroup
    r1a: GroupHom
    r2a: GroupHom
    r1b: GroupHom
    r3b: GroupHom
    r2c: GroupHom
    r3c: GroupHom

    def __post_init__(self):
        _require_epi("r1A", self.r1a, self.g1, self.ha)
        _require_epi("r2A", self.r2a, self.g2, self.ha)
        _require_epi("r1B", self.r1b, self.g1, self.hb)
        _require_epi("r3B", self.r3b, self.g3, self.hb)
        _require_epi("r2C", self.r2c, self.g2, self.hc)
        _require_epi("r3C", self.r3c, self.g3, self.hc)

    def compatible(self, s1: int, s2: int, s3: int) -> bool:
        return (self.r1a(s1) == self.r2a(s2) and self.r1b(s1) == self.r3b(s3)
                and self.r2c(s2) == self.r3c(s3))


class FiberProduct:
    """The triple fibre product; materialised unless it is larger than the cap."""

    def __init__(self, inst: FiberedInstance):
        self.instance = inst
        self.sizes = (inst.g1.order, inst.g2.order, inst.g3.order)
        size = self._count()
        self.order = size
        self.triples: np.ndarray | None = None
        if size <= get_caps().fiber_materialize:
            self.triples = _kernels.fiber_triples(
                inst.r1a.images, inst.r2a.images, inst.r1b.images,
                inst.r3b.images, inst.r2c.images, inst.r3c.images)
            self.triples.setflags(write=False)

    def _count(self) -> int:
        # |fibre product| = Σ over edge-compatible (s1, s2) of the matching s3 count
        inst = self.instance
        hb, hc = inst.hb.order, inst.hc.order
        counts = np.zeros((hb, hc), dtype=np.int64)
        np.add.at(counts, (inst.r3b.images, inst.r3c.images), 1)
        total = 0
        r2a = inst.r2a.images
        for s1 in range(inst.g1.order):
            s2 = np.flatnonzero(r2a == inst.r1a(s1))
            total += int(counts[inst.r1b(s1), inst.r2c.images[s2]].sum())
        return total

    @property
    def is_materialized(self) -> bool:
        return self.triples is not None

    def __contains__(self, triple) -> bool:
        s1, s2, s3 = (int(x) for x in triple)
        n1, n2, n3 = self.sizes
        if not (0 <= s1 < n1 and 0 <= s2 < n2 and 0 <= s3 < n3):
            return False
        return self.instance.compatible(s1, s2, s3)

    def _codes(self, t: np.ndarray) -> np.ndarray:
        _, n2, n3 = self.sizes
        return (t[..., 0] * n2 + t[..., 1]) * n3 + t[..., 2]

    @cached_property
    def group(self) -> FiniteGroup:
        """The fibre product as an abstract group, element i = ``triples[i]``."""
        if self.triples is None:
            raise UsageError("fibre product too large to materialise")
        inst, t = self.instance, self.triples
        prod = np.stack([
            inst.g1.table[t[:, None, 0], t[None, :, 0]],
            inst.g2.table[t[:, None, 1], t[None, :, 1]],
            inst.g3.table[t[:, None, 2], t[None, :, 2]],
        ], axis=-1)
        codes = self._codes(t)
        table = np.searchsorted(codes, self._codes(prod))
        ident = int(np.searchsorted(codes, self._codes(np.array(
            [inst.g1.identity, inst.g2.identity, inst.g3.identity]))))
        return FiniteGroup(table, identity=ident, validate=False)

    def index_of(self, triple) -> int:
        if self.triples is None:
            raise UsageError("fibre product too large to materialise")
        codes = self._codes(self.triples)
        code = self._codes(np.asarray(triple))
        i = int(np.searchsorted(codes, code))
        if i >= len(codes) or codes[i] != code:
            raise UsageError(f"{tuple(triple)} is not in the fibre product")
        return i

    def is_subgroup(self) -> bool:
        """Closure under the componentwise product, checked exhaustively."""
        inst, t = self.instance, self.triples
        if t is None:
            raise UsageError("fibre product too large to materialise")
        codes = self._codes(t)
        prod = np.stack([
            inst.g1.table[t[:, None, 0], t[None, :, 0]],
            inst.g2.table[t[:, None, 1], t[None, :, 1]],
            inst.g3.table[t[:, None, 2], t[None, :, 2]],
        ], axis=-1)
        return bool(np.isin(self._codes(prod), codes).all())


def triple_fiber_product(inst: FiberedInstance) -> FiberProduct:
    return FiberProduct(inst)


def _require_iso(name: str, f: GroupHom) -> None:
    if not (f.is_injective and f.is_surjective):
        raise InvariantError(f"{name} is not an isomorphism")


@dataclass(frozen=True, eq=False)
class ThetaInstance:
    w: FiniteGroup
    r_ab: GroupHom
    r1: GroupHom
    r2: GroupHom
    theta1: GroupHom
    theta2: GroupHom
    target: FiberedInstance

    def __post_init__(self):
        t = self.target
        for name, f in (("r_AB", self.r_ab), ("r1", self.r1), ("r2", self.r2)):
            if f.domain is not self.w or not f.is_surjective:
                raise InvariantError(f"{name} must be an epimorphism out of W")
        if self.r_ab.codomain is not t.g1:
            raise InvariantError("r_AB must land in G1")
        if self.theta1.domain is not self.r1.codomain or self.theta1.codomain is not t.g2:
            raise InvariantError("Θ1 must map Q1 onto G2")
        if self.theta2.domain is not self.r2.codomain or self.theta2.codomain is not t.g3:
            raise InvariantError("Θ2 must map Q2 onto G3")
        _require_iso("Θ1", self.theta1)
        _require_iso("Θ2", self.theta2)


@dataclass
class ThetaResult:
    theta: np.ndarray            # |W| x 3 image triples
    image: np.ndarray            # distinct triples of U, lexicographic
    compatible: bool
    counterexample: int | None   # first σ ∈ W whose image leaves the fibre product
    surjective: tuple[bool, bool, bool]

    @property
    def all_surjective(self) -> bool:
        return all(self.surjective)


def assemble_theta(inst: ThetaInstance) -> ThetaResult:
    """Θ(σ) = (r_AB(σ), Θ1(r1(σ)), Θ2(r2(σ))) and its image U."""
    t = inst.target
    c1 = inst.r_ab.images
    c2 = inst.theta1.images[inst.r1.images]
    c3 = inst.theta2.images[inst.r2.images]
    theta = np.stack([c1, c2, c3], axis=1).astype(np.int64)
    ok = ((t.r1a.images[c1] == t.r2a.images[c2])
          & (t.r1b.images[c1] == t.r3b.images[c3])
          & (t.r2c.images[c2] == t.r3c.images[c3]))
    bad = np.flatnonzero(~ok)
    image = np.unique(theta, axis=0)
    surj = tuple(len(np.unique(image[:, k])) == g.order
                 for k, g in enumerate((t.g1, t.g2, t.g3)))
    return ThetaResult(theta, image, not bad.size, int(bad[0]) if bad.size else None, surj)


def induced_map(src: GroupHom, dst: GroupHom) -> GroupHom:
    """The map Q_src -> Q_dst with dst = induced ∘ src, for quotient maps out of one group."""
    if src.domain is not dst.domain:
        raise UsageError("quotient maps must share a domain")
    images = np.full(src.codomain.order, -1, dtype=np.int64)
    for x in range(src.domain.order):
        c = src(x)
        if images[c] < 0:
            images[c] = dst(x)
        elif images[c] != dst(x):
            raise InvariantError("kernel of the source map is not inside the target kernel")
    return GroupHom(src.codomain, dst.codomain, images)


def pushout_instance(w: FiniteGroup, k1, k2, k3) -> tuple[FiberedInstance, tuple[GroupHom, GroupHom, GroupHom]]:
    """Fibred instance of the three quotients W/K_i with edges W/(K_i K_j).

    Returns the instance and the three quotient maps W -> G_i.
    """
    ks = [k.elements if isinstance(k, NormalSubgroup) else tuple(sorted(k)) for k in (k1, k2, k3)]
    (g1, p1), (g2, p2), (g3, p3) = (quotient(w, k) for k in ks)

    def edge(a, b):
        return quotient(w, w.subgroup_generated(ks[a] + ks[b]))

    (ha, pa), (hb, pb), (hc, pc) = edge(0, 1), edge(0, 2), edge(1, 2)
    inst = FiberedInstance(
        g1, g2, g3, ha, hb, hc,
        induced_map(p1, pa), induced_map(p2, pa),
        induced_map(p1, pb), induced_map(p3, pb),
        induced_map(p2, pc), induced_map(p3, pc),
    )
    return inst, (p1, p2, p3)

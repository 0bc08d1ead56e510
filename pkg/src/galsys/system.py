"""The complete system S(G) of a finite group.

The universe is the disjoint union of the quotients G/N over all normal
subgroups N.  Levels are indexed by position in :func:`normal_subgroups`
order, so level 0 is the trivial subgroup (the bottom class, a copy of G)
and the last level is G itself, whose single coset is the constant ``1``.

Relations::

    gN <= hM      iff  N ⊆ M
    C(gN, hM)     iff  gN ⊆ hM
    P(x, y, z)    iff  x, y, z share a level and x·y = z there
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .config import get_caps
from .errors import InvariantError, UsageError
from .groups import (
    FiniteGroup,
    GroupHom,
    NormalSubgroup,
    has_embedding_property,
    iter_homomorphisms,
    normal_subgroups,
    quotient,
)


@dataclass(frozen=True, order=True)
class SystemElement:
    level: int
    coset: int

    def as_list(self) -> list[int]:
        return [self.level, self.coset]


class CompleteSystem:
    """S(G) for a finite group G; immutable after construction."""

    def __init__(self, group: FiniteGroup):
        get_caps().check("subgroup_order", group.order)
        self.source = group
        self.levels: list[NormalSubgroup] = normal_subgroups(group)
        self.quotients: list[FiniteGroup] = []
        self.projections: list[GroupHom] = []
        for n in self.levels:
            q, pi = quotient(group, n)
            self.quotients.append(q)
            self.projections.append(pi)
        sizes = [q.order for q in self.quotients]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        self.size = int(self.offsets[-1])
        get_caps().check("system_size", self.size)
        k = len(self.levels)
        sets = [set(n.elements) for n in self.levels]
        self.level_leq = np.array([[sets[i] <= sets[j] for j in range(k)] for i in range(k)])
        self.level_leq.setflags(write=False)
        self._level_index = {n.elements: i for i, n in enumerate(self.levels)}
        self.bottom = 0
        self.top = k - 1

    # -- indexing --------------------------------------------------------
    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"<CompleteSystem of {self.source!r}: {len(self.levels)} levels, {self.size} elements>"

    @property
    def one(self) -> SystemElement:
        return SystemElement(self.top, 0)

    def level_size(self, level: int) -> int:
        return self.quotients[level].order

    def level_of(self, elements: Iterable[int]) -> int:
        key = tuple(sorted({int(x) for x in elements}))
        try:
            return self._level_index[key]
        except KeyError:
            raise UsageError(f"{list(key)} is not a normal subgroup of the source group") from None

    def flat(self, x: SystemElement) -> int:
        self.check(x)
        return int(self.offsets[x.level]) + x.coset

    def element(self, i: int) -> SystemElement:
        if not 0 <= i < self.size:
            raise UsageError(f"flat index {i} out of range")
        level = int(np.searchsorted(self.offsets, i, side="right")) - 1
        return SystemElement(level, int(i - self.offsets[level]))

    def elements(self) -> Iterator[SystemElement]:
        for level, q in enumerate(self.quotients):
            for c in range(q.order):
                yield SystemElement(level, c)

    def level_elements(self, level: int) -> list[SystemElement]:
        return [SystemElement(level, c) for c in range(self.level_size(level))]

    def check(self, x: SystemElement) -> SystemElement:
        if not isinstance(x, SystemElement):
            raise UsageError(f"expected a SystemElement, got {x!r}")
        if not (0 <= x.level < len(self.levels) and 0 <= x.coset < self.level_size(x.level)):
            raise UsageError(f"{x} does not exist in this system")
        return x

    def identity(self, level: int) -> SystemElement:
        return SystemElement(level, self.quotients[level].identity)

    def coset_of(self, g: int, level: int) -> SystemElement:
        """The coset ``gN`` of a source-group element at a level."""
        return SystemElement(level, self.projections[level](g))

    def coset_members(self, x: SystemElement) -> tuple[int, ...]:
        return tuple(int(v) for v in np.flatnonzero(self.projections[x.level].images == x.coset))

    # -- sorts and relations --------------------------------------------
    def sort(self, x: SystemElement) -> int:
        """Least n such that x has sort n, i.e. the index [G:N]."""
        return self.level_size(self.check(x).level)

    def has_sort(self, x: SystemElement, n: int) -> bool:
        return self.sort(x) <= n

    def leq(self, x: SystemElement, y: SystemElement) -> bool:
        return bool(self.level_leq[self.check(x).level, self.check(y).level])

    def restrict(self, x: SystemElement, level: int) -> SystemElement:
        """The unique coset at ``level`` containing x (needs N_x ⊆ N_level)."""
        self.check(x)
        if not self.level_leq[x.level, level]:
            raise UsageError(f"level {level} is not above level {x.level}")
        return SystemElement(level, int(self.restriction(x.level, level)[x.coset]))

    def restriction(self, lower: int, upper: int) -> np.ndarray:
        """Coset map G/N_lower -> G/N_upper (the graph of C between two classes)."""
        return self._restrictions[(lower, upper)]

    @cached_property
    def _restrictions(self) -> dict[tuple[int, int], np.ndarray]:
        out = {}
        for i, pi in enumerate(self.projections):
            for j, pj in enumerate(self.projections):
                if self.level_leq[i, j]:
                    m = np.empty(self.level_size(i), dtype=np.int64)
                    m[pi.images] = pj.images
                    m.setflags(write=False)
                    out[(i, j)] = m
        return out

    def C(self, x: SystemElement, y: SystemElement) -> bool:
        if not self.leq(x, y):
            return False
        return int(self.restriction(x.level, y.level)[x.coset]) == y.coset

    def P(self, x: SystemElement, y: SystemElement, z: SystemElement) -> bool:
        for e in (x, y, z):
            self.check(e)
        if not (x.level == y.level == z.level):
            return False
        return self.quotients[x.level].mul(x.coset, y.coset) == z.coset

    # -- classes and the lattice ----------------------------------------
    def sim_class(self, x: SystemElement) -> tuple[FiniteGroup, int]:
        """The group [x] and x's position in it."""
        self.check(x)
        return self.quotients[x.level], x.coset

    def _level_join(self, i: int, j: int) -> int:
        g = self.source
        return self.level_of(g.subgroup_generated(self.levels[i].elements + self.levels[j].elements))

    def _level_meet(self, i: int, j: int) -> int:
        return self.level_of(set(self.levels[i].elements) & set(self.levels[j].elements))

    @cached_property
    def join_table(self) -> np.ndarray:
        k = len(self.levels)
        t = np.array([[self._level_join(i, j) for j in range(k)] for i in range(k)], dtype=np.int64)
        t.setflags(write=False)
        return t

    @cached_property
    def meet_table(self) -> np.ndarray:
        k = len(self.levels)
        t = np.array([[self._level_meet(i, j) for j in range(k)] for i in range(k)], dtype=np.int64)
        t.setflags(write=False)
        return t

    def join(self, x: SystemElement, y: SystemElement) -> SystemElement:
        """Identity element of [x] ∨ [y], the class at level N_x N_y."""
        return self.identity(int(self.join_table[self.check(x).level, self.check(y).level]))

    def meet(self, x: SystemElement, y: SystemElement) -> SystemElement:
        """Identity element of [x] ∧ [y], the class at level N_x ∩ N_y."""
        return self.identity(int(self.meet_table[self.check(x).level, self.check(y).level]))

    def join_with_subsystem(self, x: SystemElement, sub: "Subsystem") -> SystemElement:
        """Least x ∨ b over b in the subsystem; attained at its minimal level."""
        self.check(x)
        if sub.parent is not self:
            raise UsageError("subsystem belongs to a different complete system")
        return self.identity(int(self.join_table[x.level, sub.min_level]))

    # -- conjugation -----------------------------------------------------
    def conjugation_perm(self, g: int) -> np.ndarray:
        """Permutation of flat indices induced by conjugation x ↦ (gN)^-1 x (gN)."""
        if not 0 <= g < self.source.order:
            raise UsageError(f"{g} is not an element of the source group")
        perm = np.empty(self.size, dtype=np.int64)
        for level, (q, pi) in enumerate(zip(self.quotients, self.projections)):
            off = self.offsets[level]
            perm[off:off + q.order] = off + q.conjugation_table[pi(g)]
        return perm

    def conjugation_act(self, g: int, x: SystemElement) -> SystemElement:
        self.check(x)
        q = self.quotients[x.level]
        gn = self.projections[x.level](g)
        return SystemElement(x.level, int(q.conjugation_table[gn, x.coset]))

    # -- definability inside a class ------------------------------------
    def unique_index_formula(self, rhos: Sequence[SystemElement], tau: SystemElement) -> frozenset[int]:
        """I(τ) = {j : C(ρ_j, τ)}, positions counted from 0."""
        rhos = [self.check(r) for r in rhos]
        if not rhos:
            raise UsageError("empty class enumeration")
        level = rhos[0].level
        if any(r.level != level for r in rhos) or len(set(rhos)) != len(rhos) \
                or len(rhos) != self.level_size(level):
            raise UsageError("the ρ's must enumerate one full ∼-class without repetition")
        if not self.leq(rhos[0], tau):
            raise UsageError("τ must satisfy τ ≥ ρ₁")
        return frozenset(j for j, r in enumerate(rhos) if self.C(r, tau))

    # -- types over a subsystem -----------------------------------------
    def types_equal(self, beta: Sequence[SystemElement], gamma: Sequence[SystemElement],
                    sub: "Subsystem", check_embedding: bool = False) -> "TypesEqual":
        """Type-equality test for systems of embedding-property groups.

        True iff γ∨S = β∨S =: δ and some isomorphism f: [β] -> [γ] sends β to γ
        and commutes with the projections onto [δ].
        """
        beta = [self.check(b) for b in beta]
        gamma = [self.check(c) for c in gamma]
        for name, tup in (("β", beta), ("γ", gamma)):
            if tup and len({e.level for e in tup}) != 1:
                raise UsageError(f"{name} must lie in a single ∼-class")
        if len(beta) != len(gamma):
            return TypesEqual(False, None, "tuples of different length")
        if sub.parent is not self:
            raise UsageError("subsystem belongs to a different complete system")
        if check_embedding and not has_embedding_property(self.source):
            raise UsageError("source group lacks the embedding property")
        if not beta:
            return TypesEqual(True, None, "empty tuples")
        lb, lg = beta[0].level, gamma[0].level
        delta = int(self.join_table[lb, sub.min_level])
        if int(self.join_table[lg, sub.min_level]) != delta:
            return TypesEqual(False, None, "γ∨S differs from β∨S")
        qb, qg = self.quotients[lb], self.quotients[lg]
        if qb.order != qg.order:
            return TypesEqual(False, None, "classes of different order")
        pb = self.restriction(lb, delta)
        pg = self.restriction(lg, delta)
        allowed = [np.flatnonzero(pg == pb[x]) for x in qb.generators]
        for f in iter_homomorphisms(qb, qg, surjective_only=True, allowed=allowed):
            if all(f(b.coset) == c.coset for b, c in zip(beta, gamma)):
                return TypesEqual(True, f, "isomorphism found")
        return TypesEqual(False, None, "no compatible isomorphism")

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "group_order": self.source.order,
            "levels": [
                {"id": i, "kernel": list(n.elements), "size": self.level_size(i),
                 "identity": self.quotients[i].identity}
                for i, n in enumerate(self.levels)
            ],
            "size": self.size,
            "elements": [x.as_list() for x in self.elements()],
        }


@dataclass
class TypesEqual:
    equal: bool
    witness: GroupHom | None
    reason: str

    def __bool__(self) -> bool:
        return self.equal


@dataclass(frozen=True)
class Subsystem:
    """Upward closure of one level; finite subsystems all have this shape."""

    parent: CompleteSystem
    min_level: int

    def __post_init__(self):
        if not 0 <= self.min_level < len(self.parent.levels):
            raise UsageError(f"level {self.min_level} does not exist")

    @classmethod
    def from_levels(cls, parent: CompleteSystem, levels: Iterable[int]) -> "Subsystem":
        """Validate a level set against the directedness and upward-closure axioms."""
        levels = sorted({int(v) for v in levels})
        if not levels:
            raise InvariantError("a subsystem is non-empty (it contains 1)")
        lset = set(levels)
        for i in levels:
            for j in range(len(parent.levels)):
                if parent.level_leq[i, j] and j not in lset:
                    raise InvariantError(f"not upward closed: level {j} lies above {i}")
        for i in levels:
            for j in levels:
                if not any(parent.level_leq[k, i] and parent.level_leq[k, j] for k in levels):
                    raise InvariantError(f"levels {i} and {j} have no common lower bound")
        minimal = [i for i in levels if all(parent.level_leq[i, j] for j in levels)]
        if len(minimal) != 1:
            raise InvariantError("no unique minimal level")
        return cls(parent, minimal[0])

    @property
    def levels(self) -> tuple[int, ...]:
        row = self.parent.level_leq[self.min_level]
        return tuple(int(j) for j in np.flatnonzero(row))

    def __contains__(self, x: SystemElement) -> bool:
        return bool(self.parent.level_leq[self.min_level, x.level])

    def elements(self) -> list[SystemElement]:
        return [x for lvl in self.levels for x in self.parent.level_elements(lvl)]

    @property
    def kernel(self) -> NormalSubgroup:
        return self.parent.levels[self.min_level]


_cache: "weakref.WeakKeyDictionary[FiniteGroup, CompleteSystem]" = weakref.WeakKeyDictionary()


def build_system(group: FiniteGroup) -> CompleteSystem:
    """S(G), memoised per group object."""
    s = _cache.get(group)
    if s is None:
        s = CompleteSystem(group)
        _cache[group] = s
    return s


def full_subsystem(system: CompleteSystem) -> Subsystem:
    return Subsystem(system, system.bottom)


def generated_subsystem(system: CompleteSystem, elements: Iterable[SystemElement]) -> Subsystem:
    """⟨A⟩: upward closure of the intersection of the kernels of A's levels."""
    common = set(range(system.source.order))
    for x in elements:
        system.check(x)
        common &= set(system.levels[x.level].elements)
    return Subsystem(system, system.level_of(common))


def dual_group(sub: Subsystem) -> tuple[FiniteGroup, GroupHom]:
    """G/N₀ for the subsystem's minimal level N₀, with the projection from G."""
    s = sub.parent
    return s.quotients[sub.min_level], s.projections[sub.min_level]


class SystemMap:
    """A map of complete systems given on flat indices."""

    def __init__(self, source: CompleteSystem, target: CompleteSystem, images: np.ndarray):
        self.source = source
        self.target = target
        self.images = np.asarray(images, dtype=np.int64)
        self.images.setflags(write=False)

    def __call__(self, x: SystemElement) -> SystemElement:
        return self.target.element(int(self.images[self.source.flat(x)]))

    def compose(self, inner: "SystemMap") -> "SystemMap":
        """``self ∘ inner``."""
        if inner.target is not self.source:
            raise UsageError("incompatible system maps")
        return SystemMap(inner.source, self.target, self.images[inner.images])

    def image_subsystem(self) -> Subsystem:
        levels = {self.target.element(int(i)).level for i in self.images}
        return Subsystem.from_levels(self.target, levels)

    def preserves_structure(self) -> bool:
        """Exhaustively check injectivity and preservation of sorts, 1, ≤, C, P."""
        src, tgt = self.source, self.target
        if len(np.unique(self.images)) != src.size:
            return False
        if self(src.one) != tgt.one:
            return False
        lv = {}
        for lvl in range(len(src.levels)):
            imgs = [self(x) for x in src.level_elements(lvl)]
            tl = {e.level for e in imgs}
            if len(tl) != 1:
                return False
            t = tl.pop()
            lv[lvl] = t
            if tgt.level_size(t) != src.level_size(lvl):
                return False
            # P within the class
            qs, qt = src.quotients[lvl], tgt.quotients[t]
            cos = np.array([e.coset for e in imgs])
            if not np.array_equal(cos[qs.table], qt.table[cos[:, None], cos[None, :]]):
                return False
        for i in lv:
            for j in lv:
                if src.level_leq[i, j] != tgt.level_leq[lv[i], lv[j]]:
                    return False
                if src.level_leq[i, j]:
                    ri = src.restriction(i, j)
                    ci = np.array([self(SystemElement(i, c)).coset for c in range(src.level_size(i))])
                    cj = np.array([self(SystemElement(j, c)).coset for c in range(src.level_size(j))])
                    if not np.array_equal(tgt.restriction(lv[i], lv[j])[ci], cj[ri]):
                        return False
        return True


def dual_embedding(pi: GroupHom, source_system: CompleteSystem | None = None,
                   target_system: CompleteSystem | None = None) -> SystemMap:
    """S(H) -> S(G) dual to an epimorphism π: G -> H.

    Level M of H goes to π⁻¹(M), and hM to the coset of any preimage of h.
    """
    if not pi.is_surjective:
        raise UsageError("dual embedding needs an epimorphism")
    g, h = pi.domain, pi.codomain
    sg = target_system or build_system(g)
    sh = source_system or build_system(h)
    section = np.empty(h.order, dtype=np.int64)
    section[pi.images[::-1]] = np.arange(g.order)[::-1]  # least preimage
    images = np.empty(sh.size, dtype=np.int64)
    for lvl, m in enumerate(sh.levels):
        pre = np.flatnonzero(np.isin(pi.images, m.elements))
        glvl = sg.level_of(pre)
        off_h, off_g = sh.offsets[lvl], sg.offsets[glvl]
        for c in range(sh.level_size(lvl)):
            h_rep = int(np.flatnonzero(sh.projections[lvl].images == c)[0])
            images[off_h + c] = off_g + sg.projections[glvl](int(section[h_rep]))
    return SystemMap(sh, sg, images)

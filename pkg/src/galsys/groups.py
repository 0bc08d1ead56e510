"""Finite groups as closed Cayley tables.

Elements are the integers ``0 .. order-1``; every constructor in this module
puts the identity at index 0, but tables read from user input may place it
anywhere.  All list outputs are in a canonical order so results are
reproducible.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Iterator, Sequence

import numpy as np

from . import _kernels
from .config import get_caps, jobs
from .errors import InvariantError, UsageError


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int32)
    arr.setflags(write=False)
    return arr


class FiniteGroup:
    """A finite group given by its full multiplication table."""

    def __init__(self, table, identity: int | None = None, name: str | None = None,
                 validate: bool = True):
        t = np.asarray(table)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
            raise InvariantError("multiplication table must be a non-empty square array")
        n = t.shape[0]
        if validate and (t.min() < 0 or t.max() >= n):
            raise InvariantError("table entries must lie in 0..order-1")
        self.table = _frozen(t)
        if identity is None:
            identity = self._find_identity()
        self.identity = int(identity)
        self.name = name
        if validate:
            self.validate()

    def _find_identity(self) -> int:
        n = self.order
        idx = np.arange(n)
        for e in range(n):
            if np.array_equal(self.table[e], idx) and np.array_equal(self.table[:, e], idx):
                return e
        raise InvariantError("no two-sided identity element")

    def validate(self) -> None:
        n, t, e = self.order, self.table, self.identity
        idx = np.arange(n)
        if not (np.array_equal(t[e], idx) and np.array_equal(t[:, e], idx)):
            raise InvariantError(f"element {e} is not a two-sided identity")
        bad = _kernels.associativity_violation(t)
        if bad is not None:
            raise InvariantError(f"multiplication is not associative at {bad}")
        # with associativity and an identity, a right inverse in every row suffices
        for a in range(n):
            if not (t[a] == e).any():
                raise InvariantError(f"element {a} has no inverse")

    # -- basic structure -------------------------------------------------
    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        label = self.name or "FiniteGroup"
        return f"<{label} of order {self.order}>"

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    @cached_property
    def inverses(self) -> np.ndarray:
        rows, cols = np.nonzero(self.table == self.identity)
        inv = np.empty(self.order, dtype=np.int32)
        inv[rows] = cols
        inv.setflags(write=False)
        return inv

    def inv(self, a: int) -> int:
        return int(self.inverses[a])

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        result = self.identity
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    @cached_property
    def element_orders(self) -> np.ndarray:
        orders = np.zeros(self.order, dtype=np.int64)
        for a in range(self.order):
            x, k = a, 1
            while x != self.identity:
                x = self.table[x, a]
                k += 1
            orders[a] = k
        orders.setflags(write=False)
        return orders

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    @cached_property
    def conjugation_table(self) -> np.ndarray:
        """``conj[g, x] = g^-1 x g``."""
        t, inv = self.table, self.inverses
        idx = np.arange(self.order)
        left = t[inv[:, None], idx[None, :]]
        conj = t[left, idx[:, None]]
        conj = np.asarray(conj, dtype=np.int32)
        conj.setflags(write=False)
        return conj

    @cached_property
    def conjugacy_classes(self) -> list[tuple[int, ...]]:
        seen = np.zeros(self.order, dtype=bool)
        classes = []
        for x in range(self.order):
            if not seen[x]:
                cls = np.unique(self.conjugation_table[:, x])
                seen[cls] = True
                classes.append(tuple(int(c) for c in cls))
        return classes

    def subgroup_generated(self, elements: Iterable[int]) -> tuple[int, ...]:
        gens = sorted({int(x) for x in elements})
        members = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.table[x, g])
                    if y not in members:
                        members.add(y)
                        nxt.append(y)
            frontier = nxt
        return tuple(sorted(members))

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """A small canonical generating set: greedy by decreasing element order."""
        order = sorted(range(self.order), key=lambda x: (-int(self.element_orders[x]), x))
        gens: list[int] = []
        current = {self.identity}
        for x in order:
            if len(current) == self.order:
                break
            if x not in current:
                gens.append(x)
                current = set(self.subgroup_generated(gens))
        return tuple(gens)

    def is_subgroup(self, elements: Iterable[int]) -> bool:
        s = sorted({int(x) for x in elements})
        if not s:
            return False
        sub = np.array(s)
        prods = self.table[np.ix_(sub, sub)]
        return bool(np.isin(prods, sub).all()) and bool(np.isin(self.inverses[sub], sub).all())

    def is_normal(self, elements: Iterable[int]) -> bool:
        s = np.array(sorted({int(x) for x in elements}))
        return self.is_subgroup(s) and bool(np.isin(self.conjugation_table[:, s], s).all())


def _as_group(g: FiniteGroup) -> FiniteGroup:
    if not isinstance(g, FiniteGroup):
        raise UsageError(f"expected a FiniteGroup, got {type(g).__name__}")
    return g


# ---------------------------------------------------------------------------
# constructors


def from_elements(generators: Sequence[Hashable], mul: Callable, identity: Hashable,
                  name: str | None = None, sort_key=None) -> tuple[FiniteGroup, list]:
    """Close ``generators`` under ``mul`` and return the table plus element list.

    Elements are sorted by ``sort_key`` (default: natural order) with the
    identity forced to index 0.
    """
    elems = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in generators:
                y = mul(x, g)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    rest = sorted((e for e in elems if e != identity), key=sort_key)
    ordered = [identity] + rest
    index = {e: i for i, e in enumerate(ordered)}
    n = len(ordered)
    table = np.empty((n, n), dtype=np.int32)
    for i, a in enumerate(ordered):
        for j, b in enumerate(ordered):
            table[i, j] = index[mul(a, b)]
    return FiniteGroup(table, identity=0, name=name, validate=False), ordered


def trivial_group() -> FiniteGroup:
    return FiniteGroup([[0]], identity=0, name="C1")


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise UsageError("cyclic group order must be positive")
    idx = np.arange(n)
    return FiniteGroup((idx[:, None] + idx[None, :]) % n, identity=0, name=f"C{n}", validate=False)


def abelian(orders: Sequence[int]) -> FiniteGroup:
    """Direct product of cyclic groups, elements in mixed-radix lexicographic order."""
    orders = [int(o) for o in orders]
    if any(o < 1 for o in orders):
        raise UsageError("cyclic factor orders must be positive")
    if not orders:
        return trivial_group()
    elems = list(itertools.product(*(range(o) for o in orders)))
    index = {e: i for i, e in enumerate(elems)}
    n = len(elems)
    table = np.empty((n, n), dtype=np.int32)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            table[i, j] = index[tuple((x + y) % o for x, y, o in zip(a, b, orders))]
    name = "x".join(f"C{o}" for o in orders)
    return FiniteGroup(table, identity=0, name=name, validate=False)


def _perm_mul(p, q):
    # apply p first, then q
    return tuple(q[i] for i in p)


def from_permutations(degree: int, generators: Sequence[Sequence[int]],
                      name: str | None = None) -> FiniteGroup:
    gens = []
    for g in generators:
        g = tuple(int(x) for x in g)
        if len(g) != degree or sorted(g) != list(range(degree)):
            raise InvariantError(f"{list(g)} is not a permutation of 0..{degree - 1}")
        gens.append(g)
    ident = tuple(range(degree))
    group, _ = from_elements(gens, _perm_mul, ident, name=name)
    return group


def symmetric(n: int) -> FiniteGroup:
    if n <= 1:
        return trivial_group()
    gens = [tuple([1, 0] + list(range(2, n))), tuple(list(range(1, n)) + [0])]
    return from_permutations(n, gens, name=f"S{n}")


def alternating(n: int) -> FiniteGroup:
    if n <= 2:
        return trivial_group()
    gens = []
    for k in range(2, n):
        p = list(range(n))
        p[0], p[1], p[k] = 1, k, 0
        gens.append(tuple(p))
    return from_permutations(n, gens, name=f"A{n}")


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n; element r^k s^j has index k + n*j."""
    elems = [(k, j) for j in range(2) for k in range(n)]
    index = {e: i for i, e in enumerate(elems)}
    table = np.empty((2 * n, 2 * n), dtype=np.int32)
    for (k1, j1) in elems:
        for (k2, j2) in elems:
            k = (k1 + (k2 if j1 == 0 else -k2)) % n
            table[index[(k1, j1)], index[(k2, j2)]] = index[(k, (j1 + j2) % 2)]
    return FiniteGroup(table, identity=0, name=f"D{n}", validate=False)


def dicyclic(n: int) -> FiniteGroup:
    """Dicyclic group of order 4n (n=2 gives the quaternion group Q8)."""
    m = 2 * n
    elems = [(k, j) for j in range(2) for k in range(m)]
    index = {e: i for i, e in enumerate(elems)}
    table = np.empty((2 * m, 2 * m), dtype=np.int32)
    for (k1, j1) in elems:
        for (k2, j2) in elems:
            if j1 == 0:
                prod = ((k1 + k2) % m, j2)
            elif j2 == 0:
                prod = ((k1 - k2) % m, 1)
            else:
                prod = ((k1 - k2 + n) % m, 0)
            table[index[(k1, j1)], index[(k2, j2)]] = index[prod]
    name = "Q8" if n == 2 else f"Dic{n}"
    return FiniteGroup(table, identity=0, name=name, validate=False)


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """Element (a, b) gets index a*|h| + b."""
    ng, nh = g.order, h.order
    a = np.arange(ng * nh) // nh
    b = np.arange(ng * nh) % nh
    raw = g.table[a[:, None], a[None, :]] * nh + h.table[b[:, None], b[None, :]]
    ident = g.identity * nh + h.identity
    name = f"{g.name}x{h.name}" if g.name and h.name else None
    return FiniteGroup(raw, identity=ident, name=name, validate=False)


def relabel(g: FiniteGroup, perm: Sequence[int], name: str | None = None) -> FiniteGroup:
    """Isomorphic copy where old element ``x`` becomes ``perm[x]``."""
    perm = np.asarray(perm, dtype=np.int64)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    t = perm[g.table[inv[:, None], inv[None, :]]]
    return FiniteGroup(t, identity=int(perm[g.identity]), name=name or g.name, validate=False)


# ---------------------------------------------------------------------------
# homomorphisms and subgroups


class GroupHom:
    """A homomorphism given by the image of every domain element."""

    __slots__ = ("domain", "codomain", "images")

    def __init__(self, domain: FiniteGroup, codomain: FiniteGroup, images, check: bool = True):
        self.domain = domain
        self.codomain = codomain
        self.images = _frozen(images)
        if self.images.shape != (domain.order,):
            raise InvariantError("image array length must equal the domain order")
        if check:
            if self.images.min() < 0 or self.images.max() >= codomain.order:
                raise InvariantError("images outside the codomain")
            if not _kernels.is_hom(domain.table, codomain.table, self.images):
                raise InvariantError("map does not respect multiplication")

    def __call__(self, x: int) -> int:
        return int(self.images[x])

    def __eq__(self, other):
        return (isinstance(other, GroupHom) and self.domain is other.domain
                and self.codomain is other.codomain
                and np.array_equal(self.images, other.images))

    def __hash__(self):
        return hash(self.images.tobytes())

    def __repr__(self):
        return f"GroupHom({self.images.tolist()})"

    @property
    def image_set(self) -> tuple[int, ...]:
        return tuple(int(x) for x in np.unique(self.images))

    @property
    def is_surjective(self) -> bool:
        return len(np.unique(self.images)) == self.codomain.order

    @property
    def is_injective(self) -> bool:
        return len(np.unique(self.images)) == self.domain.order

    @property
    def kernel(self) -> tuple[int, ...]:
        return tuple(int(x) for x in np.flatnonzero(self.images == self.codomain.identity))

    def compose(self, inner: "GroupHom") -> "GroupHom":
        """``self ∘ inner``."""
        if inner.codomain is not self.domain and inner.codomain.order != self.domain.order:
            raise UsageError("composition of incompatible homomorphisms")
        return GroupHom(inner.domain, self.codomain, self.images[inner.images], check=False)

    def inverse(self) -> "GroupHom":
        if not (self.is_injective and self.is_surjective):
            raise UsageError("only isomorphisms can be inverted")
        inv = np.empty(self.domain.order, dtype=np.int32)
        inv[self.images] = np.arange(self.domain.order)
        return GroupHom(self.codomain, self.domain, inv, check=False)


def identity_hom(g: FiniteGroup) -> GroupHom:
    return GroupHom(g, g, np.arange(g.order), check=False)


@dataclass(frozen=True)
class NormalSubgroup:
    parent: FiniteGroup = field(repr=False, compare=False)
    elements: tuple[int, ...]

    def __post_init__(self):
        if not self.parent.is_normal(self.elements):
            raise InvariantError(f"{list(self.elements)} is not a normal subgroup")

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    def __contains__(self, x) -> bool:
        return int(x) in self._members

    @cached_property
    def _members(self) -> frozenset:
        return frozenset(self.elements)

    def sort_key(self):
        return (len(self.elements), self.elements)

    def __le__(self, other: "NormalSubgroup") -> bool:
        return self._members <= other._members


def _normal_key(elems: tuple[int, ...]):
    return (len(elems), elems)


def normal_subgroups(g: FiniteGroup) -> list[NormalSubgroup]:
    """All normal subgroups, each once, sorted by (size, element tuple)."""
    _as_group(g)
    get_caps().check("subgroup_order", g.order)
    closures = sorted({g.subgroup_generated(cls) for cls in g.conjugacy_classes}, key=_normal_key)
    found = {(g.identity,)}
    frontier = [(g.identity,)]
    while frontier:
        nxt = []
        for s in frontier:
            for c in closures:
                if set(c) <= set(s):
                    continue
                # join of normal subgroups = subgroup generated by their union
                j = g.subgroup_generated(s + c)
                if j not in found:
                    found.add(j)
                    nxt.append(j)
        frontier = nxt
    return [NormalSubgroup(g, s) for s in sorted(found, key=_normal_key)]


def normal_subgroup(g: FiniteGroup, elements: Iterable[int]) -> NormalSubgroup:
    return NormalSubgroup(g, tuple(sorted({int(x) for x in elements})))


def quotient(g: FiniteGroup, n: NormalSubgroup | Iterable[int]) -> tuple[FiniteGroup, GroupHom]:
    """``G/N`` with cosets labelled by increasing least element, and the projection."""
    elems = n.elements if isinstance(n, NormalSubgroup) else tuple(sorted({int(x) for x in n}))
    if not g.is_normal(elems):
        raise InvariantError(f"{list(elems)} is not a normal subgroup of {g!r}")
    sub = np.array(elems)
    label = np.full(g.order, -1, dtype=np.int64)
    reps = []
    for x in range(g.order):
        if label[x] < 0:
            label[g.table[x, sub]] = len(reps)
            reps.append(x)
    reps = np.array(reps)
    qt = label[g.table[reps[:, None], reps[None, :]]]
    name = None
    if g.name:
        name = g.name if len(elems) == 1 else f"{g.name}/N{len(elems)}"
    q = FiniteGroup(qt, identity=int(label[g.identity]), name=name, validate=False)
    return q, GroupHom(g, q, label, check=False)


def _candidates(g: FiniteGroup, h: FiniteGroup, gens, allowed):
    cands = []
    for i, x in enumerate(gens):
        ox = int(g.element_orders[x])
        pool = range(h.order) if allowed is None else sorted(int(y) for y in allowed[i])
        cands.append([y for y in pool if ox % int(h.element_orders[y]) == 0])
    return cands


def iter_homomorphisms(g: FiniteGroup, h: FiniteGroup, surjective_only: bool = False,
                       allowed: Sequence[Iterable[int]] | None = None) -> Iterator[GroupHom]:
    """Yield homomorphisms ``g -> h`` in lexicographic order of generator images.

    ``allowed[i]`` optionally restricts the image of ``g.generators[i]``.
    Partial assignments are closed over the Cayley graph after each generator
    so inconsistent branches die early.
    """
    caps = get_caps()
    caps.check("hom_order", g.order)
    caps.check("hom_order", h.order)
    if surjective_only and g.order % h.order:
        return
    gens = np.array(g.generators, dtype=np.int64)
    cands = _candidates(g, h, gens, allowed)
    imgs = np.zeros(len(gens), dtype=np.int64)
    tg, th = g.table, h.table

    start = np.full(g.order, -1, dtype=np.int32)
    start[g.identity] = h.identity

    def dfs(k, f):
        if k == len(gens):
            if not surjective_only or len(np.unique(f)) == h.order:
                yield GroupHom(g, h, f, check=False)
            return
        for y in cands[k]:
            f2 = f.copy()
            imgs[k] = y
            if _kernels.extend_hom(tg, th, f2, gens, imgs, k + 1):
                yield from dfs(k + 1, f2)

    yield from dfs(0, start)


def homomorphisms(g: FiniteGroup, h: FiniteGroup, surjective_only: bool = False) -> list[GroupHom]:
    return list(iter_homomorphisms(g, h, surjective_only))


def find_isomorphism(g: FiniteGroup, h: FiniteGroup) -> GroupHom | None:
    if g.order != h.order:
        return None
    if sorted(g.element_orders) != sorted(h.element_orders) or g.is_abelian != h.is_abelian:
        return None
    for phi in iter_homomorphisms(g, h, surjective_only=True):
        return phi
    return None


def is_isomorphic(g: FiniteGroup, h: FiniteGroup) -> bool:
    return find_isomorphism(g, h) is not None


def automorphisms(g: FiniteGroup) -> list[GroupHom]:
    return homomorphisms(g, g, surjective_only=True)


# ---------------------------------------------------------------------------
# embedding property


@dataclass
class EmbeddingCheck:
    """Outcome of :func:`has_embedding_property`; falsy when a witness exists."""

    holds: bool
    f: GroupHom | None = None
    g: GroupHom | None = None

    def __bool__(self) -> bool:
        return self.holds


def quotient_representatives(g: FiniteGroup) -> list[tuple[NormalSubgroup, FiniteGroup, GroupHom]]:
    """One quotient per isomorphism class, first kernel in canonical order wins."""
    reps: list[tuple[NormalSubgroup, FiniteGroup, GroupHom]] = []
    for n in normal_subgroups(g):
        q, pi = quotient(g, n)
        if not any(r[1].order == q.order and is_isomorphic(r[1], q) for r in reps):
            reps.append((n, q, pi))
    return reps


def _lifts_exist(g: FiniteGroup, pi_a: GroupHom, b: FiniteGroup, gb: GroupHom) -> bool:
    # epimorphism h: G -> B with gb ∘ h = pi_a; each generator image is confined
    # to the fibre of gb over pi_a(generator)
    allowed = [np.flatnonzero(gb.images == pi_a(x)) for x in g.generators]
    for _ in iter_homomorphisms(g, b, surjective_only=True, allowed=allowed):
        return True
    return False


def _check_pair(g, pi_a, b):
    for gb in iter_homomorphisms(b, pi_a.codomain, surjective_only=True):
        if not _lifts_exist(g, pi_a, b, gb):
            return gb
    return None


def has_embedding_property(g: FiniteGroup) -> EmbeddingCheck:
    """Decide the embedding property for a finite group.

    For every epimorphism ``f: G -> A`` and ``g: B -> A`` with A, B quotients
    of G there must be an epimorphism ``h: G -> B`` with ``f = g∘h``.  It
    suffices to take ``f`` the natural projection onto each ``G/N`` and B one
    quotient per isomorphism class: composing with isomorphisms of A or B
    carries solutions along.
    """
    _as_group(g)
    get_caps().check("embedding_order", g.order)
    reps = quotient_representatives(g)
    tasks = []
    for n in normal_subgroups(g):
        _, pi_a = quotient(g, n)
        a_order = pi_a.codomain.order
        for _, b, _ in reps:
            if b.order % a_order == 0:
                tasks.append((pi_a, b))
    workers = jobs()
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda t: _check_pair(g, *t), tasks))
    else:
        results = []
        for t in tasks:
            results.append(_check_pair(g, *t))
            if results[-1] is not None:
                break
    for (pi_a, _), bad in zip(tasks, results):
        if bad is not None:
            return EmbeddingCheck(False, pi_a, bad)
    return EmbeddingCheck(True)

"""Extensional definable sets in S(G)^m and their imaginaries.

Sets are explicit finite sets of m-tuples of :class:`SystemElement`.  The
automorphisms of S(G) are enumerated by a backtracking search on the bottom
class (which every automorphism fixes, being the least level) and extended
upward along C.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .config import get_caps
from .errors import UsageError
from .groups import FiniteGroup
from .system import CompleteSystem, SystemElement, SystemMap


@dataclass(frozen=True)
class DefinableSet:
    parent: CompleteSystem = field(compare=False)
    arity: int
    tuples: tuple

    def __post_init__(self):
        clean = set()
        for t in self.tuples:
            t = tuple(t)
            if len(t) != self.arity:
                raise UsageError(f"tuple {t} has arity {len(t)}, expected {self.arity}")
            clean.add(tuple(self.parent.check(x) for x in t))
        object.__setattr__(self, "tuples", tuple(sorted(clean)))

    @classmethod
    def of(cls, parent: CompleteSystem, tuples: Iterable[Sequence], arity: int | None = None):
        tuples = [tuple(SystemElement(*x) if not isinstance(x, SystemElement) else x for x in t)
                  for t in tuples]
        if arity is None:
            if not tuples:
                raise UsageError("arity is required for an empty set")
            arity = len(tuples[0])
        return cls(parent, arity, tuple(tuples))

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self):
        return iter(self.tuples)

    def __contains__(self, t) -> bool:
        return tuple(t) in self._members

    @cached_property
    def _members(self) -> frozenset:
        return frozenset(self.tuples)

    def flat(self) -> np.ndarray:
        """Tuples as an (k, m) array of flat indices."""
        s = self.parent
        return np.array([[s.flat(x) for x in t] for t in self.tuples], dtype=np.int64).reshape(-1, self.arity)

    def image(self, perm: np.ndarray) -> "DefinableSet":
        """Image under a permutation of flat indices."""
        s = self.parent
        return DefinableSet(s, self.arity,
                            tuple(tuple(s.element(int(perm[s.flat(x)])) for x in t) for t in self.tuples))

    def to_json(self) -> list:
        return [[x.as_list() for x in t] for t in self.tuples]


@dataclass(frozen=True)
class Stability:
    stable: bool
    witness_g: int | None = None
    witness_tuple: tuple | None = None

    def __bool__(self) -> bool:
        return self.stable


def is_conjugation_stable(D: DefinableSet) -> Stability:
    """True iff every g in the source group maps D onto D; else the least failing g."""
    s = D.parent
    members = D._members
    for g in range(s.source.order):
        perm = s.conjugation_perm(g)
        for t in D.tuples:
            img = tuple(s.element(int(perm[s.flat(x)])) for x in t)
            if img not in members:
                return Stability(False, g, t)
    return Stability(True)


def conjugation_closure(D: DefinableSet) -> DefinableSet:
    s = D.parent
    perms = [s.conjugation_perm(g) for g in s.source.generators]
    seen = set(D.tuples)
    frontier = list(D.tuples)
    while frontier:
        nxt = []
        for t in frontier:
            for perm in perms:
                img = tuple(s.element(int(perm[s.flat(x)])) for x in t)
                if img not in seen:
                    seen.add(img)
                    nxt.append(img)
        frontier = nxt
    return DefinableSet(s, D.arity, tuple(seen))


@dataclass(frozen=True)
class Normalized:
    lifted: DefinableSet
    level: int | None
    projection: tuple  # pairs (lifted tuple, original tuple), sorted

    @property
    def is_function(self) -> bool:
        srcs = [a for a, _ in self.projection]
        return len(srcs) == len(set(srcs))

    def fiber_sizes(self) -> dict:
        out: dict = {}
        for _, b in self.projection:
            out[b] = out.get(b, 0) + 1
        return out


def normalize_single_class(D: DefinableSet) -> Normalized:
    """Lift D to the class of the meet of its coordinate levels.

    D′ collects every tuple at the meet level that restricts into D; the
    projection is the restriction relation, a function when all tuples of D
    share one level pattern.
    """
    s = D.parent
    if not D.tuples:
        return Normalized(D, None, ())
    mu = None
    for t in D.tuples:
        for x in t:
            mu = x.level if mu is None else int(s.meet_table[mu, x.level])
    pairs = set()
    for t in D.tuples:
        choices = []
        for x in t:
            r = s.restriction(mu, x.level)
            choices.append([SystemElement(mu, int(c)) for c in np.flatnonzero(r == x.coset)])
        for lift in _product(choices):
            pairs.add((lift, t))
    pairs = tuple(sorted(pairs))
    lifted = DefinableSet(s, D.arity, tuple({a for a, _ in pairs}))
    return Normalized(lifted, mu, pairs)


def _product(choices):
    if not choices:
        yield ()
        return
    for head in choices[0]:
        for rest in _product(choices[1:]):
            yield (head,) + rest


# ---------------------------------------------------------------------------
# automorphisms of S(G)


def _bottom_automorphisms(g: FiniteGroup) -> list[np.ndarray]:
    """P-preserving bijections of the bottom class, by element-wise backtracking."""
    n = g.order
    t = g.table
    gens = list(g.generators)
    order = g.element_orders
    rest = [x for x in range(n) if x not in gens]
    sequence = gens + rest
    out = []

    def propagate(img, used):
        # close the partial map under products of assigned elements
        changed = True
        while changed:
            changed = False
            assigned = np.flatnonzero(img >= 0)
            for a in assigned:
                for b in assigned:
                    ab = t[a, b]
                    v = t[img[a], img[b]]
                    if img[ab] < 0:
                        if used[v]:
                            return False
                        img[ab] = v
                        used[v] = True
                        changed = True
                    elif img[ab] != v:
                        return False
        return True

    def rec(k, img, used):
        while k < n and img[sequence[k]] >= 0:
            k += 1
        if k == n:
            out.append(img.copy())
            return
        x = sequence[k]
        for y in range(n):
            if used[y] or order[y] != order[x]:
                continue
            img2, used2 = img.copy(), used.copy()
            img2[x] = y
            used2[y] = True
            if propagate(img2, used2):
                rec(k + 1, img2, used2)

    img = np.full(n, -1, dtype=np.int64)
    used = np.zeros(n, dtype=bool)
    img[g.identity] = g.identity
    used[g.identity] = True
    rec(0, img, used)
    return out


@dataclass
class AutomorphismGroup:
    system: CompleteSystem
    perms: np.ndarray         # (k, |S|) flat-index permutations, identity first
    group: FiniteGroup        # table[i, j] = index of perms[i] ∘ perms[j]

    def maps(self) -> list[SystemMap]:
        return [SystemMap(self.system, self.system, p) for p in self.perms]

    def stabilizer(self, D: DefinableSet) -> frozenset[int]:
        return frozenset(i for i, p in enumerate(self.perms) if D.image(p) == D)

    def pointwise_stabilizer(self, elements: Iterable[SystemElement]) -> frozenset[int]:
        idx = [self.system.flat(x) for x in elements]
        return frozenset(i for i, p in enumerate(self.perms) if all(p[j] == j for j in idx))


def extend_to_system(s: CompleteSystem, phi: np.ndarray) -> np.ndarray:
    """The flat permutation of S(G) induced by the automorphism φ of G."""
    perm = np.empty(s.size, dtype=np.int64)
    for lvl, n in enumerate(s.levels):
        tgt = s.level_of(phi[list(n.elements)])
        proj = s.projections[lvl].images
        for c in range(s.level_size(lvl)):
            rep = int(np.flatnonzero(proj == c)[0])
            perm[s.offsets[lvl] + c] = s.offsets[tgt] + s.projections[tgt](int(phi[rep]))
    return perm


def automorphism_group(s: CompleteSystem) -> AutomorphismGroup:
    """All ℒ_G-automorphisms of S(G) with their composition table."""
    get_caps().check("system_size", s.size)
    perms = []
    for phi in _bottom_automorphisms(s.source):
        perm = extend_to_system(s, phi)
        if SystemMap(s, s, perm).preserves_structure():
            perms.append(perm)
    perms.sort(key=lambda p: p.tolist())
    ident = np.arange(s.size)
    perms.sort(key=lambda p: not np.array_equal(p, ident))
    arr = np.array(perms, dtype=np.int64).reshape(len(perms), s.size)
    index = {p.tobytes(): i for i, p in enumerate(arr)}
    k = len(arr)
    table = np.empty((k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            table[i, j] = index[arr[i][arr[j]].tobytes()]
    return AutomorphismGroup(s, arr, FiniteGroup(table, identity=0, validate=False))


# ---------------------------------------------------------------------------
# weak elimination at one finite level


@dataclass(frozen=True)
class CanonicalPair:
    level: int | None
    epsilon: tuple                 # tuples of coset ids in the class [α]
    stabilizer_set: frozenset
    stabilizer_pair: frozenset

    @property
    def certified(self) -> bool:
        return self.stabilizer_set == self.stabilizer_pair

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "epsilon": [list(t) for t in self.epsilon],
            "stabilizer_set": sorted(self.stabilizer_set),
            "stabilizer_pair": sorted(self.stabilizer_pair),
            "certified": self.certified,
        }


def canonical_pair(D: DefinableSet, auts: AutomorphismGroup | None = None) -> CanonicalPair:
    """([α], ε) for a conjugation-stable D, certified by comparing stabilizers."""
    st = is_conjugation_stable(D)
    if not st:
        raise UsageError(f"set is not conjugation stable (witness g={st.witness_g})")
    s = D.parent
    auts = auts or automorphism_group(s)
    norm = normalize_single_class(D)
    eps = tuple(tuple(x.coset for x in t) for t in norm.lifted.tuples)
    stab_d = auts.stabilizer(D)
    if norm.level is None:
        stab_p = frozenset(range(len(auts.perms)))
    else:
        off = s.offsets[norm.level]
        lvl_ids = set(range(int(off), int(off) + s.level_size(norm.level)))
        stab_p = frozenset(i for i, p in enumerate(auts.perms)
                           if int(p[off]) in lvl_ids and norm.lifted.image(p) == norm.lifted)
    return CanonicalPair(norm.level, eps, stab_d, stab_p)


# ---------------------------------------------------------------------------
# basic imaginaries with labelled points


def substitute_label(label: str, atoms: dict[str, str]) -> str:
    """Apply an atom substitution to a label such as ``"c+a"`` or ``"ab"``.

    Terms are separated by '+', a term is a product of one-letter atoms;
    the result is put in canonical order (letters within a term, then terms).
    """
    terms = ["".join(sorted("".join(atoms.get(ch, ch) for ch in term))) for term in label.split("+")]
    return "+".join(sorted(terms))


def canonical_label(label: str) -> str:
    return substitute_label(label.replace(" ", ""), {})


@dataclass(frozen=True)
class BasicImaginary:
    point: tuple
    set: DefinableSet

    def __post_init__(self):
        st = is_conjugation_stable(self.set)
        if not st:
            raise UsageError(f"set of a basic imaginary must be conjugation stable (g={st.witness_g})")

    def act(self, label_map: Callable[[str], str], perm: np.ndarray) -> "BasicImaginary":
        return BasicImaginary(tuple(label_map(p) for p in self.point), self.set.image(perm))

    def describe(self) -> dict:
        return {"point": list(self.point), "set": self.set.to_json()}


def act_on_set(imaginaries: Iterable[BasicImaginary], label_map, perm) -> frozenset:
    """Image of a finite set of basic imaginaries."""
    return frozenset(e.act(label_map, perm) for e in imaginaries)

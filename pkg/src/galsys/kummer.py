"""Kummer bookkeeping: radicand groups, characters and semilinear actions.

Setting.  F contains a primitive n-th root of unity ζ (n prime), Δ is a
finite subgroup of F^×/F^{×n} and L = F(Δ^{1/n}).  Kummer theory pairs
Gal(L/F) with Hom(Δ, ℤ/n): the character χ corresponds to σ_χ with

    σ_χ(u^{1/n}) = ζ^{χ(u)} · u^{1/n}.

Conjugation.  Let ρ be an automorphism of F with ρ(Δ) = Δ, inducing
ρ*: Δ → Δ and ζ ↦ ζ^e, and let ρ' extend ρ to L.  For u ∈ Δ put
w = (ρ*)⁻¹(u); then ρ'⁻¹(u^{1/n}) is some n-th root of w, say c·w^{1/n}
with c^n = 1.  Applying σ_χ multiplies it by ζ^{χ(w)}, and applying ρ'
gives

    ρ' σ_χ ρ'⁻¹ (u^{1/n}) = ρ(ζ)^{χ(w)} · u^{1/n} = ζ^{e·χ(w)} · u^{1/n}.

So ρ'σ_χρ'⁻¹ = σ_{e·(χ∘(ρ*)⁻¹)}.  The root c cancels and the choice of
extension ρ' never enters, which is why no such choice appears in the
data model below.

Radicands are labels built from one-letter atoms ("c+a", "ab"); an
automorphism is an atom substitution plus the twist e.  The field F itself
is never represented, and independence of the atoms is an input assumption.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

import numpy as np

from .errors import InvariantError, UsageError
from .groups import FiniteGroup, GroupHom, abelian
from .imaginaries import BasicImaginary, DefinableSet, canonical_label, extend_to_system, substitute_label
from .system import build_system


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % k for k in range(2, int(n ** 0.5) + 1))


def _rref(rows: list[list[int]], n: int, cols: Sequence[int]) -> list[tuple[int, list[int]]]:
    """Reduced row echelon form mod n, choosing pivots in the given column order."""
    rows = [[int(x) % n for x in r] for r in rows]
    out: list[tuple[int, list[int]]] = []
    for c in cols:
        piv = next((r for r in rows if r[c]), None)
        if piv is None:
            continue
        rows.remove(piv)
        inv = pow(piv[c], -1, n)
        piv = [(x * inv) % n for x in piv]
        rows = [[(x - r[c] * y) % n for x, y in zip(r, piv)] for r in rows]
        out = [(pc, [(x - pr[c] * y) % n for x, y in zip(pr, piv)]) for pc, pr in out]
        out.append((c, piv))
    return out


def _solve_mod(a: list[list[int]], b: list[int], n: int) -> list[int] | None:
    """Some x with a·x = b mod n (free variables set to 0), or None."""
    k = len(a[0]) if a else 0
    aug = [list(r) + [v] for r, v in zip(a, b)]
    red = _rref(aug, n, range(k))
    x = [0] * k
    for c, r in red:
        x[c] = r[k]
    for r, v in zip(a, b):
        if sum(p * q for p, q in zip(r, x)) % n != v % n:
            return None
    return x


def _mat_inv(m: np.ndarray, n: int) -> np.ndarray | None:
    k = m.shape[0]
    aug = [list(m[i]) + [int(i == j) for j in range(k)] for i in range(k)]
    red = _rref(aug, n, range(k))
    if len(red) < k or any(c >= k for c, _ in red):
        return None
    red.sort()
    return np.array([r[k:] for _, r in red], dtype=np.int64)


class RadicandGroup:
    """Δ = (ℤ/n)^{generators} / ⟨relations⟩ with a basis of surviving generators.

    Pivots are taken from the right, so later generators are rewritten in
    terms of earlier ones and the basis is a prefix-preferring subset.
    """

    def __init__(self, n: int, generators: Sequence[str], relations: Sequence[Sequence[int]] = ()):
        if not _is_prime(n):
            raise UsageError(f"exponent {n} must be prime")
        self.n = n
        self.labels = tuple(canonical_label(g) for g in generators)
        if len(set(self.labels)) != len(self.labels):
            raise UsageError("generator labels must be distinct")
        k = len(self.labels)
        self.relations = tuple(tuple(int(x) % n for x in r) for r in relations)
        if any(len(r) != k for r in self.relations):
            raise UsageError(f"relation rows must have {k} entries")
        red = _rref([list(r) for r in self.relations], n, range(k - 1, -1, -1))
        self._pivots = {c: r for c, r in red}
        self.basis = tuple(c for c in range(k) if c not in self._pivots)
        self._index = {lab: i for i, lab in enumerate(self.labels)}

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def order(self) -> int:
        return self.n ** self.rank

    def index(self, label: str) -> int:
        try:
            return self._index[canonical_label(label)]
        except KeyError:
            raise UsageError(f"{label!r} is not a generator") from None

    def normal_form(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Coordinates on the basis of a word Σ vec_i g_i."""
        v = [int(x) % self.n for x in vec]
        for c, row in self._pivots.items():
            if v[c]:
                coef = v[c]
                v = [(x - coef * y) % self.n for x, y in zip(v, row)]
        return tuple(v[b] for b in self.basis)

    def generator(self, i: int) -> tuple[int, ...]:
        return self.normal_form([int(j == i) for j in range(len(self.labels))])

    def trivialized(self) -> list[str]:
        """Generators that the relations force to zero."""
        return [lab for i, lab in enumerate(self.labels) if not any(self.generator(i))]

    def identifications(self) -> dict[str, str]:
        """Non-basis generators equal to a single basis generator."""
        out = {}
        for i, lab in enumerate(self.labels):
            if i in self.basis:
                continue
            nf = self.generator(i)
            for j, b in enumerate(self.basis):
                if nf == tuple(int(t == j) for t in range(self.rank)):
                    out[lab] = self.labels[b]
        return out

    def to_json(self) -> dict:
        return {
            "exponent": self.n,
            "generators": list(self.labels),
            "rank": self.rank,
            "basis": [self.labels[b] for b in self.basis],
            "normal_forms": {lab: list(self.generator(i)) for i, lab in enumerate(self.labels)},
            "trivialized": self.trivialized(),
        }


@dataclass(frozen=True)
class KummerCharacter:
    group: RadicandGroup = field(compare=False, repr=False)
    values: tuple  # on the basis

    def __call__(self, vec: Sequence[int]) -> int:
        nf = self.group.normal_form(vec)
        return sum(a * b for a, b in zip(self.values, nf)) % self.group.n

    def power(self, k: int) -> "KummerCharacter":
        return KummerCharacter(self.group, tuple((k * v) % self.group.n for v in self.values))

    def on_generators(self) -> dict[str, int]:
        return {lab: self(self._unit(i)) for i, lab in enumerate(self.group.labels)}

    def _unit(self, i: int) -> list[int]:
        return [int(j == i) for j in range(len(self.group.labels))]

    @classmethod
    def from_generator_values(cls, group: RadicandGroup, values: dict[str, int]) -> "KummerCharacter":
        """The character with the prescribed values; must exist and be unique."""
        rows, rhs = [], []
        for lab, v in values.items():
            rows.append(list(group.generator(group.index(lab))))
            rhs.append(int(v))
        x = _solve_mod(rows, rhs, group.n) if rows else [0] * group.rank
        if x is None:
            raise UsageError("character values are inconsistent with the relations")
        if len(_rref(rows, group.n, range(group.rank))) < group.rank:
            raise UsageError("character values do not determine a unique character")
        return cls(group, tuple(x))


def all_characters(group: RadicandGroup) -> list[KummerCharacter]:
    return [KummerCharacter(group, v) for v in itertools.product(range(group.n), repeat=group.rank)]


@dataclass(frozen=True)
class SemilinearAut:
    name: str
    group: RadicandGroup = field(compare=False, repr=False)
    matrix: tuple          # rows of ρ* on basis coordinates (column j = image of basis j)
    twist: int

    @property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64).reshape(self.group.rank, self.group.rank)

    def compose(self, inner: "SemilinearAut") -> "SemilinearAut":
        n = self.group.n
        m = (self.array @ inner.array) % n
        return SemilinearAut(f"{self.name}*{inner.name}", self.group,
                             tuple(map(tuple, m.tolist())), (self.twist * inner.twist) % n)

    def is_identity_on_delta(self) -> bool:
        return np.array_equal(self.array % self.group.n, np.eye(self.group.rank, dtype=np.int64))

    def to_json(self) -> dict:
        return {"name": self.name, "matrix": [list(r) for r in self.matrix], "twist": self.twist}


def induced_action(group: RadicandGroup, atoms: dict[str, str], twist: int = 1,
                   name: str = "rho") -> SemilinearAut:
    """ρ* on Δ from an atom substitution; checks ρ(Δ) = Δ and that relations survive."""
    n = group.n
    if twist % n == 0 or np.gcd(twist, n) != 1:
        raise UsageError(f"twist {twist} is not a unit mod {n}")
    images = []
    for lab in group.labels:
        img = substitute_label(lab, atoms)
        if canonical_label(img) not in group.labels:
            raise UsageError(f"{name}: image {img!r} of {lab!r} is not a generator")
        images.append(group.index(img))
    k = len(group.labels)
    for rel in group.relations:
        moved = [0] * k
        for i, c in enumerate(rel):
            moved[images[i]] = (moved[images[i]] + c) % n
        if any(group.normal_form(moved)):
            lhs = " + ".join(f"{c}[{group.labels[i]}]" for i, c in enumerate(rel) if c)
            rhs = " + ".join(f"{c}[{group.labels[i]}]" for i, c in enumerate(moved) if c)
            raise InvariantError(f"{name} does not preserve the relation {lhs} = 0: it becomes {rhs}, "
                                 f"which is nonzero in the radicand group")
    cols = [group.generator(images[b]) for b in group.basis]
    m = np.array(cols, dtype=np.int64).T.reshape(group.rank, group.rank)
    if group.rank and _mat_inv(m, n) is None:
        raise UsageError(f"{name}: induced map on the radicand group is not invertible")
    return SemilinearAut(name, group, tuple(map(tuple, m.tolist())), twist % n)


def conjugate_character(rho: SemilinearAut, chi: KummerCharacter) -> KummerCharacter:
    """e · (χ ∘ (ρ*)⁻¹)."""
    g = rho.group
    if chi.group is not g:
        raise UsageError("character and automorphism live on different radicand groups")
    if g.rank == 0:
        return chi
    inv = _mat_inv(rho.array, g.n)
    vals = (np.array(chi.values, dtype=np.int64) @ inv * rho.twist) % g.n
    return KummerCharacter(g, tuple(int(v) for v in vals))


def character_group(group: RadicandGroup) -> tuple[FiniteGroup, list[KummerCharacter]]:
    """Gal(L/F) ≅ Hom(Δ, ℤ/n) as a FiniteGroup; element i is the i-th character."""
    chars = all_characters(group)
    return abelian([group.n] * group.rank), chars


def character_automorphism(rho: SemilinearAut) -> GroupHom:
    g, chars = character_group(rho.group)
    index = {c.values: i for i, c in enumerate(chars)}
    return GroupHom(g, g, [index[conjugate_character(rho, c).values] for c in chars])


# ---------------------------------------------------------------------------
# scenarios


@dataclass
class Assertion:
    name: str
    passed: bool
    witness: str

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "witness": self.witness}


@dataclass
class KummerScenario:
    name: str
    exponent: int
    generators: list
    relations: list
    character: dict           # generator label -> ζ-exponent
    points: tuple             # the two point labels of e₁ and e₂
    symmetric_label: tuple    # point of f₁
    automorphisms: dict       # name -> {"atoms": {...}, "twist": e}
    expect: dict

    @classmethod
    def from_json(cls, doc: dict, name: str = "scenario") -> "KummerScenario":
        try:
            return cls(
                name=doc.get("name", name),
                exponent=int(doc["exponent"]),
                generators=list(doc["generators"]),
                relations=[list(r) for r in doc.get("relations", [])],
                character=dict(doc["character"]),
                points=tuple(doc.get("points", ["a", "b"])),
                symmetric_label=tuple(doc.get("symmetric_label", ["ab", "a+b"])),
                automorphisms={k: dict(v) for k, v in doc["automorphisms"].items()},
                expect=dict(doc.get("expect", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed kummer scenario: {exc!r}") from None


def load_bundled(name: str = "example") -> KummerScenario:
    res = resources.files("galsys.data").joinpath(f"kummer_{name}.json")
    if not res.is_file():
        raise UsageError(f"no bundled kummer scenario named {name!r}")
    text = res.read_text(encoding="utf-8")
    return KummerScenario.from_json(json.loads(text), name)


def _char_str(chi: KummerCharacter) -> str:
    return "(" + ", ".join(str(v) for v in chi.values) + ")"


def run_scenario(sc: KummerScenario) -> dict:
    """The five checks of the two-imaginary construction, as a structured report."""
    n = sc.exponent
    delta = RadicandGroup(n, sc.generators, sc.relations)
    sigma = KummerCharacter.from_generator_values(delta, sc.character)
    sigma_inv = sigma.power(n - 1)
    gal, chars = character_group(delta)
    S = build_system(gal)
    char_index = {c.values: i for i, c in enumerate(chars)}

    def point_of(chi):
        return S.coset_of(char_index[chi.values], S.bottom)

    auts: dict[str, SemilinearAut | str] = {}
    for key in ("rho1", "rho2", "rho"):
        spec = sc.automorphisms.get(key)
        if spec is None:
            raise UsageError(f"scenario lacks automorphism {key!r}")
        try:
            auts[key] = induced_action(delta, spec.get("atoms", {}), int(spec.get("twist", 1)), key)
        except InvariantError as exc:
            auts[key] = str(exc)

    def label_map(key):
        atoms = sc.automorphisms[key].get("atoms", {})
        return lambda lab: substitute_label(lab, atoms)

    def system_perm(rho: SemilinearAut):
        return extend_to_system(S, character_automorphism(rho).images)

    pa, pb = sc.points
    e1 = BasicImaginary((canonical_label(pa),), DefinableSet(S, 1, ((point_of(sigma),),)))
    e2 = BasicImaginary((canonical_label(pb),), DefinableSet(S, 1, ((point_of(sigma_inv),),)))
    e = frozenset({e1, e2})
    f1 = tuple(canonical_label(x) for x in sc.symmetric_label)
    inv_name = f"sigma^{n - 1}"
    out: list[Assertion] = []

    # 1. structure of Δ and Gal(L/F)
    want_rank = sc.expect.get("rank")
    want_ids = {canonical_label(k): canonical_label(v) for k, v in sc.expect.get("identifications", {}).items()}
    ids = delta.identifications()
    ok = (want_rank is None or delta.rank == want_rank) and all(ids.get(k) == v for k, v in want_ids.items())
    ok = ok and gal.order == n ** delta.rank
    out.append(Assertion(
        "radicand group rank and identifications", ok,
        f"rank {delta.rank}, basis {[delta.labels[b] for b in delta.basis]}, "
        f"identifications {dict(sorted(ids.items()))}, |Gal(L/F)| = {gal.order}"))

    def unavailable(name, key):
        out.append(Assertion(name, False, f"{key} is not defined on the radicand group: {auts[key]}"))

    # 2. ρ₁ conjugates σ to σ^{n-1} and swaps e₁, e₂
    name = f"rho1 conjugates sigma to {inv_name} and preserves e"
    r1 = auts["rho1"]
    if isinstance(r1, str):
        unavailable(name, "rho1")
    else:
        c = conjugate_character(r1, sigma)
        img = e1.act(label_map("rho1"), system_perm(r1))
        img_e = frozenset(x.act(label_map("rho1"), system_perm(r1)) for x in e)
        out.append(Assertion(name, c == sigma_inv and img == e2 and img_e == e,
                             f"conj(rho1)(sigma) = {_char_str(c)}, {inv_name} = {_char_str(sigma_inv)}, "
                             f"rho1(e1) = {img.point[0]}:{_char_str(chars[img.set.tuples[0][0].coset])}"))

    # 3. ρ₂ fixes σ, hence e₁, e₂ and e
    name = "rho2 fixes sigma and e"
    r2 = auts["rho2"]
    if isinstance(r2, str):
        unavailable(name, "rho2")
    else:
        c = conjugate_character(r2, sigma)
        perm = system_perm(r2)
        fixed = all(x.act(label_map("rho2"), perm) == x for x in e)
        out.append(Assertion(name, c == sigma and fixed,
                             f"conj(rho2)(sigma) = {_char_str(c)}, twist {r2.twist}, fixes e1 and e2: {fixed}"))

    # 4. ρ acts trivially on Gal(L/F)
    name = "rho induces the identity on Gal(L/F)"
    r = auts["rho"]
    if isinstance(r, str):
        unavailable(name, "rho")
        moved = None
    else:
        moved = [ch for ch in chars if conjugate_character(r, ch) != ch]
        out.append(Assertion(name, not moved and r.is_identity_on_delta() and r.twist == 1,
                             f"rho* = {[list(x) for x in r.matrix]}, twist {r.twist}, "
                             f"characters moved: {len(moved)} of {len(chars)}"))

    # 5. ρ fixes ⟨Gal(L/F)⟩ and f₁ but moves e
    name = "rho fixes <Gal(L/F)> and f1 pointwise but moves e"
    if isinstance(r, str):
        unavailable(name, "rho")
        conclusion = False
    else:
        perm = system_perm(r)
        fixes_system = bool(np.array_equal(perm, np.arange(S.size)))
        lm = label_map("rho")
        fixes_f1 = tuple(lm(x) for x in f1) == f1
        img = e1.act(lm, perm)
        moves_e = img not in e
        conclusion = fixes_system and fixes_f1 and moves_e
        out.append(Assertion(name, conclusion,
                             f"rho(e1) = {img.point[0]}:{_char_str(chars[img.set.tuples[0][0].coset])}, "
                             f"in e: {not moves_e}, fixes S(Gal(L/F)): {fixes_system}, "
                             f"rho(f1) = {[lm(x) for x in f1]}"))

    return {
        "scenario": sc.name,
        "assumptions": ["the atoms are algebraically independent over the prime field",
                        "F contains a primitive root of unity of order equal to the exponent"],
        "radicand_group": delta.to_json(),
        "sigma": {"basis_values": list(sigma.values), "generator_values": sigma.on_generators()},
        "automorphisms": {k: (v.to_json() if isinstance(v, SemilinearAut) else {"error": v})
                          for k, v in auts.items()},
        "imaginaries": {
            "e1": e1.describe(), "e2": e2.describe(),
            "f1": list(f1),
            "f2": sorted([point_of(sigma).as_list(), point_of(sigma_inv).as_list()]),
        },
        "assertions": [a.to_json() for a in out],
        "all_pass": all(a.passed for a in out),
        "conclusion": bool(conclusion),
    }


def run_paper_example() -> dict:
    """Run the bundled cubic scenario."""
    return run_scenario(load_bundled("example"))

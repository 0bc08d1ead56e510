import random

import numpy as np
import pytest

import corpus
import oracles
from galsys.errors import UsageError
from galsys.imaginaries import (
    BasicImaginary,
    DefinableSet,
    automorphism_group,
    canonical_label,
    canonical_pair,
    conjugation_closure,
    extend_to_system,
    is_conjugation_stable,
    normalize_single_class,
    substitute_label,
)
from galsys.system import SystemElement, SystemMap, build_system


def _conj_image(s, g, x):
    """The class of g⁻¹·r·g for a representative r of x."""
    t, inv = s.source.table, s.source.inv(g)
    r = s.coset_members(x)[0]
    return s.coset_of(int(t[t[inv, r], g]), x.level)


def _stable_by_definition(s, tuples):
    members = set(tuples)
    return all(tuple(_conj_image(s, g, x) for x in t) in members
               for g in range(s.source.order) for t in tuples)


def _random_set(s, rng, arity, size, level=None):
    elems = list(s.elements()) if level is None else s.level_elements(level)
    return DefinableSet.of(s, [tuple(rng.choice(elems) for _ in range(arity)) for _ in range(size)], arity)


@pytest.mark.parametrize("name", corpus.small_names(12))
def test_automorphism_count_matches_group(name):
    g = corpus.group(name)
    s = build_system(g)
    autg = [f for f in oracles.homs_by_generators(g.table, g.identity, g.table, g.identity)
            if len(set(f)) == g.order]
    auts = automorphism_group(s)
    assert len(auts.perms) == len(autg)
    assert np.array_equal(auts.perms[0], np.arange(s.size))
    # every automorphism of G extends, and the extensions are exactly the found maps
    found = {p.tobytes() for p in auts.perms}
    for f in autg:
        perm = extend_to_system(s, np.array(f))
        assert perm.tobytes() in found
        assert SystemMap(s, s, perm).preserves_structure()


def test_known_automorphism_counts():
    for name, n in [("C2xC2", 6), ("S3", 6), ("C4", 2), ("C5", 4), ("D4", 8)]:
        assert len(automorphism_group(build_system(corpus.group(name))).perms) == n, name


@pytest.mark.parametrize("name", ["S3", "D4", "Q8", "Dic3", "A4", "C4"])
def test_stability_matches_definition(name):
    s = build_system(corpus.group(name))
    rng = random.Random(name)
    for _ in range(40):
        d = _random_set(s, rng, rng.randint(1, 2), rng.randint(1, 4))
        st = is_conjugation_stable(d)
        assert bool(st) == _stable_by_definition(s, d.tuples)
        if not st:
            img = tuple(_conj_image(s, st.witness_g, x) for x in st.witness_tuple)
            assert img not in d
            # the witness is the least failing element
            for g in range(st.witness_g):
                assert all(tuple(_conj_image(s, g, x) for x in t) in d for t in d.tuples)


@pytest.mark.parametrize("name", ["S3", "D4", "A4"])
def test_closure_is_least_stable_superset(name):
    s = build_system(corpus.group(name))
    rng = random.Random(1)
    for _ in range(20):
        d = _random_set(s, rng, 2, rng.randint(1, 3))
        c = conjugation_closure(d)
        assert set(d.tuples) <= set(c.tuples)
        assert _stable_by_definition(s, c.tuples)
        orbit = {tuple(_conj_image(s, g, x) for x in t) for g in range(s.source.order) for t in d.tuples}
        assert set(c.tuples) == orbit


def test_normalize_single_pattern_is_a_function_with_index_fibres():
    s = build_system(corpus.group("D4"))
    rng = random.Random(5)
    for _ in range(20):
        pattern = [rng.randrange(len(s.levels)) for _ in range(2)]
        tuples = {tuple(rng.choice(s.level_elements(k)) for k in pattern) for _ in range(3)}
        norm = normalize_single_class(DefinableSet.of(s, tuples))
        mu = int(s.meet_table[pattern[0], pattern[1]])
        assert norm.level == mu and norm.is_function
        size = np.prod([s.level_size(mu) // s.level_size(k) for k in pattern])
        assert set(norm.fiber_sizes().values()) == {size}
        for lift, orig in norm.projection:
            assert tuple(s.restrict(a, b.level) for a, b in zip(lift, orig)) == orig


def test_normalize_mixed_patterns_is_a_relation():
    s = build_system(corpus.group("C2xC2"))
    top = len(s.levels) - 1
    d = DefinableSet.of(s, [(SystemElement(1, 0),), (SystemElement(2, 0),), (SystemElement(top, 0),)])
    norm = normalize_single_class(d)
    assert norm.level == 0
    # the identity of the bottom class lies over all three tuples
    assert not norm.is_function
    assert normalize_single_class(DefinableSet(s, 1, ())).level is None


@pytest.mark.parametrize("name", ["C2xC2", "S3", "C4", "D4", "Q8", "C6"])
def test_canonical_pair_is_certified(name):
    s = build_system(corpus.group(name))
    auts = automorphism_group(s)
    rng = random.Random(name)
    for _ in range(15):
        lvl = rng.randrange(len(s.levels))
        d = conjugation_closure(_random_set(s, rng, rng.randint(1, 2), rng.randint(1, 3), lvl))
        cp = canonical_pair(d, auts)
        assert cp.certified
        assert cp.stabilizer_set == frozenset(i for i, p in enumerate(auts.perms) if d.image(p) == d)


def test_canonical_pair_needs_stability():
    s = build_system(corpus.group("S3"))
    d = DefinableSet.of(s, [((0, 1),)])
    if not is_conjugation_stable(d):
        with pytest.raises(UsageError, match="not conjugation stable"):
            canonical_pair(d)
    with pytest.raises(UsageError):
        BasicImaginary(("a",), DefinableSet.of(s, [((0, 3),)]))


def test_definable_set_validation():
    s = build_system(corpus.group("C4"))
    with pytest.raises(UsageError):
        DefinableSet.of(s, [((0, 0),), ((0, 1), (0, 2))], 1)
    with pytest.raises(UsageError):
        DefinableSet.of(s, [])
    with pytest.raises(UsageError):
        DefinableSet.of(s, [((0, 9),)])
    d = DefinableSet.of(s, [((0, 2),), ((0, 2),), ((0, 1),)])
    assert len(d) == 2 and d.to_json() == [[[0, 1]], [[0, 2]]]


def test_labels():
    assert canonical_label("c+a") == "a+c"
    assert canonical_label("b a") == "ab"
    assert substitute_label("c+a", {"a": "b", "c": "d"}) == "b+d"
    assert substitute_label("ab", {"a": "b", "b": "a"}) == "ab"
    assert substitute_label("a+b", {"a": "b", "b": "a"}) == "a+b"


def test_basic_imaginary_action():
    s = build_system(corpus.group("C2xC2"))
    d = DefinableSet.of(s, [((0, 1),)])
    e = BasicImaginary(("a",), d)
    auts = automorphism_group(s)
    imgs = {e.act(lambda x: x, p) for p in auts.perms}
    # Aut(C2²) permutes the three involutions transitively
    assert len(imgs) == 3

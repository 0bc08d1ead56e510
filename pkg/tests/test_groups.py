import numpy as np
import pytest

import corpus
import oracles
from galsys import groups as grp
from galsys.config import Caps, get_caps, set_caps
from galsys.errors import InvariantError, ResourceCapError, UsageError


@pytest.mark.parametrize("name", corpus.NAMES)
def test_normal_subgroups_match_oracle(name):
    g = corpus.group(name)
    want = oracles.normal_subgroups(g.table.tolist(), g.identity)
    got = grp.normal_subgroups(g)
    assert {frozenset(n.elements) for n in got} == want
    keys = [n.sort_key() for n in got]
    assert keys == sorted(keys)
    assert got[0].elements == (g.identity,)
    assert got[-1].order == g.order


@pytest.mark.parametrize("gname,hname", [
    ("C2", "C2"), ("C3", "C3"), ("C4", "C2"), ("C2xC2", "C2"), ("C2", "C2xC2"),
    ("S3", "C2"), ("C4", "C4"), ("C2xC2", "C2xC2"), ("C5", "C5"), ("C3", "C2"),
])
def test_homomorphisms_match_all_functions(gname, hname):
    g, h = corpus.group(gname), corpus.group(hname)
    want = set(oracles.homs_all_functions(g.table.tolist(), h.table.tolist()))
    got = {tuple(f.images.tolist()) for f in grp.homomorphisms(g, h)}
    assert got == want


@pytest.mark.parametrize("gname,hname", [
    ("S3", "S3"), ("D4", "C2xC2"), ("Q8", "D4"), ("C6", "S3"), ("A4", "C3"),
    ("D4", "D4"), ("C3xC3", "C3"), ("Dic3", "S3"),
])
def test_homomorphisms_match_generator_oracle(gname, hname):
    g, h = corpus.group(gname), corpus.group(hname)
    want = set(oracles.homs_by_generators(g.table, g.identity, h.table, h.identity))
    got = [tuple(f.images.tolist()) for f in grp.homomorphisms(g, h)]
    assert len(got) == len(set(got))
    assert set(got) == want
    surj = {f for f in want if len(set(f)) == h.order}
    assert {tuple(f.images.tolist()) for f in grp.homomorphisms(g, h, surjective_only=True)} == surj


def test_automorphism_counts():
    # |Aut| for a few classical groups
    expect = {"C1": 1, "C2": 1, "C6": 2, "C2xC2": 6, "S3": 6, "D4": 8, "Q8": 24, "C2^3": 168}
    for name, n in expect.items():
        assert len(grp.automorphisms(corpus.group(name))) == n, name


def test_quotient_is_homomorphic_image():
    g = corpus.group("D6")
    for n in grp.normal_subgroups(g):
        q, pi = grp.quotient(g, n)
        assert q.order * n.order == g.order
        assert set(pi.kernel) == set(n.elements)
        assert pi.is_surjective
        assert np.array_equal(pi.images[g.table], q.table[pi.images[:, None], pi.images[None, :]])


def test_quotient_rejects_non_normal():
    s3 = corpus.group("S3")
    with pytest.raises(InvariantError):
        grp.quotient(s3, [0, 1])


def test_invalid_tables_are_rejected():
    with pytest.raises(InvariantError):
        grp.FiniteGroup([[0, 1], [1, 1]])
    with pytest.raises(InvariantError):
        grp.FiniteGroup([[0, 1, 2], [1, 2, 0]])
    # Latin square without associativity
    table = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(InvariantError, match="associat"):
        grp.FiniteGroup(table)


def test_hom_validation():
    c4, c2 = corpus.group("C4"), corpus.group("C2")
    assert grp.GroupHom(c4, c2, [0, 1, 0, 1]).kernel == (0, 2)
    with pytest.raises(InvariantError):
        grp.GroupHom(c4, c2, [0, 1, 1, 0])


def test_cyclic_orders_have_embedding_property():
    for n in range(1, 25):
        assert grp.has_embedding_property(grp.cyclic(n)), n


def test_c2xc4_fails_with_checkable_witness():
    g = corpus.group("C4xC2")
    verdict = grp.has_embedding_property(g)
    assert not verdict
    f, gg = verdict.f, verdict.g
    assert f.domain is g and f.is_surjective and gg.is_surjective
    assert gg.codomain is f.codomain
    # no epimorphism h: G -> B with f = g∘h, by brute force over all homs
    b = gg.domain
    for h in oracles.homs_by_generators(g.table, g.identity, b.table, b.identity):
        if len(set(h)) == b.order:
            assert any(gg(h[x]) != f(x) for x in range(g.order))


@pytest.mark.parametrize("name", corpus.small_names(12))
def test_embedding_property_matches_exhaustive_oracle(name):
    g = corpus.group(name)
    want = oracles.embedding_property_exhaustive(g.table.tolist(), g.identity) is None
    assert bool(grp.has_embedding_property(g)) == want


def test_embedding_property_known_values():
    assert grp.has_embedding_property(corpus.group("S3"))
    assert grp.has_embedding_property(corpus.group("C2xC2"))
    assert not grp.has_embedding_property(corpus.group("C4xC2"))


def test_caps_abort_enumeration():
    old = set_caps(Caps(embedding_order=4))
    try:
        with pytest.raises(ResourceCapError) as info:
            grp.has_embedding_property(corpus.group("C8"))
        assert info.value.cap == "embedding_order"
        assert info.value.requested == 8
    finally:
        set_caps(old)
    assert get_caps().embedding_order == Caps().embedding_order


def test_unknown_cap_name():
    with pytest.raises(UsageError):
        get_caps().updated({"nope": 3})


def test_permutation_groups():
    s4 = grp.symmetric(4)
    assert s4.order == 24 and not s4.is_abelian
    a4 = grp.alternating(4)
    assert a4.order == 12
    assert sorted(len(c) for c in a4.conjugacy_classes) == [1, 3, 4, 4]
    assert grp.is_isomorphic(grp.dicyclic(2), corpus.group("Q8"))
    assert not grp.is_isomorphic(grp.dihedral(4), grp.dicyclic(2))
    with pytest.raises(InvariantError):
        grp.from_permutations(3, [[0, 0, 1]])

import pytest

import corpus
from galsys import groups as grp
from galsys.errors import InvariantError, UsageError
from galsys.fields import ExactField, extend, finite_field
from galsys.fields.galois import (
    FieldHom,
    cyclotomic,
    double_dual_map,
    frobenius,
    galois_extension,
    kummer_cyclotomic,
    multiquadratic,
    restriction_hom,
)


@pytest.mark.parametrize("p,n", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (7, 2)])
def test_frobenius_group_is_cyclic_generated_by_pth_power(p, n):
    ext = frobenius(p, n)
    L = ext.top
    assert ext.degree == n
    assert grp.is_isomorphic(ext.group, grp.cyclic(n))
    assert ext.fixed_field_is_base()
    for x in L.elements():
        assert ext.apply(1, x) == L.pow(x, p)


@pytest.mark.parametrize("make,expect", [
    (lambda: frobenius(2, 4), "C4"),
    (lambda: multiquadratic([2, 3]), "C2xC2"),
    (lambda: multiquadratic([2, 3, 5]), "C2^3"),
    (lambda: kummer_cyclotomic(2), "S3"),
    (lambda: cyclotomic(5), "C4"),
    (lambda: cyclotomic(8), "C2xC2"),
    (lambda: cyclotomic(7), "C6"),
])
def test_galois_groups(make, expect):
    ext = make()
    assert grp.is_isomorphic(ext.group, corpus.group(expect))
    assert ext.fixed_field_is_base()


def test_auto_mode_matches_explicit_s3():
    Q = ExactField.rationals()
    L = extend(extend(Q, [1, 1, 1]), [-2, 0, 0, 1])
    auto = galois_extension(Q, L, "auto")
    ref = kummer_cyclotomic(2)
    assert grp.is_isomorphic(auto.group, ref.group)
    # same automorphisms, written in the same tower shape
    assert {s.images for s in auto.automorphisms} == {tuple(L.coerce(ref.top.to_json(v)) for v in s.images)
                                                      for s in ref.automorphisms}


def test_supplied_mode():
    Q = ExactField.rationals()
    L = extend(extend(Q, [-2, 0, 1]), [-3, 0, 1])
    imgs = [[[[0, 1], 0], [0, 1]], [[[0, -1], 0], [0, 1]], [[[0, 1], 0], [0, -1]], [[[0, -1], 0], [0, -1]]]
    ext = galois_extension(Q, L, "supplied", imgs)
    assert grp.is_isomorphic(ext.group, corpus.group("C2xC2"))
    # three of four sign patterns are not closed under composition
    with pytest.raises(InvariantError):
        galois_extension(Q, L, "supplied", imgs[:3])
    # √2 ↦ √3 is not a root of T² − 2
    with pytest.raises(InvariantError, match="not a root"):
        galois_extension(Q, L, "supplied", [[[0, 1], 0], [[0, 0], [1, 0]]])
    with pytest.raises(UsageError):
        galois_extension(Q, L, "supplied")


def test_non_galois_extension_is_rejected():
    Q = ExactField.rationals()
    L = extend(Q, [-2, 0, 0, 1])
    with pytest.raises(InvariantError, match="not Galois"):
        galois_extension(Q, L, "auto")


def test_relative_frobenius_over_intermediate_field():
    F4 = finite_field(2, 2)
    L = extend(F4, [F4.gen, 1, 1])  # T² + T + ω
    ext = galois_extension(F4, L, "auto")
    assert ext.degree == 2
    for x in L.elements():
        assert ext.apply(1, x) == L.pow(x, 4)


def test_restriction_hom_is_surjective_with_right_kernel():
    big = multiquadratic([2, 3])
    Q = big.base
    small = galois_extension(Q, big.top.parent, "auto")
    r = restriction_hom(big, small)
    assert r.is_surjective
    # the kernel fixes √2
    for i in r.kernel:
        assert big.apply(i, big.top.embed(small.top.gen, small.top)) == big.top.embed(small.top.gen, small.top)
    assert len(r.kernel) == 2


def test_restriction_from_s3_to_zeta3():
    big = kummer_cyclotomic(2)
    small = galois_extension(big.base, big.top.parent, "auto")
    r = restriction_hom(big, small)
    assert r.is_surjective and len(r.kernel) == 3


def test_double_dual_map_preserves_structure():
    Q = ExactField.rationals()
    L1 = extend(extend(Q, [-2, 0, 1]), [-3, 0, 1])
    L2 = extend(extend(Q, [-3, 0, 1]), [-2, 0, 1])
    g1 = galois_extension(Q, L1, "auto")
    g2 = galois_extension(Q, L2, "auto")
    # the same field built in the other order
    phi = FieldHom(L1, L2, Q, [L2.coerce([0, 1]), L2.coerce([[0, 1], 0])])
    psi, emb = double_dual_map(phi, g1, g2)
    assert psi.is_surjective and len(psi.kernel) == 1
    assert emb.preserves_structure()
    for i, s in enumerate(g1.automorphisms):
        for x in (L1.gen, L1.embed(L1.parent.gen, L1.parent)):
            assert phi(s(x)) == g2.apply(int(psi.images[i]), phi(x))

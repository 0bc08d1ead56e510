"""Property-based checks with hypothesis."""
from math import gcd

from hypothesis import given, settings
from hypothesis import strategies as st

from galsys import groups as grp
from galsys.fields import ExactField, extend, finite_field
from galsys.fields import poly as P
from galsys.fields.factor import factor_over
from galsys.kummer import RadicandGroup
from galsys.system import build_system

Q = ExactField.rationals()
Q2 = extend(Q, [-2, 0, 1])
F9 = finite_field(3, 2)
F8 = finite_field(2, 3)

rationals = st.fractions(max_denominator=12).filter(lambda x: abs(x) <= 50)


def elements(F):
    if F is Q2:
        return st.tuples(rationals, rationals)
    return st.sampled_from(list(F.elements()))


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([Q2, F9, F8]).flatmap(lambda F: st.tuples(st.just(F), elements(F), elements(F), elements(F))))
def test_field_axioms(args):
    F, a, b, c = args
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.add(a, F.neg(a)) == F.zero
    if a != F.zero:
        assert F.mul(a, F.inv(a)) == F.one


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40))
def test_cyclic_normal_subgroups_are_divisors(n):
    ns = grp.normal_subgroups(grp.cyclic(n))
    assert sorted(x.order for x in ns) == _divisors(n)
    s = build_system(grp.cyclic(n))
    assert s.size == sum(_divisors(n))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12))
def test_cyclic_hom_count_is_gcd(m, n):
    assert len(grp.homomorphisms(grp.cyclic(m), grp.cyclic(n))) == gcd(m, n)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(list(F9.elements())), min_size=2, max_size=7))
def test_factor_product_reconstructs_finite(coeffs):
    f = P.trim(F9, coeffs + [F9.one])
    if len(f) < 2:
        return
    prod = [F9.one]
    for g, m in factor_over(F9, f):
        for _ in range(m):
            prod = P.mul(F9, prod, g)
    assert prod == f


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=2, max_size=6))
def test_factor_product_reconstructs_rational(coeffs):
    f = [Q.coerce(c) for c in coeffs] + [Q.one]
    out = [Q.one]
    for g, m in factor_over(Q, f):
        assert g[-1] == Q.one
        for _ in range(m):
            out = P.mul(Q, out, g)
    assert out == P.trim(Q, f)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([2, 3, 5]).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.lists(st.integers(0, n - 1), min_size=3, max_size=3), max_size=3),
    st.lists(st.integers(-20, 20), min_size=3, max_size=3))))
def test_normal_form_is_idempotent_and_a_retraction(args):
    n, rows, v = args
    g = RadicandGroup(n, ["a", "b", "c"], rows)
    nf = g.normal_form(v)
    lifted = [0, 0, 0]
    for coord, b in zip(nf, g.basis):
        lifted[b] = coord
    assert g.normal_form(lifted) == nf
    assert all(0 <= x < n for x in nf)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(2, 4), min_size=1, max_size=3))
def test_abelian_system_levels_are_subgroup_lattice(orders):
    g = grp.abelian(orders)
    s = build_system(g)
    sizes = [s.level_size(i) for i in range(len(s.levels))]
    assert sizes[0] == g.order and sizes[-1] == 1
    assert all(s.join_table[i, i] == i for i in range(len(s.levels)))

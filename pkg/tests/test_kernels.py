import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import corpus
from galsys import _kernels

pytestmark = pytest.mark.skipif(not _kernels.NUMBA_IMPL, reason="numba not installed")

NP, NB = _kernels.NUMPY_IMPL, _kernels.NUMBA_IMPL


@st.composite
def random_table(draw):
    n = draw(st.integers(1, 7))
    rows = draw(st.lists(st.lists(st.integers(0, n - 1), min_size=n, max_size=n), min_size=n, max_size=n))
    return np.array(rows, dtype=np.int32)


@settings(max_examples=150, deadline=None)
@given(random_table())
def test_associativity_backends_agree(t):
    assert NP["associativity"](t) == tuple(int(v) for v in NB["associativity"](t))


@pytest.mark.parametrize("name", corpus.NAMES)
def test_group_tables_are_associative_in_both(name):
    t = corpus.group(name).table.astype(np.int32)
    assert NP["associativity"](t) == (-1, -1, -1)
    assert tuple(NB["associativity"](t)) == (-1, -1, -1)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["C4", "S3", "D4", "C2xC2", "Q8"]), st.sampled_from(["C2", "C4", "S3", "C2xC2"]),
       st.data())
def test_is_hom_and_extend_agree(gname, hname, data):
    g, h = corpus.group(gname), corpus.group(hname)
    tg, th = g.table.astype(np.int32), h.table.astype(np.int32)
    images = np.array(data.draw(st.lists(st.integers(0, h.order - 1), min_size=g.order, max_size=g.order)))
    assert NP["is_hom"](tg, th, images) == bool(NB["is_hom"](tg, th, images))
    gens = np.array(g.generators, dtype=np.int64)
    imgs = np.array([data.draw(st.integers(0, h.order - 1)) for _ in gens], dtype=np.int64)
    fa = np.full(g.order, -1, dtype=np.int32)
    fa[g.identity] = h.identity
    fb = fa.copy()
    ra = NP["extend_hom"](tg, th, fa, gens, imgs, len(gens))
    rb = NB["extend_hom"](tg, th, fb, gens, imgs, len(gens))
    assert ra == bool(rb)
    if ra:
        assert np.array_equal(fa, fb)
        assert NP["is_hom"](tg, th, fa.astype(np.int64))


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_fiber_triples_agree(data):
    def maps(n, m):
        return np.array(data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n)), dtype=np.int64)

    n1, n2, n3 = (data.draw(st.integers(1, 6)) for _ in range(3))
    ha, hb, hc = (data.draw(st.integers(1, 3)) for _ in range(3))
    args = (maps(n1, ha), maps(n2, ha), maps(n1, hb), maps(n3, hb), maps(n2, hc), maps(n3, hc))
    a, b = NP["fiber_triples"](*args), NB["fiber_triples"](*args)
    assert np.array_equal(a, b)
    want = [(i, j, k) for i in range(n1) for j in range(n2) for k in range(n3)
            if args[0][i] == args[1][j] and args[2][i] == args[3][k] and args[4][j] == args[5][k]]
    assert [tuple(r) for r in a.tolist()] == want


def test_environment_flag_selects_numpy():
    code = "from galsys import _kernels; print(_kernels.BACKEND)"
    for flag, want in (("1", "numpy"), ("0", "numba")):
        env = dict(os.environ, GALSYS_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True)
        assert out.stdout.strip() == want

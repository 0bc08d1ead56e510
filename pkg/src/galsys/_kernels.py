"""Hot inner loops over Cayley tables.

Every kernel exists twice: a numba ``@njit`` version and a pure numpy/Python
fallback with identical semantics.  The numba path is used unless numba is
missing or ``GALSYS_DISABLE_NUMBA=1`` is set in the environment when this
module is first imported.  ``benchmarks/bench_kernels.py`` times both.

All tables are ``int32`` arrays; ``-1`` marks an unassigned image.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False


def _flag_disabled() -> bool:
    return os.environ.get("GALSYS_DISABLE_NUMBA", "0") not in ("", "0", "false", "False")


USE_NUMBA = _HAVE_NUMBA and not _flag_disabled()
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# pure numpy / python implementations


def _assoc_numpy(table):
    n = table.shape[0]
    # (ab)c for all a, b, c in one gather; a(bc) likewise
    left = table[table[:, :, None], np.arange(n)[None, None, :]]
    right = table[np.arange(n)[:, None, None], table[None, :, :]]
    bad = np.argwhere(left != right)
    if bad.size:
        i, j, k = bad[0]
        return int(i), int(j), int(k)
    return -1, -1, -1


def _is_hom_numpy(tg, th, images):
    lhs = images[tg]
    rhs = th[images[:, None], images[None, :]]
    return bool(np.array_equal(lhs, rhs))


def _extend_hom_numpy(tg, th, f, gens, imgs, ngens):
    # f holds a consistent partial map; close it under right multiplication
    # by the first ngens generators, failing on the first conflict.
    queue = [int(x) for x in np.flatnonzero(f >= 0)]
    head = 0
    while head < len(queue):
        x = queue[head]
        head += 1
        fx = f[x]
        for i in range(ngens):
            y = tg[x, gens[i]]
            v = th[fx, imgs[i]]
            if f[y] < 0:
                f[y] = v
                queue.append(int(y))
            elif f[y] != v:
                return False
    return True


def _fiber_triples_numpy(r1a, r2a, r1b, r3b, r2c, r3c):
    n1, n2, n3 = len(r1a), len(r2a), len(r3b)
    s1 = np.repeat(np.arange(n1), n2)
    s2 = np.tile(np.arange(n2), n1)
    keep = r1a[s1] == r2a[s2]
    s1, s2 = s1[keep], s2[keep]
    out = []
    for s3 in range(n3):
        ok = (r1b[s1] == r3b[s3]) & (r2c[s2] == r3c[s3])
        if ok.any():
            out.append(np.stack([s1[ok], s2[ok], np.full(ok.sum(), s3)], axis=1))
    if not out:
        return np.zeros((0, 3), dtype=np.int64)
    res = np.concatenate(out)
    order = np.lexsort((res[:, 2], res[:, 1], res[:, 0]))
    return res[order].astype(np.int64)


# ---------------------------------------------------------------------------
# numba implementations

if _HAVE_NUMBA:

    @njit(cache=True)
    def _assoc_numba(table):
        n = table.shape[0]
        for i in range(n):
            for j in range(n):
                ij = table[i, j]
                for k in range(n):
                    if table[ij, k] != table[i, table[j, k]]:
                        return i, j, k
        return -1, -1, -1

    @njit(cache=True)
    def _is_hom_numba(tg, th, images):
        n = tg.shape[0]
        for i in range(n):
            for j in range(n):
                if images[tg[i, j]] != th[images[i], images[j]]:
                    return False
        return True

    @njit(cache=True)
    def _extend_hom_numba(tg, th, f, gens, imgs, ngens):
        n = tg.shape[0]
        queue = np.empty(n, dtype=np.int64)
        tail = 0
        for x in range(n):
            if f[x] >= 0:
                queue[tail] = x
                tail += 1
        head = 0
        while head < tail:
            x = queue[head]
            head += 1
            fx = f[x]
            for i in range(ngens):
                y = tg[x, gens[i]]
                v = th[fx, imgs[i]]
                if f[y] < 0:
                    f[y] = v
                    queue[tail] = y
                    tail += 1
                elif f[y] != v:
                    return False
        return True

    @njit(cache=True)
    def _fiber_triples_numba(r1a, r2a, r1b, r3b, r2c, r3c):
        n1, n2, n3 = r1a.shape[0], r2a.shape[0], r3b.shape[0]
        count = 0
        for s1 in range(n1):
            for s2 in range(n2):
                if r1a[s1] != r2a[s2]:
                    continue
                for s3 in range(n3):
                    if r1b[s1] == r3b[s3] and r2c[s2] == r3c[s3]:
                        count += 1
        out = np.empty((count, 3), dtype=np.int64)
        k = 0
        for s1 in range(n1):
            for s2 in range(n2):
                if r1a[s1] != r2a[s2]:
                    continue
                for s3 in range(n3):
                    if r1b[s1] == r3b[s3] and r2c[s2] == r3c[s3]:
                        out[k, 0] = s1
                        out[k, 1] = s2
                        out[k, 2] = s3
                        k += 1
        return out


NUMPY_IMPL = {
    "associativity": _assoc_numpy,
    "is_hom": _is_hom_numpy,
    "extend_hom": _extend_hom_numpy,
    "fiber_triples": _fiber_triples_numpy,
}

NUMBA_IMPL = (
    {
        "associativity": _assoc_numba,
        "is_hom": _is_hom_numba,
        "extend_hom": _extend_hom_numba,
        "fiber_triples": _fiber_triples_numba,
    }
    if _HAVE_NUMBA
    else {}
)

_active = NUMBA_IMPL if USE_NUMBA else NUMPY_IMPL


def associativity_violation(table: np.ndarray) -> tuple[int, int, int] | None:
    i, j, k = _active["associativity"](table)
    return None if i < 0 else (int(i), int(j), int(k))


def is_hom(tg: np.ndarray, th: np.ndarray, images: np.ndarray) -> bool:
    return bool(_active["is_hom"](tg, th, images))


def extend_hom(tg, th, f, gens, imgs, ngens) -> bool:
    return bool(_active["extend_hom"](tg, th, f, gens, imgs, ngens))


def fiber_triples(r1a, r2a, r1b, r3b, r2c, r3c) -> np.ndarray:
    return _active["fiber_triples"](r1a, r2a, r1b, r3b, r2c, r3c)

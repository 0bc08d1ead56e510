"""Dense univariate polynomials over an :class:`~galsys.fields.tower.ExactField`.

Polynomials are lists of raw field values in ascending degree with no
trailing zeros; ``[]`` is the zero polynomial.  Every function takes the
coefficient field first.
"""
from __future__ import annotations


def trim(F, a):
    a = list(a)
    z = F.zero
    while a and a[-1] == z:
        a.pop()
    return a


def degree(a) -> int:
    return len(a) - 1


def add(F, a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = F.add(out[i], c)
    return trim(F, out)


def neg(F, a):
    return [F.neg(c) for c in a]


def sub(F, a, b):
    return add(F, a, neg(F, b))


def scale(F, a, c):
    if c == F.zero:
        return []
    return trim(F, [F.mul(c, x) for x in a])


def mul(F, a, b):
    if not a or not b:
        return []
    out = [F.zero] * (len(a) + len(b) - 1)
    z = F.zero
    for i, x in enumerate(a):
        if x == z:
            continue
        for j, y in enumerate(b):
            if y == z:
                continue
            out[i + j] = F.add(out[i + j], F.mul(x, y))
    return trim(F, out)


def divmod_(F, a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    lead_inv = F.one if b[-1] == F.one else F.inv(b[-1])
    if len(a) - 1 < db:
        return [], trim(F, a)
    q = [F.zero] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c == F.zero:
            continue
        c = F.mul(c, lead_inv)
        q[i - db] = c
        for j in range(db + 1):
            a[i - db + j] = F.sub(a[i - db + j], F.mul(c, b[j]))
    return trim(F, q), trim(F, a[:db])


def rem(F, a, b):
    return divmod_(F, a, b)[1]


def monic(F, a):
    if not a:
        return []
    if a[-1] == F.one:
        return list(a)
    inv = F.inv(a[-1])
    return [F.mul(inv, c) for c in a]


def gcd(F, a, b):
    a, b = trim(F, a), trim(F, b)
    while b:
        a, b = b, rem(F, a, b)
    return monic(F, a)


def xgcd(F, a, b):
    """Return (g, s, t) with s·a + t·b = g and g monic."""
    r0, r1 = trim(F, a), trim(F, b)
    s0, s1 = [F.one], []
    t0, t1 = [], [F.one]
    while r1:
        q, r = divmod_(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(F, s0, mul(F, q, s1))
        t0, t1 = t1, sub(F, t0, mul(F, q, t1))
    if not r0:
        return [], s0, t0
    inv = F.inv(r0[-1])
    return scale(F, r0, inv), scale(F, s0, inv), scale(F, t0, inv)


def powmod(F, base, e: int, modulus):
    result = [F.one]
    base = rem(F, base, modulus)
    while e:
        if e & 1:
            result = rem(F, mul(F, result, base), modulus)
        e >>= 1
        if e:
            base = rem(F, mul(F, base, base), modulus)
    return result


def evaluate(F, a, x):
    acc = F.zero
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def derivative(F, a):
    return trim(F, [F.mul(F.from_int(i), c) for i, c in enumerate(a)][1:])


def compose_linear(F, a, shift):
    """a(x + shift)."""
    out: list = []
    for c in reversed(a):
        out = add(F, mul(F, out, [shift, F.one]), [c] if c != F.zero else [])
    return out


def from_roots(F, roots):
    out = [F.one]
    for r in roots:
        out = mul(F, out, [F.neg(r), F.one])
    return out

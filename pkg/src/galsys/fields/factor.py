"""Factorization and irreducibility over exact fields.

* finite fields of any tower shape: squarefree split, distinct-degree split,
  then Cantor–Zassenhaus equal-degree splitting;
* ℚ: a mod-p degree certificate, then integer factorization in FLINT;
* number fields: Trager's norm method.  A primitive element θ of K/ℚ turns
  q(x) ∈ K[x] into Q(x, θ); the norm Res_y(m_θ(y), Q(x - sy, y)) is
  factored over ℚ and each factor is pulled back by a gcd over K.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import flint

from ..config import get_caps, get_seed
from ..errors import InvariantError, UsageError
from . import poly as P
from .tower import ExactField, Span, minimal_polynomial

_SMALL_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59)


@dataclass(frozen=True)
class Irreducibility:
    irreducible: bool
    reason: str
    factors: tuple = field(default=(), compare=False)

    def __bool__(self) -> bool:
        return self.irreducible


def _prepare(K: ExactField, q) -> list:
    coeffs = P.trim(K, [K.coerce(c) for c in q])
    if len(coeffs) < 2:
        raise UsageError("polynomial must be nonconstant")
    get_caps().check("factor_degree", len(coeffs) - 1)
    return P.monic(K, coeffs)


def _shift_sequence(limit: int = 64):
    seed = get_seed()
    if seed is None:
        yield 0
        for k in range(1, limit):
            yield k
            yield -k
    else:
        rng = random.Random(seed)
        yield 0
        for k in range(limit):
            yield rng.randint(-(k + 2), k + 2)


# ---------------------------------------------------------------------------
# finite fields


def _pth_root_poly(K: ExactField, f):
    p = K.characteristic
    e = K.size // p
    return [K.pow(f[i], e) for i in range(0, len(f), p)]


def _squarefree_finite(K: ExactField, f):
    out = []
    c = P.gcd(K, f, P.derivative(K, f))
    w = P.divmod_(K, f, c)[0]
    i = 1
    while len(w) > 1:
        y = P.gcd(K, w, c)
        fac = P.divmod_(K, w, y)[0]
        if len(fac) > 1:
            out.append((fac, i))
        w = y
        c = P.divmod_(K, c, y)[0]
        i += 1
    if len(c) > 1:
        p = K.characteristic
        out.extend((g, m * p) for g, m in _squarefree_finite(K, _pth_root_poly(K, c)))
    return out


def _distinct_degree(K: ExactField, f):
    q = K.size
    x = [K.zero, K.one]
    out, h, d = [], x, 0
    while len(f) - 1 >= 2 * (d + 1):
        d += 1
        h = P.powmod(K, h, q, f)
        g = P.gcd(K, f, P.sub(K, h, x))
        if len(g) > 1:
            out.append((g, d))
            f = P.divmod_(K, f, g)[0]
            h = P.rem(K, h, f)
    if len(f) > 1:
        out.append((f, len(f) - 1))
    return out


def _equal_degree(K: ExactField, f, d: int, rng: random.Random):
    n = len(f) - 1
    if n == d:
        return [f]
    q = K.size
    while True:
        a = P.trim(K, [K.random(rng) for _ in range(n)])
        if len(a) < 2:
            continue
        if q % 2:
            b = P.sub(K, P.powmod(K, a, (q ** d - 1) // 2, f), [K.one])
        else:
            t = s = a
            for _ in range((q ** d).bit_length() - 2):
                t = P.rem(K, P.mul(K, t, t), f)
                s = P.add(K, s, t)
            b = s
        g = P.gcd(K, f, b)
        if 1 < len(g) < len(f):
            return (_equal_degree(K, g, d, rng)
                    + _equal_degree(K, P.divmod_(K, f, g)[0], d, rng))


def _factor_finite(K: ExactField, f):
    rng = random.Random(get_seed() or 0)
    out = []
    for sq, m in _squarefree_finite(K, f):
        for g, d in _distinct_degree(K, sq):
            out.extend((h, m) for h in _equal_degree(K, g, d, rng))
    return out


# ---------------------------------------------------------------------------
# rationals


def _to_fmpz(f) -> flint.fmpz_poly:
    den = 1
    for c in f:
        den = den * c.denominator // _gcd(den, c.denominator)
    return flint.fmpz_poly([int(c * den) for c in f])


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _from_flint(poly) -> list:
    cs = [Fraction(int(c.p), int(c.q)) if hasattr(c, "q") else Fraction(int(c)) for c in poly.coeffs()]
    lead = cs[-1]
    return [c / lead for c in cs]


def _modp_certificate(zf: flint.fmpz_poly) -> str | None:
    """Name a prime modulo which the degree pattern forces irreducibility."""
    coeffs = [int(c) for c in zf.coeffs()]
    n = len(coeffs) - 1
    possible = set(range(n + 1))
    for p in _SMALL_PRIMES:
        if coeffs[-1] % p == 0:
            continue
        fp = flint.nmod_poly(coeffs, p)
        if fp.gcd(fp.derivative()).degree() > 0:
            continue
        _, facs = fp.factor()
        sums = {0}
        for g, m in facs:
            sums |= {s + g.degree() for s in sums for _ in range(m)}
        possible &= sums
        if possible <= {0, n}:
            return f"degree pattern modulo {p}"
    return None


def _factor_rational(f):
    zf = _to_fmpz(f)
    _, facs = zf.factor()
    return [(_from_flint(g), m) for g, m in facs]


def _irreducible_rational(f) -> Irreducibility:
    if len(f) == 2:
        return Irreducibility(True, "degree 1")
    zf = _to_fmpz(f)
    cert = _modp_certificate(zf)
    if cert:
        return Irreducibility(True, f"irreducible: {cert}")
    facs = _factor_rational(f)
    if len(facs) == 1 and facs[0][1] == 1:
        return Irreducibility(True, "irreducible: full rational factorization")
    return Irreducibility(False, "factors over Q", tuple(tuple(g) for g, _ in facs))


# ---------------------------------------------------------------------------
# number fields


class _Primitive:
    """θ with ℚ(θ) = K, the minimal polynomial of θ and coordinates in powers of θ."""

    def __init__(self, K: ExactField):
        self.K = K
        Q = K.base
        gens = K.generators_over(Q)
        D = K.degree
        for theta in self._candidates(K, gens):
            m = minimal_polynomial(K, theta, Q)
            if len(m) - 1 == D:
                break
        else:  # pragma: no cover - small combinations always succeed
            raise InvariantError("no primitive element among small combinations")
        self.theta = theta
        self.minpoly = m
        self.span = Span(Q)
        x = K.one
        for _ in range(D):
            self.span.add(K.coords_over(x, Q))
            x = K.mul(x, theta)

    @staticmethod
    def _candidates(K, gens):
        if len(gens) == 1:
            yield gens[0]
            return
        ints = [1, -1, 2, -2, 3, -3, 4, -4, 5, -5, 6, -6, 7, -7]
        for bound in range(1, len(ints) + 1):
            for cs in itertools.product(ints[:bound], repeat=len(gens) - 1):
                if bound > 1 and all(c in ints[:bound - 1] for c in cs):
                    continue
                t = gens[0]
                for c, g in zip(cs, gens[1:]):
                    t = K.add(t, K.mul(K.from_int(c), g))
                yield t

    def in_theta(self, x) -> list:
        red, comb = self.span.reduce(self.K.coords_over(x, self.K.base))
        return comb


def _primitive(K: ExactField) -> _Primitive:
    prim = K.__dict__.get("_primitive")
    if prim is None:
        prim = _Primitive(K)
        K.__dict__["_primitive"] = prim
    return prim


_CTX = flint.fmpq_mpoly_ctx.get(("x", "y"), "lex")


def _fq(c: Fraction) -> flint.fmpq:
    return flint.fmpq(c.numerator, c.denominator)


def _norm(K: ExactField, prim: _Primitive, q) -> flint.fmpq_poly:
    terms = {}
    for i, c in enumerate(q):
        for j, v in enumerate(prim.in_theta(c)):
            if v:
                terms[(i, j)] = _fq(v)
    Q = _CTX.from_dict(terms)
    m = _CTX.from_dict({(0, j): _fq(v) for j, v in enumerate(prim.minpoly) if v})
    r = m.resultant(Q, "y").to_dict()
    deg = max(k[0] for k in r)
    return flint.fmpq_poly([r.get((i, 0), 0) for i in range(deg + 1)])


def _trager(K: ExactField, f, *, full: bool):
    """Factor a squarefree monic f over the number field K.

    With ``full=False`` only decides irreducibility and returns a
    one-element list when f is irreducible.
    """
    prim = _primitive(K)
    for s in _shift_sequence():
        shift = K.mul(K.from_int(-s), prim.theta)
        fs = P.compose_linear(K, f, shift)
        N = _norm(K, prim, fs)
        if N.gcd(N.derivative()).degree() > 0:
            continue
        _, facs = N.factor()
        if not full:
            return [f] if len(facs) == 1 else None
        out = []
        for g, _m in facs:
            gk = [K.embed(c, K.base) for c in _from_flint(g)]
            h = P.gcd(K, fs, gk)
            out.append(P.compose_linear(K, h, K.neg(shift)))
        return out
    raise InvariantError("no squarefree norm found within the shift sequence")


def _squarefree_char0(K: ExactField, f):
    out = []
    d0 = P.derivative(K, f)
    a0 = P.gcd(K, f, d0)
    b = P.divmod_(K, f, a0)[0]
    c = P.divmod_(K, d0, a0)[0]
    d = P.sub(K, c, P.derivative(K, b))
    i = 1
    while len(b) > 1:
        a = P.gcd(K, b, d)
        b = P.divmod_(K, b, a)[0]
        c = P.divmod_(K, d, a)[0]
        d = P.sub(K, c, P.derivative(K, b))
        if len(a) > 1:
            out.append((a, i))
        i += 1
    return out


# ---------------------------------------------------------------------------
# public entry points


def factor_over(K: ExactField, q: Sequence) -> list[tuple[list, int]]:
    """Monic irreducible factors of q over K with multiplicities, canonically sorted."""
    f = _prepare(K, q)
    if K.is_finite:
        facs = _factor_finite(K, f)
    elif K.is_base:
        facs = _factor_rational(f)
    else:
        facs = []
        for sq, m in _squarefree_char0(K, f):
            facs.extend((g, m) for g in _trager(K, sq, full=True))
    return sorted(facs, key=lambda gm: (len(gm[0]), repr(_key(K, gm[0])), gm[1]))


def _key(K: ExactField, f):
    return [K.to_json(c) for c in f]


def irreducible_over(K: ExactField, q: Sequence) -> Irreducibility:
    """Exact irreducibility of q over K, with the certificate that decided it."""
    f = _prepare(K, q)
    n = len(f) - 1
    if n == 1:
        return Irreducibility(True, "degree 1")
    if K.is_finite:
        facs = _factor_finite(K, f)
        if len(facs) == 1 and facs[0][1] == 1:
            return Irreducibility(True, f"irreducible: factorization over a field of size {K.size}")
        return Irreducibility(False, f"factors over the field of size {K.size}",
                              tuple(tuple(g) for g, _ in facs))
    if K.is_base:
        return _irreducible_rational(f)
    g = P.gcd(K, f, P.derivative(K, f))
    if len(g) > 1:
        return Irreducibility(False, "repeated factor", (tuple(g),))
    if _trager(K, f, full=False):
        return Irreducibility(True, "irreducible: norm to Q is irreducible")
    facs = _trager(K, f, full=True)
    return Irreducibility(False, f"splits into {len(facs)} factors over the field",
                          tuple(tuple(h) for h in facs))


def roots_in(L: ExactField, q: Sequence, K: ExactField | None = None) -> list:
    """Roots of q (coefficients in the prefix K of L) that lie in L, as raw values of L."""
    K = K or L
    coeffs = [L.embed(K.coerce(c), K) for c in q]
    roots = []
    for g, _ in factor_over(L, coeffs):
        if len(g) == 2:
            roots.append(L.neg(g[0]))
    return sorted(roots, key=lambda r: repr(L.to_json(r)))

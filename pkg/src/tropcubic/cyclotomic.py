"""Exact arithmetic in the cyclotomic fields Q(zeta_N), N in {3, 6, 12}.

Elements live in the power basis 1, z, ..., z^(phi(N)-1) with gmpy2.mpq
coordinates.  phi(N) is at most 4 here, so dense tuples and tiny Gaussian
eliminations beat anything clever.  The only outside help is sympy, used
in field_roots to factor polynomials over the field; everything else is
self-contained.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from gmpy2 import iroot, mpq, mpz

SUPPORTED_ORDERS = (3, 6, 12)

_PHI = {3: 2, 6: 2, 12: 4}

# z^phi(N) rewritten in the power basis, read off the cyclotomic
# polynomial: Phi_3 = x^2+x+1, Phi_6 = x^2-x+1, Phi_12 = x^4-x^2+1.
_REDUCTION = {
    3: (mpq(-1), mpq(-1)),
    6: (mpq(-1), mpq(1)),
    12: (mpq(-1), mpq(0), mpq(1), mpq(0)),
}

_POWER_TABLES: dict[int, list[tuple]] = {}


def phi_of(n: int) -> int:
    if n not in _PHI:
        raise ValueError(f"unsupported cyclotomic order {n}; pick one of {SUPPORTED_ORDERS}")
    return _PHI[n]


def _power_table(n: int) -> list[tuple]:
    """Coordinates of z^k for k = 0..n-1."""
    table = _POWER_TABLES.get(n)
    if table is not None:
        return table
    phi = phi_of(n)
    red = _REDUCTION[n]
    cur = [mpq(0)] * phi
    cur[0] = mpq(1)
    table = [tuple(cur)]
    for _ in range(n - 1):
        top = cur[phi - 1]
        nxt = [mpq(0)] + cur[: phi - 1]
        if top:
            nxt = [nxt[i] + top * red[i] for i in range(phi)]
        cur = nxt
        table.append(tuple(cur))
    _POWER_TABLES[n] = table
    return table


def _as_mpq(x):
    if isinstance(x, (int, mpz)):
        return mpq(x)
    if isinstance(x, mpq):
        return x
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return None


class CycloRat:
    """An element of Q(zeta_n) with exact rational coordinates.

    Instances are immutable and hashable.  Mixing elements of different
    orders is an error rather than an implicit coercion: the three fields
    overlap, but silently identifying them invites exponent bookkeeping
    bugs in callers.
    """

    __slots__ = ("n", "c")

    def __init__(self, n: int, coords):
        phi = phi_of(n)
        c = tuple(mpq(x) for x in coords)
        if len(c) != phi:
            raise ValueError(f"need {phi} coordinates for order {n}, got {len(c)}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "c", c)

    def __setattr__(self, name, value):
        raise AttributeError("CycloRat is immutable")

    # -- constructors ------------------------------------------------

    @classmethod
    def from_rational(cls, n: int, value) -> "CycloRat":
        q = _as_mpq(value)
        if q is None:
            raise TypeError(f"not a rational value: {value!r}")
        phi = phi_of(n)
        return cls(n, (q,) + (mpq(0),) * (phi - 1))

    @classmethod
    def zero(cls, n: int) -> "CycloRat":
        return cls.from_rational(n, 0)

    @classmethod
    def one(cls, n: int) -> "CycloRat":
        return cls.from_rational(n, 1)

    @classmethod
    def zeta_pow(cls, n: int, k: int = 1) -> "CycloRat":
        return cls(n, _power_table(n)[k % n])

    # -- predicates and views ----------------------------------------

    def is_zero(self) -> bool:
        return not any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def rational_value(self) -> mpq:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.c[0]

    def as_monomial(self):
        """Write self as r * z^k with r rational, or return None.

        The representation scans k = 0..n-1 and reports the smallest k
        that works, so it is deterministic.
        """
        if self.is_zero():
            return (mpq(0), 0)
        table = _power_table(self.n)
        for k, zk in enumerate(table):
            i = next((j for j, v in enumerate(zk) if v), None)
            if i is None or not self.c[i]:
                continue
            r = self.c[i] / zk[i]
            if all(self.c[j] == r * zk[j] for j in range(len(zk))):
                return (r, k)
        return None

    # -- arithmetic --------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, CycloRat):
            if other.n != self.n:
                raise ValueError(f"mixed cyclotomic orders {self.n} and {other.n}")
            return other
        q = _as_mpq(other)
        if q is None:
            return None
        return CycloRat.from_rational(self.n, q)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloRat(self.n, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return CycloRat(self.n, tuple(-a for a in self.c))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return CycloRat(self.n, tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        phi = len(self.c)
        conv = [mpq(0)] * (2 * phi - 1)
        for i, a in enumerate(self.c):
            if not a:
                continue
            for j, b in enumerate(o.c):
                if b:
                    conv[i + j] += a * b
        table = _power_table(self.n)
        out = conv[:phi]
        # 2*phi-2 < n for every supported order, so the power table
        # already contains the reductions we need.
        for d in range(phi, 2 * phi - 1):
            if conv[d]:
                zd = table[d]
                for i in range(phi):
                    out[i] += conv[d] * zd[i]
        return CycloRat(self.n, out)

    __rmul__ = __mul__

    def inverse(self) -> "CycloRat":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_n)")
        if self.is_rational():
            return CycloRat.from_rational(self.n, 1 / self.c[0])
        phi = len(self.c)
        cols = [(self * CycloRat.zeta_pow(self.n, j)).c for j in range(phi)]
        # Solve sum_j y_j * (self * z^j) = 1 by Gaussian elimination.
        rows = [[cols[j][i] for j in range(phi)] + [mpq(1 if i == 0 else 0)] for i in range(phi)]
        for col in range(phi):
            piv = next(r for r in range(col, phi) if rows[r][col])
            rows[col], rows[piv] = rows[piv], rows[col]
            inv = 1 / rows[col][col]
            rows[col] = [v * inv for v in rows[col]]
            for r in range(phi):
                if r != col and rows[r][col]:
                    f = rows[r][col]
                    rows[r] = [v - f * w for v, w in zip(rows[r], rows[col])]
        return CycloRat(self.n, tuple(rows[i][phi] for i in range(phi)))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = CycloRat.one(self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- roots -------------------------------------------------------

    def _unity_order(self) -> int:
        # The group of roots of unity in Q(zeta_n) has order n for even
        # n and 2n for odd n (because -1 is always present).
        return self.n if self.n % 2 == 0 else 2 * self.n

    def _unity_gen(self) -> "CycloRat":
        if self.n % 2 == 0:
            return CycloRat.zeta_pow(self.n, 1)
        return -CycloRat.zeta_pow(self.n, (self.n + 1) // 2)

    def nth_roots(self, m: int) -> list["CycloRat"]:
        """All y in Q(zeta_n) with y**m == self, sorted deterministically.

        The list may be empty (no root in the field) and never contains
        duplicates.  The monomial fast path settles every r*z^k input;
        anything else falls back to factoring X**m - self.
        """
        if m < 1:
            raise ValueError("m must be a positive integer")
        if m == 1:
            return [self]
        if self.is_zero():
            return [self]
        roots = self._monomial_nth_roots(m)
        if roots is None:
            # A monomial can still have non-monomial roots (Gauss sums:
            # (1+2z)^2 = -3 in Q(zeta_3)), so an empty fast path only
            # means "undecided" and we fall back to factoring.
            roots, _ = field_roots(
                [-self] + [CycloRat.zero(self.n)] * (m - 1) + [CycloRat.one(self.n)], self.n
            )
        return sorted(set(roots), key=lambda y: y.c)

    def _monomial_nth_roots(self, m: int):
        """Roots of the form (rational) * (root of unity), or None.

        A hit is complete: if one root is found, multiplying by the
        in-field solutions of w^m = 1 (all of which are roots of unity)
        yields every root.
        """
        mono = self.as_monomial()
        if mono is None:
            return None
        r, k = mono
        nn = self._unity_order()
        gen = self._unity_gen()
        # Express the unity part of self as gen^kk.
        kk = k if self.n % 2 == 0 else (2 * k) % nn
        if r < 0:
            r = -r
            kk = (kk + nn // 2) % nn
        rn, okn = iroot(mpz(r.numerator), m)
        rd, okd = iroot(mpz(r.denominator), m)
        if not (okn and okd):
            return None
        g = gcd(m, nn)
        if kk % g:
            return None
        # Solve j*m = kk (mod nn); all solutions differ by nn/g.
        j0 = ((kk // g) * pow(m // g, -1, nn // g)) % (nn // g)
        base = CycloRat.from_rational(self.n, mpq(rn, rd)) * gen ** j0
        return [base * gen ** (j * (nn // g)) for j in range(g)]

    # -- plumbing ----------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, CycloRat):
            return self.n == other.n and self.c == other.c
        q = _as_mpq(other)
        if q is None:
            return NotImplemented
        return self.is_rational() and self.c[0] == q

    def __hash__(self):
        return hash((self.n, self.c))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        if self.is_rational():
            return f"CycloRat({self.n}, {self.c[0]})"
        body = " + ".join(f"({v})*z^{i}" if i else f"({v})" for i, v in enumerate(self.c) if v)
        return f"CycloRat({self.n}: {body})"


# -- factoring over the field (the one sympy touchpoint) -------------

_FIELDS: dict[int, object] = {}


def _field(n: int):
    K = _FIELDS.get(n)
    if K is None:
        import sympy

        K = sympy.QQ.algebraic_field(sympy.exp(2 * sympy.I * sympy.pi / n))
        _FIELDS[n] = K
    return K


def _anp_rep(a) -> list:
    # high-to-low coefficient list of an ANP; sympy renamed the accessor.
    try:
        return list(a.to_list())
    except AttributeError:
        return list(a.rep)


def _to_field(K, x: CycloRat):
    phi = len(x.c)
    rep = [K.dom(int(v.numerator), int(v.denominator)) for v in reversed(x.c)]
    return K(rep) if hasattr(K, "__call__") else K.from_list(rep)


def _from_field(n: int, a) -> CycloRat:
    phi = phi_of(n)
    rep = _anp_rep(a)  # high-to-low in powers of zeta_n
    rep = [mpq(int(v.numerator), int(v.denominator)) for v in rep]
    rep = [mpq(0)] * (phi - len(rep)) + rep
    return CycloRat(n, tuple(reversed(rep)))


def field_roots(coeffs, n: int):
    """Roots in Q(zeta_n) of sum(coeffs[i] X^i), with multiplicity.

    Returns (roots, leftover): roots is a list of CycloRat repeated per
    multiplicity; leftover lists the degree of each irreducible factor
    (with multiplicity) whose roots do not lie in the field.  coeffs may
    mix CycloRat with plain rationals; the top coefficient must be
    nonzero.
    """
    import sympy

    K = _field(n)
    cs = []
    for c in coeffs:
        if not isinstance(c, CycloRat):
            c = CycloRat.from_rational(n, c)
        elif c.n != n:
            raise ValueError("coefficient from a different cyclotomic order")
        cs.append(c)
    while cs and cs[-1].is_zero():
        cs.pop()
    if len(cs) <= 1:
        raise ValueError("polynomial must have degree at least 1")
    x = sympy.Symbol("x")
    poly = sympy.Poly([_to_field(K, c) for c in reversed(cs)], x, domain=K)
    roots: list[CycloRat] = []
    leftover: list[int] = []
    _, factors = poly.factor_list()
    for fac, mult in factors:
        if fac.degree() == 1:
            try:
                a1, a0 = fac.rep.to_list()
            except AttributeError:
                a1, a0 = fac.rep.rep
            root = _from_field(n, K.exquo(K.neg(a0), a1))
            roots.extend([root] * mult)
        else:
            leftover.extend([fac.degree()] * mult)
    roots.sort(key=lambda y: y.c)
    return roots, sorted(leftover)

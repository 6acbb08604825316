"""Truncated Puiseux series over Q(zeta_N).

A series is a finite dict {exponent: coefficient} with mpq exponents,
CycloRat coefficients, and a truncation order `trunc`: exponents below
trunc are exact, everything from trunc on is unknown.  trunc == INF
means the series is exact.  A series with no terms and finite trunc is
"zero to precision", which is a different animal from the exact zero;
valuation queries on either raise instead of guessing.

Precision propagates through arithmetic the standard way: addition
takes the min of the truncs, multiplication takes
min(val(f)+trunc(g), val(g)+trunc(f)), inversion of c*t^v*(1+h) costs
2v.  Operations that would need infinitely many terms on exact input
(inverse of a non-monomial exact series, say) refuse and ask the caller
to truncate, rather than inventing a default precision.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from gmpy2 import mpq, mpz

from .cyclotomic import CycloRat, phi_of
from .errors import AlgebraicError, PrecisionError, StructureError

INF = math.inf


def _as_exp(e):
    if isinstance(e, (int, mpz)):
        return mpq(e)
    if isinstance(e, mpq):
        return e
    if isinstance(e, Fraction):
        return mpq(e.numerator, e.denominator)
    raise TypeError(f"bad exponent {e!r}")


def _as_trunc(T):
    if T == INF:
        return INF
    return _as_exp(T)


def _min_trunc(a, b):
    if a == INF:
        return b
    if b == INF:
        return a
    return min(a, b)


def _coerce_coeff(n, c):
    if isinstance(c, CycloRat):
        if c.n != n:
            raise ValueError(f"coefficient from Q(zeta_{c.n}) in a Q(zeta_{n}) series")
        return c
    return CycloRat.from_rational(n, c)


class PuiseuxSeries:
    __slots__ = ("n", "terms", "trunc")

    def __init__(self, n: int, terms=None, trunc=INF):
        phi_of(n)
        trunc = _as_trunc(trunc)
        clean: dict = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for e, c in items:
                e = _as_exp(e)
                c = _coerce_coeff(n, c)
                if trunc != INF and e >= trunc:
                    continue
                if c.is_zero():
                    continue
                if e in clean:
                    c = clean[e] + c
                    if c.is_zero():
                        del clean[e]
                        continue
                clean[e] = c
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "trunc", trunc)

    def __setattr__(self, name, value):
        raise AttributeError("PuiseuxSeries is immutable")

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls, n: int, trunc=INF) -> "PuiseuxSeries":
        return cls(n, {}, trunc)

    @classmethod
    def one(cls, n: int) -> "PuiseuxSeries":
        return cls(n, {mpq(0): CycloRat.one(n)})

    @classmethod
    def scalar(cls, n: int, c, trunc=INF) -> "PuiseuxSeries":
        return cls(n, {mpq(0): c}, trunc)

    @classmethod
    def monomial(cls, n: int, c, e, trunc=INF) -> "PuiseuxSeries":
        return cls(n, {_as_exp(e): c}, trunc)

    @classmethod
    def t_power(cls, n: int, e, trunc=INF) -> "PuiseuxSeries":
        return cls(n, {_as_exp(e): CycloRat.one(n)}, trunc)

    # -- views -------------------------------------------------------

    @property
    def is_exact_zero(self) -> bool:
        return not self.terms and self.trunc == INF

    @property
    def is_zero_to_prec(self) -> bool:
        return not self.terms and self.trunc != INF

    @property
    def ram_index(self) -> int:
        """lcm of the exponent denominators (1 for the zero series)."""
        out = 1
        for e in self.terms:
            d = int(e.denominator)
            out = out * d // math.gcd(out, d)
        return out

    def val(self) -> mpq:
        if self.terms:
            return min(self.terms)
        if self.trunc != INF:
            raise PrecisionError(
                f"series is zero to O(t^{self.trunc}); its valuation is undecidable"
            )
        raise StructureError("the exact zero series has no valuation")

    def val_bound(self):
        """min support exponent, or trunc when there are no terms."""
        return min(self.terms) if self.terms else self.trunc

    def leading_coeff(self) -> CycloRat:
        return self.terms[self.val()]

    def coeff(self, e) -> CycloRat:
        e = _as_exp(e)
        if self.trunc != INF and e >= self.trunc:
            raise PrecisionError(f"coefficient of t^{e} lies beyond O(t^{self.trunc})")
        return self.terms.get(e, CycloRat.zero(self.n))

    def truncate(self, prec) -> "PuiseuxSeries":
        prec = _as_trunc(prec)
        if prec >= self.trunc:
            return self
        return PuiseuxSeries(self.n, self.terms, prec)

    # -- arithmetic --------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PuiseuxSeries):
            if other.n != self.n:
                raise ValueError("mixed cyclotomic orders in series arithmetic")
            return other
        try:
            c = _coerce_coeff(self.n, other)
        except (TypeError, ValueError):
            return None
        return PuiseuxSeries.scalar(self.n, c)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        trunc = _min_trunc(self.trunc, o.trunc)
        merged = dict(self.terms)
        for e, c in o.terms.items():
            merged[e] = merged.get(e, CycloRat.zero(self.n)) + c
        return PuiseuxSeries(self.n, merged, trunc)

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries(self.n, {e: -c for e, c in self.terms.items()}, self.trunc)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_exact_zero or o.is_exact_zero:
            return PuiseuxSeries.zero(self.n)
        va, vb = self.val_bound(), o.val_bound()
        trunc = _min_trunc(
            INF if self.trunc == INF else vb + self.trunc,
            INF if o.trunc == INF else va + o.trunc,
        )
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = e1 + e2
                if trunc != INF and e >= trunc:
                    continue
                p = c1 * c2
                if e in out:
                    s = out[e] + p
                    if s.is_zero():
                        del out[e]
                    else:
                        out[e] = s
                else:
                    if not p.is_zero():
                        out[e] = p
        return PuiseuxSeries(self.n, out, trunc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = PuiseuxSeries.one(self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, e) -> "PuiseuxSeries":
        """Multiply by t^e (exactly)."""
        e = _as_exp(e)
        return PuiseuxSeries(
            self.n,
            {ex + e: c for ex, c in self.terms.items()},
            INF if self.trunc == INF else self.trunc + e,
        )

    def inverse(self) -> "PuiseuxSeries":
        if self.is_exact_zero:
            raise ZeroDivisionError("inverse of the exact zero series")
        if self.is_zero_to_prec:
            raise PrecisionError(f"cannot invert a series that is zero to O(t^{self.trunc})")
        v = self.val()
        c = self.terms[v]
        head = PuiseuxSeries.monomial(self.n, c.inverse(), -v)
        u = self * head  # 1 + h with val(h) > 0
        h = u - 1
        if h.is_exact_zero:
            return head
        if self.trunc == INF:
            raise PrecisionError(
                "inverse of a non-monomial exact series has infinitely many terms; truncate first"
            )
        rho = self.trunc - v
        # Newton doubling for the reciprocal of u = 1 + h: the contact
        # order of g*u with 1 doubles each step, so the cost is a few
        # multiplications at the final precision.  g is kept as a bare
        # polynomial; trimming terms at the contact order must not mark
        # g as truncated, or the marks would cap every later product
        if not h.terms:
            return head.truncate(self.trunc - 2 * v)
        g = PuiseuxSeries.one(self.n)
        cur = h.val()
        while cur < rho:
            cur = min(2 * cur, rho)
            step = g * (2 - u.truncate(cur) * g)
            g = PuiseuxSeries(self.n, {e: c for e, c in step.terms.items() if e < cur})
        return (g * head).truncate(self.trunc - 2 * v)

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

    # -- roots, composition, reversion -------------------------------

    def root(self, m: int) -> list["PuiseuxSeries"]:
        """All series y over the same field with y**m == self.

        The leading coefficient must have an m-th root in Q(zeta_n),
        else AlgebraicError; the number of results equals the number of
        in-field solutions of w**m = 1.  Exact input must be a monomial
        (other exact roots have infinitely many terms).
        """
        if m < 1:
            raise ValueError("m must be a positive integer")
        if self.is_exact_zero:
            return [self]
        if self.is_zero_to_prec:
            raise PrecisionError(f"root of a series that is zero to O(t^{self.trunc})")
        v = self.val()
        c = self.terms[v]
        croots = c.nth_roots(m)
        if not croots:
            raise AlgebraicError(
                f"leading coefficient {c!r} has no {m}th root in Q(zeta_{self.n})"
            )
        if len(self.terms) == 1 and self.trunc == INF:
            return [PuiseuxSeries.monomial(self.n, r, v / m) for r in croots]
        if self.trunc == INF:
            raise PrecisionError(
                "root of a non-monomial exact series has infinitely many terms; truncate first"
            )
        rho = self.trunc - v
        target = v / m + rho
        y = PuiseuxSeries.monomial(self.n, croots[0], v / m, trunc=target)
        last_contact = None
        while True:
            resid = y ** m - self
            if not resid.terms:
                if resid.trunc != INF:
                    target = _min_trunc(target, resid.trunc - v * (m - 1) / m)
                y = y.truncate(target)
                break
            contact = resid.val()
            if last_contact is not None and contact <= last_contact:
                raise AlgebraicError("Newton iteration for the series root stalled")
            last_contact = contact
            delta = resid / (m * y ** (m - 1))
            y = (y - delta).truncate(target)
        unity = CycloRat.one(self.n).nth_roots(m)
        return [y * PuiseuxSeries.scalar(self.n, w, trunc=INF) for w in unity]

    def compose(self, g: "PuiseuxSeries") -> "PuiseuxSeries":
        """self(g), for self with integer exponents and val(g) > 0."""
        if not isinstance(g, PuiseuxSeries) or g.n != self.n:
            raise ValueError("compose needs a series over the same field")
        for e in self.terms:
            if e.denominator != 1:
                raise StructureError("composition needs integer exponents in the outer series")
        vg = g.val_bound()
        if not (vg == INF or vg > 0):
            raise StructureError("composition needs val > 0 in the inner series")
        if self.trunc != INF and self.trunc <= 0 and not g.terms:
            raise PrecisionError("outer truncation below t^0 needs an invertible inner series")
        cap = INF
        if self.trunc != INF:
            cap = INF if vg == INF else vg * self.trunc
        if not self.terms:
            return PuiseuxSeries.zero(self.n, cap)
        ks = sorted(int(e) for e in self.terms)
        kmin, kmax = ks[0], ks[-1]
        acc = PuiseuxSeries.scalar(self.n, self.terms[mpq(kmax)])
        for k in range(kmax - 1, kmin - 1, -1):
            acc = acc * g
            ck = self.terms.get(mpq(k))
            if ck is not None:
                acc = acc + PuiseuxSeries.scalar(self.n, ck)
        if kmin:
            acc = acc * (g.inverse() ** (-kmin) if kmin < 0 else g ** kmin)
        return acc.truncate(cap)

    def derivative(self) -> "PuiseuxSeries":
        terms = {e - 1: c * e for e, c in self.terms.items() if e}
        return PuiseuxSeries(self.n, terms, INF if self.trunc == INF else self.trunc - 1)

    def reversion(self, order: int) -> "PuiseuxSeries":
        """The g with self(g(t)) = t + O(t^(order+1)); needs val(self) = 1."""
        if not self.terms or self.val() != 1:
            raise StructureError("reversion needs valuation exactly 1")
        target = mpq(order) + 1
        f = self.truncate(target)
        for e in f.terms:
            if e.denominator != 1:
                raise StructureError("reversion needs integer exponents")
        fp = f.derivative()
        c1 = f.terms[mpq(1)]
        g = PuiseuxSeries.monomial(self.n, c1.inverse(), 1, trunc=target)
        last_contact = None
        while True:
            resid = f.compose(g) - PuiseuxSeries.t_power(self.n, 1)
            if not resid.terms:
                return g.truncate(_min_trunc(target, resid.trunc))
            contact = resid.val()
            if last_contact is not None and contact <= last_contact:
                raise AlgebraicError("reversion iteration stalled")
            last_contact = contact
            g = (g - resid / fp.compose(g)).truncate(target)

    # -- comparison and display --------------------------------------

    def agrees_with(self, other: "PuiseuxSeries", prec=INF) -> bool:
        """Equality of all coefficients below min(truncs, prec)."""
        if not isinstance(other, PuiseuxSeries) or other.n != self.n:
            return False
        p = _min_trunc(_min_trunc(self.trunc, other.trunc), _as_trunc(prec))
        if p == INF:
            return self.terms == other.terms
        a = {e: c for e, c in self.terms.items() if e < p}
        b = {e: c for e, c in other.terms.items() if e < p}
        return a == b

    def __eq__(self, other):
        if isinstance(other, PuiseuxSeries):
            return self.n == other.n and self.trunc == other.trunc and self.terms == other.terms
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self == o

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items()), self.trunc))

    def __bool__(self):
        return bool(self.terms) or self.trunc != INF

    def __repr__(self):
        return format_series(self)

    __str__ = __repr__


# -- the literal grammar ---------------------------------------------
#
# Terms joined by + and -, each a product of an optional rational, an
# optional z-power and an optional t-power, e.g.
#   t^(-6) + (1/2)*z^2*t^(1/3) + 3/2*t^2 - z*t^(7/6) + O(t^(5))
# A trailing O(t^(p/q)) records the truncation order.

_TOKEN = re.compile(r"\s*(\d+|[zt]|O|\^|\*|/|\(|\)|\+|-)")


def _tokenize(text: str):
    out, i = [], 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise ValueError(f"bad series literal near {text[i:i+12]!r}")
        out.append(m.group(1))
        i = m.end()
    return out


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, want=None):
        tok = self.peek()
        if tok is None or (want is not None and tok != want):
            raise ValueError(f"bad series literal: expected {want!r}, got {tok!r}")
        self.i += 1
        return tok

    def rational(self) -> mpq:
        num = int(self.take())
        if self.peek() == "/":
            self.take()
            return mpq(num, int(self.take()))
        return mpq(num)

    def signed_rational(self) -> mpq:
        sign = 1
        while self.peek() in ("+", "-"):
            if self.take() == "-":
                sign = -sign
        return sign * self.rational()

    def exponent(self) -> mpq:
        # NUMBER, -NUMBER, or ( signed rational )
        if self.peek() == "(":
            self.take()
            e = self.signed_rational()
            self.take(")")
            return e
        sign = 1
        if self.peek() == "-":
            self.take()
            sign = -1
        return sign * self.rational()


def parse_series(text: str, n: int) -> PuiseuxSeries:
    """Parse the canonical series literal over Q(zeta_n)."""
    p = _Parser(_tokenize(text))
    terms: list = []
    trunc = INF
    first = True
    while p.peek() is not None:
        sign = 1
        while p.peek() in ("+", "-"):
            if p.take() == "-":
                sign = -sign
            first = False
        if p.peek() is None:
            raise ValueError("dangling sign in series literal")
        if not first and sign == 1 and p.toks[p.i - 1] not in ("+", "-"):
            raise ValueError("missing + or - between terms")
        first = False
        if p.peek() == "O":
            p.take()
            p.take("(")
            p.take("t")
            e = mpq(1)
            if p.peek() == "^":
                p.take()
                e = p.exponent()
            p.take(")")
            trunc = _min_trunc(trunc, e)
            continue
        coef = mpq(1)
        zpow = 0
        texp = mpq(0)
        seen = False
        while True:
            tok = p.peek()
            if tok == "(":
                p.take()
                coef *= p.signed_rational()
                p.take(")")
            elif tok is not None and tok.isdigit():
                coef *= p.rational()
            elif tok == "z":
                p.take()
                k = 1
                if p.peek() == "^":
                    p.take()
                    k = int(p.exponent())
                zpow += k
            elif tok == "t":
                p.take()
                e = mpq(1)
                if p.peek() == "^":
                    p.take()
                    e = p.exponent()
                texp += e
            else:
                break
            seen = True
            if p.peek() == "*":
                p.take()
                continue
            break
        if not seen:
            raise ValueError(f"bad series literal near token {p.peek()!r}")
        c = CycloRat.zeta_pow(n, zpow) * (sign * coef)
        terms.append((texp, c))
    return PuiseuxSeries(n, terms, trunc)


def _fmt_exp(e: mpq) -> str:
    if e == 1:
        return "t"
    if e.denominator == 1:
        return f"t^({int(e)})"
    return f"t^({e.numerator}/{e.denominator})"


def format_series(f: PuiseuxSeries) -> str:
    """Canonical literal; parse_series(format_series(f), f.n) == f."""
    pieces = []
    for e in sorted(f.terms):
        c = f.terms[e]
        for i, q in enumerate(c.c):
            if not q:
                continue
            neg = q < 0
            mag = -q if neg else q
            parts = []
            if i == 0:
                if mag != 1 or e == 0:
                    parts.append(f"{mag.numerator}" if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}")
            else:
                if mag != 1:
                    parts.append(f"({mag.numerator})" if mag.denominator == 1 else f"({mag.numerator}/{mag.denominator})")
                parts.append("z" if i == 1 else f"z^{i}")
            if e:
                parts.append(_fmt_exp(e))
            pieces.append((neg, "*".join(parts) if parts else "1"))
    if f.trunc != INF:
        T = f.trunc
        o = f"O(t^({T.numerator}))" if T.denominator == 1 else f"O(t^({T.numerator}/{T.denominator}))"
        pieces.append((False, o))
    if not pieces:
        return "0"
    out = []
    for k, (neg, body) in enumerate(pieces):
        if k == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append(("- " if neg else "+ ") + body)
    return " ".join(out)

"""Polynomials over Puiseux series and their roots.

newton_polygon reads root valuations off the lower hull of the points
(i, val c_i); puiseux_roots then branches on the characteristic-equation
roots of each segment, applying the substitution X -> t^v (gamma + X')
until a branch is simple and finishing it with quadratic Newton lifting.
Characteristic roots that leave Q(zeta_N) are reported, not dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from gmpy2 import mpq

from .config import DEFAULT_CONFIG, SessionConfig
from .cyclotomic import CycloRat, field_roots
from .errors import AlgebraicError, PrecisionError, SeparationError, StructureError
from .series import INF, PuiseuxSeries


class SeriesPoly:
    """A univariate polynomial with PuiseuxSeries coefficients.

    Coefficients are indexed by degree; trailing exact zeros are
    trimmed.  The ring operations exist mainly so that invariants of
    pencils (coefficients linear in a parameter) can be evaluated with
    the same code as plain series.
    """

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs):
        cs = []
        for c in coeffs:
            if not isinstance(c, PuiseuxSeries):
                c = PuiseuxSeries.scalar(n, c)
            elif c.n != n:
                raise ValueError("mixed cyclotomic orders in polynomial")
            cs.append(c)
        while cs and cs[-1].is_exact_zero:
            cs.pop()
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("SeriesPoly is immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> PuiseuxSeries:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else PuiseuxSeries.zero(self.n)

    def evaluate(self, x: PuiseuxSeries) -> PuiseuxSeries:
        if not self.coeffs:
            return PuiseuxSeries.zero(self.n)
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def derivative(self) -> "SeriesPoly":
        return SeriesPoly(self.n, [i * c for i, c in enumerate(self.coeffs)][1:])

    def __add__(self, other):
        if not isinstance(other, SeriesPoly):
            other = SeriesPoly(self.n, [other])
        if other.n != self.n:
            raise ValueError("mixed cyclotomic orders")
        m = max(len(self.coeffs), len(other.coeffs))
        return SeriesPoly(self.n, [self.coeff(i) + other.coeff(i) for i in range(m)])

    __radd__ = __add__

    def __neg__(self):
        return SeriesPoly(self.n, [-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, SeriesPoly):
            other = SeriesPoly(self.n, [other])
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, SeriesPoly):
            # scalar (series or rational) multiple
            if isinstance(other, PuiseuxSeries) or not hasattr(other, "coeffs"):
                return SeriesPoly(self.n, [c * other for c in self.coeffs])
        if other.n != self.n:
            raise ValueError("mixed cyclotomic orders")
        if not self.coeffs or not other.coeffs:
            return SeriesPoly(self.n, [])
        out = [PuiseuxSeries.zero(self.n)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_exact_zero:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return SeriesPoly(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = SeriesPoly(self.n, [PuiseuxSeries.one(self.n)])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale_variable(self, e) -> "SeriesPoly":
        """p(t^e X) as a polynomial in X."""
        return SeriesPoly(self.n, [c.shift(mpq(i) * mpq(e)) for i, c in enumerate(self.coeffs)])

    def taylor_shift(self, gamma: CycloRat) -> "SeriesPoly":
        """p(gamma + X) by repeated synthetic division."""
        g = PuiseuxSeries.scalar(self.n, gamma)
        cs = list(self.coeffs)
        out = []
        for _ in range(len(cs)):
            # divide by (X - (-gamma)): remainder is the next Taylor coeff
            acc = PuiseuxSeries.zero(self.n)
            for i in reversed(range(len(cs))):
                acc = cs[i] + acc * g
                cs[i] = acc
            out.append(cs[0])
            cs = cs[1:]
        return SeriesPoly(self.n, out)

    def __repr__(self):
        body = ", ".join(repr(c) for c in self.coeffs)
        return f"SeriesPoly({self.n}, [{body}])"


@dataclass(frozen=True)
class PolygonSegment:
    """One lower-hull segment of the Newton polygon.

    slope records the candidate root valuation, i.e. MINUS the geometric
    slope of the hull segment; length is the number of roots (with
    multiplicity) at that valuation; support lists the degrees whose
    points lie on the segment.
    """

    slope: mpq
    length: int
    support: tuple


def newton_polygon(p: SeriesPoly) -> list[PolygonSegment]:
    """Lower-hull segments of {(i, val c_i)}, ascending root valuation.

    Exact-zero coefficients contribute no point.  A zero-to-precision
    coefficient only bounds its point from below; if that bound does not
    keep the point strictly above the hull, the polygon is undecidable
    and PrecisionError is raised.  Leading and trailing (lowest nonzero
    degree) coefficients must be decided.
    """
    if not p.coeffs:
        raise StructureError("Newton polygon of the zero polynomial")
    if p.coeffs[-1].is_zero_to_prec:
        raise PrecisionError("leading coefficient is zero to precision")
    certain = []
    bounds = []
    for i, c in enumerate(p.coeffs):
        if c.is_exact_zero:
            continue
        if c.is_zero_to_prec:
            bounds.append((mpq(i), c.trunc))
        else:
            certain.append((mpq(i), c.val()))
    if not certain:
        raise PrecisionError("no coefficient valuation is decided")
    i0 = certain[0][0]
    for i, T in bounds:
        if i < i0:
            raise PrecisionError(
                f"coefficient of degree {i} is zero to O(t^{T}) below the decided support"
            )
    if len(certain) == 1:
        return []
    hull = []
    for pt in certain:
        while len(hull) >= 2:
            (pi, ph), (qi, qh) = hull[-2], hull[-1]
            ri, rh = pt
            if (qh - ph) * (ri - pi) - (rh - ph) * (qi - pi) >= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    # every lower-bound point must stay strictly above the hull
    def hull_height(x):
        for (pi, ph), (qi, qh) in zip(hull, hull[1:]):
            if pi <= x <= qi:
                return ph + (qh - ph) * (x - pi) / (qi - pi)
        return None

    for i, T in bounds:
        h = hull_height(i)
        if h is not None and T <= h:
            raise PrecisionError(
                f"coefficient of degree {i} is zero to O(t^{T}), which could touch the"
                f" Newton polygon (hull height {h})"
            )
    segments = []
    for (pi, ph), (qi, qh) in zip(hull, hull[1:]):
        geom = (qh - ph) / (qi - pi)
        support = tuple(
            int(i) for i, h in certain if pi <= i <= qi and h == ph + geom * (i - pi)
        )
        segments.append(PolygonSegment(slope=-geom, length=int(qi - pi), support=support))
    segments.sort(key=lambda s: s.slope)
    return segments


@dataclass(frozen=True)
class UnrepresentableBranch:
    """A root branch whose initial coefficient leaves Q(zeta_N).

    degree is the degree of the irreducible characteristic factor,
    multiplicity its repetition; the branch accounts for
    degree*multiplicity roots of the original polynomial.
    """

    valuation: mpq
    degree: int
    multiplicity: int
    depth: int

    @property
    def count(self) -> int:
        return self.degree * self.multiplicity


class RootList(list):
    """List of roots plus the report of unrepresentable branches."""

    def __init__(self, roots=(), unrepresentable=()):
        super().__init__(roots)
        self.unrepresentable = tuple(unrepresentable)

    @property
    def complete(self) -> bool:
        return not self.unrepresentable


def _lift_simple(q: SeriesPoly, ytarget, n: int) -> PuiseuxSeries:
    """Newton-lift the unique small root of q from y = 0.

    Assumes q(0) has positive valuation and the branch is simple; the
    result is truncated at absolute precision ytarget.
    """
    qp = q.derivative()
    y = PuiseuxSeries.zero(n)
    last = None
    while True:
        r = q.evaluate(y)
        if not r.terms:
            if r.trunc != INF:
                dv = qp.evaluate(y).val()
                ytarget = min(ytarget, r.trunc - dv)
            break
        rv = r.val()
        qv = qp.evaluate(y)
        dv = qv.val()
        contact = rv - dv
        if contact >= ytarget:
            break
        if last is not None and contact <= last:
            raise SeparationError(
                f"Newton lifting stalled at contact order {contact}; branch is not simple"
            )
        last = contact
        rel = ytarget - contact
        delta = r.truncate(rv + rel) / qv.truncate(dv + rel)
        y = (y - delta).truncate(ytarget)
    return y.truncate(ytarget)


def _solve(p: SeriesPoly, depth: int, prec, cfg: SessionConfig, roots, unrep, positive_only):
    cs = list(p.coeffs)
    while cs and cs[-1].is_exact_zero:
        cs.pop()
    if not cs:
        raise StructureError("cannot solve the zero polynomial")
    if cs[-1].is_zero_to_prec:
        raise PrecisionError("leading coefficient is zero to precision")
    i0 = next(i for i, c in enumerate(cs) if not c.is_exact_zero)
    if i0 > 0:
        # exact zero divides out: i0 roots at 0 (valuation infinity)
        roots.extend([PuiseuxSeries.zero(p.n)] * i0)
        cs = cs[i0:]
    if len(cs) == 1:
        return
    q = SeriesPoly(p.n, cs)
    if q.coeffs[0].is_zero_to_prec:
        _solve_fuzzy_constant(q, depth, prec, cfg, roots, unrep, positive_only)
        return
    for seg in newton_polygon(q):
        v = seg.slope
        if positive_only and v <= 0:
            continue
        char = [CycloRat.zero(p.n)] * (seg.length + 1)
        base = seg.support[0]
        for i in seg.support:
            char[i - base] = q.coeffs[i].leading_coeff()
        gammas, leftover = field_roots(char, p.n)
        groups: dict = {}
        for g in gammas:
            groups[g] = groups.get(g, 0) + 1
        for d in set(leftover):
            unrep.append(
                UnrepresentableBranch(
                    valuation=v, degree=d, multiplicity=leftover.count(d), depth=depth
                )
            )
        for gamma, mult in groups.items():
            shifted = q.scale_variable(v).taylor_shift(gamma)
            if mult == 1:
                c0 = shifted.coeffs[0]
                if c0.is_exact_zero:
                    root = PuiseuxSeries.monomial(p.n, gamma, v)
                else:
                    y = _lift_simple(shifted, prec - v, p.n)
                    root = ((PuiseuxSeries.scalar(p.n, gamma) + y).shift(v)).truncate(prec)
                roots.append(root)
            else:
                if depth + 1 > cfg.max_branch_depth:
                    raise SeparationError(
                        f"branch at valuation {v}, initial coefficient {gamma!r}, failed to"
                        f" separate within {cfg.max_branch_depth} steps"
                    )
                sub_roots: list = []
                try:
                    _solve(shifted, depth + 1, prec - v, cfg, sub_roots, unrep, True)
                except PrecisionError as e:
                    raise SeparationError(
                        f"branch at valuation {v}, initial coefficient {gamma!r}: {e}"
                    ) from e
                for y in sub_roots:
                    root = ((PuiseuxSeries.scalar(p.n, gamma) + y).shift(v)).truncate(prec)
                    roots.append(root)


def _solve_fuzzy_constant(q: SeriesPoly, depth, prec, cfg, roots, unrep, positive_only):
    """Roots of q when the constant coefficient is only known to be
    zero to O(t^T).

    There is exactly one root congruent to zero modulo t^(T - val(c1));
    it is reported as a zero-to-precision series.  The remaining roots
    are those of the polynomial with the constant dropped, each cut
    back to the precision the fuzz budget supports.  Requires the
    linear coefficient decided and the near-zero root separated from
    the rest."""
    c0, c1 = q.coeffs[0], q.coeffs[1]
    if c1.is_exact_zero or c1.is_zero_to_prec:
        raise PrecisionError(
            "two leading coefficients are undecided; cannot separate the roots near zero"
        )
    bound = c0.trunc
    v1 = c1.val()
    fuzz_trunc = bound - v1
    if positive_only and fuzz_trunc <= 0:
        raise PrecisionError(
            f"near-zero root is only known to O(t^{fuzz_trunc}); its valuation sign is undecided"
        )
    rest = SeriesPoly(q.n, q.coeffs[1:])
    sub: list = []
    _solve(rest, depth, prec, cfg, sub, unrep, positive_only)
    if any(r.is_zero_to_prec or r.is_exact_zero for r in sub):
        raise PrecisionError("nested undecided roots cannot be separated")
    if sub:
        vmax = max(r.val() for r in sub)
        if fuzz_trunc <= vmax:
            raise PrecisionError(
                f"undecided constant coefficient (zero to O(t^{bound})) does not separate"
                f" the near-zero root from roots of valuation {vmax}"
            )
    dq = q.derivative()
    for r in sub:
        dv = dq.evaluate(r).val()
        cap = bound - dv
        if cap <= r.val():
            raise PrecisionError(
                f"root of valuation {r.val()} is not determined at the available precision"
            )
        roots.append(r.truncate(cap))
    roots.append(PuiseuxSeries.zero(q.n, trunc=fuzz_trunc))


def puiseux_roots(p: SeriesPoly, target_prec, config: SessionConfig = DEFAULT_CONFIG,
                  positive_valuation_only: bool = False) -> RootList:
    """All roots of p over Q(zeta_N)((t^(1/e))) to absolute precision target_prec.

    Returns a RootList; entries are sorted by valuation (exact-zero
    roots first) and each root r is certified by checking that p(r) has
    no term below the certification threshold
    min_i(val(c_i) + i*val(r)) + (target_prec - val(r)).  Roots whose
    initial coefficients leave the field are summarized on
    RootList.unrepresentable, and the counts always add up to deg(p).

    With positive_valuation_only the branches of nonpositive valuation
    are skipped entirely; this keeps precision demands local to the
    small roots (segments that cannot separate at the available
    precision no longer matter if they are not asked for).
    """
    prec = mpq(target_prec)
    roots: list = []
    unrep: list = []
    _solve(p, 0, prec, config, roots, unrep, positive_only=positive_valuation_only)
    expected = None
    if positive_valuation_only:
        cs = list(p.coeffs)
        i0 = next(i for i, c in enumerate(cs) if not c.is_exact_zero)
        trimmed = SeriesPoly(p.n, cs[i0:])
        try:
            if trimmed.degree > 0:
                expected = i0 + sum(
                    sg.length for sg in newton_polygon(trimmed) if sg.slope > 0
                )
            else:
                expected = i0
        except PrecisionError:
            pass  # undecided polygon: the count is not predictable up front
    else:
        expected = p.degree
    total = len(roots) + sum(u.count for u in unrep)
    if expected is not None and total != expected:
        raise AlgebraicError(
            f"internal accounting error: found {len(roots)} roots and"
            f" {total - len(roots)} unrepresentable branches, expected {expected}"
        )
    for r in roots:
        if r.is_exact_zero or r.is_zero_to_prec:
            continue
        v = r.val()
        scale = min(
            c.val_bound() + i * v for i, c in enumerate(p.coeffs) if not c.is_exact_zero
        )
        reach = prec if r.trunc == INF else min(prec, r.trunc)
        threshold = scale + (reach - v)
        resid = p.evaluate(r)
        bad = [e for e in resid.terms if e < threshold]
        if bad:
            raise AlgebraicError(
                f"root certification failed: residual has terms at {sorted(bad)} below {threshold}"
            )

    def key(r):
        if r.is_exact_zero:
            return (0, mpq(0), ())
        if r.is_zero_to_prec:
            return (1, r.trunc, ())
        return (2, r.val(), r.leading_coeff().c)

    roots.sort(key=key)
    return RootList(roots, unrep)

"""Tate curves and theta products on K*/q^Z.

Three layers live here.  The modular layer expands j, a4 and Delta as
q-series and recovers the Tate parameter q from a prescribed j-value of
negative valuation by series reversion.  The analytic layer evaluates
the fundamental theta function

    Theta(x) = prod_{n>0} (1 - q^n x) * prod_{n>=0} (1 - q^n / x)

and its shifts Theta_a(x) = Theta(x/a), and maps the multiplicative
group to a plane cubic through a triple of theta products.  The
implicitization layer turns twelve parameters (q, a, b, c, p1..p9)
back into the ten coefficients of that cubic, and normalizes parameter
vectors by the five moves that leave the cubic unchanged.

Theta products are truncated by a valuation budget: a skipped factor
1 - q^n y differs from 1 only beyond the budget, so the retained terms
are exact.  All precision bookkeeping else rides on the series layer.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass

from gmpy2 import mpq
from sympy import divisor_sigma

from .config import DEFAULT_CONFIG
from .cubics import Cubic
from .errors import PrecisionError, StructureError
from .series import INF, PuiseuxSeries

_GROUPS = ((0, 1, 2), (3, 4, 5), (6, 7, 8))


# -- the modular layer -----------------------------------------------


def a4_series(n: int, order: int) -> PuiseuxSeries:
    """The coefficient a4 = -5 sum_{k>=1} k^3 q^k / (1 - q^k), through q^order.

    Geometric expansion of each summand turns the k-th term into
    -5 sigma_3(m) q^m summed over multiples m of k, so the q^m
    coefficient is -5 sigma_3(m).
    """
    terms = {mpq(k): -5 * int(divisor_sigma(k, 3)) for k in range(1, order + 1)}
    return PuiseuxSeries(n, terms, trunc=order + 1)


def delta_series(n: int, order: int) -> PuiseuxSeries:
    """The discriminant Delta = q * prod_{k>=1} (1 - q^k)^24, through q^order."""
    acc = {0: 1}
    for k in range(1, order):
        fac = {k * j: (-1) ** j * math.comb(24, j) for j in range(24 + 1) if k * j < order}
        nxt = {}
        for e1, c1 in acc.items():
            for e2, c2 in fac.items():
                e = e1 + e2
                if e < order:
                    nxt[e] = nxt.get(e, 0) + c1 * c2
        acc = nxt
    return PuiseuxSeries(n, {mpq(e + 1): c for e, c in acc.items()}, trunc=order + 1)


def e6_series(n: int, order: int) -> PuiseuxSeries:
    """The Eisenstein series E6 = 1 - 504 sum sigma_5(k) q^k, through q^order."""
    terms = {mpq(0): 1}
    for k in range(1, order + 1):
        terms[mpq(k)] = -504 * int(divisor_sigma(k, 5))
    return PuiseuxSeries(n, terms, trunc=order + 1)


def modular_j_series(n: int, order: int) -> PuiseuxSeries:
    """The expansion j = 1/q + 744 + 196884 q + 21493760 q^2 + ..., through q^order.

    Computed as E4^3 / Delta with E4 = 1 - 48 a4.
    """
    e4 = 1 - 48 * a4_series(n, order + 1)
    return (e4 ** 3 / delta_series(n, order + 2)).truncate(order + 1)


def _cap_relative(s: PuiseuxSeries, rho) -> PuiseuxSeries:
    # exact non-monomial series cannot be inverted; cap them at a
    # relative budget so the analytic layer can divide freely
    if s.trunc != INF or len(s.terms) <= 1:
        return s
    return s.truncate(s.val() + rho)


def modular_check(q: PuiseuxSeries, order: int) -> PuiseuxSeries:
    """Residual of the modular identity j = (1 - 48 a4)^3 / Delta at q.

    The minuend composes a4 and Delta at q and forms the rational
    expression; the subtrahend composes the reference expansion
    1/q + 744 + 196884 q + ..., produced through the second Eisenstein
    route E6^2 / Delta + 1728, so the residual compares two genuinely
    different computations.  Zero to the requested order for any q of
    positive valuation.
    """
    if q.is_exact_zero or q.is_zero_to_prec:
        raise StructureError("modular_check needs a nonzero q")
    vq = q.val()
    if vq <= 0:
        raise StructureError("modular_check needs val(q) > 0")
    n = q.n
    qc = _cap_relative(q, (order + 3) * vq)
    a4 = a4_series(n, order + 1).compose(qc)
    delta = delta_series(n, order + 2).compose(qc)
    direct = (1 - 48 * a4) ** 3 / delta
    e6 = e6_series(n, order + 1).compose(qc)
    reference = e6 ** 2 / delta + 1728
    return (direct - reference).truncate((order + 1) * vq)


def q_from_j(iota: PuiseuxSeries, order: int = 8) -> PuiseuxSeries:
    """The Tate parameter q with j(q) = iota, through order reversion terms.

    Needs val(iota) < 0.  Since j = 1/q + 744 + ..., the reciprocal
    1/j is a valuation-1 power series V in q; reverting V and
    composing with 1/iota gives q = R(1/iota), so val(q) = -val(iota)
    and the leading behavior is q = iota^{-1} (1 + 744 iota^{-1} + ...).
    """
    if iota.is_exact_zero or iota.is_zero_to_prec:
        raise StructureError("q_from_j needs a nonzero j-value")
    v = iota.val()
    if v >= 0:
        raise StructureError("q_from_j needs val(j) < 0; the curve must have multiplicative reduction")
    j = modular_j_series(iota.n, order + 1)
    rev = (1 / j).reversion(order)
    inv_iota = _cap_relative(iota, (order + 1) * (-v)).inverse()
    return rev.compose(inv_iota)


# -- theta products --------------------------------------------------


def _budget(prec, *series_args):
    if prec is not None:
        rho = mpq(prec)
        if rho <= 0:
            raise ValueError("precision budget must be positive")
        return rho
    rel = [s.trunc - s.val() for s in series_args if s.trunc != INF and s.terms]
    return min(rel) if rel else DEFAULT_CONFIG.prec


def theta_eval(x: PuiseuxSeries, a, q: PuiseuxSeries, prec=None) -> PuiseuxSeries:
    """Theta_a(x) = Theta(x/a) to a relative precision budget.

    Factors 1 - q^n y and 1 - q^n / y (y = x/a) enter while
    n val(q) + val(y), respectively n val(q) - val(y), stay below the
    budget; every omitted factor is 1 + O(t^budget) relative, so the
    result is truncated at its valuation plus the budget.  When x/a is
    exactly a power of q the value is the exact zero series; when it is
    a power of q to precision only, the result is zero to precision.
    """
    n = q.n
    a = a if isinstance(a, PuiseuxSeries) else PuiseuxSeries.scalar(n, a)
    x = x if isinstance(x, PuiseuxSeries) else PuiseuxSeries.scalar(n, x)
    for name, s in (("x", x), ("a", a), ("q", q)):
        if s.is_exact_zero:
            raise StructureError(f"theta_eval needs nonzero {name}")
        if s.is_zero_to_prec:
            raise PrecisionError(f"theta_eval argument {name} is zero to O(t^{s.trunc})")
    Q = q.val()
    if Q <= 0:
        raise StructureError("theta_eval needs val(q) > 0")
    vy = x.val() - a.val()
    e = vy / Q
    if e.denominator == 1:
        # membership in q^Z is decided on the uncapped inputs so an
        # exact zero of Theta stays exactly zero
        k = int(e)
        diff = x - a * q ** k if k >= 0 else x * q ** (-k) - a
        if diff.is_exact_zero:
            return PuiseuxSeries.zero(n)
    rho = _budget(prec, x, a, q)
    qc = _cap_relative(q, rho)
    y = _cap_relative(x, rho) / _cap_relative(a, rho)
    yinv = y.inverse()

    factors = []
    qn = PuiseuxSeries.one(n)
    k = 0
    while k * Q - vy < rho or (k + 1) * Q + vy < rho:
        if k * Q - vy < rho:
            factors.append(1 - qn * yinv)
        if (k + 1) * Q + vy < rho:
            factors.append(1 - qn * qc * y)
        qn = qn * qc
        k += 1

    res = PuiseuxSeries.one(n)
    for f in factors:
        if f.is_exact_zero:
            return PuiseuxSeries.zero(n)
        res = res * f
    if res.terms:
        res = res.truncate(res.val() + rho)
    return res


# -- parameter vectors -----------------------------------------------


@dataclass(frozen=True)
class ThetaParams:
    """Twelve scalars (q, a, b, c, p1..p9) defining a theta map to P^2.

    The map sends x to

        (a Theta_{p1} Theta_{p2} Theta_{p3}(x)
       : b Theta_{p4} Theta_{p5} Theta_{p6}(x)
       : c Theta_{p7} Theta_{p8} Theta_{p9}(x)).

    Constructor checks: val(q) > 0; a, b, c and the p_i invertible; the
    three products p1p2p3, p4p5p6, p7p8p9 agree to precision; and no
    ratio p_i / p_j with i != j is a power of q to precision.
    """

    q: PuiseuxSeries
    a: PuiseuxSeries
    b: PuiseuxSeries
    c: PuiseuxSeries
    p: tuple

    def __init__(self, q, a, b, c, p):
        if not isinstance(q, PuiseuxSeries):
            raise StructureError("q must be a series")
        n = q.n

        def unit(s, name):
            s = s if isinstance(s, PuiseuxSeries) else PuiseuxSeries.scalar(n, s)
            if s.is_exact_zero:
                raise StructureError(f"theta parameter {name} must be nonzero")
            if s.is_zero_to_prec:
                raise PrecisionError(f"theta parameter {name} is zero to O(t^{s.trunc})")
            return s

        q = unit(q, "q")
        if q.val() <= 0:
            raise StructureError("theta parameters need val(q) > 0")
        p = tuple(unit(s, f"p{i + 1}") for i, s in enumerate(p))
        if len(p) != 9:
            raise StructureError("theta parameters need exactly nine points p1..p9")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "a", unit(a, "a"))
        object.__setattr__(self, "b", unit(b, "b"))
        object.__setattr__(self, "c", unit(c, "c"))
        object.__setattr__(self, "p", p)
        self._validate()

    def _validate(self):
        sums = [sum(self.p[i].val() for i in g) for g in _GROUPS]
        prods = [self.p[g[0]] * self.p[g[1]] * self.p[g[2]] for g in _GROUPS]
        for k in (1, 2):
            if sums[k] != sums[0] or not prods[0].agrees_with(prods[k]):
                raise StructureError(
                    "theta parameters need p1p2p3 = p4p5p6 = p7p8p9; "
                    f"group {k + 1} product differs"
                )
        Q = self.q.val()
        for i in range(9):
            for j in range(i + 1, 9):
                r = self.p[i] / self.p[j]
                e = r.val() / Q
                if e.denominator != 1:
                    continue
                d = r / _qpow(self.q, int(e)) - 1
                if d.is_exact_zero:
                    raise StructureError(
                        f"p{i + 1}/p{j + 1} is a power of q; the nine points must be distinct on K*/q^Z"
                    )
                if d.is_zero_to_prec:
                    raise PrecisionError(
                        f"p{i + 1}/p{j + 1} agrees with a power of q to O(t^{d.trunc}); "
                        "increase precision to separate them"
                    )

    @property
    def n(self) -> int:
        return self.q.n

    def abc(self):
        return (self.a, self.b, self.c)


def _qpow(q: PuiseuxSeries, k: int) -> PuiseuxSeries:
    if k >= 0:
        return q ** k
    return _cap_relative(q, DEFAULT_CONFIG.prec).inverse() ** (-k)


def parametrize_point(P: ThetaParams, x, prec=None):
    """Image of x under the theta map, as a triple of series."""
    n = P.n
    x = x if isinstance(x, PuiseuxSeries) else PuiseuxSeries.scalar(n, x)
    coords = []
    for s, g in zip(P.abc(), _GROUPS):
        val = s
        for i in g:
            val = val * theta_eval(x, P.p[i], P.q, prec=prec)
        coords.append(val)
    return tuple(coords)


# -- implicitization -------------------------------------------------


def _distinct_on_line(pairs, line_name):
    # the three image points on a coordinate line are (num : den);
    # coincident points break the rank-3 linear system below
    for s in range(3):
        for t in range(s + 1, 3):
            ns, ds = pairs[s]
            nt, dt = pairs[t]
            d = ns * dt - nt * ds
            if d.is_exact_zero:
                raise StructureError(
                    f"coincident intersection points on the line {line_name}; "
                    "the cubic must meet each coordinate line in three distinct points"
                )
            if d.is_zero_to_prec:
                raise PrecisionError(
                    f"intersection points on the line {line_name} coincide to O(t^{d.trunc})"
                )


def _vieta(pairs):
    # coefficients (e0, e1, e2, e3) of prod (den L - num M) as a binary
    # cubic in (L, M): e_k / e_0 is the k-th elementary symmetric
    # function of the roots num/den, with alternating sign
    (n1, d1), (n2, d2), (n3, d3) = pairs
    e0 = d1 * d2 * d3
    e1 = n1 * d2 * d3 + d1 * n2 * d3 + d1 * d2 * n3
    e2 = n1 * n2 * d3 + n1 * d2 * n3 + d1 * n2 * n3
    e3 = n1 * n2 * n3
    return e0, e1, e2, e3


def _witness_candidates(n, seed=7):
    rng = random.Random(seed)
    while True:
        c0 = rng.choice([1, 2, 3, -1, -2, 5])
        c1 = rng.choice([0, 1, -1, 2])
        yield PuiseuxSeries(n, {mpq(0): c0, mpq(1): c1})


def implicitize(P: ThetaParams, witness=None, prec=None) -> Cubic:
    """The plane cubic swept out by the theta map of P.

    Evaluating the vanishing cubic at the nine parameter points, where
    one coordinate dies, leaves a binary cubic on each coordinate line
    whose roots are ratios of theta products; the three corner groups
    of coefficients follow by Vieta, chained through the shared corners
    c300 and c003, with c030 normalized to the first denominator
    product.  The middle coefficient c111 comes from one extra point v
    off the coordinate triangle.  Output coefficients are unique up to
    one global scale.
    """
    n = P.n
    a, b, c = P.abc()
    q = P.q

    def prod_theta(x, g):
        val = PuiseuxSeries.one(n)
        for i in g:
            val = val * theta_eval(x, P.p[i], q, prec=prec)
        return val

    # line h = 0 carries the images of p7, p8, p9 as (f : g)
    fg = [(b * prod_theta(P.p[i], _GROUPS[1]), a * prod_theta(P.p[i], _GROUPS[0])) for i in (6, 7, 8)]
    _distinct_on_line(fg, "z = 0")
    c030, e1, e2, e3 = _vieta(fg)
    c120, c210, c300 = -e1, e2, -e3

    # line g = 0: images of p4, p5, p6 as (f : h), scaled by c300
    fh = [(a * prod_theta(P.p[i], _GROUPS[0]), c * prod_theta(P.p[i], _GROUPS[2])) for i in (3, 4, 5)]
    _distinct_on_line(fh, "y = 0")
    d0, d1, d2, d3 = _vieta(fh)
    c201 = -c300 * d1 / d0
    c102 = c300 * d2 / d0
    c003 = -c300 * d3 / d0

    # line f = 0: images of p1, p2, p3 as (h : g), scaled by c003
    hg = [(c * prod_theta(P.p[i], _GROUPS[2]), b * prod_theta(P.p[i], _GROUPS[1])) for i in (0, 1, 2)]
    _distinct_on_line(hg, "x = 0")
    g0, g1, g2, g3 = _vieta(hg)
    c012 = -c003 * g1 / g0
    c021 = c003 * g2 / g0
    closing = -c003 * g3 / g0
    if not closing.agrees_with(c030):
        raise StructureError("implicitization failed to close up around the coordinate triangle")

    def c111_from(v):
        f, g, h = parametrize_point(P, v, prec=prec)
        for coord, line in ((f, "x"), (g, "y"), (h, "z")):
            if coord.is_exact_zero:
                raise StructureError(f"witness lies on the coordinate line {line} = 0")
            if coord.is_zero_to_prec:
                raise PrecisionError(
                    f"witness coordinate {line} is zero to O(t^{coord.trunc})"
                )
        rest = (
            c300 * f ** 3 + c210 * f ** 2 * g + c120 * f * g ** 2 + c030 * g ** 3
            + c021 * g ** 2 * h + c012 * g * h ** 2 + c003 * h ** 3
            + c102 * f * h ** 2 + c201 * f ** 2 * h
        )
        return -rest / (f * g * h)

    if witness is not None:
        c111 = c111_from(witness if isinstance(witness, PuiseuxSeries) else PuiseuxSeries.scalar(n, witness))
    else:
        c111 = None
        for _, v in zip(range(24), _witness_candidates(n)):
            try:
                c111 = c111_from(v)
                break
            except (StructureError, PrecisionError):
                continue
        if c111 is None:
            raise StructureError("no usable witness point found off the coordinate triangle")

    return Cubic(n, {
        (3, 0, 0): c300, (2, 1, 0): c210, (1, 2, 0): c120, (0, 3, 0): c030,
        (0, 2, 1): c021, (0, 1, 2): c012, (0, 0, 3): c003,
        (1, 0, 2): c102, (2, 0, 1): c201, (1, 1, 1): c111,
    })


# -- the five moves --------------------------------------------------


def normalize_params(P: ThetaParams, op: str, *, perm=None, lam=None, shifts=None) -> ThetaParams:
    """A parameter vector defining the same cubic, produced by one move.

    The moves: "permute" relabels within the three groups (perm is a
    0-based tuple fixing each block {0,1,2}, {3,4,5}, {6,7,8});
    "scale_abc" and "scale_p" multiply a,b,c respectively every p_i by
    lam; "invert_p" replaces each p_i by 1/p_i; "q_shift" multiplies
    p_i by q^{n_i} where the shifts must have equal sums over the three
    groups, and rescales a, b, c by the matching monomials
    prod p_i^{n_i} q^{binom(n_i, 2)} of the old parameters.
    """
    q, a, b, c, p = P.q, P.a, P.b, P.c, list(P.p)
    if op == "permute":
        if perm is None or sorted(perm) != list(range(9)):
            raise StructureError("permute needs a permutation of 0..8")
        for g in _GROUPS:
            if sorted(perm[i] for i in g) != list(g):
                raise StructureError("permutation must fix the three groups {p1,p2,p3}, {p4,p5,p6}, {p7,p8,p9}")
        return ThetaParams(q, a, b, c, tuple(p[perm[i]] for i in range(9)))
    if op == "scale_abc":
        lam = _move_scalar(P.n, lam)
        return ThetaParams(q, a * lam, b * lam, c * lam, tuple(p))
    if op == "scale_p":
        lam = _move_scalar(P.n, lam)
        return ThetaParams(q, a, b, c, tuple(s * lam for s in p))
    if op == "invert_p":
        return ThetaParams(q, a, b, c, tuple(s.inverse() for s in p))
    if op == "q_shift":
        if shifts is None or len(shifts) != 9 or not all(isinstance(k, int) for k in shifts):
            raise StructureError("q_shift needs nine integer exponents")
        sums = [sum(shifts[i] for i in g) for g in _GROUPS]
        if len(set(sums)) != 1:
            raise StructureError("q_shift exponents need equal sums over the three groups")
        scales = []
        for g in _GROUPS:
            s = PuiseuxSeries.one(P.n)
            for i in g:
                k = shifts[i]
                s = s * _ppow(p[i], k) * _qpow(q, k * (k - 1) // 2)
            scales.append(s)
        newp = tuple(p[i] * _qpow(q, shifts[i]) for i in range(9))
        return ThetaParams(q, a * scales[0], b * scales[1], c * scales[2], newp)
    raise StructureError(f"unknown normalization move {op!r}")


def _move_scalar(n, lam):
    if lam is None:
        raise StructureError("this move needs a multiplier lam")
    lam = lam if isinstance(lam, PuiseuxSeries) else PuiseuxSeries.scalar(n, lam)
    if lam.is_exact_zero or lam.is_zero_to_prec:
        raise StructureError("the multiplier must be invertible")
    return lam


def _ppow(s: PuiseuxSeries, k: int) -> PuiseuxSeries:
    if k >= 0:
        return s ** k
    return _cap_relative(s, DEFAULT_CONFIG.prec).inverse() ** (-k)


# -- retraction order certificates -----------------------------------


@dataclass(frozen=True)
class HoneycombOrderCertificate:
    """Normalized retraction data of a honeycomb parameter vector.

    After relabeling within groups, an optional inversion (eps = -1)
    and a rotation by shift, the reduced values r_i = val(p_i) mod Q
    satisfy the chain

        0 = r9 = r1 < r2 < r3 = r4 < r5 < r6 = r7 < r8 < Q,

    so the nine points sit on the circle R/QZ in six clusters, one per
    hexagon vertex.  perm[k] is the original 0-based index of the
    parameter in normalized slot k; n holds the integer parts of the
    normalized valuations, with n1+n2+n3 = n4+n5+n6+1 = n7+n8+n9+1.
    """

    Q: mpq
    r: tuple
    n: tuple
    eps: int
    shift: mpq
    perm: tuple

    def position(self, v) -> mpq:
        """Image of a valuation v on the normalized circle R/QZ."""
        w = self.eps * mpq(v) + self.shift
        return w - self.Q * math.floor(w / self.Q)

    @property
    def identity_position(self) -> mpq:
        return self.position(0)


def _chain_ok(r, Q):
    # r in normalized slot order 1..9
    return (
        r[8] == r[0] == 0
        and 0 < r[1] < r[2]
        and r[2] == r[3]
        and r[3] < r[4] < r[5]
        and r[5] == r[6]
        and r[6] < r[7] < Q
    )


def honeycomb_certificate(P: ThetaParams) -> HoneycombOrderCertificate:
    """Order the nine retraction values into the honeycomb chain.

    Tries every rotation placing one reduced value at 0, with and
    without the inversion move, and within each group the slots are
    forced by sorting.  Refuses when no choice produces the chain; the
    message names the first violated condition.
    """
    Q = P.q.val()
    vals = [s.val() for s in P.p]

    def reduced(v):
        return v - Q * math.floor(v / Q)

    best = None
    for eps in (1, -1):
        for pivot in range(9):
            shift = reduced(-eps * vals[pivot])
            s = [reduced(eps * v + shift) for v in vals]
            # slots within each group follow the circle: the group-1
            # member paired at 0 comes first, group 3 ends at 0
            g1 = sorted(_GROUPS[0], key=lambda i: s[i])
            g2 = sorted(_GROUPS[1], key=lambda i: s[i])
            g3 = sorted(_GROUPS[2], key=lambda i: s[i])
            if s[g3[0]] != 0:
                continue
            perm = tuple(g1 + g2 + g3[1:] + g3[:1])
            r = tuple(s[i] for i in perm)
            if _chain_ok(r, Q):
                best = (eps, shift, perm, r)
                break
        if best:
            break
    if best is None:
        _refuse_certificate(vals, reduced)
    eps, shift, perm, r = best
    w = [eps * vals[perm[k]] + shift for k in range(9)]
    n = tuple(int(math.floor(w[k] / Q)) for k in range(9))
    assert sum(n[0:3]) == sum(n[3:6]) + 1 == sum(n[6:9]) + 1
    return HoneycombOrderCertificate(Q=Q, r=r, n=n, eps=eps, shift=shift, perm=perm)


def _refuse_certificate(vals, reduced):
    # diagnose in the order the chain conditions bind: multiplicities
    # first, then the pairing signature across groups; inversion only
    # mirrors the circle, so the multiplicity profile needs one look
    counts = Counter(reduced(v) for v in vals)
    mult = sorted(counts.values(), reverse=True)
    if mult != [2, 2, 2, 1, 1, 1]:
        raise StructureError(
            "not a honeycomb parameter vector: the reduced values val(p_i) mod Q "
            f"have multiplicities {mult}, need three pairs and three singles"
        )
    raise StructureError(
        "not a honeycomb parameter vector: the three coincident pairs do not link "
        "the groups cyclically (need one pair in groups 1x2, one in 2x3, one in 3x1)"
    )

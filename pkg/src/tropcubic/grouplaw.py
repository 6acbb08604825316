"""Addition on the hexagon and the fibers of the group-law surface.

The circle R/QZ carries the group structure of the curve after
retraction, up to the choice of identity position.  Adding two curve
points lands on the circle; the set of third points completing them
to a collinear (product-one) triple is a fiber of the group-law
surface, and its shape is governed by the depth calculus: points at
depths d1, d2, d3 on their tentacles bound a product-one lift exactly
when, for every admissible choice of one reference marked point per
tentacle, min(d1, d2, d3, gamma) is attained at least twice, where
gamma measures how close the product of the three references is to a
power of q.  A ray point admits only the marked point whose ray it
sits on; a point on a shared segment, at a node, or at a vertex
admits every marked point of its cluster.
"""

import math
from dataclasses import dataclass

from gmpy2 import mpq

from .errors import PrecisionError, StructureError
from .series import INF
from .tate import ThetaParams
from .troptheta import TropPoint, delta


@dataclass(frozen=True)
class HexPoint:
    """Point of the circle R/QZ carrying the retraction group law."""

    position: mpq
    Q: mpq

    def __post_init__(self):
        object.__setattr__(self, "position", mpq(self.position))
        object.__setattr__(self, "Q", mpq(self.Q))
        if self.Q <= 0:
            raise StructureError("the circle needs Q > 0")
        if not 0 <= self.position < self.Q:
            raise StructureError(
                f"position {self.position} outside [0, {self.Q})"
            )


def _circle(x):
    if isinstance(x, (TropPoint, HexPoint)):
        return mpq(x.position)
    return mpq(x)


def _mod(v, Q):
    return v - Q * math.floor(v / Q)


def hex_add(U, V, O: HexPoint) -> HexPoint:
    """Sum of the retractions of U and V, with identity at O.

    Tentacle points enter through their retraction values only.  The
    translation making O the neutral element turns circle addition
    into alpha + beta - O.
    """
    pos = _mod(_circle(U) + _circle(V) - O.position, O.Q)
    return HexPoint(pos, O.Q)


def hex_negate(W, O: HexPoint) -> HexPoint:
    """Inverse for the circle group law with identity at O."""
    pos = _mod(2 * O.position - _circle(W), O.Q)
    return HexPoint(pos, O.Q)


@dataclass(frozen=True)
class InflectionLocus:
    """Retraction position shared by three inflection points.

    The offset is the counterclockwise distance from the anchor
    vertex (one of v2, v4, v6); it vanishes exactly when the two
    adjacent hexagon edges have equal length, in which case the
    inflections float somewhere on the ray leaving the anchor and
    only their retraction is pinned.
    """

    position: mpq
    anchor: int
    offset: mpq
    multiplicity: int = 3

    @property
    def on_ray(self):
        return self.offset == 0


def inflection_retractions(curve):
    """The three inflection retraction positions of a honeycomb curve.

    Positions are counterclockwise arc lengths from v1.  The group
    near v2 sits at signed offset (l2 - l1)/3, and likewise at v4 and
    v6; the hexagon closing relations make the three positions
    mutually total/3 apart.
    """
    hx = curve.hexagon
    if hx is None:
        raise StructureError("the curve has no hexagon cycle")
    l = hx.lengths
    Q = hx.total
    starts = [mpq(0)]
    for li in l[:5]:
        starts.append(starts[-1] + li)
    loci = []
    for k, anchor in enumerate((2, 4, 6)):
        off = (l[2 * k + 1] - l[2 * k]) / 3
        loci.append(InflectionLocus(_mod(starts[anchor - 1] + off, Q),
                                    anchor, off))
    for a, b in ((0, 1), (1, 2)):
        if _mod(loci[b].position - loci[a].position, Q) != Q / 3:
            raise StructureError("hexagon lengths violate the closing relations")
    return tuple(loci)


@dataclass(frozen=True)
class FiberDescription:
    """Fiber of the group-law surface over a pair of curve points.

    Exactly one of three shapes occurs: a single point; a subray of
    one tentacle ray, all distances >= start; or a tail of a whole
    paired tentacle, namely the segment part from start to the node
    together with both rays.  start is the lift-dependent level, the
    smaller of the two input depths when both inputs are constrained.
    """

    kind: str  # single_point | subray | segment_and_rays
    position: mpq
    point: TropPoint | None = None
    tentacle: int | None = None
    pair: tuple | None = None
    start: mpq | None = None
    node: mpq | None = None

    def contains(self, pt: TropPoint) -> bool:
        if mpq(pt.position) != self.position:
            return False
        if self.kind == "single_point":
            return pt == self.point
        if self.kind == "subray":
            if pt.branch == "hexagon":
                return self.start == 0
            if pt.branch == "segment":
                # only a subray closed at the node reaches segment points
                return (self.node is not None and self.pair is not None
                        and pt.tentacle == min(self.pair)
                        and pt.distance == self.node)
            return (pt.branch == "ray" and pt.tentacle == self.tentacle
                    and pt.distance >= self.start)
        if pt.branch == "hexagon":
            return self.start == 0
        if pt.branch == "segment":
            return (pt.tentacle == min(self.pair)
                    and self.start <= pt.distance <= self.node)
        return pt.tentacle in self.pair and pt.distance > self.node


def _cluster(P, pos):
    Q = P.q.val()
    return [i for i in range(9)
            if ((pos - P.p[i].val()) / Q).denominator == 1]


def _refs(P, X):
    """Admissible reference indices and exact depth of a curve point.

    Returns (None, 0) when the point's residue misses every marked
    point, so its lifts are unconstrained.  A ray point references the
    marked point it sits over; segment, node and vertex points are
    pinned to the same depth relative to every member of their cluster
    and reference all of them.
    """
    cl = _cluster(P, X.position)
    if not cl:
        if X.tentacle is not None:
            raise StructureError(
                "the point claims a tentacle but its position is off "
                "every marked residue"
            )
        return None, mpq(0)
    if X.tentacle is None or X.distance == 0:
        return tuple(cl), mpq(0)
    idx = X.tentacle - 1
    if idx not in cl:
        raise StructureError(
            f"tentacle p{X.tentacle} does not live at position {X.position}"
        )
    if X.branch == "segment":
        return tuple(cl), mpq(X.distance)
    return (idx,), mpq(X.distance)


# Depth results keyed per parameter object; the stored reference keeps
# id(P) from being recycled while its entry is alive.
_GAMMA_MEMO = {}


def _gamma(P, a, b, c):
    """Obstruction depth of the 0-based marked-point triple (a, b, c).

    The valuation of the distance from p_a p_b p_c to the nearest power
    of q; INF when the product is exactly a q-power.  This is the depth
    at which the product of three unit lifts stops being adjustable.
    Returns (depth, True) when decided, and (bound, False) when the
    product matches a q-power through every known term, so the true
    depth is only bounded below by the truncation order.

    Memoized on the unordered triple: fiber assembly revisits the same
    few triples thousands of times and the series product is the whole
    cost.
    """
    bucket = _GAMMA_MEMO.get(id(P))
    if bucket is None or bucket[0] is not P:
        if len(_GAMMA_MEMO) >= 8:
            _GAMMA_MEMO.pop(next(iter(_GAMMA_MEMO)))
        bucket = (P, {})
        _GAMMA_MEMO[id(P)] = bucket
    key = tuple(sorted((a, b, c)))
    got = bucket[1].get(key)
    if got is None:
        got = bucket[1][key] = _gamma_depth(P, *key)
    return got


def _gamma_depth(P, a, b, c):
    x = P.p[a] * P.p[b] * P.p[c]
    e = -mpq(x.val()) / P.q.val()
    if e.denominator != 1:
        raise StructureError(
            f"p{a + 1} p{b + 1} p{c + 1} has valuation {x.val()}, "
            "not a multiple of val(q)"
        )
    d = x * P.q ** int(e) - 1
    if d.is_exact_zero:
        return INF, True
    if d.is_zero_to_prec:
        return mpq(d.trunc), False
    return mpq(d.val()), True


def _branch_set(P, refs_u, du, refs_v, dv, refs_w, lo, hi):
    """Achievable depths on one branch of the target tentacle tree.

    Intersects, over every reference combination, the depth sets
    allowed by the attained-twice rule: a combination whose minimum is
    already attained twice by the fixed entries admits every depth
    from that minimum up, and one attaining it once pins the depth to
    the minimum exactly.  An obstruction depth known only as a lower
    bound is fine as long as the bound clears both input depths; a
    comparison the bound cannot settle is a genuine precision failure.
    Returns (lo, hi) clipped to the branch, with lo == hi for a pinned
    point, or None when the branch is missed.
    """
    rays, pins = [], []
    for ru in refs_u:
        for rv in refs_v:
            for rw in refs_w:
                g, known = _gamma(P, ru, rv, rw)
                if known:
                    mu = min(du, dv, g)
                    twice = (du == mu) + (dv == mu) + (g == mu) >= 2
                elif g > du and g > dv:
                    mu = min(du, dv)
                    twice = du == dv
                else:
                    raise PrecisionError(
                        f"p{ru + 1} p{rv + 1} p{rw + 1} matches a power "
                        "of q through every known term; the governing "
                        "delta is unresolved at this precision"
                    )
                (rays if twice else pins).append(mu)
    if pins:
        d = pins[0]
        if any(p != d for p in pins) or any(d < r for r in rays):
            return None
        return (d, d) if lo <= d <= hi else None
    start = max(max(rays), lo)
    return (start, hi) if start <= hi else None


def fiber(U: TropPoint, V: TropPoint, P: ThetaParams) -> FiberDescription:
    """Possible third points completing U and V to a product-one triple.

    The supporting circle position is forced by the valuations.  Off
    the marked residues the fiber is that single hexagon point; on a
    residue the achievable depths on each branch of the tentacle tree
    are cut out by the attained-twice rule, and the branches always
    reassemble into one of the three fiber shapes.
    """
    q = P.q
    Q = q.val()
    wpos = _mod(-mpq(U.position) - mpq(V.position), Q)
    cl = _cluster(P, wpos)
    if not cl:
        return FiberDescription("single_point", wpos, point=TropPoint(wpos))

    if len(cl) == 2:
        j, k = cl
        L = delta(P.p[j], P.p[k], q)
        if L == 0:
            raise StructureError(
                f"p{j + 1} and p{k + 1} do not merge: the honeycomb "
                "degenerates (zero tentacle segment)"
            )
    else:
        (i,) = cl
        L = None

    refs_u, du = _refs(P, U)
    refs_v, dv = _refs(P, V)
    if refs_u is None or refs_v is None:
        # one input is a free unit, so only the position constrains
        if L is None:
            return FiberDescription("subray", wpos, tentacle=i + 1,
                                    start=mpq(0))
        return FiberDescription("segment_and_rays", wpos,
                                pair=(j + 1, k + 1), start=mpq(0), node=L)

    if L is None:
        A = _branch_set(P, refs_u, du, refs_v, dv, (i,), mpq(0), INF)
        if A is None:
            raise StructureError("empty fiber: the shape trichotomy fails")
        lo, hi = A
        if lo == hi:
            pt = TropPoint(wpos) if lo == 0 else TropPoint(wpos, i + 1, lo, "ray")
            return FiberDescription("single_point", wpos, point=pt)
        return FiberDescription("subray", wpos, tentacle=i + 1, start=lo)

    seg = _branch_set(P, refs_u, du, refs_v, dv, (j, k), mpq(0), L)
    branches = {}
    for c in (j, k):
        A = _branch_set(P, refs_u, du, refs_v, dv, (c,), L, INF)
        if A == (L, L):
            A = None  # the node itself belongs to the segment branch
        branches[c] = A
    rj, rk = branches[j], branches[k]

    if seg is not None and seg[0] == seg[1]:
        d = seg[0]
        if rj is None and rk is None:
            pt = (TropPoint(wpos) if d == 0
                  else TropPoint(wpos, min(j, k) + 1, d, "segment"))
            return FiberDescription("single_point", wpos, point=pt)
        if d == L and rj == (L, INF) and rk == (L, INF):
            return FiberDescription("segment_and_rays", wpos,
                                    pair=(j + 1, k + 1), start=L, node=L)
        if d == L and (rj is None) != (rk is None):
            # the segment collapses to the node and one branch stays
            # open: a closed subray rooted at the node
            c = j if rj is not None else k
            if branches[c] == (L, INF):
                return FiberDescription("subray", wpos, tentacle=c + 1,
                                        start=L, node=L, pair=(j + 1, k + 1))
        raise StructureError("the fiber branches do not glue: trichotomy fails")
    if seg is not None:
        if rj == (L, INF) and rk == (L, INF):
            return FiberDescription("segment_and_rays", wpos,
                                    pair=(j + 1, k + 1), start=seg[0], node=L)
        raise StructureError("the fiber branches do not glue: trichotomy fails")
    if (rj is None) == (rk is None):
        raise StructureError("empty fiber: the shape trichotomy fails"
                             if rj is None else
                             "the fiber branches do not glue: trichotomy fails")
    c = j if rj is not None else k
    lo, hi = branches[c]
    if lo == hi:
        pt = TropPoint(wpos, c + 1, lo, "ray")
        return FiberDescription("single_point", wpos, point=pt)
    return FiberDescription("subray", wpos, tentacle=c + 1, start=lo)

"""Piecewise-linear shadow of the theta parametrization.

The valuation of a theta product depends on its argument x only
through val(x), except when val(x) falls on the critical residue
val(a) + val(q)Z; there the valuation jumps by the depth delta(x, a)
at which x and a merge on the circle K*/q^Z.  This module computes
the piecewise-linear theta values, the delta calculus, the retraction
of curve points onto the hexagon skeleton, and the tropical curve of
a honeycomb parameter vector without ever expanding a product.
"""

import math
from dataclasses import dataclass

from gmpy2 import mpq

from .errors import PrecisionError, StructureError
from .series import INF, PuiseuxSeries
from .tate import ThetaParams, honeycomb_certificate, theta_eval
from .tropical import (
    CENTER_TRIANGLES,
    CORNERS,
    EDGE_DIRS,
    TENTACLE_DIR,
    Hexagon,
    Tentacle,
    TropicalCubicCurve,
    _assemble,
)

_GROUPS = ((0, 1, 2), (3, 4, 5), (6, 7, 8))

# normalized certificate slots clustered at each hexagon vertex label:
# the pairs sit at the odd labels, the singles at the even ones
LABEL_SLOTS = ((0, 8), (1,), (2, 3), (4,), (5, 6), (7,))
SINGLE_SLOTS = ((1, 2), (4, 4), (7, 6))  # (slot, vertex label)
CORNER_SLOTS = {1: (8, 0), 3: (2, 3), 5: (5, 6)}

# direction of the bounded tentacle segment leaving each paired
# vertex, forced by balancing against the two rays at its far end
TRUNK_DIRS = {1: (0, -1), 3: (1, 1), 5: (-1, 0)}


@dataclass(frozen=True)
class TropThetaEnv:
    """Ambient datum of the tropical theta calculus: Q = val(q) > 0."""

    Q: mpq

    def __post_init__(self):
        object.__setattr__(self, "Q", mpq(self.Q))
        if self.Q <= 0:
            raise StructureError("tropical theta needs val(q) > 0")


def trop_theta_eval(env, A, X):
    """Value and slope of the tropical theta function at X.

    For A = val(a) the function is min over integers m of
    (m^2 + m)/2 * Q + m*(X - A), attained on the piece with
    m*Q <= A - X < (m+1)*Q; the attaining m is also the slope in X
    there.  env may be a TropThetaEnv or the rational Q itself.
    """
    Q = (env if isinstance(env, TropThetaEnv) else TropThetaEnv(env)).Q
    A, X = mpq(A), mpq(X)
    m = math.floor((A - X) / Q)
    return mpq(m * m + m) * Q / 2 + m * (X - A), m


def delta(x, y, q):
    """Depth at which x and y merge on the circle K*/q^Z.

    delta(x, y) = val(1 - (x/y) q^i), with i the unique integer moving
    val(x) to val(y); computed as val(y - x q^i) - val(y) so that y is
    never inverted.  Symmetric and nonnegative; INF when x/y is
    exactly a power of q.
    """
    n = q.n
    x = x if isinstance(x, PuiseuxSeries) else PuiseuxSeries.scalar(n, x)
    y = y if isinstance(y, PuiseuxSeries) else PuiseuxSeries.scalar(n, y)
    Q = q.val()
    e = (y.val() - x.val()) / Q
    if e.denominator != 1:
        raise StructureError(
            "delta needs val(x) = val(y) modulo val(q); got "
            f"{x.val()} and {y.val()} with val(q) = {Q}"
        )
    d = y - x * q ** int(e)
    if d.is_exact_zero:
        return INF
    if d.is_zero_to_prec:
        raise PrecisionError(
            f"the arguments agree to O(t^({d.trunc})): insufficient "
            "precision to resolve delta"
        )
    return d.val() - y.val()


def theta_gap_check(a, x, q, prec=None):
    """val(Theta_a(x)) minus its piecewise-linear prediction.

    The prediction is trop(Theta_a)(val x), plus the gap delta(x, a)
    when val(x) falls on the critical residue of a.  Zero whenever
    the evaluated product has the predicted valuation.
    """
    n = q.n
    a = a if isinstance(a, PuiseuxSeries) else PuiseuxSeries.scalar(n, a)
    x = x if isinstance(x, PuiseuxSeries) else PuiseuxSeries.scalar(n, x)
    Q = q.val()
    th = theta_eval(x, a, q, prec=prec)
    tv, _ = trop_theta_eval(Q, a.val(), x.val())
    gap = mpq(0)
    if ((a.val() - x.val()) / Q).denominator == 1:
        gap = delta(x, a, q)
    return th.val() - tv - gap


@dataclass(frozen=True)
class TropPoint:
    """Image of a curve point on the circle-with-trees skeleton.

    position is the circle coordinate val(x) mod Q.  Points off the
    hexagon carry the 1-based index of the marked point whose
    tentacle they sit on, the distance from the hexagon along it, and
    whether that lands on the bounded segment or the ray.
    """

    position: mpq
    tentacle: int | None = None
    distance: mpq = mpq(0)
    branch: str = "hexagon"  # hexagon | segment | ray


def retract(x, P: ThetaParams) -> TropPoint:
    """Retraction of a curve point onto the hexagon skeleton.

    A point with generic valuation lands on the circle at val(x)
    mod Q.  When val(x) meets the residue of a marked point the image
    moves onto that tentacle at depth delta(x, p_i); for the paired
    tentacles the larger of the two depths picks the branch, and the
    attained-twice rule pins the smaller one to the segment length.
    """
    q = P.q
    x = x if isinstance(x, PuiseuxSeries) else PuiseuxSeries.scalar(P.n, x)
    Q = q.val()
    X = x.val()
    pos = X - Q * math.floor(X / Q)
    hits = [i for i in range(9)
            if ((X - P.p[i].val()) / Q).denominator == 1]
    if not hits:
        return TropPoint(pos)
    depth = {}
    for i in hits:
        depth[i] = delta(x, P.p[i], q)
        if depth[i] == INF:
            raise StructureError(
                f"x is p{i + 1} up to a power of q: the retraction "
                "runs off the end of the tentacle"
            )
    if len(hits) == 1:
        i = hits[0]
        if depth[i] == 0:
            return TropPoint(pos)
        return TropPoint(pos, i + 1, depth[i], "ray")
    if len(hits) != 2:
        raise StructureError(
            "the marked-point residues do not pair up; not a honeycomb vector"
        )
    i, j = hits
    di, dj = depth[i], depth[j]
    L = delta(P.p[i], P.p[j], q)
    if di == dj:
        if di > L:
            raise StructureError("delta triple violates the attained-twice rule")
        if di == 0:
            return TropPoint(pos)
        return TropPoint(pos, min(i, j) + 1, di, "segment")
    if di < dj:
        i, di, dj = j, dj, di
    if dj != L:
        raise StructureError("delta triple violates the attained-twice rule")
    return TropPoint(pos, i + 1, di, "ray")


def trop_parametrize(P: ThetaParams) -> TropicalCubicCurve:
    """Tropical curve of a honeycomb vector, built without the cubic.

    The circle R/QZ maps to the plane by the differences of the three
    groupwise tropical theta sums; the six residue clusters of the
    certificate land on the hexagon vertices, and each paired cluster
    sprouts a bounded segment of length delta(p_i, p_j) before
    splitting into its two rays.  The result agrees with the dual
    subdivision of the implicit cubic, record for record.
    """
    cert = honeycomb_certificate(P)
    Q = cert.Q
    A = [s.val() for s in P.p]
    heads = (P.a.val(), P.b.val(), P.c.val())

    def group_sum(g, X):
        tot = heads[g]
        for i in _GROUPS[g]:
            tot += trop_theta_eval(Q, A[i], X)[0]
        return tot

    def embed(X):
        f, g, h = (group_sum(k, X) for k in range(3))
        return (f - h, g - h)

    hexv = []
    for slots in LABEL_SLOTS:
        pts = {embed(A[cert.perm[s]]) for s in slots}
        if len(pts) != 1:
            raise StructureError("a paired residue cluster embeds to two points")
        hexv.append(pts.pop())
    hexv = tuple(hexv)

    # the arc between consecutive clusters maps isometrically onto
    # the hexagon edge between their dual vertices
    arcs = (mpq(0), cert.r[1], cert.r[2], cert.r[4], cert.r[5], cert.r[7], Q)
    lengths = []
    for i in range(6):
        l = arcs[i + 1] - arcs[i]
        va, vb = hexv[i], hexv[(i + 1) % 6]
        e = EDGE_DIRS[i]
        if (vb[0] - va[0], vb[1] - va[1]) != (l * e[0], l * e[1]):
            raise StructureError("the circle does not embed isometrically")
        lengths.append(l)

    duals = {CENTER_TRIANGLES[k]: hexv[k] for k in range(6)}
    records = {}
    for _corner, tri, attach, _pair in CORNERS:
        sa, sb = CORNER_SLOTS[attach]
        ia, ib = cert.perm[sa], cert.perm[sb]
        L = delta(P.p[ia], P.p[ib], P.q)
        if L == 0:
            raise StructureError(
                f"p{ia + 1} and p{ib + 1} retract to one vertex but do not "
                "merge: the honeycomb degenerates (zero tentacle segment)"
            )
        v = hexv[attach - 1]
        td = TRUNK_DIRS[attach]
        node = (v[0] + L * td[0], v[1] + L * td[1])
        duals[tri] = node
        for idx in (ia, ib):
            records[idx + 1] = Tentacle(
                idx + 1, attach, L, TENTACLE_DIR[idx + 1], node
            )
    for slot, attach in SINGLE_SLOTS:
        idx = cert.perm[slot]
        records[idx + 1] = Tentacle(
            idx + 1, attach, mpq(0), TENTACLE_DIR[idx + 1], None
        )

    vertices, edges, rays = _assemble(duals)
    return TropicalCubicCurve(
        vertices, edges, rays, Hexagon(hexv, tuple(lengths)),
        tuple(records[i] for i in range(1, 10)),
        tuple(sorted(duals, key=sorted)),
    )


def trop_point_coords(curve: TropicalCubicCurve, cert, pt: TropPoint):
    """Plane coordinates of a retraction image on the embedded curve."""
    if curve.hexagon is None or curve.tentacles is None:
        raise StructureError("the curve has no labeled hexagon to embed into")
    if pt.tentacle is not None:
        rec = curve.tentacles[pt.tentacle - 1]
        v = curve.hexagon.vertices[rec.attach - 1]
        trunk = min(pt.distance, rec.segment_length)
        ray = pt.distance - trunk
        td = TRUNK_DIRS.get(rec.attach, (0, 0))
        return (v[0] + trunk * td[0] + ray * rec.direction[0],
                v[1] + trunk * td[1] + ray * rec.direction[1])
    s = cert.position(pt.position)
    arcs = (mpq(0), cert.r[1], cert.r[2], cert.r[4], cert.r[5], cert.r[7],
            cert.Q)
    for k in range(6):
        if arcs[k] <= s <= arcs[k + 1]:
            e = EDGE_DIRS[k]
            v = curve.hexagon.vertices[k]
            d = s - arcs[k]
            return (v[0] + d * e[0], v[1] + d * e[1])
    raise StructureError("position outside the circle parametrization")

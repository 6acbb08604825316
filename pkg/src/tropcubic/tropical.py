"""Tropicalization of plane cubics and honeycomb recognition.

Everything here is min-plus: the tropical polynomial of f is
min over monomials of val(c) + i*X + j*Y in the chart z = 1, and the
curve is the locus where the minimum is attained at least twice.  The
curve is dual to the regular subdivision of the support induced by the
coefficient valuations; all computations below are exact over mpq.
"""

from dataclasses import dataclass
from itertools import combinations
from math import gcd, lcm

from gmpy2 import mpq

from .cubics import Cubic
from .errors import PrecisionError, StructureError
from .series import INF

# support points of a dense cubic in the chart z = 1
TRIANGLE3 = tuple(
    (i, j) for i in range(4) for j in range(4) if i + j <= 3
)

# the standard triangulation: six triangles around the center point and
# one per corner.  The center triangles are listed in hexagon-label
# order: the dual of CENTER_TRIANGLES[k] is hexagon vertex v_{k+1}.
CENTER_TRIANGLES = (
    frozenset({(1, 1), (1, 2), (0, 2)}),
    frozenset({(1, 1), (0, 2), (0, 1)}),
    frozenset({(1, 1), (0, 1), (1, 0)}),
    frozenset({(1, 1), (1, 0), (2, 0)}),
    frozenset({(1, 1), (2, 0), (2, 1)}),
    frozenset({(1, 1), (2, 1), (1, 2)}),
)

# hexagon edge directions e_i from v_i to v_{i+1}, forced by duality
EDGE_DIRS = ((1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1), (1, 0))

# corner data: (corner point, corner triangle, attaching hexagon label,
# tentacle index pair).  The pair is ordered so that the first index
# belongs to the ray group listed first in TENTACLE_DIR.
CORNERS = (
    ((0, 3), frozenset({(0, 3), (0, 2), (1, 2)}), 1, (9, 1)),
    ((0, 0), frozenset({(0, 0), (1, 0), (0, 1)}), 3, (3, 4)),
    ((3, 0), frozenset({(3, 0), (2, 0), (2, 1)}), 5, (6, 7)),
)

# single-ray tentacles sit on the even hexagon vertices
SINGLES = ((2, 2), (5, 4), (8, 6))

# tentacle index -> primitive ray direction.  Indices 1-3 are the
# zeros of the first coordinate, whose rays escape with X -> +inf.
TENTACLE_DIR = {}
for _i in (1, 2, 3):
    TENTACLE_DIR[_i] = (1, 0)
for _i in (4, 5, 6):
    TENTACLE_DIR[_i] = (0, 1)
for _i in (7, 8, 9):
    TENTACLE_DIR[_i] = (-1, -1)

# the nine honeycomb ratios, num/den as exponent-triple pairs; the six
# hexagon entries are listed in edge order e1..e6 so that the valuation
# of entry i is the lattice length of e_{i+1}; the three tentacle
# entries are in attachment order v1, v3, v5.
HEX_RATIOS = (
    (((0, 1, 2), (1, 2, 0)), ((1, 1, 1), (0, 2, 1))),
    (((0, 2, 1), (1, 0, 2)), ((1, 1, 1), (0, 1, 2))),
    (((2, 0, 1), (0, 1, 2)), ((1, 1, 1), (1, 0, 2))),
    (((1, 0, 2), (2, 1, 0)), ((1, 1, 1), (2, 0, 1))),
    (((1, 2, 0), (2, 0, 1)), ((1, 1, 1), (2, 1, 0))),
    (((2, 1, 0), (0, 2, 1)), ((1, 1, 1), (1, 2, 0))),
)
TENTACLE_RATIOS = (
    (((1, 1, 1), (0, 3, 0)), ((0, 2, 1), (1, 2, 0))),
    (((1, 1, 1), (0, 0, 3)), ((0, 1, 2), (1, 0, 2))),
    (((1, 1, 1), (3, 0, 0)), ((2, 0, 1), (2, 1, 0))),
)


@dataclass(frozen=True)
class HoneycombClass:
    """Outcome of the nine-ratio test."""

    kind: str  # not_honeycomb | honeycomb | symmetric_honeycomb
    hexagon_vals: tuple | None  # six valuations, edge order e1..e6
    tentacle_vals: tuple | None  # three valuations, order v1, v3, v5
    reason: str | None = None


@dataclass(frozen=True)
class BoundedEdge:
    ends: tuple  # two rational points
    direction: tuple  # primitive integer vector, ends[0] -> ends[1]
    length: mpq  # lattice length
    multiplicity: int


@dataclass(frozen=True)
class TropicalRay:
    base: tuple
    direction: tuple
    multiplicity: int


@dataclass(frozen=True)
class Tentacle:
    index: int  # 1..9
    attach: int  # hexagon vertex label 1..6
    segment_length: object  # mpq, or INF when the node escaped
    direction: tuple
    node: tuple | None


@dataclass(frozen=True)
class Hexagon:
    vertices: tuple  # v1..v6
    lengths: tuple  # l1..l6

    @property
    def total(self):
        return sum(self.lengths)

    def arc_positions(self):
        """Arc-length position of each v_i, measuring from v1."""
        out = [mpq(0)]
        for l in self.lengths[:5]:
            out.append(out[-1] + l)
        return tuple(out)


@dataclass(frozen=True)
class TropicalCubicCurve:
    vertices: tuple
    bounded_edges: tuple
    rays: tuple
    hexagon: Hexagon | None
    tentacles: tuple | None
    cells: tuple  # frozensets of support points, the dual subdivision


def _coeff_val(f, e):
    c = f.coeff(e)
    if c.is_exact_zero:
        return INF
    if c.is_zero_to_prec:
        raise PrecisionError(
            f"coefficient c{e[0]}{e[1]}{e[2]} is zero to O(t^{c.trunc});"
            " its valuation is undecided"
        )
    return c.val()


def honeycomb_ratios(f: Cubic) -> HoneycombClass:
    """Classify f by the nine coefficient ratios.

    All six hexagon-ratio valuations and all three tentacle-ratio
    valuations must be positive; the hexagon ones are also the lattice
    lengths of the hexagon edges and must be finite.  A corner
    coefficient may be exactly zero, pushing the corresponding
    tentacle valuation to infinity (the bounded segment escapes).
    """
    vals = {}
    for e in f.coeffs:
        try:
            vals[e] = _coeff_val(f, e)
        except PrecisionError as exc:
            return HoneycombClass("not_honeycomb", None, None, str(exc))
    hexv = []
    for (n1, n2), (d1, d2) in HEX_RATIOS:
        if INF in (vals[n1], vals[n2], vals[d1], vals[d2]):
            which = next(e for e in (d1, d2, n1, n2) if vals[e] == INF)
            return HoneycombClass(
                "not_honeycomb", None, None,
                f"coefficient c{which[0]}{which[1]}{which[2]} vanishes",
            )
        hexv.append(vals[n1] + vals[n2] - vals[d1] - vals[d2])
    tentv = []
    for (n1, n2), (d1, d2) in TENTACLE_RATIOS:
        if vals[n2] == INF:
            tentv.append(INF)
        else:
            tentv.append(vals[n1] + vals[n2] - vals[d1] - vals[d2])
    hexv, tentv = tuple(hexv), tuple(tentv)
    bad = [v for v in hexv + tentv if v != INF and v <= 0]
    if bad:
        return HoneycombClass(
            "not_honeycomb", hexv, tentv,
            f"a ratio has nonpositive valuation {bad[0]}",
        )
    sym = len(set(hexv)) == 1 and len(set(tentv)) == 1
    return HoneycombClass(
        "symmetric_honeycomb" if sym else "honeycomb", hexv, tentv
    )


# -- regular subdivision ---------------------------------------------


def _orient(p, q, r):
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _hull_ccw(points):
    """Convex hull vertices in counterclockwise order (monotone chain)."""
    pts = sorted(points)
    if len(pts) <= 2:
        return pts
    lower = []
    for p in pts:
        while len(lower) >= 2 and _orient(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and _orient(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _primitive(v):
    x, y = mpq(v[0]), mpq(v[1])
    den = lcm(int(x.denominator), int(y.denominator))
    a, b = int(x * den), int(y * den)
    g = gcd(abs(a), abs(b))
    return (a // g, b // g)


def _on_segment(p, a, b):
    return _orient(a, b, p) == 0 and min(a[0], b[0]) <= p[0] <= max(
        a[0], b[0]
    ) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def _regular_subdivision(heights):
    """Lower-hull cells of the lifted support.

    heights: dict point -> mpq.  Returns a list of (cell, dual) where
    cell is the frozenset of support points on a lower face and dual is
    the vertex of the tropical curve dual to that face.
    """
    pts = list(heights)
    if len(pts) < 3 or all(
        _orient(pts[0], pts[1], p) == 0 for p in pts[2:]
    ):
        raise StructureError("support does not span the plane")
    lifted = {p: (mpq(p[0]), mpq(p[1]), heights[p]) for p in pts}
    cells = {}
    for a, b, c in combinations(pts, 3):
        if _orient(a, b, c) == 0:
            continue
        la, lb, lc = lifted[a], lifted[b], lifted[c]
        u = tuple(lb[k] - la[k] for k in range(3))
        w = tuple(lc[k] - la[k] for k in range(3))
        n = (
            u[1] * w[2] - u[2] * w[1],
            u[2] * w[0] - u[0] * w[2],
            u[0] * w[1] - u[1] * w[0],
        )
        if n[2] < 0:
            n = (-n[0], -n[1], -n[2])
        c0 = n[0] * la[0] + n[1] * la[1] + n[2] * la[2]
        cell = set()
        lower = True
        for p in pts:
            lp = lifted[p]
            d = n[0] * lp[0] + n[1] * lp[1] + n[2] * lp[2] - c0
            if d < 0:
                lower = False
                break
            if d == 0:
                cell.add(p)
        if not lower:
            continue
        cells[frozenset(cell)] = (n[0] / n[2], n[1] / n[2])
    return list(cells.items())


def _lattice_length(a, b):
    return gcd(int(abs(a[0] - b[0])), int(abs(a[1] - b[1])))


def _face_extremes(face):
    pts = sorted(face)
    return pts[0], pts[-1]


def _assemble(duals):
    """Vertices, edges and rays of the curve dual to a cell family.

    duals maps each cell (frozenset of support points) to its dual
    vertex.  A side shared by two cells gives a bounded edge between
    the dual vertices; a side on the boundary of the union gives a
    ray opposite the outward normal.  Records are emitted in sorted
    side order, so two constructions of the same subdivision produce
    identical tuples.
    """
    # faces: point sets of the polygon sides of every cell, with the
    # counterclockwise orientation seen by the owning cell
    side_sets = {}  # frozenset of side points -> list of (cell, a, b)
    for cell in duals:
        hull = _hull_ccw(sorted(cell))
        k = len(hull)
        for i in range(k):
            a, b = hull[i], hull[(i + 1) % k]
            side = frozenset(p for p in cell if _on_segment(p, a, b))
            side_sets.setdefault(side, []).append((cell, a, b))

    edges = []
    rays = []
    for side, owners in sorted(
        side_sets.items(), key=lambda kv: sorted(kv[0])
    ):
        pa, pb = _face_extremes(side)
        mult = _lattice_length(pa, pb)
        if len(owners) == 2:
            va, vb = duals[owners[0][0]], duals[owners[1][0]]
            if (va, vb) > (vb, va):
                va, vb = vb, va
            dv = (vb[0] - va[0], vb[1] - va[1])
            prim = _primitive(dv)
            length = dv[0] / prim[0] if prim[0] else dv[1] / prim[1]
            edges.append(BoundedEdge((va, vb), prim, length, mult))
        elif len(owners) == 1:
            # side on the boundary of the support hull: dual ray in
            # the direction opposite the outward normal
            cell, a, b = owners[0]
            d = (b[0] - a[0], b[1] - a[1])
            direction = _primitive((-d[1], d[0]))
            rays.append(TropicalRay(duals[cell], direction, mult))
        else:
            raise StructureError("a subdivision face has three owners")

    vertices = sorted(duals.values())
    _check_balancing(vertices, edges, rays)
    return tuple(vertices), tuple(edges), tuple(rays)


def tropicalize_cubic(f: Cubic) -> TropicalCubicCurve:
    """The plane tropical curve of f, dual to the regular subdivision
    of its support by coefficient valuations.

    When the subdivision contains the six center triangles of the
    standard triangulation, the hexagon is populated with the labeled
    vertices and edge lengths; tentacle records follow when every
    corner region is either standard or empty.  A coefficient that is
    zero to precision leaves the subdivision ambiguous and raises.
    """
    heights = {}
    for e, c in f.coeffs.items():
        v = _coeff_val(f, e)
        if v != INF:
            heights[(e[0], e[1])] = v
    cellinfo = _regular_subdivision(heights)
    duals = {cell: dual for cell, dual in cellinfo}
    vertices, edges, rays = _assemble(duals)

    hexagon = None
    tentacles = None
    if all(tri in duals for tri in CENTER_TRIANGLES):
        hexv = tuple(duals[tri] for tri in CENTER_TRIANGLES)
        lengths = []
        for i in range(6):
            va, vb = hexv[i], hexv[(i + 1) % 6]
            d = (vb[0] - va[0], vb[1] - va[1])
            prim = _primitive(d)
            if prim != EDGE_DIRS[i]:
                raise StructureError("hexagon edge direction mismatch")
            lengths.append(d[0] / prim[0] if prim[0] else d[1] / prim[1])
        hexagon = Hexagon(hexv, tuple(lengths))
        tentacles = _tentacle_records(heights, duals, hexv)

    return TropicalCubicCurve(
        vertices, edges, rays, hexagon,
        tentacles, tuple(sorted(duals, key=sorted)),
    )


def _tentacle_records(heights, duals, hexv):
    records = {}
    for corner, tri, attach, (ia, ib) in CORNERS:
        v = hexv[attach - 1]
        if corner not in heights:
            da, db = TENTACLE_DIR[ia], TENTACLE_DIR[ib]
            merged = _primitive((da[0] + db[0], da[1] + db[1]))
            records[ia] = Tentacle(ia, attach, INF, merged, None)
            records[ib] = Tentacle(ib, attach, INF, merged, None)
            continue
        if tri not in duals:
            return None  # corner region not standard
        node = duals[tri]
        d = (node[0] - v[0], node[1] - v[1])
        prim = _primitive(d)
        seg = d[0] / prim[0] if prim[0] else d[1] / prim[1]
        for idx in (ia, ib):
            records[idx] = Tentacle(idx, attach, seg, TENTACLE_DIR[idx], node)
    for idx, attach in SINGLES:
        records[idx] = Tentacle(
            idx, attach, mpq(0), TENTACLE_DIR[idx], None
        )
    return tuple(records[i] for i in range(1, 10))


def _check_balancing(vertices, edges, rays):
    for v in vertices:
        sx = sy = 0
        for e in edges:
            if e.ends[0] == v:
                sx += e.multiplicity * e.direction[0]
                sy += e.multiplicity * e.direction[1]
            elif e.ends[1] == v:
                sx -= e.multiplicity * e.direction[0]
                sy -= e.multiplicity * e.direction[1]
        for r in rays:
            if r.base == v:
                sx += r.multiplicity * r.direction[0]
                sy += r.multiplicity * r.direction[1]
        if sx or sy:
            raise StructureError(f"balancing fails at vertex {v}")

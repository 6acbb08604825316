"""Cell complex of the tropical group law surface.

The surface TGL = {(U, V, W) : W lies in the fiber over (U, V)} sits
over the product of two copies of the circle-with-trees skeleton X.
Over a generic point of X x X the fiber is a single point, so the
surface is a graph there; along special loci the fiber grows into a
subray or a segment with rays, and the surface picks up walls.

The complex is assembled product cell by product cell.  Each ordered
pair of X-cells spans an exact parameter box, the box is cut along
the loci where the fiber can change shape (positions where the
forced third position meets a residue cluster, depth ties between
the two inputs, and the finite obstruction levels of the marked
point triples), adjacent pieces whose fiber descriptions agree are
merged back to maximal convex strata, and every stratum finally
carries one cell per piece of its fiber: the point pieces, the open
segment, and the open rays.

Cells are classified by dimension and boundedness.  A stratum with
a point fiber contributes a cell of its own shape; a segment piece
over a stratum adds one bounded dimension, a ray piece one
unbounded dimension.  Bounded two-cells with three corners are
triangles and all others are squares (the symmetric example only
produces quadrilaterals); unbounded ones are flaps or quadrants by
the rank of their recession cone.  A segment piece whose moving
lower end meets the node at one end of its stratum loses a corner
there, so walls over depth ties come out as triangles.  Every cell
is a relatively open convex polyhedron and the cells partition the
surface, so the census is an invariant of the parameters, not of
the cutting order.
"""

import itertools
from dataclasses import dataclass, field

from gmpy2 import mpq

from .errors import StructureError
from .series import INF, PuiseuxSeries
from .tate import ThetaParams, honeycomb_certificate
from .troptheta import TropPoint, delta
from .grouplaw import FiberDescription, _cluster, _gamma, _mod, fiber

CLASSES = ("vertex", "bounded_edge", "ray", "square", "triangle",
           "flap", "quadrant")

# fiber piece attached over a stratum: one dimension up, bounded or not
_SEG_CLASS = {"vertex": "bounded_edge", "bounded_edge": "square",
              "ray": "flap"}
_RAY_CLASS = {"vertex": "ray", "bounded_edge": "flap", "ray": "quadrant"}


# ---------------------------------------------------------------------------
# exact convex regions in at most two coordinates

def _generic(lo, hi, wa=41, wb=89):
    """A deterministic interior point with an unstructured denominator."""
    if hi is None:
        return (mpq(23, 7) if lo is None else lo + mpq(23, 7))
    if lo is None:
        return hi - mpq(23, 7)
    return lo + (hi - lo) * mpq(wa, wb)


class _Region:
    """Convex subset of the plane cut out by a*u + b*v REL c.

    rel is -1 for strictly below, 0 for equality, +1 for strictly
    above.  Every slope that occurs is 0, infinite or +-1, so
    closure vertices and recession directions stay inside a small
    exact catalogue.
    """

    def __init__(self, cons):
        seen, out = set(), []
        for con in cons:
            if con not in seen:
                seen.add(con)
                out.append(con)
        self.cons = out
        self._dr = False

    def ok(self, u, v, weak=False):
        for a, b, rel, c in self.cons:
            s = a * u + b * v
            if rel == 0 and s != c:
                return False
            if rel < 0 and (s > c or (not weak and s == c)):
                return False
            if rel > 0 and (s < c or (not weak and s == c)):
                return False
        return True

    def dim_rep(self):
        """(dimension, generic interior point), or None when empty."""
        if self._dr is not False:
            return self._dr
        self._dr = self._dim_rep()
        return self._dr

    def _dim_rep(self):
        eqs = [(a, b, c) for a, b, rel, c in self.cons if rel == 0]
        for (a0, b0, c0), (a1, b1, c1) in itertools.combinations(eqs, 2):
            det = a0 * b1 - a1 * b0
            if det == 0:
                continue
            u = (c0 * b1 - c1 * b0) / det
            v = (a0 * c1 - a1 * c0) / det
            return (0, (u, v)) if self.ok(u, v) else None
        if eqs:
            a0, b0, c0 = eqs[0]
            p0 = (mpq(0), c0 / b0) if b0 != 0 else (c0 / a0, mpq(0))
            d = (b0, -a0)
            tlo = thi = None
            for a, b, rel, c in self.cons:
                s0 = a * p0[0] + b * p0[1]
                k = a * d[0] + b * d[1]
                if rel == 0:
                    if k == 0 and s0 != c:
                        return None
                    continue
                if k == 0:
                    if (rel < 0 and s0 >= c) or (rel > 0 and s0 <= c):
                        return None
                    continue
                bound = (c - s0) / k
                if (k > 0) == (rel < 0):
                    thi = bound if thi is None else min(thi, bound)
                else:
                    tlo = bound if tlo is None else max(tlo, bound)
            if tlo is not None and thi is not None and tlo >= thi:
                return None
            t = _generic(tlo, thi)
            u, v = p0[0] + t * d[0], p0[1] + t * d[1]
            return (1, (u, v)) if self.ok(u, v) else None
        # full-dimensional candidate: scan between the v-breaks
        vs = set()
        lines = [(a, b, c) for a, b, rel, c in self.cons]
        for (a0, b0, c0), (a1, b1, c1) in itertools.combinations(lines, 2):
            det = a0 * b1 - a1 * b0
            if det != 0:
                vs.add((a0 * c1 - a1 * c0) / det)
        for a, b, c in lines:
            if a == 0 and b != 0:
                vs.add(c / b)
        vs = sorted(vs)
        bands = [(None, vs[0])] if vs else [(None, None)]
        bands += [(vs[i], vs[i + 1]) for i in range(len(vs) - 1)]
        if vs:
            bands.append((vs[-1], None))
        for blo, bhi in bands:
            vstar = _generic(blo, bhi, 37, 83)
            ulo = uhi = None
            feasible = True
            for a, b, rel, c in self.cons:
                if a == 0:
                    s = b * vstar
                    if (rel < 0 and s >= c) or (rel > 0 and s <= c):
                        feasible = False
                        break
                    continue
                bound = (c - b * vstar) / a
                if (a > 0) == (rel < 0):
                    uhi = bound if uhi is None else min(uhi, bound)
                else:
                    ulo = bound if ulo is None else max(ulo, bound)
            if not feasible or (ulo is not None and uhi is not None
                                and ulo >= uhi):
                continue
            u = _generic(ulo, uhi)
            if self.ok(u, vstar):
                return (2, (u, vstar))
        return None

    def closure_vertices(self):
        pts = set()
        lines = [(a, b, c) for a, b, rel, c in self.cons]
        for (a0, b0, c0), (a1, b1, c1) in itertools.combinations(lines, 2):
            det = a0 * b1 - a1 * b0
            if det == 0:
                continue
            u = (c0 * b1 - c1 * b0) / det
            v = (a0 * c1 - a1 * c0) / det
            if self.ok(u, v, weak=True):
                pts.add((u, v))
        return pts

    def recession_dirs(self):
        out = []
        for d in ((1, 0), (0, 1), (1, 1), (1, -1),
                  (-1, 0), (0, -1), (-1, -1), (-1, 1)):
            good = True
            for a, b, rel, c in self.cons:
                s = a * d[0] + b * d[1]
                if (rel == 0 and s != 0) or (rel < 0 and s > 0) \
                        or (rel > 0 and s < 0):
                    good = False
                    break
            if good:
                out.append(d)
        return out

    def shape_class(self, dim):
        rec = self.recession_dirs()
        if dim == 0:
            return "vertex"
        if dim == 1:
            return "bounded_edge" if not rec else "ray"
        if not rec:
            return "triangle" if len(self.closure_vertices()) == 3 \
                else "square"
        rank = 2 if any(d0[0] * d1[1] - d1[0] * d0[1] != 0
                        for d0, d1 in itertools.combinations(rec, 2)) else 1
        return "flap" if rank == 1 else "quadrant"

    def facets(self):
        """Tightenings of one strict constraint that drop the dimension."""
        dim = self.dim_rep()[0]
        out = []
        seen = set()
        for i, (a, b, rel, c) in enumerate(self.cons):
            if rel == 0 or (a, b, c) in seen:
                continue
            cons2 = list(self.cons)
            cons2[i] = (a, b, 0, c)
            r = _Region(cons2)
            dr = r.dim_rep()
            if dr is not None and dr[0] == dim - 1:
                seen.add((a, b, c))
                out.append((i, dr[1]))
        return out


# ---------------------------------------------------------------------------
# the skeleton X as a cell catalogue

@dataclass(frozen=True)
class _XCell:
    """One cell of the circle-with-trees skeleton.

    kind is vertex | node | arc | seg | ray.  members are the
    0-based marked points clustered at the anchor position; arcs
    have none.  rng is the open coordinate range (None for points,
    upper end None on rays), L the pair trunk length where the
    cluster has one.
    """

    kind: str
    members: tuple
    position: object
    rng: tuple = None
    member: int = None
    L: object = None

    @property
    def dim(self):
        return 0 if self.rng is None else 1

    @property
    def stratum_class(self):
        if self.rng is None:
            return "vertex"
        return "ray" if self.rng[1] is None else "bounded_edge"

    def label(self):
        if self.kind == "vertex":
            return "SV" if len(self.members) == 1 else "PV"
        if self.kind == "node":
            return "ND"
        if self.kind == "arc":
            return "AR"
        if self.kind == "seg":
            return "SG"
        return "SR" if self.L is None else "PR"

    def point(self, Q, coord):
        if self.kind == "vertex":
            return TropPoint(self.position)
        if self.kind == "node":
            return TropPoint(self.position, min(self.members) + 1,
                             self.L, "segment")
        if self.kind == "arc":
            return TropPoint(_mod(self.position + coord, Q))
        if self.kind == "seg":
            return TropPoint(self.position, min(self.members) + 1,
                             coord, "segment")
        return TropPoint(self.position, self.member + 1, coord, "ray")

    def refs(self):
        """Marked points a depth on this cell is measured against."""
        if self.kind == "arc":
            return None
        if self.kind == "ray":
            return (self.member,)
        return self.members

    def depth(self, coord):
        if self.kind in ("vertex", "arc"):
            return mpq(0)
        if self.kind == "node":
            return self.L
        return coord


def _skeleton(P):
    """X-cell catalogue of a certified honeycomb vector."""
    honeycomb_certificate(P)
    Q = P.q.val()
    clusters = {}
    for i in range(9):
        clusters.setdefault(_mod(P.p[i].val(), Q), []).append(i)
    cells = []
    for pos in sorted(clusters):
        mem = tuple(clusters[pos])
        if len(mem) == 1:
            cells.append(_XCell("vertex", mem, pos))
            cells.append(_XCell("ray", mem, pos, (mpq(0), None), mem[0]))
        else:
            L = delta(P.p[mem[0]], P.p[mem[1]], P.q)
            cells.append(_XCell("vertex", mem, pos))
            cells.append(_XCell("node", mem, pos, None, None, L))
            cells.append(_XCell("seg", mem, pos, (mpq(0), L), None, L))
            for m in mem:
                cells.append(_XCell("ray", mem, pos, (L, None), m, L))
    anchors = sorted(clusters)
    for k in range(6):
        a = anchors[k]
        b = anchors[(k + 1) % 6] + (Q if k == 5 else mpq(0))
        cells.append(_XCell("arc", (), a, (mpq(0), b - a)))
    return tuple(cells)


# ---------------------------------------------------------------------------
# stratification of one product cell

def _cut_lines(P, cu, cv):
    """Loci in the (u, v) box where the fiber can change shape."""
    Q = P.q.val()
    mu, mv = cu.kind == "arc", cv.kind == "arc"
    if mu or mv:
        # the forced third position moves; it crosses each residue
        # cluster along a diagonal (or a coordinate line when only
        # one input walks an arc) and the fiber is free elsewhere
        a = 1 if mu else 0
        b = 1 if mv else 0
        span = (cu.rng[1] if mu else mpq(0)) + (cv.rng[1] if mv else mpq(0))
        base = -(cu.position + cv.position)
        lines = set()
        for i in range(9):
            s = _mod(base - P.p[i].val(), Q)
            while s < span:
                if s > 0:
                    lines.add((a, b, s))
                s += Q
        return sorted(lines)
    wpos = _mod(-(cu.position + cv.position), Q)
    cl = _cluster(P, wpos)
    if not cl:
        return []
    levels = set()
    for ra in cu.refs():
        for rb in cv.refs():
            for rc in cl:
                g, known = _gamma(P, ra, rb, rc)
                if known and g is not INF:
                    levels.add(g)
    if len(cl) == 2:
        levels.add(delta(P.p[cl[0]], P.p[cl[1]], P.q))
    lines = []
    if cu.dim and cv.dim:
        lines.append((1, -1, mpq(0)))
    for g in sorted(levels):
        if cu.dim:
            lines.append((1, 0, g))
        if cv.dim:
            lines.append((0, 1, g))
    return lines


def _fingerprint(P, cu, cv, desc, rep, levels):
    """Symbolic shape of a fiber description at a sample point.

    Depths are replaced by their provenance so that pieces carrying
    equal fingerprints describe the same stratum.  Input depths are
    tested before the fixed levels: at a generic sample the input
    depths avoid every level, so a depth equal to one is genuinely
    pinned there, while on a zero-dimensional crossing the input
    reading keeps the tag compatible with both neighbours along the
    moving locus and the spurious cut melts away in the merge pass.
    """
    du = cu.depth(rep[0]) if cu.kind != "arc" else None
    dv = cv.depth(rep[1]) if cv.kind != "arc" else None
    Lw = None
    cl = _cluster(P, _mod(mpq(desc.position), P.q.val()))
    if len(cl) == 2:
        Lw = delta(P.p[cl[0]], P.p[cl[1]], P.q)

    def tag(x):
        if x == 0:
            return "0"
        if du is not None and x == du:
            return "u"
        if dv is not None and x == dv:
            return "v"
        if Lw is not None and x == Lw:
            return "L"
        for i, g in enumerate(levels):
            if x == g:
                return "g%d" % i
        return "c" + str(x)

    if desc.kind == "single_point":
        pt = desc.point
        return ("pt", pt.branch, pt.tentacle, tag(pt.distance), bool(cl))
    if desc.kind == "subray":
        return ("sub", desc.tentacle, tag(desc.start), desc.node is not None)
    return ("segrays", desc.pair, tag(desc.start), desc.start == desc.node)


@dataclass
class _Piece:
    """Maximal stratum of one product cell, with its fiber shape."""

    region: _Region
    dim: int
    rep: tuple
    desc: FiberDescription
    fp: tuple
    slots: tuple = ()
    cls: str = ""


def _slot_list(P, desc):
    if desc.kind == "single_point":
        return (("pt",),)
    if desc.kind == "subray":
        if desc.node is None and desc.start > 0:
            cl = _cluster(P, mpq(desc.position))
            if len(cl) == 2 \
                    and desc.start == delta(P.p[cl[0]], P.p[cl[1]], P.q):
                # the start point would be the node, which the segment
                # branch has excluded; no honeycomb reaches this
                raise StructureError(
                    "open subray starts exactly at its node: the fiber "
                    "is not closed")
        return (("pt",), ("ray", desc.tentacle))
    j, k = desc.pair
    if desc.start == desc.node:
        return (("pt",), ("ray", j), ("ray", k))
    return (("pt",), ("seg",), ("ptn",), ("ray", j), ("ray", k))


def _slot_dim(slot):
    return 1 if slot[0] in ("seg", "ray") else 0


def _slot_point(desc, slot, offset=mpq(1, 5)):
    """A representative W on one fiber piece (exact, deterministic)."""
    pos = mpq(desc.position)
    if slot[0] == "pt":
        if desc.kind == "single_point":
            return desc.point
        if desc.kind == "subray":
            if desc.node is not None:
                return TropPoint(pos, min(desc.pair), desc.node, "segment")
            if desc.start == 0:
                return TropPoint(pos)
            return TropPoint(pos, desc.tentacle, desc.start, "ray")
        if desc.start == desc.node:
            return TropPoint(pos, min(desc.pair), desc.node, "segment")
        if desc.start == 0:
            return TropPoint(pos)
        return TropPoint(pos, min(desc.pair), desc.start, "segment")
    if slot[0] == "ptn":
        return TropPoint(pos, min(desc.pair), desc.node, "segment")
    if slot[0] == "seg":
        d = desc.start + (desc.node - desc.start) * mpq(43, 97)
        return TropPoint(pos, min(desc.pair), d, "segment")
    base = desc.node if desc.kind == "segment_and_rays" else desc.start
    return TropPoint(pos, slot[1], base + offset, "ray")


def _resolve_slot(desc, W):
    """Which fiber piece of desc contains W; None when none does."""
    if not desc.contains(W):
        return None
    if desc.kind == "single_point":
        return ("pt",)
    if desc.kind == "subray":
        return ("pt",) if W == _slot_point(desc, ("pt",)) \
            else ("ray", desc.tentacle)
    if W.branch == "hexagon":
        return ("pt",)
    if W.branch == "segment":
        if W.distance == desc.node:
            return ("pt",) if desc.start == desc.node else ("ptn",)
        return ("pt",) if W.distance == desc.start else ("seg",)
    return ("ray", W.tentacle)


def _product_pieces(P, cu, cv):
    """Maximal constant-fiber strata of one ordered product cell."""
    cons = []
    for cell, a, b in ((cu, 1, 0), (cv, 0, 1)):
        if cell.rng is None:
            cons.append((a, b, 0, mpq(0)))
        else:
            cons.append((a, b, 1, cell.rng[0]))
            if cell.rng[1] is not None:
                cons.append((a, b, -1, cell.rng[1]))
    lines = _cut_lines(P, cu, cv)
    levels = sorted({c for a, b, c in lines if (a, b) in ((1, 0), (0, 1))})
    Q = P.q.val()
    raw = {}
    for signs in itertools.product((-1, 0, 1), repeat=len(lines)):
        region = _Region(cons + [(a, b, s, c)
                                 for (a, b, c), s in zip(lines, signs)])
        dr = region.dim_rep()
        if dr is None:
            continue
        dim, rep = dr
        desc = fiber(cu.point(Q, rep[0]), cv.point(Q, rep[1]), P)
        raw[signs] = (dim, rep, desc,
                      _fingerprint(P, cu, cv, desc, rep, levels))

    # melt spurious cuts: two pieces and the wall between them
    # collapse whenever all three carry the same fingerprint
    parent = {s: s for s in raw}

    def find(s):
        while parent[s] != s:
            parent[s] = parent[parent[s]]
            s = parent[s]
        return s

    for signs, (dim, rep, desc, fp) in raw.items():
        for i, s in enumerate(signs):
            if s != 0:
                continue
            lo = signs[:i] + (-1,) + signs[i + 1:]
            hi = signs[:i] + (1,) + signs[i + 1:]
            if lo in raw and hi in raw \
                    and raw[lo][3] == fp and raw[hi][3] == fp:
                parent[find(lo)] = find(signs)
                parent[find(hi)] = find(signs)

    groups = {}
    for signs in raw:
        groups.setdefault(find(signs), []).append(signs)
    pieces = []
    for members in groups.values():
        kept = []
        for i, line in enumerate(lines):
            svals = {m[i] for m in members}
            if len(svals) == 1:
                kept.append((line[0], line[1], svals.pop(), line[2]))
        region = _Region(cons + kept)
        dim, rep = region.dim_rep()
        if dim != max(raw[m][0] for m in members):
            raise StructureError("stratum merge does not stay convex")
        desc = fiber(cu.point(Q, rep[0]), cv.point(Q, rep[1]), P)
        fp = raw[max(members, key=lambda m: raw[m][0])][3]
        pieces.append(_Piece(region, dim, rep, desc, fp,
                             _slot_list(P, desc), region.shape_class(dim)))
    for signs, (dim, rep, desc, fp) in raw.items():
        owners = [p for p in pieces if p.region.ok(rep[0], rep[1])]
        if len(owners) != 1:
            raise StructureError("stratum merge does not stay a partition")
    pieces.sort(key=lambda p: sorted(p.region.cons))
    return pieces


# ---------------------------------------------------------------------------
# the assembled complex

@dataclass(frozen=True, eq=False)
class TGLCell:
    """One cell: dimension, boundedness class, and its frontier."""

    dimension: int
    cls: str
    boundary: tuple


@dataclass(frozen=True, eq=False)
class TGLComplex:
    """Polyhedral surface of the tropical group law.

    cells are ordered deterministically; f_vector counts them as
    (vertices, bounded edges, rays, squares, triangles, flaps,
    quadrants).  The atlas keeps the exact stratification for point
    location and is not part of the public record.
    """

    params: ThetaParams
    xcells: tuple
    cells: tuple
    f_vector: tuple
    _atlas: dict = field(repr=False)
    _index: dict = field(repr=False)

    def euler_bounded(self):
        v, e, r, sq, tri, fl, qu = self.f_vector
        return v - e + sq + tri


def _find_piece(pieces, pt):
    for ip, piece in enumerate(pieces):
        if piece.region.ok(pt[0], pt[1]):
            return ip, piece
    raise StructureError("point escapes the stratification of its product")


def _limit_xcell(P, X, cell, end):
    """The X-cell an open coordinate range closes onto at one end."""
    if cell.kind == "arc":
        Q = P.q.val()
        pos = _mod(cell.position + (mpq(0) if end == 0 else cell.rng[1]), Q)
        return next(c for c in X if c.kind == "vertex" and c.position == pos)
    if cell.kind == "seg":
        kind = "vertex" if end == 0 else "node"
        return next(c for c in X if c.kind == kind
                    and c.members == cell.members)
    # a ray only closes up at its lower end
    kind = "vertex" if cell.L is None else "node"
    return next(c for c in X if c.kind == kind
                and c.members == cell.members)


def _fiber_samples(P, cu, cv, inner, fpoint):
    """Fibers at two interior points on the segment toward fpoint.

    The depths in a fiber description are affine in the stratum
    coordinates, so these two samples determine every limit at the
    boundary point exactly.
    """
    Q = P.q.val()
    out = []
    for t in (mpq(1, 5), mpq(1, 7)):
        pt = (fpoint[0] + t * (inner[0] - fpoint[0]),
              fpoint[1] + t * (inner[1] - fpoint[1]))
        out.append((t, fiber(cu.point(Q, pt[0]), cv.point(Q, pt[1]), P)))
    return out


def _limit(samples, f):
    (t1, d1), (t2, d2) = samples
    x1, x2 = f(d1), f(d2)
    return x1 + t1 * (x2 - x1) / (t1 - t2)


def _extrapolate(P, cu, cv, slot, inner, fpoint):
    """W-limit of a fiber piece at a boundary point of its stratum."""
    samples = _fiber_samples(P, cu, cv, inner, fpoint)
    w1 = _slot_point(samples[0][1], slot)
    w2 = _slot_point(samples[1][1], slot)
    if w1.branch != w2.branch or w1.tentacle != w2.tentacle:
        raise StructureError("fiber carrier jumps inside one stratum")
    wsamples = ((samples[0][0], w1), (samples[1][0], w2))
    pos = _mod(_limit(wsamples, lambda w: mpq(w.position)), P.q.val())
    dist = _limit(wsamples, lambda w: w.distance)
    if w1.branch == "hexagon" or dist == 0:
        return TropPoint(pos)
    return TropPoint(pos, w1.tentacle, dist, w1.branch)


def _canonical_w(X, P, W):
    """Fold a fiber point onto its canonical skeleton form."""
    Q = P.q.val()
    if W.branch == "hexagon":
        return TropPoint(_mod(mpq(W.position), Q))
    if W.distance == 0:
        return TropPoint(_mod(mpq(W.position), Q))
    if W.branch == "ray":
        cell = next(c for c in X if c.kind == "ray"
                    and c.member == W.tentacle - 1)
        if cell.L is not None and W.distance == cell.L:
            return TropPoint(W.position, min(cell.members) + 1,
                             cell.L, "segment")
    return W


def _seg_wall_class(P, cu, cv, piece):
    """Shape of a segment wall over a bounded one-dimensional stratum.

    The node end of the fiber segment is fixed but the start moves
    affinely, so the wall is a quadrilateral unless the start meets
    the node at one stratum endpoint, where the wall loses a corner.
    """
    ends = sorted(piece.region.closure_vertices())
    if len(ends) != 2:
        raise StructureError("a bounded stratum interval lacks two ends")
    collapsed = 0
    for e in ends:
        samples = _fiber_samples(P, cu, cv, piece.rep, e)
        if _limit(samples, lambda d: d.start) == piece.desc.node:
            collapsed += 1
    if collapsed == 2:
        raise StructureError("a segment wall collapses at both ends")
    return "triangle" if collapsed else "square"


def _cell_boundary(comp, key):
    """Frontier cells of one cell, one representative per facet."""
    iu, iv, ip, slot = key
    X, P = comp.xcells, comp.params
    Q = P.q.val()
    cu, cv = X[iu], X[iv]
    piece = comp._atlas[(iu, iv)][ip]
    mydim = piece.dim + _slot_dim(slot)
    out = set()

    # fiber-direction frontier lives over the same stratum
    if slot[0] == "seg":
        out.add(comp._index[(iu, iv, ip, ("pt",))])
        out.add(comp._index[(iu, iv, ip, ("ptn",))])
    elif slot[0] == "ray":
        if piece.desc.kind == "segment_and_rays" \
                and piece.desc.start != piece.desc.node:
            out.add(comp._index[(iu, iv, ip, ("ptn",))])
        else:
            out.add(comp._index[(iu, iv, ip, ("pt",))])

    # stratum-direction frontier: one sample per facet
    for i, fpoint in piece.region.facets():
        a, b, rel, c = piece.region.cons[i]
        W = _canonical_w(X, P, _extrapolate(P, cu, cv, slot,
                                            piece.rep, fpoint))
        exit_coord = None
        if (a, b) == (1, 0) and cu.rng is not None \
                and c in (cu.rng[0], cu.rng[1]):
            exit_coord = 0
        elif (a, b) == (0, 1) and cv.rng is not None \
                and c in (cv.rng[0], cv.rng[1]):
            exit_coord = 1
        if exit_coord is None:
            ju, jv, qt = iu, iv, fpoint
        else:
            cell = cu if exit_coord == 0 else cv
            end = 0 if rel > 0 else 1
            idx = X.index(_limit_xcell(P, X, cell, end))
            ju = idx if exit_coord == 0 else iu
            jv = idx if exit_coord == 1 else iv
            qt = (mpq(0), fpoint[1]) if exit_coord == 0 \
                else (fpoint[0], mpq(0))
        jp, fpiece = _find_piece(comp._atlas[(ju, jv)], qt)
        fdesc = fiber(X[ju].point(Q, qt[0]), X[jv].point(Q, qt[1]), P)
        fslot = _resolve_slot(fdesc, W)
        if fslot is None:
            raise StructureError("a fiber limit escapes the facet fiber")
        fdim = fpiece.dim + _slot_dim(fslot)
        if fdim >= mydim:
            raise StructureError("a frontier sample lands in equal "
                                 "or higher dimension")
        if fdim == mydim - 1:
            out.add(comp._index[(ju, jv, jp, fslot)])
    out.discard(comp._index[key])
    return tuple(sorted(out))


def tgl_build(P: ThetaParams) -> TGLComplex:
    """Build the group law surface complex of a certified vector."""
    X = _skeleton(P)
    atlas = {}
    for iu in range(len(X)):
        for iv in range(len(X)):
            atlas[(iu, iv)] = _product_pieces(P, X[iu], X[iv])

    index = {}
    keys = []
    for (iu, iv), pieces in sorted(atlas.items()):
        for ip, piece in enumerate(pieces):
            for slot in piece.slots:
                dim = piece.dim + _slot_dim(slot)
                if dim > 2:
                    raise StructureError(
                        "a two-dimensional stratum grew a fiber piece; "
                        "the stratification missed a cut")
                index[(iu, iv, ip, slot)] = len(keys)
                keys.append((iu, iv, ip, slot))

    shell = TGLComplex(P, X, (), (), atlas, index)
    cells = []
    for key in keys:
        iu, iv, ip, slot = key
        piece = atlas[(iu, iv)][ip]
        dim = piece.dim + _slot_dim(slot)
        if slot[0] == "seg":
            cls = _SEG_CLASS[piece.cls]
            if cls == "square":
                cls = _seg_wall_class(P, X[iu], X[iv], piece)
        elif slot[0] == "ray":
            cls = _RAY_CLASS[piece.cls]
        else:
            cls = piece.cls
        cells.append(TGLCell(dim, cls, _cell_boundary(shell, key)))
    counts = {c: 0 for c in CLASSES}
    for cell in cells:
        counts[cell.cls] += 1
    fvec = tuple(counts[c] for c in CLASSES)
    return TGLComplex(P, X, tuple(cells), fvec, atlas, index)


# ---------------------------------------------------------------------------
# point location and sampling

def _classify_point(X, P, pt):
    """X-cell and coordinate of a skeleton point, canonicalized."""
    Q = P.q.val()
    pos = _mod(mpq(pt.position), Q)
    pt = _canonical_w(X, P, pt)
    if pt.branch == "hexagon":
        for c in X:
            if c.kind == "vertex" and c.position == pos:
                return c, mpq(0)
        for c in X:
            if c.kind == "arc":
                off = _mod(pos - c.position, Q)
                if 0 < off < c.rng[1]:
                    return c, off
        raise StructureError("hexagon position lands nowhere on the skeleton")
    t = pt.tentacle - 1
    if pt.branch == "segment":
        cell = next(c for c in X if c.kind == "seg" and t in c.members)
        if pt.distance == cell.L:
            node = next(c for c in X if c.kind == "node"
                        and c.members == cell.members)
            return node, mpq(0)
        if not 0 < pt.distance < cell.L:
            raise StructureError("segment depth outside the tentacle trunk")
        return cell, pt.distance
    cell = next(c for c in X if c.kind == "ray" and c.member == t)
    if pt.distance <= cell.rng[0]:
        raise StructureError("ray depth does not clear the attachment")
    return cell, pt.distance


def locate(comp: TGLComplex, U, V, W):
    """Index of the cell containing the triple (U, V, W)."""
    P = comp.params
    X = comp.xcells
    cu, coord_u = _classify_point(X, P, U)
    cv, coord_v = _classify_point(X, P, V)
    iu, iv = X.index(cu), X.index(cv)
    ip, piece = _find_piece(comp._atlas[(iu, iv)], (coord_u, coord_v))
    Q = P.q.val()
    desc = fiber(cu.point(Q, coord_u), cv.point(Q, coord_v), P)
    if desc.kind != piece.desc.kind:
        raise StructureError("fiber shape disagrees with the stratification")
    slot = _resolve_slot(desc, _canonical_w(X, P, W))
    if slot is None:
        raise StructureError("the point does not lie on the fiber over (U, V)")
    return comp._index[(iu, iv, ip, slot)]


def random_lift(P: ThetaParams, rng):
    """A random unit series retracting to a varied skeleton point."""
    i = rng.randrange(9)
    d = mpq(rng.randrange(1, 25), rng.choice((2, 4, 8)))
    tail = {mpq(0): 1, d: rng.choice((-2, -1, 1, 2, 3))}
    if rng.random() < 0.5:
        tail[d + mpq(rng.randrange(1, 9), rng.choice((1, 2, 3)))] = \
            rng.choice((-1, 1))
    u = P.p[i] * PuiseuxSeries(P.n, tail)
    if rng.random() < 0.25:
        u = u * PuiseuxSeries.t_power(P.n, mpq(rng.randrange(1, 12), 5))
    return u

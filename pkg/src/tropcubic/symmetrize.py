"""Symmetric models of honeycomb cubics.

The target family is g = a (x^3 + y^3 + z^3) + b (sum of the six edge
monomials) + xyz.  Given a target j-value with negative valuation, the
edge parameter b is found as a root of a degree-12 equation built from
the invariant tables; the equation has six unit-valuation roots whose
leading coefficients are the sixth roots of unity times a rational, and
the rational branch is the canonical choice.

The projective change of coordinates carrying a general cubic onto its
symmetric model is pinned down by the nine inflection points: both
cubics get their inflections labeled compatibly with the twelve
collinear triples, and a short list of label permutations (two cosets
of twelve, picked between by one membership test) is tried until the
transformed cubic is proportional to the symmetric one.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from gmpy2 import mpq

from .config import DEFAULT_CONFIG, SessionConfig
from .cubics import EXPS, Cubic, aronhold_invariants, j_invariant, tri_mul
from .cyclotomic import CycloRat
from .errors import AlgebraicError, PrecisionError, StructureError
from .linalg import (
    cross,
    det3,
    is_zero_series,
    matvec3,
    proj_equal,
    projective_from_correspondence,
)
from .series import PuiseuxSeries
from .seriespoly import SeriesPoly, newton_polygon, puiseux_roots

SYZYGETIC_TRIPLES = frozenset(
    frozenset(t)
    for t in [
        (1, 2, 3), (1, 4, 7), (1, 5, 9), (1, 6, 8),
        (2, 4, 9), (2, 5, 8), (2, 6, 7),
        (3, 4, 8), (3, 5, 7), (3, 6, 9),
        (4, 5, 6), (7, 8, 9),
    ]
)

# label permutations for the inflection correspondence search, in cycle
# notation; together with their compositions with _TAU they cover every
# projectivity class compatible with the collinearity incidence
_COSET_REP_CYCLES = (
    "",
    "(456)(987)",
    "(654)(789)",
    "(2437)(5698)",
    "(246378)(59)",
    "(254397)(68)",
    "(249)(375)",
    "(258)(963)",
    "(2539)(4876)",
    "(852)(369)",
    "(287364)(59)",
    "(2836)(4975)",
)
_TAU_CYCLES = "(47)(58)(69)"


def _parse_cycles(text):
    """Cycle string over {1..9} -> mapping tuple p with p[i-1] = image of i."""
    perm = list(range(1, 10))
    i = 0
    while i < len(text):
        assert text[i] == "("
        j = text.index(")", i)
        cyc = [int(ch) for ch in text[i + 1 : j]]
        for k, v in enumerate(cyc):
            perm[v - 1] = cyc[(k + 1) % len(cyc)]
        i = j + 1
    return tuple(perm)


def _compose(p, q):
    """(p o q)(i) = p(q(i))."""
    return tuple(p[q[i] - 1] for i in range(9))


COSET_REPS = tuple(_parse_cycles(c) for c in _COSET_REP_CYCLES)
TAU = _parse_cycles(_TAU_CYCLES)


def zeta3(n: int) -> CycloRat:
    if n == 3:
        return CycloRat.zeta_pow(n, 1)
    if n == 6:
        return CycloRat.zeta_pow(n, 2)
    if n == 12:
        return CycloRat.zeta_pow(n, 4)
    raise StructureError(f"no cube root of unity table for order {n}")


def _symmetric_values(n, a, bvar):
    one = SeriesPoly(n, [PuiseuxSeries.one(n)])
    aval = SeriesPoly(n, [a])
    out = []
    for e in EXPS:
        if e in ((3, 0, 0), (0, 3, 0), (0, 0, 3)):
            out.append(aval)
        elif e == (1, 1, 1):
            out.append(one)
        else:
            out.append(bvar)
    return out


def solve_symmetric_b(iota: PuiseuxSeries, a: PuiseuxSeries | None = None,
                      config: SessionConfig = DEFAULT_CONFIG) -> list:
    """The six small-valuation solutions b of j(g) = iota for the
    symmetric family with corner coefficient a.

    Requires val(iota) < 0 and, when a is nonzero, val(a) + val(iota) > 0.
    The degree-12 equation in b has Newton polygon {(0, 6), (v, 6)} with
    v = -val(iota)/6; that shape is checked, not assumed.  The returned
    roots all have valuation v and their leading coefficients are the
    sixth roots of unity times a common rational when iota has a
    rational leading coefficient.

    The target here is the j-value in the normalization where the
    expansion in the uniformizer 1/j starts 1/j + 744/j^2 + ...; against
    the closed-form calibration of j_invariant this flips the sign, so
    each returned g satisfies j_invariant(g) = -iota exactly.
    """
    n = iota.n
    viota = iota.val()
    if viota >= 0:
        raise StructureError(f"val(iota) = {viota} must be negative")
    if a is None:
        a = PuiseuxSeries.zero(n)
    if not a.is_exact_zero:
        va = a.val()
        if va + viota <= 0:
            raise StructureError(
                f"val(a) + val(iota) = {va + viota} must be positive for the symmetric model"
            )
    bvar = SeriesPoly(n, [PuiseuxSeries.zero(n), PuiseuxSeries.one(n)])
    s, t = aronhold_invariants(_symmetric_values(n, a, bvar))
    s3 = s**3
    eq = iota * (t * t - s3) + 1728 * s3
    vexp = -viota / 6
    pos = [(sg.slope, sg.length) for sg in newton_polygon(eq) if sg.slope > 0]
    if pos != [(vexp, 6)]:
        raise AlgebraicError(
            f"positive Newton polygon part is {pos}, expected one segment of valuation"
            f" {vexp} and multiplicity 6; the corner coefficient may be too large"
        )
    roots = puiseux_roots(eq, config.prec, config, positive_valuation_only=True)
    out = [r for r in roots if not r.is_exact_zero and r.val() > 0]
    if len(out) != 6:
        raise AlgebraicError(
            f"found {len(out)} representable small roots, expected 6"
            + (f" (unrepresentable: {roots.unrepresentable})" if roots.unrepresentable else "")
        )
    return out


def rational_branch(roots) -> PuiseuxSeries:
    """The canonical choice among the six: rational leading coefficient,
    positive if possible."""
    rational = [r for r in roots if r.leading_coeff().is_rational()]
    pos = [r for r in rational if r.leading_coeff().rational_value() > 0]
    if pos:
        return pos[0]
    if rational:
        return rational[0]
    raise AlgebraicError("no root has a rational leading coefficient")


def omega_of(a, b) -> PuiseuxSeries:
    """The pencil parameter (3a + 6b + 1)/(-3a + 3b - 1) of the
    symmetric family."""
    num = 3 * a + 6 * b + 1
    den = -3 * a + 3 * b - 1
    return num / den


def _pick_cube_root(w: PuiseuxSeries) -> PuiseuxSeries:
    roots = w.root(3)
    rational = [r for r in roots if r.leading_coeff().is_rational()]
    pool = rational if rational else sorted(roots, key=lambda r: r.leading_coeff().c)
    return pool[0]


def inflection_matrix(omega: PuiseuxSeries):
    """The nine inflection points of the symmetric cubic with pencil
    parameter omega, as rows, labeled compatibly with the collinear
    triples.  Requires a cube root of omega over the working field."""
    n = omega.n
    w = _pick_cube_root(omega)
    xi = PuiseuxSeries.scalar(n, zeta3(n))
    one = PuiseuxSeries.one(n)
    zero = PuiseuxSeries.zero(n)
    w0, w1, w2 = w, xi * w, (xi * xi) * w
    rows = [
        (one, -one, zero),
        (one, zero, -one),
        (zero, one, -one),
        (one + w0, one + w1, one + w2),
        (one + w1, one + w2, one + w0),
        (one + w2, one + w0, one + w1),
        (one + w1, one + w0, one + w2),
        (one + w0, one + w2, one + w1),
        (one + w2, one + w1, one + w0),
    ]
    return rows


def tri_proportional(d1: dict, d2: dict):
    """If d1 = lam * d2 as trivariate polynomials (to precision), return
    lam; otherwise None."""
    ref = None
    for e, c in d2.items():
        if not is_zero_series(c) and e in d1 and not is_zero_series(d1[e]):
            ref = e
            break
    if ref is None:
        return None
    lam = d1[ref] / d2[ref]
    for e in set(d1) | set(d2):
        c1 = d1.get(e)
        c2 = d2.get(e)
        if c2 is None:
            if not is_zero_series(c1):
                return None
            continue
        diff = (c1 - lam * c2) if c1 is not None else (-lam) * c2
        if not is_zero_series(diff):
            return None
    return lam


@dataclass(frozen=True)
class TriangleMember:
    """A reducible member s*f + H_f of the pencil; s_value is None for
    the member at s = infinity (H_f itself)."""

    s_value: object
    member: Cubic
    lines: tuple


@dataclass(frozen=True)
class SyzygeticResult:
    members: tuple
    unrepresentable: tuple


_LINE_BASES = (
    ((1, 2, 5), (3, 1, 7)),
    ((1, 3, 2), (2, 5, 1)),
    ((4, 1, 3), (1, 1, 9)),
    ((2, 7, 1), (5, 3, 4)),
    ((1, 0, 2), (3, 8, 1)),
    ((6, 1, 1), (1, 4, 2)),
)


def _triangle_lines(m: Cubic, config: SessionConfig):
    """Factor a reducible cubic (a product of three lines) into its
    lines: restrict to a generic parametrized line, split the binary
    cubic, and read each line off the gradient at the corresponding
    point.  The product of the lines is checked against m."""
    n = m.n
    tri = m.as_tri()
    grads = [dict_partial(tri, ax) for ax in range(3)]
    last_error = None
    for p, r in _LINE_BASES:
        pu = [SeriesPoly(n, [mpq(pc), mpq(rc)]) for pc, rc in zip(p, r)]
        restricted = tri_eval_generic(tri, pu)
        if restricted is None or restricted.degree != 3:
            continue
        if restricted.coeffs[-1].is_zero_to_prec:
            continue
        try:
            roots = puiseux_roots(restricted, config.prec, config)
        except (AlgebraicError, PrecisionError) as e:
            last_error = e
            continue
        if len(roots) != 3:
            last_error = AlgebraicError(
                "binary cubic of the restricted member did not split over the field"
            )
            continue
        if any(
            is_zero_series(r1 - r2) for r1, r2 in combinations(roots, 2)
        ):
            continue  # the line hit a vertex of the triangle
        lines = []
        ok = True
        for u in roots:
            pt = tuple(PuiseuxSeries.scalar(n, pc) + u * mpq(rc) for pc, rc in zip(p, r))
            grad = tuple(tri_eval_series(g, pt) for g in grads)
            if all(is_zero_series(c) for c in grad):
                ok = False
                break
            lines.append(grad)
        if not ok:
            continue
        prod = {(0, 0, 0): PuiseuxSeries.one(n)}
        for line in lines:
            ld = {
                e: c
                for e, c in zip(((1, 0, 0), (0, 1, 0), (0, 0, 1)), line)
                if not c.is_exact_zero
            }
            prod = tri_mul(prod, ld)
        if tri_proportional(prod, tri) is None:
            last_error = AlgebraicError("line product does not reproduce the member")
            continue
        return tuple(lines)
    raise last_error or AlgebraicError("no generic line separated the triangle")


def dict_partial(d: dict, axis: int) -> dict:
    out = {}
    for e, c in d.items():
        if e[axis]:
            e2 = list(e)
            e2[axis] -= 1
            out[tuple(e2)] = c * e[axis]
    return out


def tri_eval_series(d: dict, point):
    x, y, z = point
    acc = None
    for (i, j, k), c in d.items():
        term = c * x**i * y**j * z**k
        acc = term if acc is None else acc + term
    if acc is None:
        return PuiseuxSeries.zero(point[0].n)
    return acc


def tri_eval_generic(d: dict, point):
    acc = None
    for (i, j, k), c in d.items():
        term = None
        for base, e in zip(point, (i, j, k)):
            if e:
                pw = base**e
                term = pw if term is None else term * pw
        term = c if term is None else term * c
        acc = term if acc is None else acc + term
    return acc


def _poly_cube_root(d: SeriesPoly) -> SeriesPoly:
    """q with q^3 = d, for a polynomial whose degree is divisible by 3
    and whose leading coefficient has a cube root over the field; the
    full product is verified coefficientwise."""
    m = d.degree
    if m < 0 or m % 3 != 0:
        raise AlgebraicError(f"degree {m} polynomial cannot be a cube")
    n = d.n
    k = m // 3
    lc = d.coeffs[m]
    if lc.is_zero_to_prec:
        raise PrecisionError("leading coefficient of the pencil discriminant is undecided")
    q = [PuiseuxSeries.zero(n)] * (k + 1)
    q[k] = _pick_cube_root(lc)
    inv = (3 * q[k] * q[k]).inverse()
    for i in range(k - 1, -1, -1):
        # coefficient of s^(i+2k) in q^3 using entries above i only
        acc = PuiseuxSeries.zero(n)
        for a in range(i + 1, k + 1):
            for b in range(i + 1, k + 1):
                c = i + 2 * k - a - b
                if i < c <= k:
                    acc = acc + q[a] * q[b] * q[c]
        q[i] = (d.coeffs[i + 2 * k] - acc) * inv
    qq = SeriesPoly(n, q)
    cube = qq * qq * qq
    for i in range(m + 1):
        if not is_zero_series(cube.coeff(i) - d.coeff(i)):
            raise AlgebraicError(
                "pencil discriminant is not a perfect cube to the working precision"
            )
    return qq


def syzygetic_triangles(f: Cubic, config: SessionConfig = DEFAULT_CONFIG) -> SyzygeticResult:
    """The reducible members of the pencil s*f + H_f and their line
    factorizations.

    The discriminant of the pencil member, as a polynomial in s, is a
    perfect cube; its cube root is a quartic whose roots give the four
    reducible members.  A degree drop means H_f itself is reducible and
    contributes the member at s = infinity."""
    n = f.n
    h = f.hessian_cubic()
    vals = [SeriesPoly(n, [h.coeff(e), f.coeff(e)]) for e in EXPS]
    s, t = aronhold_invariants(vals)
    disc = (t * t - s**3) * mpq(1, 1728)
    quartic = _poly_cube_root(disc)
    members = []
    if quartic.degree < 4:
        members.append(TriangleMember(None, h, _triangle_lines(h, config)))
    roots = puiseux_roots(quartic, config.prec, config)
    for s0 in roots:
        member = Cubic(n, {e: f.coeff(e) * s0 + h.coeff(e) for e in EXPS})
        members.append(TriangleMember(s0, member, _triangle_lines(member, config)))
    return SyzygeticResult(tuple(members), roots.unrepresentable)


def _collinear_triples(points):
    triples = []
    for combo in combinations(range(9), 3):
        m = [points[i] for i in combo]
        if is_zero_series(det3(m)):
            triples.append(frozenset(combo))
    return triples


def _label_by_incidence(points):
    """Assign labels 1..9 so that the collinear triples are exactly the
    reference syzygetic triples; first solution in lexicographic
    order."""
    found = _collinear_triples(points)
    if len(found) != 12:
        raise AlgebraicError(
            f"found {len(found)} collinear triples among the intersection points,"
            " expected 12; the triangles may not be in general position"
        )
    label = [0] * 9  # label[point_index]
    used = [False] * 10

    def ok(idx):
        for tri in found:
            if idx in tri:
                labs = [label[i] for i in tri]
                if all(labs):
                    if frozenset(labs) not in SYZYGETIC_TRIPLES:
                        return False
        return True

    def rec(idx):
        if idx == 9:
            return True
        for lab in range(1, 10):
            if not used[lab]:
                label[idx] = lab
                used[lab] = True
                if ok(idx) and rec(idx + 1):
                    return True
                label[idx] = 0
                used[lab] = False
        return False

    if not rec(0):
        raise AlgebraicError("intersection incidence does not match the inflection pattern")
    out = [None] * 9
    for idx, lab in enumerate(label):
        out[lab - 1] = points[idx]
    return out


def inflection_points(f: Cubic, config: SessionConfig = DEFAULT_CONFIG):
    """The nine inflection points of f, labeled compatibly with the
    twelve collinear triples, via two reducible pencil members."""
    res = syzygetic_triangles(f, config)
    if len(res.members) < 2:
        raise AlgebraicError(
            f"only {len(res.members)} reducible members are representable over the field"
        )
    l1 = res.members[0].lines
    l2 = res.members[1].lines
    points = [cross(a, b) for a in l1 for b in l2]
    return _label_by_incidence(points)


@dataclass(frozen=True)
class SymmetrizeResult:
    cubic: Cubic          # the symmetric model g
    b: PuiseuxSeries      # its edge parameter
    matrix: tuple         # M with f(Mx) = scale * g(x)
    scale: PuiseuxSeries
    permutation: tuple    # label permutation that matched
    tried: int            # number of transforms built (at most 13)


def symmetrize_pipeline(f: Cubic, config: SessionConfig = DEFAULT_CONFIG) -> SymmetrizeResult:
    """Symmetric model of a cubic with val(j) < 0, together with the
    projective change of coordinates onto it.

    The edge parameter solves the symmetric-family equation for the
    j-value of f (in the uniformizer normalization, hence the sign
    flip), so j_invariant(g) = j_invariant(f) exactly.  The matrix is
    found from the labeled inflection correspondence; one membership
    test picks between the two cosets of label permutations, and at
    most thirteen candidate transforms are ever built.
    """
    jf = j_invariant(f)
    if jf.val() >= 0:
        raise StructureError("symmetrization requires val(j) < 0")
    roots = solve_symmetric_b(-jf, None, config)
    b0 = rational_branch(roots)
    n = f.n
    g = Cubic.symmetric_family(n, PuiseuxSeries.zero(n), b0)
    omega = omega_of(PuiseuxSeries.zero(n), b0)
    bpts = inflection_matrix(omega)
    apts = inflection_points(f, config)

    def frame_for(perm):
        dst = [apts[perm[i] - 1] for i in (0, 1, 3, 4)]
        src = [bpts[i] for i in (0, 1, 3, 4)]
        return projective_from_correspondence(src, dst)

    ident = COSET_REPS[0]
    m_id = frame_for(ident)
    tried = 1
    in_first_coset = all(
        any(proj_equal(matvec3(m_id, b), a) for a in apts) for b in bpts
    )
    gtri = g.as_tri()
    for rep in COSET_REPS:
        perm = rep if in_first_coset else _compose(TAU, rep)
        if perm == ident and in_first_coset:
            m = m_id
        else:
            m = frame_for(perm)
            tried += 1
        lam = tri_proportional(f.transform(m).as_tri(), gtri)
        if lam is not None:
            return SymmetrizeResult(
                cubic=g, b=b0, matrix=tuple(tuple(row) for row in m),
                scale=lam, permutation=perm, tried=tried,
            )
    raise AlgebraicError(
        "no candidate transform carried the cubic onto its symmetric model"
    )

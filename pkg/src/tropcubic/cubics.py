"""Plane cubic forms over Puiseux series: the type, its classical
degree-4 and degree-6 invariants, the Hessian, and linear substitution.

The two invariants are generated once, symbolically, by contracting the
symmetric coefficient tensor of the cubic against Levi-Civita epsilons:
four epsilons (each feeding the other three tensor slots) for the
degree-4 invariant, six in a cyclic pattern for the degree-6 one.  Both
tables are normalized to integer coefficients of content one with the
lexicographically first monomial positive.  With that normalization,

    j = 1728 * S^3 / (T^2 - S^3),    disc = (T^2 - S^3) / 1728,

and for the one-parameter symmetric family (corner coefficient 0, edge
coefficient b, center 1) the discriminant factors exactly as
b^6 (2b-1)^3 (3b-1)^2 (6b+1).
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import permutations

from gmpy2 import mpq

from .cyclotomic import CycloRat
from .errors import AlgebraicError, StructureError
from .series import PuiseuxSeries

# exponent triples (i,j,k) with i+j+k = 3, fixed order
EXPS = (
    (3, 0, 0), (0, 3, 0), (0, 0, 3),
    (2, 1, 0), (2, 0, 1), (1, 2, 0), (0, 2, 1), (1, 0, 2), (0, 1, 2),
    (1, 1, 1),
)
EIDX = {e: i for i, e in enumerate(EXPS)}

COEFF_NAMES = tuple("c%d%d%d" % e for e in EXPS)


def _multinom(e):
    i, j, k = e
    return math.factorial(3) // (math.factorial(i) * math.factorial(j) * math.factorial(k))


def _contract(n_eps, targets):
    """Sum over one permutation choice per epsilon of sign * product of
    tensor entries; targets[alpha] lists the three tensor factors fed by
    epsilon alpha.  Tensor entry with exponent e is c_e / multinom(e).
    Returns {exponent-10-tuple: Fraction-like mpq}."""
    perms = []
    for p in permutations(range(3)):
        s = 1
        q = list(p)
        for i in range(3):
            for j in range(i + 1, 3):
                if q[i] > q[j]:
                    s = -s
        perms.append((p, s))
    poly: dict = {}
    slots = [[] for _ in range(n_eps)]

    def rec(alpha, sgn):
        if alpha == n_eps:
            mon = [0] * 10
            coef = mpq(sgn)
            for beta in range(n_eps):
                e = [0, 0, 0]
                for p in slots[beta]:
                    e[p] += 1
                e = tuple(e)
                coef /= _multinom(e)
                mon[EIDX[e]] += 1
            mon = tuple(mon)
            c = poly.get(mon, 0) + coef
            if c:
                poly[mon] = c
            else:
                poly.pop(mon, None)
            return
        for p, s in perms:
            for k in range(3):
                slots[targets[alpha][k]].append(p[k])
            rec(alpha + 1, sgn * s)
            for k in range(3):
                slots[targets[alpha][k]].pop()

    rec(0, 1)
    return poly


def _primitive(poly):
    lcm = 1
    for c in poly.values():
        lcm = lcm * c.denominator // math.gcd(lcm, int(c.denominator))
    ints = {m: int(c * lcm) for m, c in poly.items()}
    g = 0
    for c in ints.values():
        g = math.gcd(g, abs(c))
    ints = {m: c // g for m, c in ints.items()}
    if ints[sorted(ints)[0]] < 0:
        ints = {m: -c for m, c in ints.items()}
    return tuple(sorted(ints.items()))


@lru_cache(maxsize=None)
def invariant_tables():
    """(S_table, T_table): tuples of (exponent-10-tuple, int coefficient)."""
    s_targets = [[b for b in range(4) if b != a] for a in range(4)]
    t_targets = [[a % 6, (a + 1) % 6, (a + 2) % 6] for a in range(6)]
    s_poly = _primitive(_contract(4, s_targets))
    t_poly = _primitive(_contract(6, t_targets))
    return s_poly, t_poly


def _eval_table(table, vals):
    acc = None
    for mon, c in table:
        term = None
        for idx, e in enumerate(mon):
            if e:
                p = vals[idx] ** e
                term = p if term is None else term * p
        term = c * term
        acc = term if acc is None else acc + term
    return acc


def aronhold_invariants(vals):
    """Evaluate both invariant tables on a length-10 value sequence
    (any commutative ring elements with +, * and integer scalars),
    ordered like EXPS."""
    s_table, t_table = invariant_tables()
    return _eval_table(s_table, vals), _eval_table(t_table, vals)


class Cubic:
    """A plane cubic with PuiseuxSeries coefficients, indexed by EXPS."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs):
        d = {}
        if isinstance(coeffs, dict):
            items = coeffs.items()
        else:
            items = zip(EXPS, coeffs)
        for key, c in items:
            if isinstance(key, str):
                if not (len(key) == 4 and key[0] == "c"):
                    raise StructureError(f"bad coefficient name {key!r}")
                key = (int(key[1]), int(key[2]), int(key[3]))
            key = tuple(key)
            if key not in EIDX:
                raise StructureError(f"bad exponent triple {key!r}")
            if not isinstance(c, PuiseuxSeries):
                c = PuiseuxSeries.scalar(n, c)
            elif c.n != n:
                raise ValueError("mixed cyclotomic orders in cubic")
            d[key] = c
        for e in EXPS:
            d.setdefault(e, PuiseuxSeries.zero(n))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", d)

    def __setattr__(self, name, value):
        raise AttributeError("Cubic is immutable")

    @classmethod
    def symmetric_family(cls, n, a, b, center=1):
        """a*(corner monomials) + b*(edge monomials) + center*xyz."""
        d = {}
        for e in EXPS:
            if e in ((3, 0, 0), (0, 3, 0), (0, 0, 3)):
                d[e] = a
            elif e == (1, 1, 1):
                d[e] = center
            else:
                d[e] = b
        return cls(n, d)

    def coeff(self, e) -> PuiseuxSeries:
        return self.coeffs[tuple(e)]

    def values(self):
        return [self.coeffs[e] for e in EXPS]

    def scale(self, s) -> "Cubic":
        return Cubic(self.n, {e: c * s for e, c in self.coeffs.items()})

    def evaluate(self, point) -> PuiseuxSeries:
        x, y, z = point
        acc = PuiseuxSeries.zero(self.n)
        for (i, j, k), c in self.coeffs.items():
            if c.is_exact_zero:
                continue
            acc = acc + c * x**i * y**j * z**k
        return acc

    def as_tri(self) -> dict:
        return {e: c for e, c in self.coeffs.items() if not c.is_exact_zero}

    def partial(self, axis: int) -> dict:
        return tri_partial(self.as_tri(), axis)

    def hessian_cubic(self) -> "Cubic":
        """Determinant of the matrix of second partials, as a Cubic."""
        f = self.as_tri()
        h = [[tri_partial(tri_partial(f, i), j) for j in range(3)] for i in range(3)]
        det: dict = {}
        for p in permutations(range(3)):
            s = 1
            q = list(p)
            for i in range(3):
                for j in range(i + 1, 3):
                    if q[i] > q[j]:
                        s = -s
            term = tri_mul(tri_mul(h[0][p[0]], h[1][p[1]]), h[2][p[2]])
            det = tri_add(det, term if s > 0 else tri_scale(term, -1))
        return Cubic(self.n, det)

    def transform(self, m) -> "Cubic":
        """The cubic f(Mx), for a 3x3 matrix of series (rows act on x)."""
        rows = []
        for i in range(3):
            row = {}
            for j, var in enumerate([(1, 0, 0), (0, 1, 0), (0, 0, 1)]):
                c = m[i][j]
                if not isinstance(c, PuiseuxSeries):
                    c = PuiseuxSeries.scalar(self.n, c)
                if not c.is_exact_zero:
                    row[var] = c
            rows.append(row)
        out: dict = {}
        for (i, j, k), c in self.coeffs.items():
            if c.is_exact_zero:
                continue
            term = {(0, 0, 0): c}
            for _ in range(i):
                term = tri_mul(term, rows[0])
            for _ in range(j):
                term = tri_mul(term, rows[1])
            for _ in range(k):
                term = tri_mul(term, rows[2])
            out = tri_add(out, term)
        return Cubic(self.n, out)

    def invariants(self):
        return aronhold_invariants(self.values())

    def __repr__(self):
        parts = []
        for e in EXPS:
            c = self.coeffs[e]
            if not c.is_exact_zero:
                parts.append(f"c{e[0]}{e[1]}{e[2]}=({c!r})")
        return "Cubic(" + ", ".join(parts) + ")"


# trivariate polynomial helpers: dict {(i,j,k): PuiseuxSeries}, zero
# coefficients absent

def tri_add(d1: dict, d2: dict) -> dict:
    out = dict(d1)
    for e, c in d2.items():
        s = out.get(e)
        s = c if s is None else s + c
        if s.is_exact_zero:
            out.pop(e, None)
        else:
            out[e] = s
    return out


def tri_scale(d: dict, s) -> dict:
    return {e: c * s for e, c in d.items()}


def tri_mul(d1: dict, d2: dict) -> dict:
    out: dict = {}
    for e1, c1 in d1.items():
        for e2, c2 in d2.items():
            e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
            c = c1 * c2
            s = out.get(e)
            s = c if s is None else s + c
            if s.is_exact_zero:
                out.pop(e, None)
            else:
                out[e] = s
    return out


def tri_partial(d: dict, axis: int) -> dict:
    out = {}
    for e, c in d.items():
        if e[axis]:
            e2 = list(e)
            e2[axis] -= 1
            out[tuple(e2)] = c * e[axis]
    return out


def tri_eval(d: dict, point):
    x, y, z = point
    acc = None
    for (i, j, k), c in d.items():
        term = c * x**i * y**j * z**k
        acc = term if acc is None else acc + term
    return acc


def j_invariant(f: Cubic) -> PuiseuxSeries:
    """1728 S^3 / (T^2 - S^3) for the calibrated invariant tables.

    This normalization reproduces the closed forms for the symmetric
    families exactly (j = 15625/28 at corner 0, edge 1, center 1).
    """
    s, t = f.invariants()
    s3 = s**3
    den = t * t - s3
    if den.is_exact_zero:
        raise AlgebraicError("j-invariant undefined: the discriminant vanishes")
    return 1728 * s3 / den


def discriminant(f: Cubic) -> PuiseuxSeries:
    s, t = f.invariants()
    return (t * t - s**3) / 1728

import random

import pytest
from gmpy2 import mpq

from tropcubic import CycloRat
from tropcubic.config import SessionConfig
from tropcubic.errors import PrecisionError, SeparationError
from tropcubic.series import INF, PuiseuxSeries, parse_series
from tropcubic.seriespoly import PolygonSegment, RootList, SeriesPoly, newton_polygon, puiseux_roots

from seriesgen import rand_series

N = 12


def S(text):
    return parse_series(text, N)


def xminus(roots):
    p = SeriesPoly(N, [PuiseuxSeries.one(N)])
    for r in roots:
        p = p * SeriesPoly(N, [-r, PuiseuxSeries.one(N)])
    return p


def test_poly_ring_ops():
    rng = random.Random(5)
    for _ in range(10):
        a = SeriesPoly(N, [rand_series(rng, N, trunc=mpq(8)) for _ in range(3)])
        b = SeriesPoly(N, [rand_series(rng, N, trunc=mpq(8)) for _ in range(2)])
        x = rand_series(rng, N, nterms=2, emin=0, trunc=mpq(8))
        lhs = (a * b).evaluate(x)
        rhs = a.evaluate(x) * b.evaluate(x)
        assert lhs.agrees_with(rhs)
        assert (a + b).evaluate(x).agrees_with(a.evaluate(x) + b.evaluate(x))


def test_taylor_shift():
    p = SeriesPoly(N, [S("t"), S("2"), S("1")])  # X^2 + 2X + t
    g = CycloRat.from_rational(N, 3)
    q = p.taylor_shift(g)  # (3+X)^2 + 2(3+X) + t = X^2 + 8X + 15 + t
    assert q.coeffs[0].agrees_with(S("15 + t"))
    assert q.coeffs[1].agrees_with(S("8"))
    assert q.coeffs[2].agrees_with(S("1"))


def test_polygon_two_segments():
    # (X - t)(X - t^2) = X^2 - (t + t^2) X + t^3
    p = SeriesPoly(N, [S("t^3"), S("-t - t^2"), S("1")])
    segs = newton_polygon(p)
    assert [(s.slope, s.length) for s in segs] == [(1, 1), (2, 1)]


def test_polygon_ramified():
    p = SeriesPoly(N, [S("-t"), PuiseuxSeries.zero(N), S("1")])
    segs = newton_polygon(p)
    assert [(s.slope, s.length) for s in segs] == [(mpq(1, 2), 2)]
    assert segs[0].support == (0, 2)


def test_polygon_zero_to_prec_guard():
    one = PuiseuxSeries.one(N)
    # middle coefficient known only to O(t^0): could touch the hull
    fuzzy = PuiseuxSeries.zero(N, trunc=0)
    with pytest.raises(PrecisionError):
        newton_polygon(SeriesPoly(N, [one, fuzzy, one]))
    # to O(t): strictly above the flat hull, polygon is decided
    segs = newton_polygon(SeriesPoly(N, [one, PuiseuxSeries.zero(N, trunc=1), one]))
    assert [(s.slope, s.length) for s in segs] == [(0, 2)]


def test_sqrt_t():
    p = SeriesPoly(N, [S("-t"), PuiseuxSeries.zero(N), S("1")])
    roots = puiseux_roots(p, 5)
    assert roots.complete
    assert len(roots) == 2
    texts = sorted(str(r) for r in roots)
    assert roots[0].trunc == INF and roots[1].trunc == INF
    vals = {r.val() for r in roots}
    assert vals == {mpq(1, 2)}
    assert roots[0].agrees_with(-roots[1])
    sq = roots[0] * roots[0]
    assert sq.agrees_with(S("t"))
    assert texts  # formatting smoke


def test_cube_roots_of_one():
    p = SeriesPoly(N, [S("-1"), PuiseuxSeries.zero(N), PuiseuxSeries.zero(N), S("1")])
    roots = puiseux_roots(p, 5)
    assert roots.complete and len(roots) == 3
    got = {r.leading_coeff() for r in roots}
    z = CycloRat.zeta_pow(N, 4)
    assert got == {CycloRat.one(N), z, z * z}
    assert all(r.val() == 0 and r.trunc == INF for r in roots)


def test_unrepresentable_branch():
    # X^2 - zeta_12 has no root in Q(zeta_12)
    p = SeriesPoly(N, [PuiseuxSeries.scalar(N, -CycloRat.zeta_pow(N, 1)), PuiseuxSeries.zero(N), S("1")])
    roots = puiseux_roots(p, 5)
    assert len(roots) == 0
    assert not roots.complete
    assert len(roots.unrepresentable) == 1
    rec = roots.unrepresentable[0]
    assert rec.degree == 2 and rec.multiplicity == 1 and rec.valuation == 0
    assert rec.count == 2


def test_exact_double_root():
    t = S("t")
    p = xminus([t, t, S("2*t")])
    roots = puiseux_roots(p, 8)
    assert roots.complete and len(roots) == 3
    assert sum(1 for r in roots if r.agrees_with(t)) == 2
    assert sum(1 for r in roots if r.agrees_with(S("2*t"))) == 1


def test_zero_roots_counted():
    # X^2 (X - 1): two roots at zero, one at 1
    p = SeriesPoly(N, [PuiseuxSeries.zero(N), PuiseuxSeries.zero(N), S("-1"), S("1")])
    segs = newton_polygon(p)
    assert sum(s.length for s in segs) == 1  # degree minus val-infinite roots
    roots = puiseux_roots(p, 6)
    assert len(roots) == 3
    assert sum(1 for r in roots if r.is_exact_zero) == 2


def test_truncated_double_root_fails_to_separate():
    # (X - t)^2 with the constant coefficient known only to O(t^8)
    c0 = S("t^2 + O(t^8)")
    p = SeriesPoly(N, [c0, S("-2*t"), S("1")])
    with pytest.raises(SeparationError):
        puiseux_roots(p, 6)


def test_branch_depth_cap():
    s = S("t + t^2 + t^3 + t^4 + t^5")
    p = xminus([s, s])
    cfg = SessionConfig(max_branch_depth=2)
    with pytest.raises(SeparationError):
        puiseux_roots(p, 10, cfg)
    # with room to descend, the double root comes out exactly, twice
    roots = puiseux_roots(p, 10)
    assert len(roots) == 2
    assert all(r.agrees_with(s, prec=10) for r in roots)


def test_ramified_newton_tail():
    # X^3 = t (1 + t): roots t^(1/3) (1 + t)^(1/3)
    p = SeriesPoly(N, [S("-t - t^2"), PuiseuxSeries.zero(N), PuiseuxSeries.zero(N), S("1")])
    roots = puiseux_roots(p, 4)
    assert roots.complete and len(roots) == 3
    for r in roots:
        assert r.val() == mpq(1, 3)
        cube = r * r * r
        assert cube.agrees_with(S("t + t^2"), prec=4)


def test_random_products_recovered():
    rng = random.Random(77)
    for trial in range(8):
        m = rng.randrange(2, 5)
        roots_in = []
        vals = rng.sample(range(0, 5), m)
        for v in vals:
            lead = rng.randrange(1, 5)
            tail = rand_series(rng, N, nterms=2, emin=v + 1, emax=v + 4, den=1, trunc=mpq(v + 6))
            roots_in.append(PuiseuxSeries.monomial(N, lead, v) + tail)
        p = xminus(roots_in)
        out = puiseux_roots(p, 6)
        assert out.complete and len(out) == m
        for r_in in roots_in:
            assert any(r.agrees_with(r_in, prec=5) for r in out), (trial, r_in)


def test_residual_certification_runs():
    p = xminus([S("t - 3*t^2"), S("-2*t + t^3")])
    roots = puiseux_roots(p, 9)
    for r in roots:
        resid = p.evaluate(r)
        assert resid.is_zero_to_prec or min(resid.terms) >= 7

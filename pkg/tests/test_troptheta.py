import math
from random import Random

import pytest
from gmpy2 import mpq

from tropcubic.errors import PrecisionError, StructureError
from tropcubic.series import INF, PuiseuxSeries, parse_series
from tropcubic.tate import (
    honeycomb_certificate,
    implicitize,
    normalize_params,
    parametrize_point,
)
from tropcubic.tropical import honeycomb_ratios, tropicalize_cubic
from tropcubic.troptheta import (
    TropPoint,
    TropThetaEnv,
    delta,
    retract,
    theta_gap_check,
    trop_parametrize,
    trop_point_coords,
    trop_theta_eval,
)

from paramsets import hexagonal_params, monomial_params, skew_params
from seriesgen import rand_unit


def _trop_theta_sum(A, X, Q):
    # direct minimum over the two factor families of the product
    N = int(abs((A - X) / Q)) + 3
    tot = sum(min(0, k * Q + X - A) for k in range(1, N + 1))
    tot += sum(min(0, k * Q + A - X) for k in range(N + 1))
    return tot


def test_trop_theta_closed_form():
    cases = [
        # (A, X) -> (value, slope) at Q = 6
        ((2, 2), (0, 0)),
        ((3, 0), (0, 0)),
        ((9, 0), (-3, 1)),
        ((0, 3), (-3, -1)),
        ((6, 0), (0, 1)),
    ]
    env = TropThetaEnv(6)
    for (A, X), (val, m) in cases:
        assert trop_theta_eval(env, A, X) == (val, m)
        assert trop_theta_eval(6, A, X) == (val, m)
    with pytest.raises(StructureError):
        TropThetaEnv(0)
    with pytest.raises(StructureError):
        trop_theta_eval(-1, 0, 0)


def test_trop_theta_matches_product_truncation():
    rng = Random(23)
    for _ in range(100):
        Q = mpq(rng.randint(1, 12), rng.randint(1, 4))
        A = mpq(rng.randint(-60, 60), rng.randint(1, 5))
        X = mpq(rng.randint(-60, 60), rng.randint(1, 5))
        val, m = trop_theta_eval(Q, A, X)
        assert val == _trop_theta_sum(A, X, Q)
        assert m * Q <= A - X < (m + 1) * Q
        assert val == mpq(m * m + m) * Q / 2 + m * (X - A)


def test_delta_examples():
    n = 12
    q = PuiseuxSeries.t_power(n, 6)
    s = parse_series("1 + t^(1/2) + O(t^(20))", n)
    assert delta(PuiseuxSeries.one(n), s, q) == mpq(1, 2)
    assert delta(s, PuiseuxSeries.one(n), q) == mpq(1, 2)
    assert delta(q, s, q) == mpq(1, 2)
    x = PuiseuxSeries.t_power(n, 3)
    assert delta(x, x, q) == INF
    with pytest.raises(PrecisionError):
        delta(x.truncate(9), x, q)
    with pytest.raises(StructureError):
        delta(x, s, q)


def test_delta_symmetry_random():
    rng = Random(5)
    n = 12
    q = PuiseuxSeries.t_power(n, 4)
    for _ in range(20):
        x = rand_unit(rng, n, 14)
        k = rng.randint(-2, 2)
        y = rand_unit(rng, n, 14) * q ** k
        d = delta(x, y, q)
        assert d == delta(y, x, q)
        assert d >= 0


def test_delta_attained_twice():
    # among the three pairwise deltas the minimum occurs twice
    rng = Random(9)
    n = 12
    q = PuiseuxSeries.t_power(n, 4)
    for _ in range(20):
        base = rand_unit(rng, n, 14)
        d1 = mpq(rng.randint(1, 8), 2)
        d2 = mpq(rng.randint(1, 8), 2)
        x = base * PuiseuxSeries(n, {mpq(0): 1, d1: 1}, trunc=14)
        y = base * PuiseuxSeries(n, {mpq(0): 1, d2: 2}, trunc=14)
        ds = sorted([delta(base, x, q), delta(base, y, q), delta(x, y, q)])
        assert ds[0] == ds[1]


def test_theta_gap_residues():
    rng = Random(31)
    n = 12
    t = PuiseuxSeries.t_power
    q = t(n, 6)
    a = rand_unit(rng, n, 20) * t(n, 2)
    for v in (mpq(0), mpq(1), mpq(7, 2), mpq(-3)):
        x = rand_unit(rng, n, 20) * t(n, v)
        assert theta_gap_check(a, x, q) == 0
    s = PuiseuxSeries(n, {mpq(0): 1, mpq(3, 4): 1}, trunc=20)
    for shift in (0, 2, -1):
        x = a * q ** shift * s
        assert delta(x, a, q) == mpq(3, 4)
        assert theta_gap_check(a, x, q) == 0
    assert theta_gap_check(a, 2 * a, q) == 0


def test_retract_positions():
    P = skew_params()
    n = P.n
    x = PuiseuxSeries(n, {mpq(1, 3): 3}, trunc=INF)
    assert retract(x, P) == TropPoint(mpq(1, 3))
    assert retract(P.q ** 3, P) == TropPoint(mpq(0))
    assert retract(P.q.inverse() ** 2 * x, P) == TropPoint(mpq(1, 3))


def test_retract_tentacles():
    P = hexagonal_params()
    n = P.n

    def pert(d):
        return PuiseuxSeries(n, {mpq(0): 1, mpq(d): 1}, trunc=20)

    # the (p1, p9) tentacle has segment length 1/2; depth beyond it
    # switches the image from the segment onto the p1 ray
    assert retract(P.p[0] * pert(mpq(1, 4)), P) == TropPoint(
        mpq(5), 1, mpq(1, 4), "segment")
    assert retract(P.p[0] * pert(mpq(1, 2)), P) == TropPoint(
        mpq(5), 1, mpq(1, 2), "segment")
    assert retract(P.p[0] * pert(mpq(3, 4)), P) == TropPoint(
        mpq(5), 1, mpq(3, 4), "ray")
    assert retract(P.p[8] * pert(mpq(3, 4)), P) == TropPoint(
        mpq(5), 9, mpq(3, 4), "ray")
    # p5 sits alone on its residue, so its tentacle is a bare ray
    assert retract(P.p[4] * pert(2), P) == TropPoint(mpq(2), 5, mpq(2), "ray")
    # unit scaling does not leave the hexagon
    assert retract(2 * P.p[1], P) == TropPoint(mpq(0))
    with pytest.raises(PrecisionError):
        retract(P.p[0], P)
    M = monomial_params()
    with pytest.raises(StructureError):
        retract(M.p[3] * M.q ** 2, M)


def test_trop_parametrize_hexagonal_two_routes():
    P = hexagonal_params()
    T2 = trop_parametrize(P)
    assert T2.hexagon.vertices == (
        (1, -1), (2, 0), (2, 1), (1, 1), (0, 0), (0, -1))
    assert T2.hexagon.lengths == (1,) * 6
    assert T2.hexagon.total == P.q.val()
    assert tuple(r.segment_length for r in T2.tentacles) == (
        mpq(1, 2), 0, mpq(1, 2), mpq(1, 2), 0, mpq(1, 2),
        mpq(1, 2), 0, mpq(1, 2))
    T1 = tropicalize_cubic(implicitize(P, prec=12))
    assert T1 == T2


def test_trop_parametrize_skew_and_inverse():
    P = skew_params()
    cert = honeycomb_certificate(P)
    assert tuple(cert.r) == (
        0, mpq(1, 2), mpq(3, 2), mpq(3, 2), 3, mpq(7, 2), mpq(7, 2),
        mpq(9, 2), 0)
    T2 = trop_parametrize(P)
    assert T2.hexagon.lengths == (
        mpq(1, 2), 1, mpq(3, 2), mpq(1, 2), 1, mpq(3, 2))
    assert T2.hexagon.total == 6
    C = implicitize(P, prec=12)
    rat = honeycomb_ratios(C)
    assert rat.kind == "honeycomb"
    assert rat.hexagon_vals == T2.hexagon.lengths
    assert rat.tentacle_vals == (mpq(1, 2),) * 3
    assert tropicalize_cubic(C) == T2
    # inverting every marked point flips the cycle orientation but
    # lands on the same curve
    Pi = normalize_params(P, "invert_p")
    ci = honeycomb_certificate(Pi)
    assert ci.eps == -1
    assert tuple(ci.r) == tuple(cert.r)
    assert trop_parametrize(Pi) == T2


def test_trop_parametrize_degenerate_pair():
    n = 12
    t = PuiseuxSeries.t_power
    s = PuiseuxSeries(n, {mpq(0): 1, mpq(1, 2): 1}, trunc=26)
    si = s.inverse()
    # p9 rescaled onto p1's unit class: their delta vanishes, so the
    # tentacle segment collapses and the dual corner cell merges
    p = [t(n, -1) * si, t(n, mpq(-1, 2)), t(n, mpq(1, 2)) * s,
         t(n, mpq(1, 2)) * si, t(n, 2), t(n, mpq(-7, 2)) * s,
         t(n, mpq(5, 2)) * si * mpq(1, 2), t(n, mpq(-5, 2)),
         t(n, -1) * s * 2]
    from tropcubic.tate import ThetaParams
    P = ThetaParams(t(n, 6), 1, 1, 1, p)
    assert delta(P.p[8], P.p[0], P.q) == 0
    with pytest.raises(StructureError, match="degenerates"):
        trop_parametrize(P)
    assert tropicalize_cubic(implicitize(P, prec=10)).hexagon is None


def test_retract_matches_parametrization():
    P = skew_params()
    n = P.n
    cert = honeycomb_certificate(P)
    curve = trop_parametrize(P)

    def pert(d):
        return PuiseuxSeries(n, {mpq(0): 1, mpq(d): 1}, trunc=20)

    rng = Random(41)
    t = PuiseuxSeries.t_power
    cases = [rand_unit(rng, n, 16) * t(n, v)
             for v in (mpq(1, 3), mpq(-2, 3), mpq(13, 6))]
    cases += [P.p[0] * pert(mpq(1, 4)),   # on the bounded segment
              P.p[0] * pert(mpq(7, 8)),   # past the node, on the ray
              P.p[4] * pert(mpq(5, 4))]   # single residue, bare ray
    for x in cases:
        f, g, h = parametrize_point(P, x, prec=10)
        direct = (f.val() - h.val(), g.val() - h.val())
        pt = retract(x, P)
        assert trop_point_coords(curve, cert, pt) == direct

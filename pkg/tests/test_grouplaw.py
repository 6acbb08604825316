from random import Random

import pytest
from gmpy2 import mpq

from tropcubic.cyclotomic import CycloRat
from tropcubic.errors import PrecisionError, StructureError
from tropcubic.series import INF, PuiseuxSeries
from tropcubic.tate import ThetaParams, honeycomb_certificate
from tropcubic.tropical import Hexagon, TropicalCubicCurve
from tropcubic.troptheta import TropPoint, retract, trop_parametrize
from tropcubic.grouplaw import (
    FiberDescription,
    HexPoint,
    fiber,
    hex_add,
    hex_negate,
    inflection_retractions,
)

from paramsets import hexagonal_params, skew_params
from seriesgen import rand_unit


def _unit(*pairs):
    terms = {mpq(0): 1}
    for e, c in pairs:
        terms[mpq(e)] = c
    return PuiseuxSeries(12, terms)


def _third(P, u, v):
    """Retraction of the third product-one coordinate (uv)^-1."""
    w = u * v
    if w.trunc == INF:
        w = w.truncate(w.val() + 30)
    return retract(w.inverse(), P)


def test_hexpoint_validation():
    with pytest.raises(StructureError):
        HexPoint(mpq(1), mpq(0))
    with pytest.raises(StructureError):
        HexPoint(mpq(6), mpq(6))
    with pytest.raises(StructureError):
        HexPoint(mpq(-1), mpq(6))


def test_hex_add_identity_and_translation():
    Q = mpq(6)
    O = HexPoint(mpq(2), Q)
    assert hex_add(O, O, O) == O
    O0 = HexPoint(mpq(0), Q)
    assert hex_add(HexPoint(5, Q), HexPoint(3, Q), O0) == HexPoint(2, Q)
    assert hex_negate(HexPoint(5, Q), O0) == HexPoint(1, Q)
    assert hex_negate(O, O) == O
    # tentacle points contribute their retraction value only
    U = TropPoint(1, 3, mpq(5), "ray")
    V = TropPoint(3, 6, mpq(1, 2), "ray")
    assert hex_add(U, V, O) == hex_add(TropPoint(1), TropPoint(3), O)


def test_hex_add_matches_fiber_position():
    P = hexagonal_params()
    Q = mpq(6)
    O0 = HexPoint(mpq(0), Q)
    for a, b in [(mpq(1, 3), mpq(2)), (mpq(5), mpq(5)), (mpq(0), mpq(11, 2))]:
        f = fiber(TropPoint(a), TropPoint(b), P)
        s = hex_negate(hex_add(HexPoint(a, Q), HexPoint(b, Q), O0), O0)
        assert f.position == s.position


def test_inflection_symmetric_rays():
    C = trop_parametrize(hexagonal_params())
    loci = inflection_retractions(C)
    assert [l.position for l in loci] == [1, 3, 5]
    assert [l.anchor for l in loci] == [2, 4, 6]
    assert all(l.on_ray and l.multiplicity == 3 for l in loci)


def test_inflection_offset_and_closing():
    hx = Hexagon(((0, 0),) * 6, (mpq(2), mpq(1), mpq(1), mpq(2), mpq(1), mpq(1)))
    C = TropicalCubicCurve((), (), (), hx, None, ())
    loci = inflection_retractions(C)
    # l1 = 2, l2 = 1: offset (l2 - l1)/3 = -1/3, so 1/3 short of v2 on e1
    assert loci[0].offset == mpq(-1, 3)
    assert loci[0].position == hx.arc_positions()[1] - mpq(1, 3)
    assert not loci[0].on_ray
    Q = hx.total
    for a, b in ((0, 1), (1, 2)):
        assert (loci[b].position - loci[a].position) % Q == Q / 3

    bad = Hexagon(((0, 0),) * 6, (mpq(2), mpq(1), mpq(1), mpq(1), mpq(2), mpq(1)))
    with pytest.raises(StructureError):
        inflection_retractions(TropicalCubicCurve((), (), (), bad, None, ()))
    with pytest.raises(StructureError):
        inflection_retractions(TropicalCubicCurve((), (), (), None, None, ()))


def test_inflection_skew():
    loci = inflection_retractions(trop_parametrize(skew_params()))
    assert [l.position for l in loci] == [mpq(2, 3), mpq(8, 3), mpq(14, 3)]
    assert not any(l.on_ray for l in loci)


def test_three_torsion_retracts_to_inflection_positions():
    # omega^i q^{j/3} has valuation in {0, Q/3, 2Q/3}; its retraction,
    # read through the certificate chart, is an inflection position
    P = hexagonal_params()
    cert = honeycomb_certificate(P)
    infl = sorted(l.position for l in inflection_retractions(trop_parametrize(P)))
    w3 = CycloRat.zeta_pow(12, 4)
    got = set()
    for i in (1, 2):
        for j in (0, 1, 2):
            x = PuiseuxSeries.monomial(12, w3 ** i, mpq(2 * j))
            pt = retract(x, P)
            assert pt.branch == "hexagon" and pt.distance == 0
            assert pt.position == 2 * j
            got.add(cert.position(pt.position))
    assert sorted(got) == infl
    # the rational torsion point q^{1/3} coincides with the marked point p5
    with pytest.raises(StructureError):
        retract(PuiseuxSeries.t_power(12, 2), P)


def test_fiber_single_point_across_split():
    # both inputs deeper than the tentacle split: the product is pinned
    # at the split depth on the opposite single tentacle
    P = hexagonal_params()
    U = TropPoint(1, 3, mpq(3, 4), "ray")
    V = TropPoint(3, 6, mpq(7, 8), "ray")
    f = fiber(U, V, P)
    assert f.kind == "single_point"
    assert f.point == TropPoint(2, 5, mpq(1, 2), "ray")
    u = P.p[2] * _unit((mpq(3, 4), 1))
    v = P.p[5] * _unit((mpq(7, 8), 2))
    assert retract(u, P) == U and retract(v, P) == V
    assert _third(P, u, v) == f.point
    assert f.contains(_third(P, u * P.q, v)) and not f.contains(TropPoint(2))


def test_fiber_subray_on_tie():
    P = hexagonal_params()
    d = mpq(1, 4)
    f = fiber(TropPoint(5, 1, d, "ray"), TropPoint(1, 3, d, "ray"), P)
    assert (f.kind, f.tentacle, f.start) == ("subray", 2, d)
    u = P.p[0] * _unit((d, 1))
    v = P.p[2] * _unit((d, 1))
    assert _third(P, u, v) == TropPoint(0, 2, d, "ray")
    # opposite tail coefficients cancel and push the product deeper
    deep = _third(P, u, P.p[2] * _unit((d, -1)))
    assert deep.distance > d and f.contains(deep)
    assert not f.contains(TropPoint(0, 2, mpq(1, 8), "ray"))
    assert not f.contains(TropPoint(0))


def test_fiber_subray_from_node():
    # inputs on the p1 and p2 rays at depth 1 > beta: the fiber leaves
    # the p3/p4 node along the p3 ray only
    P = hexagonal_params()
    f = fiber(TropPoint(5, 1, mpq(1), "ray"), TropPoint(0, 2, mpq(1), "ray"), P)
    assert (f.kind, f.tentacle, f.start) == ("subray", 3, mpq(1))
    u = P.p[0] * _unit((mpq(1), 1))
    v = P.p[1] * _unit((mpq(1), 1))
    pt = _third(P, u, v)
    assert pt.tentacle == 3 and pt.branch == "ray" and pt.distance >= 1
    assert f.contains(pt)
    assert not f.contains(TropPoint(1, 4, mpq(2), "ray"))
    assert not f.contains(TropPoint(1, 3, mpq(1, 2), "ray"))


def test_fiber_subray_closed_at_node():
    # U exactly at the obstruction depth on the lone p2 ray, V deeper
    # on the p1 ray: the segment branch pins at the node, the p3 ray
    # dies, and the fiber is the closed subray leaving the node along p4
    P = hexagonal_params()
    U = TropPoint(0, 2, mpq(1, 2), "ray")
    V = TropPoint(5, 1, mpq(1), "ray")
    f = fiber(U, V, P)
    assert (f.kind, f.tentacle, f.start, f.node) == \
        ("subray", 4, mpq(1, 2), mpq(1, 2))
    assert f.pair == (3, 4)
    node = TropPoint(1, 3, mpq(1, 2), "segment")
    assert f.contains(node)
    assert f.contains(TropPoint(1, 4, mpq(2), "ray"))
    assert not f.contains(TropPoint(1, 3, mpq(1), "ray"))
    assert not f.contains(TropPoint(1, 3, mpq(1, 4), "segment"))
    u = P.p[1] * _unit((mpq(1, 2), 1))
    v = P.p[0] * _unit((mpq(1), 1))
    assert retract(u, P) == U and retract(v, P) == V
    # a generic pair of lifts meets the node itself
    assert _third(P, u, v) == node
    # cancelling the group obstruction inside the u tail pushes the
    # third point out along the open part of the subray
    u = (P.p[0] * P.p[1] * P.p[3]).inverse() * P.p[1]
    assert retract(u, P) == U
    assert _third(P, u, v) == TropPoint(1, 4, mpq(1), "ray")


def test_fiber_pinned_on_segment():
    # unequal depths with a finite obstruction: pinned at the shallower
    # depth, which lies on the shared segment
    P = hexagonal_params()
    f = fiber(TropPoint(5, 9, mpq(3, 4), "ray"), TropPoint(0, 2, mpq(1, 3), "ray"), P)
    assert f.kind == "single_point"
    assert f.point == TropPoint(1, 3, mpq(1, 3), "segment")
    u = P.p[8] * _unit((mpq(3, 4), 1))
    v = P.p[1] * _unit((mpq(1, 3), 5))
    assert _third(P, u, v) == f.point


def test_fiber_input_at_node():
    # V at the p3/p4 node: its depth is pinned against both marked
    # points, which kills the cancellation that a plain segment point
    # would allow; the fiber is the single point opposite at depth beta
    P = hexagonal_params()
    U = TropPoint(5, 9, mpq(3, 4), "ray")
    V = TropPoint(1, 3, mpq(1, 2), "segment")
    f = fiber(U, V, P)
    assert f.kind == "single_point"
    assert f.point == TropPoint(0, 2, mpq(1, 2), "ray")
    u = P.p[8] * _unit((mpq(3, 4), 1))
    for cv in (1, 3, -5):
        v = P.p[2] * _unit((mpq(1, 2), cv))
        assert retract(v, P) == V
        assert _third(P, u, v) == f.point


def test_fiber_tie_on_segments():
    P = hexagonal_params()
    d = mpq(1, 4)
    f = fiber(TropPoint(5, 1, d, "segment"), TropPoint(1, 3, d, "segment"), P)
    assert (f.kind, f.tentacle, f.start) == ("subray", 2, d)
    u = P.p[0] * _unit((d, 1))
    v = P.p[2] * _unit((d, 2))
    assert f.contains(_third(P, u, v))


def test_fiber_whole_tree_and_free_points():
    P = hexagonal_params()
    # vertex inputs constrain nothing beyond the position
    f = fiber(TropPoint(5), TropPoint(0), P)
    assert (f.kind, f.pair, f.start, f.node) == \
        ("segment_and_rays", (3, 4), mpq(0), mpq(1, 2))
    assert f.contains(TropPoint(1))
    assert f.contains(TropPoint(1, 3, mpq(1, 3), "segment"))
    assert f.contains(TropPoint(1, 4, mpq(7), "ray"))
    assert not f.contains(TropPoint(1, 4, mpq(1, 3), "ray"))
    u = P.p[0] * PuiseuxSeries.scalar(12, 2)
    v = P.p[1] * PuiseuxSeries.scalar(12, 3)
    assert f.contains(_third(P, u, v))
    # off-residue positions are free; the fiber shape only depends on
    # where the forced position lands
    f = fiber(TropPoint(mpq(1, 4)), TropPoint(mpq(19, 4)), P)
    assert f.kind == "segment_and_rays" and f.start == 0
    f = fiber(TropPoint(mpq(17, 4)), TropPoint(mpq(7, 4)), P)
    assert (f.kind, f.tentacle, f.start) == ("subray", 2, mpq(0))
    f = fiber(TropPoint(mpq(1, 4)), TropPoint(mpq(1, 4)), P)
    assert f.kind == "single_point"
    assert f.point == TropPoint(mpq(11, 2))
    t = PuiseuxSeries.t_power
    assert _third(P, t(12, mpq(1, 4)) * _unit((mpq(1, 7), 1)),
                  t(12, mpq(1, 4)) * _unit((mpq(3, 7), 2))) == f.point


def test_fiber_finite_obstruction_above_split():
    # a unit factor on p5/p6 moves one obstruction depth to 3/2 while
    # the other stays at beta; the fiber through the p3/p4 tree then
    # depends on how the input depths compare to both levels
    H = hexagonal_params()
    g = PuiseuxSeries(12, {mpq(0): 1, mpq(3, 2): 1})
    p = list(H.p)
    p[4] = p[4] * g.truncate(26).inverse()
    p[5] = p[5] * g
    P = ThetaParams(H.q, H.a, H.b, H.c, p)
    cases = [
        (mpq(1), mpq(1), ("subray", 3, mpq(1))),
        (mpq(7, 4), mpq(7, 4), ("single_point", 3, mpq(3, 2))),
        (mpq(1), mpq(7, 4), ("single_point", 3, mpq(1))),
    ]
    for du, dv, (kind, tent, d) in cases:
        f = fiber(TropPoint(3, 7, du, "ray"), TropPoint(2, 5, dv, "ray"), P)
        assert f.kind == kind
        if kind == "subray":
            assert (f.tentacle, f.start) == (tent, d)
        else:
            assert f.point == TropPoint(1, tent, d, "ray")
        u = P.p[6] * _unit((du, 1))
        v = P.p[4] * _unit((dv, 1))
        assert f.contains(_third(P, u, v))
    # cancellation on the tie stops exactly at the finite obstruction
    u = P.p[6] * _unit((mpq(1), 1))
    v = P.p[4] * _unit((mpq(1), -1))
    assert _third(P, u, v) == TropPoint(1, 3, mpq(3, 2), "ray")


def test_fiber_random_containment():
    rng = Random(41)
    for P in (hexagonal_params(), skew_params()):
        positions = sorted({p.val() % 6 for p in P.p})
        for _ in range(30):
            lifts = []
            for _ in range(2):
                if rng.random() < 2 / 3:
                    x = P.p[rng.randrange(9)] * rand_unit(rng, 12, 8, nterms=2, den=4)
                else:
                    e = mpq(rng.randrange(1, 24), 4)
                    if e % 6 in positions:
                        e += mpq(1, 8)
                    x = PuiseuxSeries.t_power(12, e) * rand_unit(rng, 12, 8)
                x = x * P.q ** rng.randrange(-1, 2)
                lifts.append(x)
            u, v = lifts
            f = fiber(retract(u, P), retract(v, P), P)
            assert f.kind in ("single_point", "subray", "segment_and_rays")
            if f.kind == "single_point":
                assert f.point is not None and f.tentacle is None
            elif f.kind == "subray":
                assert f.tentacle is not None and f.start is not None
            else:
                assert f.pair is not None and f.start is not None
                assert f.node is not None
            assert f.contains(_third(P, u, v))


def test_fiber_validation_errors():
    P = hexagonal_params()
    with pytest.raises(StructureError):
        # claims a tentacle while sitting off every marked residue
        fiber(TropPoint(mpq(1, 2), 3, mpq(1), "ray"), TropPoint(mpq(11, 2)), P)
    with pytest.raises(StructureError):
        # p5 does not live at position 0
        fiber(TropPoint(0, 5, mpq(1), "ray"), TropPoint(0), P)
    # depths at the truncation order leave the obstruction unresolved
    with pytest.raises(PrecisionError):
        fiber(TropPoint(5, 1, mpq(30), "ray"), TropPoint(1, 3, mpq(30), "ray"), P)


def test_fiber_degenerate_pair_rejected():
    # p4 = 2 p3 passes the parameter checks (the ratio is no q-power)
    # but the tentacle segment between them has length zero
    H = hexagonal_params()
    p = list(H.p)
    p[3] = p[2] * PuiseuxSeries.scalar(12, 2)
    p[4] = H.p[4] * H.p[3] * H.p[2].inverse() * PuiseuxSeries.scalar(12, mpq(1, 2))
    P = ThetaParams(H.q, H.a, H.b, H.c, p)
    with pytest.raises(StructureError):
        fiber(TropPoint(5), TropPoint(0), P)

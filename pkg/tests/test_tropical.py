import random

import pytest
from gmpy2 import mpq

from tropcubic.cubics import Cubic, j_invariant
from tropcubic.errors import PrecisionError
from tropcubic.series import INF, PuiseuxSeries, parse_series
from tropcubic.tropical import (
    CENTER_TRIANGLES,
    honeycomb_ratios,
    tropicalize_cubic,
)

N = 12


def S(text):
    return parse_series(text, N)


def symmetric(a, b):
    return Cubic.symmetric_family(N, a, b)


def test_symmetric_is_symmetric_honeycomb():
    cls = honeycomb_ratios(symmetric(S("t^3"), S("t")))
    assert cls.kind == "symmetric_honeycomb"
    assert cls.hexagon_vals == (1,) * 6
    assert cls.tentacle_vals == (1,) * 3


def test_shallow_corner_is_not_honeycomb():
    cls = honeycomb_ratios(symmetric(S("t"), S("t")))
    assert cls.kind == "not_honeycomb"
    assert "nonpositive" in cls.reason


def test_dense_constant_cubic_is_not_honeycomb():
    f = Cubic(N, {e: 1 for e in Cubic.symmetric_family(N, 1, 1).coeffs})
    cls = honeycomb_ratios(f)
    assert cls.kind == "not_honeycomb"


def test_exact_zero_corner_still_symmetric():
    cls = honeycomb_ratios(symmetric(PuiseuxSeries.zero(N), S("t")))
    assert cls.kind == "symmetric_honeycomb"
    assert cls.tentacle_vals == (INF,) * 3


def test_zero_to_prec_coefficient_rejected():
    cls = honeycomb_ratios(symmetric(S("O(t^9)"), S("t")))
    assert cls.kind == "not_honeycomb"
    assert "zero to O" in cls.reason


def test_unequal_lengths_classified_plain_honeycomb():
    # edge heights chosen so the six hexagon ratios are positive but
    # not all equal
    f = Cubic(N, {
        (3, 0, 0): S("t^9"), (0, 3, 0): S("t^9"), (0, 0, 3): S("t^9"),
        (2, 1, 0): S("t^2"), (2, 0, 1): S("t^2"),
        (1, 2, 0): S("t^2"), (0, 2, 1): S("t"),
        (1, 0, 2): S("t^2"), (0, 1, 2): S("t"),
        (1, 1, 1): 1,
    })
    cls = honeycomb_ratios(f)
    assert cls.kind == "honeycomb"
    assert len(set(cls.hexagon_vals)) > 1


def test_tropicalize_symmetric_structure():
    curve = tropicalize_cubic(symmetric(S("t^3"), S("t")))
    assert len(curve.cells) == 9
    hexagon = curve.hexagon
    assert hexagon is not None
    assert hexagon.vertices == (
        (0, -1), (1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1)
    )
    assert hexagon.lengths == (1,) * 6
    assert hexagon.total == 6
    # nine rays, three in each coordinate-line direction
    dirs = sorted(r.direction for r in curve.rays)
    assert dirs == sorted(
        [(1, 0)] * 3 + [(0, 1)] * 3 + [(-1, -1)] * 3
    )
    tent = {t.index: t for t in curve.tentacles}
    assert tent[9].node == (0, -2) and tent[1].node == (0, -2)
    assert tent[3].node == (2, 2) and tent[4].node == (2, 2)
    assert tent[6].node == (-2, 0) and tent[7].node == (-2, 0)
    for i in (1, 3, 4, 6, 7, 9):
        assert tent[i].segment_length == 1
    for i in (2, 5, 8):
        assert tent[i].segment_length == 0
    assert tent[2].attach == 2 and tent[5].attach == 4 and tent[8].attach == 6


def test_tropicalize_zero_corner_hexagon_only():
    curve = tropicalize_cubic(symmetric(PuiseuxSeries.zero(N), S("t")))
    assert curve.hexagon is not None
    assert curve.hexagon.lengths == (1,) * 6
    assert len(curve.rays) == 6
    tent = {t.index: t for t in curve.tentacles}
    assert tent[1].segment_length == INF
    assert tent[1].direction == (0, -1)
    assert tent[4].direction == (1, 1)
    assert tent[7].direction == (-1, 0)
    assert tent[2].segment_length == 0


def test_tropicalize_dense_constant():
    f = Cubic(N, {e: 1 for e in Cubic.symmetric_family(N, 1, 1).coeffs})
    curve = tropicalize_cubic(f)
    assert curve.hexagon is None
    assert len(curve.vertices) == 1
    assert curve.vertices[0] == (0, 0)
    assert len(curve.bounded_edges) == 0
    assert sorted((r.direction, r.multiplicity) for r in curve.rays) == [
        ((-1, -1), 3), ((0, 1), 3), ((1, 0), 3)
    ]


def test_tropicalize_rejects_zero_to_prec():
    with pytest.raises(PrecisionError):
        tropicalize_cubic(symmetric(S("O(t^9)"), S("t")))


def _random_honeycomb(rng, trunc=120):
    """Random honeycomb with monomial coefficients, truncated so the
    j-invariant quotient stays computable."""
    while True:
        h = {
            (1, 1, 1): mpq(0),
            (2, 1, 0): mpq(rng.randrange(2, 9), 2),
            (2, 0, 1): mpq(rng.randrange(2, 9), 2),
            (1, 2, 0): mpq(rng.randrange(2, 9), 2),
            (0, 2, 1): mpq(rng.randrange(2, 9), 2),
            (1, 0, 2): mpq(rng.randrange(2, 9), 2),
            (0, 1, 2): mpq(rng.randrange(2, 9), 2),
        }
        for e in ((3, 0, 0), (0, 3, 0), (0, 0, 3)):
            h[e] = mpq(rng.randrange(9, 14))
        f = Cubic(N, {
            e: PuiseuxSeries(N, {v: rng.choice([1, 2, 3, -1])}, trunc)
            for e, v in h.items()
        })
        cls = honeycomb_ratios(f)
        if cls.kind in ("honeycomb", "symmetric_honeycomb"):
            return f, cls


def test_random_honeycomb_lengths_match_ratios():
    rng = random.Random(5)
    for _ in range(6):
        f, cls = _random_honeycomb(rng)
        curve = tropicalize_cubic(f)
        assert curve.hexagon is not None
        assert curve.hexagon.lengths == cls.hexagon_vals
        tent = {t.index: t for t in curve.tentacles}
        assert (
            tent[1].segment_length,
            tent[3].segment_length,
            tent[6].segment_length,
        ) == cls.tentacle_vals


def test_random_honeycomb_length_equals_minus_val_j():
    rng = random.Random(11)
    for _ in range(4):
        f, _ = _random_honeycomb(rng)
        curve = tropicalize_cubic(f)
        assert curve.hexagon.total == -j_invariant(f).val()


def test_hexagon_cycle_iff_honeycomb():
    rng = random.Random(23)
    samples = []
    for _ in range(40):
        h = {e: mpq(rng.randrange(0, 7)) for e in
             Cubic.symmetric_family(N, 1, 1).coeffs}
        samples.append(Cubic(N, {
            e: PuiseuxSeries(N, {v: 1}, INF) for e, v in h.items()
        }))
    samples += [_random_honeycomb(rng)[0] for _ in range(3)]
    seen = {True: 0, False: 0}
    for f in samples:
        cls = honeycomb_ratios(f)
        curve = tropicalize_cubic(f)
        has_cycle = all(tri in curve.cells for tri in CENTER_TRIANGLES)
        assert has_cycle == (cls.kind != "not_honeycomb")
        seen[has_cycle] += 1
    assert seen[True] and seen[False]


def test_closure_relations():
    rng = random.Random(7)
    for _ in range(4):
        f, cls = _random_honeycomb(rng)
        l = honeycomb_ratios(f).hexagon_vals
        assert l[0] + l[1] == l[3] + l[4]
        assert l[1] + l[2] == l[4] + l[5]

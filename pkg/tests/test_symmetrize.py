import random
from itertools import combinations

import pytest
from gmpy2 import mpq

from tropcubic.config import SessionConfig
from tropcubic.cubics import Cubic, j_invariant
from tropcubic.errors import AlgebraicError, StructureError
from tropcubic.linalg import det3, is_zero_series, matvec3, proj_equal
from tropcubic.series import PuiseuxSeries, parse_series
from tropcubic.symmetrize import (
    COSET_REPS,
    SYZYGETIC_TRIPLES,
    TAU,
    inflection_matrix,
    inflection_points,
    omega_of,
    rational_branch,
    solve_symmetric_b,
    symmetrize_pipeline,
    syzygetic_triangles,
)

N = 12


def S(text):
    return parse_series(text, N)


def zeroish(s):
    return s.is_exact_zero or s.is_zero_to_prec


FROZEN_B = (
    "t + t^2 - 5*t^3 - 7*t^4 + 30*t^5 + 43*t^6 - 60*t^7 - 15*t^8 - 731*t^9"
    " - 1858*t^10 + 11676*t^11 + 22091*t^12 - 30612*t^13"
)


def test_principal_branch_expansion():
    cfg = SessionConfig(prec=mpq(14))
    roots = solve_symmetric_b(S("t^(-6)"), None, cfg)
    assert len(roots) == 6
    b0 = rational_branch(roots)
    assert b0.agrees_with(S(FROZEN_B), prec=mpq(14))
    # leading coefficients are the six sixth roots of unity
    leads = {r.leading_coeff() for r in roots}
    assert len(leads) == 6
    for c in leads:
        assert (c**6).rational_value() == 1


def test_solver_small_corner():
    cfg = SessionConfig(prec=mpq(5))
    roots = solve_symmetric_b(S("t^(-6)"), S("t^7"), cfg)
    b0 = rational_branch(roots)
    assert b0.agrees_with(S(FROZEN_B), prec=mpq(4))


def test_solver_valuation_scales():
    cfg = SessionConfig(prec=mpq(7))
    roots = solve_symmetric_b(S("t^(-12)"), None, cfg)
    assert {r.val() for r in roots} == {mpq(2)}


def test_solver_preconditions():
    cfg = SessionConfig(prec=mpq(5))
    with pytest.raises(StructureError):
        solve_symmetric_b(S("t^2"), None, cfg)
    with pytest.raises(StructureError):
        solve_symmetric_b(S("t^(-6)"), S("t^3"), cfg)


def test_solved_b_matches_target_j():
    # j of the returned symmetric model equals minus the requested value
    cfg = SessionConfig(prec=mpq(12))
    iota = S("t^(-6) + 3*t^(-2) + O(t^6)")
    roots = solve_symmetric_b(iota, None, cfg)
    b0 = rational_branch(roots)
    g = Cubic.symmetric_family(N, PuiseuxSeries.zero(N), b0)
    diff = j_invariant(g) + iota
    assert zeroish(diff)


def test_inflection_matrix_on_curve():
    b = mpq(28, 75)  # pencil parameter 27, cube root 3
    g = Cubic.symmetric_family(N, 0, b)
    om = omega_of(PuiseuxSeries.zero(N), PuiseuxSeries.scalar(N, b))
    assert om.coeff(0).rational_value() == 27
    rows = inflection_matrix(om)
    h = g.hessian_cubic()
    for p in rows:
        assert zeroish(g.evaluate(p))
        assert zeroish(h.evaluate(p))


def test_inflection_matrix_minors():
    b = mpq(28, 75)
    om = omega_of(PuiseuxSeries.zero(N), PuiseuxSeries.scalar(N, mpq(28, 75)))
    rows = inflection_matrix(om)
    vanish = set()
    for combo in combinations(range(9), 3):
        if is_zero_series(det3([rows[i] for i in combo])):
            vanish.add(frozenset(i + 1 for i in combo))
    assert vanish == set(SYZYGETIC_TRIPLES)


def test_syzygetic_triangles_rational():
    cfg = SessionConfig(prec=mpq(12))
    g = Cubic.symmetric_family(N, 0, mpq(28, 75))
    res = syzygetic_triangles(g, cfg)
    assert len(res.members) == 4
    assert not res.unrepresentable
    for member in res.members:
        # three lines, each projectively distinct
        assert len(member.lines) == 3
        for l1, l2 in combinations(member.lines, 2):
            assert not proj_equal(l1, l2)


def test_inflection_points_match_matrix_route():
    cfg = SessionConfig(prec=mpq(12))
    g = Cubic.symmetric_family(N, 0, mpq(28, 75))
    om = omega_of(PuiseuxSeries.zero(N), PuiseuxSeries.scalar(N, mpq(28, 75)))
    rows = inflection_matrix(om)
    pts = inflection_points(g, cfg)
    assert len(pts) == 9
    for p in pts:
        assert any(proj_equal(p, r) for r in rows)
    # labeling reproduces the reference incidence
    vanish = set()
    for combo in combinations(range(9), 3):
        if is_zero_series(det3([pts[i] for i in combo])):
            vanish.add(frozenset(i + 1 for i in combo))
    assert vanish == set(SYZYGETIC_TRIPLES)


def test_coset_reps_parse():
    assert len(COSET_REPS) == 12
    assert COSET_REPS[0] == (1, 2, 3, 4, 5, 6, 7, 8, 9)
    assert COSET_REPS[1] == (1, 2, 3, 5, 6, 4, 9, 7, 8)  # (456)(987)
    assert TAU == (1, 2, 3, 7, 8, 9, 4, 5, 6)
    for p in COSET_REPS:
        assert sorted(p) == list(range(1, 10))


def test_pipeline_recovers_transformed_symmetric():
    cfg = SessionConfig(prec=mpq(10))
    b = S("t + t^2 + O(t^14)")
    g0 = Cubic.symmetric_family(N, PuiseuxSeries.zero(N), b)
    m = [[1, 1, 0], [0, 1, 1], [1, 0, 2]]
    f = g0.transform(m)
    res = symmetrize_pipeline(f, cfg)
    assert res.tried <= 13
    assert res.b.agrees_with(b, prec=mpq(8))
    assert zeroish(j_invariant(f) - j_invariant(res.cubic))
    # the matrix actually carries f onto the model up to the reported scale
    fm = f.transform(res.matrix)
    for e, c in fm.coeffs.items():
        assert zeroish(c - res.scale * res.cubic.coeff(e))


def test_pipeline_random_transforms():
    rng = random.Random(13)
    cfg = SessionConfig(prec=mpq(9))
    b = S("t - 2*t^2 + O(t^13)")
    g0 = Cubic.symmetric_family(N, PuiseuxSeries.zero(N), b)
    done = 0
    while done < 2:
        m = [[rng.randrange(-2, 3) for _ in range(3)] for _ in range(3)]
        det = (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )
        if det == 0:
            continue
        f = g0.transform(m)
        res = symmetrize_pipeline(f, cfg)
        assert res.tried <= 13
        assert res.b.agrees_with(b, prec=mpq(7))
        done += 1

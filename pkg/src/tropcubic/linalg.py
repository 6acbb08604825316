"""Small exact linear algebra over Puiseux series: 3x3 determinants,
adjugates, and projective frames from four-point correspondences."""

from __future__ import annotations

from .errors import AlgebraicError, PrecisionError
from .series import PuiseuxSeries


def det2(a, b, c, d):
    return a * d - b * c


def det3(m):
    return (
        m[0][0] * det2(m[1][1], m[1][2], m[2][1], m[2][2])
        - m[0][1] * det2(m[1][0], m[1][2], m[2][0], m[2][2])
        + m[0][2] * det2(m[1][0], m[1][1], m[2][0], m[2][1])
    )


def adjugate3(m):
    """adj(m) with m * adj(m) = det(m) * I."""
    cof = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            rows = [r for r in range(3) if r != i]
            cols = [c for c in range(3) if c != j]
            minor = det2(
                m[rows[0]][cols[0]], m[rows[0]][cols[1]],
                m[rows[1]][cols[0]], m[rows[1]][cols[1]],
            )
            cof[i][j] = minor if (i + j) % 2 == 0 else -minor
    return [[cof[j][i] for j in range(3)] for i in range(3)]


def matmul3(a, b):
    return [[sum_series(a[i][k] * b[k][j] for k in range(3)) for j in range(3)] for i in range(3)]


def matvec3(m, v):
    return tuple(sum_series(m[i][k] * v[k] for k in range(3)) for i in range(3))


def sum_series(it):
    acc = None
    for x in it:
        acc = x if acc is None else acc + x
    return acc


def cross(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def is_zero_series(s: PuiseuxSeries) -> bool:
    return s.is_exact_zero or s.is_zero_to_prec


def proj_equal(p, q) -> bool:
    """Projective equality of 3-vectors, decided to available precision."""
    for i in range(3):
        for j in range(i + 1, 3):
            if not is_zero_series(p[i] * q[j] - p[j] * q[i]):
                return False
    return True


def projective_from_correspondence(src, dst):
    """The 3x3 series matrix M (up to scale) with M * src_i ~ dst_i for
    four points in general position.

    Built in the standard way: for each side, scale the columns of the
    matrix of the first three points so that the column sum is the
    fourth; the frame matrix maps the unit points to the four.  The
    result is F_dst * adj(F_src)."""
    def frame(pts):
        p1, p2, p3, p4 = pts
        cols = [[p1[i], p2[i], p3[i]] for i in range(3)]
        adj = adjugate3(cols)
        lam = matvec3(adj, p4)
        for s in lam:
            if is_zero_series(s):
                raise AlgebraicError("frame points are not in general position")
        return [[cols[i][j] * lam[j] for j in range(3)] for i in range(3)]

    fs = frame(src)
    fd = frame(dst)
    return matmul3(fd, adjugate3(fs))

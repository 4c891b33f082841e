"""Quadrature rules: Gauss-Legendre segments, conical-product triangles,
tensor boxes, and star-fan rules for general polygons.

All constructors take an *exactness degree*: every polynomial of total
degree up to that number is integrated to its analytic value.  Reference
rules are cached per degree; mapped rules are cheap to build.
"""

from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.special import roots_jacobi


class QuadRule(NamedTuple):
    """Nodes (n x d array) and positive weights (n,) summing to the measure."""

    points: np.ndarray
    weights: np.ndarray


def _num_points(exact_degree: int) -> int:
    if exact_degree < 0:
        raise ValueError(f"exactness degree must be >= 0, got {exact_degree}")
    return (exact_degree + 2) // 2  # ceil((degree+1)/2)


@lru_cache(maxsize=None)
def _gauss_legendre_01(exact_degree: int):
    n = _num_points(exact_degree)
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


@lru_cache(maxsize=None)
def _gauss_jacobi_01(exact_degree: int):
    # weight (1-u) on [0,1]; absorbs the Duffy Jacobian of the triangle map
    n = _num_points(exact_degree)
    x, w = roots_jacobi(n, 1.0, 0.0)
    return (x + 1.0) / 2.0, w / 4.0


@lru_cache(maxsize=None)
def _reference_triangle(exact_degree: int):
    u, wu = _gauss_jacobi_01(exact_degree)
    v, wv = _gauss_legendre_01(exact_degree)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    ww = np.outer(wu, wv)
    xi = uu.ravel()
    eta = (vv * (1.0 - uu)).ravel()
    return np.column_stack([xi, eta]), ww.ravel()


def segment_rule(p0, p1, exact_degree: int) -> QuadRule:
    """Gauss-Legendre rule on the straight segment from p0 to p1."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    t, w = _gauss_legendre_01(exact_degree)
    points = p0[None, :] + t[:, None] * (p1 - p0)[None, :]
    length = float(np.hypot(*(p1 - p0)))
    return QuadRule(points, w * length)


def simplex_rule(v0, v1, v2, exact_degree: int) -> QuadRule:
    """Conical-product rule on the triangle (v0, v1, v2), any degree."""
    v0 = np.asarray(v0, dtype=float)
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    ref_pts, ref_w = _reference_triangle(exact_degree)
    e1 = v1 - v0
    e2 = v2 - v0
    points = v0[None, :] + np.outer(ref_pts[:, 0], e1) + np.outer(ref_pts[:, 1], e2)
    det = abs(e1[0] * e2[1] - e1[1] * e2[0])
    return QuadRule(points, ref_w * det)


def box_rule(x0: float, x1: float, y0: float, y1: float, exact_degree: int) -> QuadRule:
    """Tensor Gauss-Legendre rule on the axis-aligned rectangle."""
    t, w = _gauss_legendre_01(exact_degree)
    xs = x0 + t * (x1 - x0)
    ys = y0 + t * (y1 - y0)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    ww = np.outer(w * (x1 - x0), w * (y1 - y0))
    return QuadRule(np.column_stack([xx.ravel(), yy.ravel()]), ww.ravel())


def polygon_rule(vertices, star_center, exact_degree: int) -> QuadRule:
    """Fan rule on a polygon star-shaped w.r.t. ``star_center``.

    One triangle per boundary segment, each integrated with ``simplex_rule``.
    ``vertices`` is the counter-clockwise boundary loop.
    """
    vertices = np.asarray(vertices, dtype=float)
    center = np.asarray(star_center, dtype=float)
    pts = []
    wts = []
    n = len(vertices)
    for i in range(n):
        rule = simplex_rule(center, vertices[i], vertices[(i + 1) % n], exact_degree)
        pts.append(rule.points)
        wts.append(rule.weights)
    return QuadRule(np.vstack(pts), np.concatenate(wts))

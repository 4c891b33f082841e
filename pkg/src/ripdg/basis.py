"""Per-element polynomial bases in the physical frame.

Each element carries the tensor Legendre basis on its bounding box,
restricted to total degree p and ordered graded-lexicographically, so the
first (q+1)(q+2)/2 functions span exactly the degree-q polynomials.  On box
elements this basis is L2-orthonormal as built; on simplices and polygons a
modified Gram-Schmidt pass against the element mass matrix (with
reorthogonalization) produces an orthonormal basis while preserving the
degree hierarchy.
"""

import math
from functools import lru_cache

import numpy as np

from .mesh import Mesh
from .quadrature import QuadRule, box_rule, polygon_rule, simplex_rule


def local_dim(p: int, d: int = 2) -> int:
    """Dimension of the total-degree-p polynomial space in d variables."""
    if p < 0:
        raise ValueError(f"degree must be >= 0, got {p}")
    return math.comb(p + d, d)


@lru_cache(maxsize=None)
def _exponents(p: int) -> np.ndarray:
    # graded lexicographic: by total degree, then descending x-exponent
    return np.array([(q - k, k) for q in range(p + 1) for k in range(q + 1)], dtype=int)


@lru_cache(maxsize=None)
def _legendre_derivative_matrix(deg: int) -> np.ndarray:
    # column a: Legendre coefficients of L_a'
    D = np.zeros((deg + 1, deg + 1))
    for a in range(deg + 1):
        c = np.zeros(a + 1)
        c[a] = 1.0
        dc = np.polynomial.legendre.legder(c)
        D[: len(dc), a] = dc
    return D


def element_rule(mesh: Mesh, eid: int, exact_degree: int) -> QuadRule:
    """Volume quadrature on an element, dispatched on its shape."""
    el = mesh.elements[eid]
    if el.kind == "box":
        x0, x1, y0, y1 = el.bbox
        return box_rule(x0, x1, y0, y1, exact_degree)
    pts = mesh.vertices[el.vertex_ids]
    if el.kind == "simplex":
        return simplex_rule(pts[0], pts[1], pts[2], exact_degree)
    return polygon_rule(pts, el.star_center, exact_degree)


class DgSpace:
    """Discontinuous total-degree polynomial space over a mesh."""

    def __init__(self, mesh: Mesh, degrees):
        self.mesh = mesh
        n = len(mesh.elements)
        if np.isscalar(degrees):
            degrees = np.full(n, int(degrees))
        self.degrees = np.asarray(degrees, dtype=int)
        if len(self.degrees) != n or np.any(self.degrees < 0):
            raise ValueError("need one nonnegative degree per element")
        self.local_dims = np.array([local_dim(p) for p in self.degrees])
        self.offsets = np.concatenate([[0], np.cumsum(self.local_dims)])
        self.total_dofs = int(self.offsets[-1])
        self._transforms = [None] * n   # upper-triangular, None = identity (boxes)
        self.gram_conditions = np.ones(n)
        for eid, el in enumerate(mesh.elements):
            if el.kind == "box":
                continue
            p = int(self.degrees[eid])
            rule = element_rule(mesh, eid, 2 * p)
            V = self._eval_raw(eid, rule.points)
            M = V.T @ (rule.weights[:, None] * V)
            M = 0.5 * (M + M.T)
            self.gram_conditions[eid] = float(np.linalg.cond(M))
            self._transforms[eid] = _mgs_transform(M)

    def element_dofs(self, eid: int) -> slice:
        return slice(int(self.offsets[eid]), int(self.offsets[eid + 1]))

    def _scaled_1d(self, eid, x, axis):
        el = self.mesh.elements[eid]
        lo = el.bbox[0] if axis == 0 else el.bbox[2]
        hi = el.bbox[1] if axis == 0 else el.bbox[3]
        width = hi - lo
        xi = (2.0 * np.asarray(x, dtype=float) - lo - hi) / width
        deg = int(self.degrees[eid])
        V = np.polynomial.legendre.legvander(xi, deg)
        norms = np.sqrt((2.0 * np.arange(deg + 1) + 1.0) / width)
        return V, norms, width

    def _eval_raw(self, eid, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        exps = _exponents(int(self.degrees[eid]))
        Vx, nx, _ = self._scaled_1d(eid, points[:, 0], 0)
        Vy, ny, _ = self._scaled_1d(eid, points[:, 1], 1)
        return (Vx * nx) [:, exps[:, 0]] * (Vy * ny)[:, exps[:, 1]]

    def _eval_raw_grad(self, eid, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        p = int(self.degrees[eid])
        exps = _exponents(p)
        D = _legendre_derivative_matrix(p)
        Vx, nx, wx = self._scaled_1d(eid, points[:, 0], 0)
        Vy, ny, wy = self._scaled_1d(eid, points[:, 1], 1)
        dVx = (Vx @ D) * (2.0 / wx)
        dVy = (Vy @ D) * (2.0 / wy)
        gx = (dVx * nx)[:, exps[:, 0]] * (Vy * ny)[:, exps[:, 1]]
        gy = (Vx * nx)[:, exps[:, 0]] * (dVy * ny)[:, exps[:, 1]]
        return gx, gy

    def eval_basis(self, eid: int, points) -> np.ndarray:
        """Values of the orthonormal basis: array [#points x localDim]."""
        V = self._eval_raw(eid, points)
        T = self._transforms[eid]
        return V if T is None else V @ T

    def eval_grad(self, eid: int, points):
        """(d/dx, d/dy) of the orthonormal basis, two [#points x localDim] arrays."""
        gx, gy = self._eval_raw_grad(eid, points)
        T = self._transforms[eid]
        if T is None:
            return gx, gy
        return gx @ T, gy @ T

    def mass_matrix(self, eid: int, extra_degree: int = 0) -> np.ndarray:
        """Quadrature-assembled Gram matrix of the orthonormal basis."""
        p = int(self.degrees[eid])
        rule = element_rule(self.mesh, eid, 2 * p + extra_degree)
        V = self.eval_basis(eid, rule.points)
        return V.T @ (rule.weights[:, None] * V)

    def project_l2(self, eid: int, q: int, field, quad_inc: int = 3):
        """Coefficients of the L2(K)-orthogonal projection of ``field`` onto
        total degree q <= p_K (truncation of the degree-p coefficients)."""
        p = int(self.degrees[eid])
        if q > p:
            raise ValueError(f"projection degree {q} exceeds element degree {p}")
        rule = element_rule(self.mesh, eid, 2 * p + quad_inc)
        V = self.eval_basis(eid, rule.points)
        vals = np.asarray([field(x, y) for x, y in rule.points], dtype=float)
        coeffs = V.T @ (rule.weights[:, None] * vals.reshape(len(rule.weights), -1))
        coeffs = coeffs[: local_dim(q)]
        return coeffs[:, 0] if vals.ndim == 1 else coeffs


def _mgs_transform(M: np.ndarray) -> np.ndarray:
    """Upper-triangular T with T^t M T = I (modified Gram-Schmidt in the
    M-inner product, one reorthogonalization pass)."""
    dim = M.shape[0]
    T = np.zeros((dim, dim))
    for i in range(dim):
        v = np.zeros(dim)
        v[i] = 1.0
        for _ in range(2):
            for j in range(i):
                v -= (T[:, j] @ M @ v) * T[:, j]
        nrm = math.sqrt(float(v @ M @ v))
        if not nrm > 0:
            raise np.linalg.LinAlgError("element mass matrix is numerically singular")
        T[:, i] = v / nrm
    return T

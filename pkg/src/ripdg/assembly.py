"""Assembly of the weighted interior penalty system, its inconsistent
degenerate-diffusion variant, the load vector, and the energy-norm Gram
matrix.

The bilinear form is

    B(u,v) = int_Omega a grad u . grad v  (+ int c u v)
           + int_Gamma sigma [[u]].[[v]]
           - int_Gamma ({a grad u}_w . [[v]] + theta {a grad v}_w . [[u]])

with Dirichlet data imposed weakly through the right-hand side
l(v) = int f v + int_bdry g (sigma v - theta a grad v . n).  Face weights and
penalties come from :mod:`ripdg.flux_weights` according to the method
variant; the degenerate variant replaces the flux a grad u by
sqrt(a) Pi_{p-1}(sqrt(a) grad u) element by element.

Element and face contributions are independent; workers > 1 evaluates them
in a thread pool, and contributions are always merged in canonical index
order, so the assembled matrix is bit-identical for any worker count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from . import flux_weights as fx
from .basis import DgSpace, element_rule, local_dim
from .mesh import Mesh
from .quadrature import segment_rule

IPDG = "ipdg"
RIPDG = "ripdg"
RIPDG_DEG = "ripdg_deg"
VARIANTS = (IPDG, RIPDG, RIPDG_DEG)


@dataclass
class MethodConfig:
    variant: str = IPDG
    weight_scheme: str = fx.ARITHMETIC    # used by the IPDG variant only
    theta: float = 1.0
    penalty_scale: float = 1.0
    quad_inc: int = 3
    linf_safety: float = 1.0
    box_notional_subdivision: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.weight_scheme not in fx.WEIGHT_SCHEMES:
            raise ValueError(f"unknown weight scheme {self.weight_scheme!r}")
        if not -1.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [-1, 1], got {self.theta}")
        if not self.penalty_scale > 0:
            raise ValueError("penalty_scale must be positive")
        if self.quad_inc < 0 or self.workers < 1:
            raise ValueError("quad_inc must be >= 0 and workers >= 1")


def _as_matrix_diffusion(a):
    if a is None:
        return np.eye(2)
    if callable(a):
        return None
    if np.isscalar(a):
        return float(a) * np.eye(2)
    arr = np.asarray(a, dtype=float)
    if arr.shape != (2, 2):
        raise ValueError("diffusion must be None, a scalar, a 2x2 matrix, or a callable")
    return arr


@dataclass
class ProblemSpec:
    """Coefficients and data of  -div(a grad u) + c u = f,  u = g on the boundary."""

    diffusion: object = None                    # None/scalar/2x2 constant, or a(x,y)
    reaction: Optional[Callable] = None         # c(x,y) >= 0
    source: Callable = lambda x, y: 0.0
    boundary: Callable = lambda x, y: 0.0
    exact: Optional[Callable] = None
    exact_grad: Optional[Callable] = None       # (x,y) -> (ux, uy)
    key: str = ""

    def __post_init__(self):
        self._a_const = _as_matrix_diffusion(self.diffusion)

    @property
    def has_reaction(self) -> bool:
        return self.reaction is not None

    def diffusion_at(self, points) -> np.ndarray:
        """Diffusion tensor at each point, shape (n, 2, 2)."""
        points = np.atleast_2d(points)
        if self._a_const is not None:
            return np.broadcast_to(self._a_const, (len(points), 2, 2))
        out = np.empty((len(points), 2, 2))
        for i, (x, y) in enumerate(points):
            v = self.diffusion(x, y)
            out[i] = float(v) * np.eye(2) if np.isscalar(v) else np.asarray(v, dtype=float)
        return out


def _spd_sqrt(a: np.ndarray) -> np.ndarray:
    """Square roots of symmetric PSD 2x2 matrices, shape (n,2,2): exact
    elementwise roots on diagonal tensors, closed form otherwise."""
    if np.all(a[:, 0, 1] == 0.0) and np.all(a[:, 1, 0] == 0.0):
        out = np.zeros_like(a)
        out[:, 0, 0] = np.sqrt(a[:, 0, 0])
        out[:, 1, 1] = np.sqrt(a[:, 1, 1])
        return out
    det = a[:, 0, 0] * a[:, 1, 1] - a[:, 0, 1] * a[:, 1, 0]
    s = np.sqrt(np.maximum(det, 0.0))
    t = np.sqrt(np.maximum(a[:, 0, 0] + a[:, 1, 1] + 2.0 * s, 0.0))
    out = a + s[:, None, None] * np.eye(2)[None, :, :]
    safe = t > 0
    out[safe] /= t[safe, None, None]
    out[~safe] = 0.0
    return out


def _lambda_min(a: np.ndarray) -> np.ndarray:
    tr = a[:, 0, 0] + a[:, 1, 1]
    disc = np.sqrt((a[:, 0, 0] - a[:, 1, 1]) ** 2 + 4.0 * a[:, 0, 1] ** 2)
    return 0.5 * (tr - disc)


@dataclass
class AssembledSystem:
    A: sp.csr_matrix
    b: np.ndarray
    N: sp.csr_matrix                      # Gram matrix of the dG norm
    face_weights: list                    # FaceWeights per face, mesh order
    face_data: list                       # FaceCoefficientData per face
    space: DgSpace = None
    config: MethodConfig = None

    def max_sigma(self, interior_only: bool = False) -> float:
        mesh = self.space.mesh
        vals = [
            fw.sigma
            for fw, f in zip(self.face_weights, mesh.faces)
            if not (interior_only and f.is_boundary)
        ]
        return max(vals) if vals else 0.0


class _TripletAccumulator:
    def __init__(self, n):
        self.n = n
        self.rows = []
        self.cols = []
        self.vals = []

    def add_block(self, rows: slice, cols: slice, block: np.ndarray):
        r = np.arange(rows.start, rows.stop)
        c = np.arange(cols.start, cols.stop)
        rr, cc = np.meshgrid(r, c, indexing="ij")
        self.rows.append(rr.ravel())
        self.cols.append(cc.ravel())
        self.vals.append(np.asarray(block, dtype=float).ravel())

    def tocsr(self) -> sp.csr_matrix:
        if not self.rows:
            return sp.csr_matrix((self.n, self.n))
        rows = np.concatenate(self.rows)
        cols = np.concatenate(self.cols)
        vals = np.concatenate(self.vals)
        out = sp.coo_matrix((vals, (rows, cols)), shape=(self.n, self.n)).tocsr()
        out.sum_duplicates()
        out.sort_indices()
        return out


def _element_side_constant(space: DgSpace, eid: int, face, on_plus: bool, config) -> float:
    el = space.mesh.elements[eid]
    p = int(space.degrees[eid])
    cluster = face.plus_cluster if on_plus else face.minus_cluster
    measure = el.cluster_measures[cluster]
    area = el.cluster_areas[cluster]
    if config.box_notional_subdivision and el.kind == "box":
        area = face.plus_subarea if on_plus else face.minus_subarea
    return fx.flux_inverse_constant(p, float(measure), float(area))


def _side_data(space, problem, config, face, on_plus, face_pts, inv_sqrt_sup) -> fx.FaceSideData:
    eid = face.plus if on_plus else face.minus
    el = space.mesh.elements[eid]
    a = problem.diffusion_at(face_pts)
    n = face.normal
    an = a @ n
    a_norm = float(np.max(np.hypot(an[:, 0], an[:, 1])))
    sq = _spd_sqrt(a) @ n
    sqrt_a_norm = float(np.max(np.hypot(sq[:, 0], sq[:, 1])))
    alpha_n = float(np.max(an @ n))
    s = config.linf_safety
    return fx.FaceSideData(
        m=el.m,
        c_inv=_element_side_constant(space, eid, face, on_plus, config),
        a_norm_sup=s * a_norm,
        a_inv_sqrt_sup=s * inv_sqrt_sup[eid],
        sqrt_a_norm_sup=s * sqrt_a_norm,
        alpha_n=alpha_n,
    )


def compute_face_report(space: DgSpace, problem: ProblemSpec, config: MethodConfig):
    """FaceCoefficientData and FaceWeights for every face of the mesh."""
    mesh = space.mesh
    # sup of |a^{-1/2}| over each element's quadrature nodes
    inv_sqrt_sup = np.empty(len(mesh.elements))
    for eid in range(len(mesh.elements)):
        if problem._a_const is not None:
            lam = _lambda_min(problem._a_const[None])[0]
            inv_sqrt_sup[eid] = lam ** -0.5 if lam > 0 else np.inf
        else:
            rule = element_rule(mesh, eid, 2 * int(space.degrees[eid]) + config.quad_inc)
            lam = np.min(_lambda_min(problem.diffusion_at(rule.points)))
            inv_sqrt_sup[eid] = lam ** -0.5 if lam > 0 else np.inf
    data = []
    weights = []
    for face in mesh.faces:
        p_plus = int(space.degrees[face.plus])
        p_minus = p_plus if face.is_boundary else int(space.degrees[face.minus])
        deg = p_plus + p_minus + config.quad_inc
        pa, pb = mesh.face_endpoints(face)
        rule = segment_rule(pa, pb, deg)
        plus = _side_data(space, problem, config, face, True, rule.points, inv_sqrt_sup)
        minus = (
            None
            if face.is_boundary
            else _side_data(space, problem, config, face, False, rule.points, inv_sqrt_sup)
        )
        fd = fx.FaceCoefficientData(plus=plus, minus=minus)
        if config.variant == IPDG:
            fw = fx.legacy_weights(config.weight_scheme, fd, config.penalty_scale)
        elif config.variant == RIPDG:
            fw = fx.ripdg_weights_and_penalty(fd, config.penalty_scale)
        else:
            fw = fx.degenerate_weights_and_penalty(fd, config.penalty_scale)
        data.append(fd)
        weights.append(fw)
    return data, weights


def _element_block(space, problem, config, eid):
    """Volume stiffness (+ reaction) block and load contribution."""
    p = int(space.degrees[eid])
    rule = element_rule(space.mesh, eid, 2 * p + config.quad_inc)
    V = space.eval_basis(eid, rule.points)
    gx, gy = space.eval_grad(eid, rule.points)
    a = problem.diffusion_at(rule.points)
    w = rule.weights
    qx = a[:, 0, 0, None] * gx + a[:, 0, 1, None] * gy
    qy = a[:, 1, 0, None] * gx + a[:, 1, 1, None] * gy
    K = gx.T @ (w[:, None] * qx) + gy.T @ (w[:, None] * qy)
    G = K.copy()
    if problem.has_reaction:
        c = np.array([problem.reaction(x, y) for x, y in rule.points])
        K = K + V.T @ ((w * c)[:, None] * V)
    fvals = np.array([problem.source(x, y) for x, y in rule.points])
    load = V.T @ (w * fvals)
    return K, G, load


def _degenerate_projection(space, problem, config, eid):
    """Matrices P (dim_{p-1} x dim) with the coefficients of
    Pi_{p-1}(sqrt(a) grad phi_j), one per gradient component."""
    p = int(space.degrees[eid])
    if p == 0:
        return None
    rule = element_rule(space.mesh, eid, 2 * p + config.quad_inc)
    V = space.eval_basis(eid, rule.points)
    gx, gy = space.eval_grad(eid, rule.points)
    S = _spd_sqrt(problem.diffusion_at(rule.points))
    qx = S[:, 0, 0, None] * gx + S[:, 0, 1, None] * gy
    qy = S[:, 1, 0, None] * gx + S[:, 1, 1, None] * gy
    psi = V[:, : local_dim(p - 1)]
    w = rule.weights[:, None]
    return psi.T @ (w * qx), psi.T @ (w * qy)


def _face_flux_matrix(space, problem, config, face, eid, pts, projections):
    """Rows: face quadrature nodes; columns: element basis.  Entries are the
    normal flux n . (a grad phi) or, for the degenerate variant, the
    projected flux n . sqrt(a) Pi_{p-1}(sqrt(a) grad phi)."""
    n = face.normal
    a = problem.diffusion_at(pts)
    if config.variant != RIPDG_DEG:
        gx, gy = space.eval_grad(eid, pts)
        an = a @ n
        return an[:, 0, None] * gx + an[:, 1, None] * gy
    proj = projections[eid]
    if proj is None:
        return np.zeros((len(pts), int(space.local_dims[eid])))
    p = int(space.degrees[eid])
    psi_f = space.eval_basis(eid, pts)[:, : local_dim(p - 1)]
    sn = _spd_sqrt(a) @ n
    return sn[:, 0, None] * (psi_f @ proj[0]) + sn[:, 1, None] * (psi_f @ proj[1])


def assemble(space: DgSpace, problem: ProblemSpec, config: MethodConfig) -> AssembledSystem:
    """Assemble stiffness, load, and dG-norm Gram matrix."""
    mesh = space.mesh
    ndof = space.total_dofs
    acc_A = _TripletAccumulator(ndof)
    acc_N = _TripletAccumulator(ndof)
    b = np.zeros(ndof)
    theta = config.theta

    face_data, face_weights = compute_face_report(space, problem, config)

    nelem = len(mesh.elements)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            blocks = list(
                pool.map(lambda e: _element_block(space, problem, config, e), range(nelem))
            )
    else:
        blocks = [_element_block(space, problem, config, e) for e in range(nelem)]
    for eid, (K, G, load) in enumerate(blocks):
        dofs = space.element_dofs(eid)
        acc_A.add_block(dofs, dofs, K)
        acc_N.add_block(dofs, dofs, K if problem.has_reaction else G)
        b[dofs] += load

    projections = None
    if config.variant == RIPDG_DEG:
        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                projections = list(
                    pool.map(
                        lambda e: _degenerate_projection(space, problem, config, e),
                        range(nelem),
                    )
                )
        else:
            projections = [
                _degenerate_projection(space, problem, config, e) for e in range(nelem)
            ]

    for fid, face in enumerate(mesh.faces):
        fw = face_weights[fid]
        p_plus = int(space.degrees[face.plus])
        p_minus = p_plus if face.is_boundary else int(space.degrees[face.minus])
        deg = p_plus + p_minus + config.quad_inc
        pa, pb = mesh.face_endpoints(face)
        rule = segment_rule(pa, pb, deg)
        w = rule.weights
        dofs_p = space.element_dofs(face.plus)
        Vp = space.eval_basis(face.plus, rule.points)
        Qp = _face_flux_matrix(space, problem, config, face, face.plus, rule.points, projections)
        if face.is_boundary:
            acc_A.add_block(dofs_p, dofs_p, fw.sigma * Vp.T @ (w[:, None] * Vp))
            acc_A.add_block(dofs_p, dofs_p, -Vp.T @ (w[:, None] * Qp))
            acc_A.add_block(dofs_p, dofs_p, -theta * Qp.T @ (w[:, None] * Vp))
            acc_N.add_block(dofs_p, dofs_p, fw.sigma * Vp.T @ (w[:, None] * Vp))
            g = np.array([problem.boundary(x, y) for x, y in rule.points])
            b[dofs_p] += fw.sigma * Vp.T @ (w * g) - theta * Qp.T @ (w * g)
            continue
        dofs_m = space.element_dofs(face.minus)
        Vm = space.eval_basis(face.minus, rule.points)
        Qm = _face_flux_matrix(space, problem, config, face, face.minus, rule.points, projections)
        # penalty sigma [[u]].[[v]] and the dG-norm jump term
        for acc in (acc_A, acc_N):
            acc.add_block(dofs_p, dofs_p, fw.sigma * Vp.T @ (w[:, None] * Vp))
            acc.add_block(dofs_p, dofs_m, -fw.sigma * Vp.T @ (w[:, None] * Vm))
            acc.add_block(dofs_m, dofs_p, -fw.sigma * Vm.T @ (w[:, None] * Vp))
            acc.add_block(dofs_m, dofs_m, fw.sigma * Vm.T @ (w[:, None] * Vm))
        # -{a grad u}_w . [[v]]
        flux = fw.w_plus * Qp, fw.w_minus * Qm
        acc_A.add_block(dofs_p, dofs_p, -Vp.T @ (w[:, None] * flux[0]))
        acc_A.add_block(dofs_p, dofs_m, -Vp.T @ (w[:, None] * flux[1]))
        acc_A.add_block(dofs_m, dofs_p, Vm.T @ (w[:, None] * flux[0]))
        acc_A.add_block(dofs_m, dofs_m, Vm.T @ (w[:, None] * flux[1]))
        # -theta {a grad v}_w . [[u]]
        acc_A.add_block(dofs_p, dofs_p, -theta * flux[0].T @ (w[:, None] * Vp))
        acc_A.add_block(dofs_m, dofs_p, -theta * flux[1].T @ (w[:, None] * Vp))
        acc_A.add_block(dofs_p, dofs_m, theta * flux[0].T @ (w[:, None] * Vm))
        acc_A.add_block(dofs_m, dofs_m, theta * flux[1].T @ (w[:, None] * Vm))

    system = AssembledSystem(
        A=acc_A.tocsr(),
        b=b,
        N=acc_N.tocsr(),
        face_weights=face_weights,
        face_data=face_data,
        space=space,
        config=config,
    )
    return system


def assemble_degenerate(space, problem, config) -> AssembledSystem:
    """The inconsistent variant with projected fluxes (variant RIPDG_DEG)."""
    if config.variant != RIPDG_DEG:
        raise ValueError("assemble_degenerate requires variant RIPDG_DEG")
    return assemble(space, problem, config)


def assemble_norm_matrix(
    space, problem, config, include_reaction: Optional[bool] = None
) -> sp.csr_matrix:
    """Gram matrix N of the dG norm: v^T N v = |sqrt(a) grad v|^2
    + sum_F sigma_F |[[v]]|^2 (+ |sqrt(c) v|^2 when the problem has one)."""
    if include_reaction is None:
        include_reaction = problem.has_reaction
    stripped = ProblemSpec(
        diffusion=problem.diffusion,
        reaction=problem.reaction if include_reaction else None,
        source=problem.source,
        boundary=problem.boundary,
    )
    return assemble(space, stripped, config).N


def assemble_gradient_gram(space, problem, config) -> sp.csr_matrix:
    """Gram matrix of |sqrt(a) grad v|^2 alone (no jumps, no reaction)."""
    acc = _TripletAccumulator(space.total_dofs)
    for eid in range(len(space.mesh.elements)):
        _, G, _ = _element_block(space, problem, config, eid)
        dofs = space.element_dofs(eid)
        acc.add_block(dofs, dofs, G)
    return acc.tocsr()

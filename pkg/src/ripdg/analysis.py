"""Error norms against manufactured solutions and convergence-rate extraction."""

import numpy as np

from .basis import DgSpace, element_rule
from .quadrature import segment_rule

ERROR_QUAD_BUMP = 6  # error quadrature exactness: 2p + this (+ extra_degree)


def _element_errors(space, coeffs, exact, exact_grad, problem, extra_degree):
    mesh = space.mesh
    for eid in range(len(mesh.elements)):
        p = int(space.degrees[eid])
        rule = element_rule(mesh, eid, 2 * p + ERROR_QUAD_BUMP + extra_degree)
        dofs = space.element_dofs(eid)
        yield eid, rule, dofs


def error_l2(space: DgSpace, coeffs, exact, extra_degree: int = 0) -> float:
    """|| u - u_h ||_{L2} by elementwise quadrature at elevated order."""
    total = 0.0
    for eid, rule, dofs in _element_errors(space, coeffs, exact, None, None, extra_degree):
        uh = space.eval_basis(eid, rule.points) @ coeffs[dofs]
        ex = np.array([exact(x, y) for x, y in rule.points])
        total += rule.weights @ (uh - ex) ** 2
    return float(np.sqrt(total))


def error_broken_h1(space: DgSpace, coeffs, exact_grad, extra_degree: int = 0) -> float:
    """Broken H1 seminorm || grad_T (u - u_h) ||_{L2}."""
    total = 0.0
    for eid, rule, dofs in _element_errors(space, coeffs, None, exact_grad, None, extra_degree):
        gx, gy = space.eval_grad(eid, rule.points)
        dx = gx @ coeffs[dofs]
        dy = gy @ coeffs[dofs]
        ex = np.array([exact_grad(x, y) for x, y in rule.points])
        total += rule.weights @ ((dx - ex[:, 0]) ** 2 + (dy - ex[:, 1]) ** 2)
    return float(np.sqrt(total))


def error_dg(
    space: DgSpace,
    coeffs,
    problem,
    face_weights,
    include_reaction=None,
    extra_degree: int = 0,
) -> float:
    """Energy-norm error: a-weighted broken H1 part, sigma-weighted jumps of
    u - u_h (the exact solution enters boundary jumps through its trace),
    and the reaction L2 part when the problem has one and it is not
    excluded."""
    if include_reaction is None:
        include_reaction = problem.has_reaction
    exact = problem.exact
    exact_grad = problem.exact_grad
    mesh = space.mesh
    total = 0.0
    for eid, rule, dofs in _element_errors(space, coeffs, None, None, None, extra_degree):
        gx, gy = space.eval_grad(eid, rule.points)
        dx = gx @ coeffs[dofs]
        dy = gy @ coeffs[dofs]
        ex = np.array([exact_grad(x, y) for x, y in rule.points])
        ax = problem.diffusion_at(rule.points)
        ddx = dx - ex[:, 0]
        ddy = dy - ex[:, 1]
        total += rule.weights @ (
            ax[:, 0, 0] * ddx * ddx + 2.0 * ax[:, 0, 1] * ddx * ddy + ax[:, 1, 1] * ddy * ddy
        )
        if include_reaction and problem.has_reaction:
            V = space.eval_basis(eid, rule.points)
            uh = V @ coeffs[dofs]
            exv = np.array([exact(x, y) for x, y in rule.points])
            c = np.array([problem.reaction(x, y) for x, y in rule.points])
            total += rule.weights @ (c * (uh - exv) ** 2)
    for face, fw in zip(mesh.faces, face_weights):
        if fw.sigma == 0.0:
            continue
        p_plus = int(space.degrees[face.plus])
        p_minus = p_plus if face.is_boundary else int(space.degrees[face.minus])
        pa, pb = mesh.face_endpoints(face)
        rule = segment_rule(pa, pb, p_plus + p_minus + ERROR_QUAD_BUMP + extra_degree)
        up = space.eval_basis(face.plus, rule.points) @ coeffs[space.element_dofs(face.plus)]
        if face.is_boundary:
            ex = np.array([exact(x, y) for x, y in rule.points])
            jump = up - ex
        else:
            um = space.eval_basis(face.minus, rule.points) @ coeffs[space.element_dofs(face.minus)]
            jump = up - um  # the single-valued exact trace cancels
        total += fw.sigma * (rule.weights @ jump**2)
    return float(np.sqrt(total))


def eoc(errors, measures, kind: str = "algebraic"):
    """Convergence rates from successive (error, measure) pairs.

    ``algebraic``: rate_i = log(e_i/e_{i+1}) / log(m_i/m_{i+1}) for measures
    like h.  ``exponential``: slopes of log(e) against the measure itself
    (use sqrt(DoF) there); negative slopes mean decay.
    """
    errors = np.asarray(errors, dtype=float)
    measures = np.asarray(measures, dtype=float)
    if len(errors) != len(measures) or len(errors) < 2:
        raise ValueError("need equally many errors and measures, at least two")
    if np.any(errors <= 0) or np.any(measures <= 0):
        raise ValueError("errors and measures must be positive")
    if kind == "algebraic":
        return list(np.log(errors[:-1] / errors[1:]) / np.log(measures[:-1] / measures[1:]))
    if kind == "exponential":
        return list(np.diff(np.log(errors)) / np.diff(measures))
    raise ValueError(f"unknown kind {kind!r}")

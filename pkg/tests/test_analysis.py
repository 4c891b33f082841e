import math

import numpy as np
import pytest

from ripdg.analysis import eoc, error_broken_h1, error_dg, error_l2
from ripdg.assembly import RIPDG, MethodConfig, ProblemSpec, assemble
from ripdg.basis import DgSpace
from ripdg.mesh import build_uniform_squares

SIN = ProblemSpec(
    diffusion=1.0,
    exact=lambda x, y: math.sin(math.pi * x) * math.sin(math.pi * y),
    exact_grad=lambda x, y: (
        math.pi * math.cos(math.pi * x) * math.sin(math.pi * y),
        math.pi * math.sin(math.pi * x) * math.cos(math.pi * y),
    ),
)


def test_l2_error_of_zero_solution_is_half():
    # ||sin(pi x) sin(pi y)||_{L2(0,1)^2} = 1/2
    mesh = build_uniform_squares(3)
    space = DgSpace(mesh, 2)
    err = error_l2(space, np.zeros(space.total_dofs), SIN.exact)
    assert err == pytest.approx(0.5, rel=1e-10)


def test_h1_error_of_zero_solution():
    # |sin sin|_{H1}^2 = pi^2/2 by separability
    mesh = build_uniform_squares(4)
    space = DgSpace(mesh, 2)
    err = error_broken_h1(space, np.zeros(space.total_dofs), SIN.exact_grad)
    assert err == pytest.approx(math.pi / math.sqrt(2), rel=1e-10)


def test_interpolated_polynomial_has_tiny_errors():
    mesh = build_uniform_squares(2)
    space = DgSpace(mesh, 3)
    u = lambda x, y: 1 + x - 2 * y + 0.5 * x * y
    du = lambda x, y: (1 + 0.5 * y, -2 + 0.5 * x)
    coeffs = np.zeros(space.total_dofs)
    for eid in range(len(mesh.elements)):
        coeffs[space.element_dofs(eid)] = space.project_l2(eid, 3, u)
    assert error_l2(space, coeffs, u) <= 1e-10
    assert error_broken_h1(space, coeffs, du) <= 1e-9


def test_dg_error_zero_for_reproduced_solution():
    mesh = build_uniform_squares(2)
    space = DgSpace(mesh, 2)
    u = lambda x, y: x * y
    prob = ProblemSpec(diffusion=1.0, boundary=u, exact=u,
                       exact_grad=lambda x, y: (y, x))
    system = assemble(space, prob, MethodConfig(variant=RIPDG))
    coeffs = np.zeros(space.total_dofs)
    for eid in range(len(mesh.elements)):
        coeffs[space.element_dofs(eid)] = space.project_l2(eid, 2, u)
    err = error_dg(space, coeffs, prob, system.face_weights)
    assert err <= 1e-10


def test_dg_error_dominates_weighted_h1():
    mesh = build_uniform_squares(3)
    space = DgSpace(mesh, 1)
    rng = np.random.default_rng(4)
    coeffs = rng.standard_normal(space.total_dofs)
    prob = ProblemSpec(diffusion=2.0, exact=SIN.exact, exact_grad=SIN.exact_grad)
    system = assemble(space, prob, MethodConfig(variant=RIPDG))
    dg = error_dg(space, coeffs, prob, system.face_weights)
    h1 = error_broken_h1(space, coeffs, prob.exact_grad)
    assert dg >= math.sqrt(2.0) * h1 * (1 - 1e-12)


def test_dg_error_reaction_term_toggles():
    mesh = build_uniform_squares(2)
    space = DgSpace(mesh, 1)
    prob = ProblemSpec(diffusion=1.0, reaction=lambda x, y: 1.0,
                       exact=SIN.exact, exact_grad=SIN.exact_grad)
    system = assemble(space, prob, MethodConfig(variant=RIPDG))
    coeffs = np.zeros(space.total_dofs)
    with_c = error_dg(space, coeffs, prob, system.face_weights)
    without_c = error_dg(space, coeffs, prob, system.face_weights, include_reaction=False)
    assert with_c == pytest.approx(math.sqrt(without_c**2 + 0.25), rel=1e-10)


def test_error_quadrature_refinement_stability():
    mesh = build_uniform_squares(3)
    space = DgSpace(mesh, 2)
    rng = np.random.default_rng(8)
    coeffs = 0.01 * rng.standard_normal(space.total_dofs)
    base = error_l2(space, coeffs, SIN.exact)
    refined = error_l2(space, coeffs, SIN.exact, extra_degree=4)
    assert abs(base - refined) / refined < 1e-3


def test_error_quadrature_stability_on_benchmark_runs():
    # +4 exactness on the error rules moves reported errors by < 0.1%
    # even for the layer and Gaussian data of the benchmark presets
    import numpy as np

    from ripdg import linalg
    from ripdg.analysis import error_broken_h1
    from ripdg.basis import DgSpace
    from ripdg.experiments import PROBLEMS
    from ripdg.mesh import build_nine_element, build_uniform_squares

    runs = []
    make, domain, _ = PROBLEMS["reaction_layer"]
    lp = make({"eps": 1e-5})
    l = min(0.9 * 7 * math.sqrt(1e-5), 0.5)
    runs.append((build_nine_element(l), np.full(9, 7), lp, 120))
    make, domain, _ = PROBLEMS["gaussian_bump"]
    gp = make({"alpha": 100.0})
    degrees = np.full(9, 2)
    degrees[4] = 30
    runs.append((build_uniform_squares(3, (-1, 1, -1, 1)), degrees, gp, 30))
    for mesh, degrees, prob, extra in runs:
        space = DgSpace(mesh, degrees)
        system = assemble(space, prob, MethodConfig(variant=RIPDG, quad_inc=36))
        x, _ = linalg.solve(system.A, system.b)
        for fn in (
            lambda e: error_l2(space, x, prob.exact, extra_degree=e),
            lambda e: error_broken_h1(space, x, prob.exact_grad, extra_degree=e),
            lambda e: error_dg(space, x, prob, system.face_weights, extra_degree=e),
        ):
            base, refined = fn(extra), fn(extra + 4)
            assert abs(base - refined) / refined < 1e-3


def test_eoc_examples():
    assert eoc([1.0, 0.25], [1.0, 0.5]) == [pytest.approx(2.0, rel=1e-12)]
    assert eoc([1e-1, 1e-3], [1.0, 0.1]) == [pytest.approx(2.0, rel=1e-12)]
    assert eoc([0.7, 0.7, 0.7], [1.0, 0.5, 0.25]) == pytest.approx([0.0, 0.0], abs=1e-14)


def test_eoc_exponential_slopes():
    dofs = np.array([10.0, 20.0, 30.0])
    errors = np.exp(-0.5 * dofs)
    slopes = eoc(errors, dofs, kind="exponential")
    assert slopes == pytest.approx([-0.5, -0.5], rel=1e-12)


def test_eoc_rejects_bad_input():
    with pytest.raises(ValueError):
        eoc([1.0], [1.0])
    with pytest.raises(ValueError):
        eoc([1.0, -1.0], [1.0, 0.5])
    with pytest.raises(ValueError):
        eoc([1.0, 0.5], [1.0, 0.5], kind="super")

import numpy as np
import pytest
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from ripdg.assembly import (
    IPDG,
    RIPDG,
    RIPDG_DEG,
    AssembledSystem,
    MethodConfig,
    ProblemSpec,
    assemble,
    assemble_degenerate,
    assemble_gradient_gram,
    assemble_norm_matrix,
)
from ripdg.basis import DgSpace, element_rule, local_dim
from ripdg.mesh import build_uniform_squares, build_zigzag_nine_element

POISSON = ProblemSpec(diffusion=1.0)


def constant_one_vector(space):
    v = np.zeros(space.total_dofs)
    for eid, el in enumerate(space.mesh.elements):
        v[space.offsets[eid]] = np.sqrt(el.area)
    return v


@pytest.mark.parametrize("variant", [IPDG, RIPDG])
def test_constant_function_energy_is_boundary_penalty(variant):
    mesh = build_uniform_squares(2)
    space = DgSpace(mesh, 2)
    system = assemble(space, POISSON, MethodConfig(variant=variant))
    ones = constant_one_vector(space)
    expect = sum(
        fw.sigma * f.measure
        for fw, f in zip(system.face_weights, mesh.faces)
        if f.is_boundary
    )
    assert ones @ (system.A @ ones) == pytest.approx(expect, rel=1e-12)
    assert ones @ (system.N @ ones) == pytest.approx(expect, rel=1e-12)


@pytest.mark.parametrize("variant", [IPDG, RIPDG, RIPDG_DEG])
def test_symmetry_for_theta_one(variant):
    mesh = build_zigzag_nine_element(0.3, 2)
    space = DgSpace(mesh, 3)
    system = assemble(space, POISSON, MethodConfig(variant=variant, theta=1.0))
    A = system.A
    assert abs(A - A.T).max() <= 1e-12 * abs(A).max()
    # structural symmetry regardless of theta
    system0 = assemble(space, POISSON, MethodConfig(variant=variant, theta=0.0))
    assert (abs(system0.A) - abs(system0.A).T).nnz >= 0
    pattern = system0.A != 0
    assert (pattern != pattern.T).nnz == 0


def test_stiffness_positive_definite():
    mesh = build_uniform_squares(2)
    space = DgSpace(mesh, 1)
    system = assemble(space, POISSON, MethodConfig(variant=IPDG))
    w = sla.eigvalsh(system.A.toarray())
    assert w[0] > 0


@pytest.mark.parametrize("variant", [IPDG, RIPDG, RIPDG_DEG])
@pytest.mark.parametrize("theta", [1.0, -1.0])
def test_linear_polynomial_exactness(variant, theta):
    u = lambda x, y: x + 2 * y
    prob = ProblemSpec(diffusion=1.0, boundary=u, exact=u)
    mesh = build_uniform_squares(3)
    space = DgSpace(mesh, 2)
    system = assemble(space, prob, MethodConfig(variant=variant, theta=theta))
    x = spla.spsolve(system.A.tocsc(), system.b)
    err2 = 0.0
    for eid in range(len(mesh.elements)):
        rule = element_rule(mesh, eid, 8)
        uh = space.eval_basis(eid, rule.points) @ x[space.element_dofs(eid)]
        exact = rule.points[:, 0] + 2 * rule.points[:, 1]
        err2 += rule.weights @ (uh - exact) ** 2
    assert np.sqrt(err2) <= 1e-9


def test_uniform_case_equivalence_entrywise():
    mesh = build_uniform_squares(4)
    space = DgSpace(mesh, 2)
    sys_ip = assemble(space, POISSON, MethodConfig(variant=IPDG, penalty_scale=1.0))
    sys_rip = assemble(space, POISSON, MethodConfig(variant=RIPDG, penalty_scale=2.0))
    for fw, f in zip(sys_rip.face_weights, mesh.faces):
        if not f.is_boundary:
            assert (fw.w_plus, fw.w_minus) == (0.5, 0.5)
    assert abs(sys_ip.A - sys_rip.A).max() <= 1e-12 * abs(sys_ip.A).max()


def test_degenerate_matches_ripdg_for_identity_diffusion():
    u = lambda x, y: np.sin(x) * y
    prob = ProblemSpec(diffusion=1.0, boundary=u, source=lambda x, y: np.sin(x) * 0 + np.sin(x) * y * 0)
    mesh = build_zigzag_nine_element(0.25, 2)
    space = DgSpace(mesh, 3)
    s1 = assemble(space, prob, MethodConfig(variant=RIPDG))
    s2 = assemble_degenerate(space, prob, MethodConfig(variant=RIPDG_DEG))
    assert abs(s1.A - s2.A).max() <= 1e-12 * abs(s1.A).max()
    assert np.max(np.abs(s1.b - s2.b)) <= 1e-12 * max(np.max(np.abs(s1.b)), 1.0)


def test_degenerate_variant_with_vanishing_normal_diffusion():
    # a = diag(x^2, 1) vanishes in the normal direction on the line x = 0
    a = lambda x, y: np.array([[x * x, 0.0], [0.0, 1.0]])
    prob = ProblemSpec(diffusion=a)
    mesh = build_uniform_squares(2, (-1, 1, -1, 1))
    space = DgSpace(mesh, 2)
    config = MethodConfig(variant=RIPDG_DEG, theta=1.0)
    system = assemble(space, prob, config)
    hit = 0
    for fw, f in zip(system.face_weights, mesh.faces):
        pa, pb = mesh.face_endpoints(f)
        on_line = abs(pa[0]) < 1e-14 and abs(pb[0]) < 1e-14
        if on_line and not f.is_boundary:
            hit += 1
            assert fw.sigma == 0.0
            # sqrt(a) n vanishes from both sides on x = 0, so both weights
            # drop to zero (the both-vanished convention)
            assert (fw.w_plus, fw.w_minus) == (0.0, 0.0)
    assert hit == 2
    A = system.A
    assert abs(A - A.T).max() <= 1e-12 * abs(A).max()
    w = sla.eigvalsh(A.toarray())
    assert w[0] >= -1e-10 * abs(w[-1])


def test_degenerate_assembly_rejects_wrong_variant():
    mesh = build_uniform_squares(1)
    space = DgSpace(mesh, 1)
    with pytest.raises(ValueError):
        assemble_degenerate(space, POISSON, MethodConfig(variant=RIPDG))


def test_norm_matrix_positive_definite_with_boundary_penalty():
    mesh = build_uniform_squares(2)
    space = DgSpace(mesh, 2)
    N = assemble(space, POISSON, MethodConfig(variant=RIPDG)).N
    w = sla.eigvalsh(N.toarray())
    assert w[0] > 0


def test_norm_matrix_for_interior_bubble_equals_gradient_energy():
    # v = bubble on one element, zero trace: v^T N v = ||grad v||^2
    mesh = build_uniform_squares(2)
    space = DgSpace(mesh, 4)
    eid = 0
    x0, x1, y0, y1 = mesh.elements[eid].bbox
    bubble = lambda x, y: (x - x0) * (x1 - x) * (y - y0) * (y1 - y)
    coeffs = np.zeros(space.total_dofs)
    coeffs[space.element_dofs(eid)] = space.project_l2(eid, 4, bubble)
    N = assemble(space, POISSON, MethodConfig(variant=IPDG)).N
    rule = element_rule(mesh, eid, 10)
    gx, gy = space.eval_grad(eid, rule.points)
    local = coeffs[space.element_dofs(eid)]
    grad2 = rule.weights @ ((gx @ local) ** 2 + (gy @ local) ** 2)
    assert coeffs @ (N @ coeffs) == pytest.approx(grad2, rel=1e-10)


def test_reaction_term_enters_stiffness_and_norm():
    prob = ProblemSpec(diffusion=1.0, reaction=lambda x, y: 1.0)
    mesh = build_uniform_squares(2)
    space = DgSpace(mesh, 1)
    with_c = assemble(space, prob, MethodConfig(variant=RIPDG))
    without_c = assemble(space, POISSON, MethodConfig(variant=RIPDG))
    diff = (with_c.A - without_c.A).toarray()
    # difference is the block-diagonal mass matrix (orthonormal basis)
    assert np.max(np.abs(diff - np.eye(space.total_dofs))) < 1e-12
    norm_no_reaction = assemble_norm_matrix(space, prob, MethodConfig(variant=RIPDG),
                                            include_reaction=False)
    assert abs(norm_no_reaction - without_c.N).max() < 1e-12


def test_gradient_gram_matches_norm_without_jumps():
    mesh = build_uniform_squares(2)
    space = DgSpace(mesh, 2)
    cfg = MethodConfig(variant=RIPDG)
    G = assemble_gradient_gram(space, POISSON, cfg)
    system = assemble(space, POISSON, cfg)
    jumps = system.N - G
    w = sla.eigvalsh(jumps.toarray())
    assert w[0] >= -1e-12 * max(abs(w[-1]), 1.0)


def test_method_config_validation():
    with pytest.raises(ValueError):
        MethodConfig(variant="sipg")
    with pytest.raises(ValueError):
        MethodConfig(theta=1.5)
    with pytest.raises(ValueError):
        MethodConfig(penalty_scale=0.0)
    with pytest.raises(ValueError):
        MethodConfig(quad_inc=-1)
    with pytest.raises(ValueError):
        MethodConfig(weight_scheme="magic")


def test_assembly_deterministic_across_worker_counts():
    prob = ProblemSpec(diffusion=1.0, source=lambda x, y: x * y, boundary=lambda x, y: x)
    mesh = build_zigzag_nine_element(0.2, 2)
    space = DgSpace(mesh, 3)
    base = assemble(space, prob, MethodConfig(variant=RIPDG, workers=1))
    for workers in (2, 4):
        again = assemble(space, prob, MethodConfig(variant=RIPDG, workers=workers))
        assert (base.A != again.A).nnz == 0
        assert np.array_equal(base.b, again.b)


def test_max_sigma_reporting_interior_vs_global():
    mesh = build_uniform_squares(3, (-1, 1, -1, 1))
    degrees = np.full(9, 2)
    degrees[4] = 30
    space = DgSpace(mesh, degrees)
    system = assemble(space, POISSON, MethodConfig(variant=RIPDG))
    assert system.max_sigma(interior_only=True) == pytest.approx(61.69, abs=0.01)
    assert system.max_sigma() >= system.max_sigma(interior_only=True)


def test_constant_scalar_coefficient_sups_are_exact():
    prob = ProblemSpec(diffusion=2.0)
    mesh = build_uniform_squares(2)
    space = DgSpace(mesh, 1)
    system = assemble(space, prob, MethodConfig(variant=RIPDG))
    for fd in system.face_data:
        for s in (fd.plus, fd.minus):
            if s is None:
                continue
            assert s.a_norm_sup == 2.0
            assert s.a_inv_sqrt_sup == 2.0**-0.5
            assert s.sqrt_a_norm_sup == np.sqrt(2.0)
            assert s.alpha_n == 2.0


def test_spd_sqrt_generic_branch():
    from ripdg.assembly import _spd_sqrt

    rng = np.random.default_rng(5)
    B = rng.standard_normal((2, 2))
    a = (B @ B.T + 0.5 * np.eye(2))[None]
    s = _spd_sqrt(a)
    assert np.allclose(s[0] @ s[0], a[0], atol=1e-14)


def test_robust_penalty_at_most_half_classical_on_all_faces():
    # quantified over interior faces of box, zigzag, and agglomerated meshes
    from ripdg.flux_weights import ipdg_penalty
    from ripdg.mesh import agglomerate, build_triangulated_squares

    meshes = [
        build_uniform_squares(3, (-1, 1, -1, 1)),
        build_zigzag_nine_element(0.2, 3),
        agglomerate(build_triangulated_squares(8), 8, seed=3),
    ]
    for mesh in meshes:
        degrees = np.arange(len(mesh.elements)) % 3 + 1  # mixed degrees
        space = DgSpace(mesh, degrees)
        system = assemble(space, POISSON, MethodConfig(variant=RIPDG))
        for fw, fd, f in zip(system.face_weights, system.face_data, mesh.faces):
            if f.is_boundary:
                continue
            assert fw.sigma <= ipdg_penalty(fd) / 2 * (1 + 1e-12)


def test_box_notional_subdivision_flag_raises_penalty():
    mesh = build_uniform_squares(2)
    space = DgSpace(mesh, 2)
    plain = assemble(space, POISSON, MethodConfig(variant=IPDG))
    notional = assemble(
        space, POISSON, MethodConfig(variant=IPDG, box_notional_subdivision=True)
    )
    # fan sub-triangle of a square has a quarter of its area: 4x the penalty
    assert notional.max_sigma() == pytest.approx(4 * plain.max_sigma(), rel=1e-12)

import hashlib

import numpy as np
import pytest

from ripdg.mesh import (
    BOUNDARY,
    MeshError,
    agglomerate,
    build_nine_element,
    build_triangulated_squares,
    build_uniform_squares,
    build_zigzag_nine_element,
    mesh_from_loops,
    mesh_from_text,
    mesh_to_text,
    polygon_centroid,
    validate,
)

AGG_512_16_SEED7_SHA256 = "779ff41a154f1fe652a1106c339e7e3a68d13c4ceb197b56a14d26574103eb05"


def test_single_cell_counts():
    m = build_uniform_squares(1)
    assert len(m.elements) == 1
    assert m.num_interior_faces == 0
    assert m.num_boundary_faces == 4


def test_3x3_counts_and_areas():
    m = build_uniform_squares(3, (-1, 1, -1, 1))
    assert len(m.elements) == 9
    assert m.num_interior_faces == 12
    assert m.num_boundary_faces == 12
    for el in m.elements:
        assert el.area == pytest.approx(4.0 / 9.0, rel=1e-14)
        assert el.kind == "box"
        assert el.m == 4
    assert validate(m) == []


def test_uniform_rejects_bad_input():
    with pytest.raises(MeshError):
        build_uniform_squares(0)
    with pytest.raises(MeshError):
        build_uniform_squares(2, (0, 0, 0, 1))


@pytest.mark.parametrize("l,corner,edge,center", [(0.5, 0.25, 0.5, 1.0), (0.25, 0.0625, 0.4375 * 0.25 / 0.4375, 2.25)])
def test_nine_element_areas(l, corner, edge, center):
    m = build_nine_element(l)
    areas = sorted(el.area for el in m.elements)
    assert areas[0] == pytest.approx(l * l, rel=1e-12)
    assert areas[-1] == pytest.approx((2 - 2 * l) ** 2, rel=1e-12)
    assert sum(el.area for el in m.elements) == pytest.approx(4.0, rel=1e-12)
    assert m.num_interior_faces == 12
    assert m.num_boundary_faces == 12
    assert validate(m) == []


def test_nine_element_rejects_bad_l():
    for l in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(MeshError):
            build_nine_element(l)


@pytest.mark.parametrize("l,teeth", [(0.3, 1), (0.3, 2), (0.1, 4), (0.1708, 4)])
def test_zigzag_preserves_areas(l, teeth):
    m = build_zigzag_nine_element(l, teeth)
    straight = build_nine_element(l)
    for a, b in zip(m.elements, straight.elements):
        assert a.area == pytest.approx(b.area, rel=1e-12)
    assert sum(el.area for el in m.elements) == pytest.approx(4.0, rel=1e-12)


def test_zigzag_adds_facets_and_validates():
    m = build_zigzag_nine_element(0.3, teeth=2)
    assert all(el.kind == "polygon" for el in m.elements)
    assert m.elements[4].m > 4  # center element
    assert validate(m) == []
    for f in m.faces:
        assert f.measure > 0


def test_zigzag_infeasible_geometry_reports_element():
    with pytest.raises(MeshError):
        build_zigzag_nine_element(0.9, 2)


def test_interior_face_normals_antiparallel():
    m = build_zigzag_nine_element(0.2, 2)
    for f in m.faces:
        if f.is_boundary:
            continue
        # outward normal of the minus element along its own traversal
        mel = m.elements[f.minus]
        loop = mel.vertex_ids
        k = next(
            j
            for j in range(len(loop))
            if loop[j] == f.v1 and loop[(j + 1) % len(loop)] == f.v0
        )
        pa, pb = m.vertices[loop[k]], m.vertices[loop[(k + 1) % len(loop)]]
        t = pb - pa
        n_minus = np.array([t[1], -t[0]]) / np.hypot(*t)
        assert float(np.dot(n_minus, f.normal)) == pytest.approx(-1.0, abs=1e-12)


def test_subsimplex_areas_sum_to_element_area():
    for m in (build_uniform_squares(2), build_zigzag_nine_element(0.25, 3)):
        for eid, el in enumerate(m.elements):
            fan = 0.0
            for fid in el.face_ids:
                f = m.faces[fid]
                fan += f.plus_subarea if f.plus == eid else f.minus_subarea
            assert fan == pytest.approx(el.area, rel=1e-12)


def test_boundary_faces_have_boundary_marker():
    m = build_uniform_squares(2)
    for f in m.faces:
        assert (f.minus == BOUNDARY) == f.is_boundary


def test_agglomerate_identity_is_isomorphic():
    fine = build_triangulated_squares(4)
    out = agglomerate(fine, len(fine.elements), seed=3)
    assert mesh_to_text(out) == mesh_to_text(fine)
    assert all(el.kind == "simplex" for el in out.elements)


def test_agglomerate_512_to_16_golden():
    fine = build_triangulated_squares(16)
    assert len(fine.elements) == 512
    agg = agglomerate(fine, 16, seed=7)
    assert len(agg.elements) == 16
    assert sum(el.area for el in agg.elements) == pytest.approx(1.0, rel=1e-12)
    assert validate(agg) == []
    text = mesh_to_text(agg)
    assert hashlib.sha256(text.encode()).hexdigest() == AGG_512_16_SEED7_SHA256


def test_agglomerate_deterministic():
    a = agglomerate(build_triangulated_squares(8), 8, seed=11)
    b = agglomerate(build_triangulated_squares(8), 8, seed=11)
    assert mesh_to_text(a) == mesh_to_text(b)


def test_agglomerate_rejects_bad_target():
    fine = build_triangulated_squares(4)
    with pytest.raises(MeshError):
        agglomerate(fine, 0, seed=1)
    with pytest.raises(MeshError):
        agglomerate(fine, len(fine.elements) + 1, seed=1)


def test_validate_flags_clockwise_element():
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    m = mesh_from_loops(verts, [[0, 3, 2, 1]], strict=False)
    diags = validate(m)
    assert sum("clockwise" in d for d in diags) == 1


def test_validate_flags_non_star_shaped():
    # U-shaped polygon: no point sees the whole boundary
    verts = np.array(
        [[0, 0], [3, 0], [3, 3], [2, 3], [2, 1], [1, 1], [1, 3], [0, 3]], dtype=float
    )
    m = mesh_from_loops(verts, [[0, 1, 2, 3, 4, 5, 6, 7]], strict=False)
    diags = validate(m)
    assert any("star-shaped" in d for d in diags)


def test_strict_build_rejects_clockwise():
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(MeshError):
        mesh_from_loops(verts, [[0, 3, 2, 1]])


def test_serialization_roundtrip_bytes():
    for m in (
        build_uniform_squares(3, (-1, 1, -1, 1)),
        build_nine_element(0.37),
        build_zigzag_nine_element(0.21, 2),
        agglomerate(build_triangulated_squares(8), 6, seed=5),
    ):
        text = mesh_to_text(m)
        again = mesh_from_text(text)
        assert mesh_to_text(again) == text
        assert len(again.elements) == len(m.elements)
        assert again.num_interior_faces == m.num_interior_faces
        for a, b in zip(again.elements, m.elements):
            assert a.kind == b.kind
            assert a.m == b.m


def test_serialization_rejects_bad_header():
    with pytest.raises(MeshError):
        mesh_from_text("NOTAMESH\n")


def test_polygon_centroid_matches_rectangle_center():
    pts = np.array([[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]])
    assert polygon_centroid(pts) == pytest.approx([1.0, 0.5])


def test_generators_are_deterministic():
    for build in (
        lambda: build_uniform_squares(4, (0, 2, 0, 2)),
        lambda: build_nine_element(0.123),
        lambda: build_zigzag_nine_element(0.3, 3),
    ):
        assert mesh_to_text(build()) == mesh_to_text(build())

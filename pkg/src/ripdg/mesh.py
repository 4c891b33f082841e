"""2D meshes for the DG solvers: uniform square grids, the layer-adapted
nine-element mesh, its zigzag polygonal variant, structured triangulations,
and seeded agglomeration of triangulations into polygonal elements.

Every element carries, besides its vertex loop, the facet-cluster data the
penalty formulas need: the number ``m`` of planar boundary facets and, per
cluster, the facet measure and the effective element measure entering the
trace inverse constant (the full element measure for simplices and boxes,
the star sub-triangle measure for general polygons).

Meshes are immutable after construction; all generators are deterministic
functions of their arguments.
"""

import random
from dataclasses import dataclass, field

import numpy as np

BOUNDARY = -1

_COLLINEAR_TOL = 1e-9  # radians between consecutive boundary segments


class MeshError(ValueError):
    pass


def polygon_signed_area(points) -> float:
    pts = np.asarray(points, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _tri_signed_area(a, b, c) -> float:
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def polygon_centroid(points) -> np.ndarray:
    """Area centroid of a simple polygon (falls back to the vertex mean for
    degenerate loops)."""
    pts = np.asarray(points, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * np.sum(cross)
    if area == 0.0:
        return pts.mean(axis=0)
    cx = np.sum((x + xn) * cross) / (6.0 * area)
    cy = np.sum((y + yn) * cross) / (6.0 * area)
    return np.array([cx, cy])


@dataclass
class Element:
    kind: str                 # "simplex" | "box" | "polygon"
    vertex_ids: list
    area: float
    bbox: tuple               # (x0, x1, y0, y1)
    star_center: np.ndarray
    m: int = 0                # number of facet clusters
    cluster_measures: np.ndarray = None
    cluster_areas: np.ndarray = None
    face_ids: list = field(default_factory=list)


@dataclass
class Face:
    v0: int
    v1: int                   # as traversed by the plus element
    measure: float
    normal: np.ndarray        # unit, from plus side to minus side
    plus: int
    minus: int                # BOUNDARY for boundary faces
    plus_cluster: int = 0
    minus_cluster: int = -1
    plus_subarea: float = 0.0
    minus_subarea: float = 0.0

    @property
    def is_boundary(self) -> bool:
        return self.minus == BOUNDARY


@dataclass
class Mesh:
    vertices: np.ndarray
    elements: list
    faces: list
    domain_bbox: tuple

    @property
    def num_interior_faces(self) -> int:
        return sum(1 for f in self.faces if not f.is_boundary)

    @property
    def num_boundary_faces(self) -> int:
        return sum(1 for f in self.faces if f.is_boundary)

    def face_endpoints(self, face):
        return self.vertices[face.v0], self.vertices[face.v1]

    def element_loop(self, elem_id):
        return self.vertices[self.elements[elem_id].vertex_ids]


def _is_star_shaped(loop_pts, center) -> bool:
    n = len(loop_pts)
    scale = max(1.0, float(np.max(np.abs(loop_pts))))
    for i in range(n):
        if _tri_signed_area(center, loop_pts[i], loop_pts[(i + 1) % n]) <= 1e-14 * scale:
            return False
    return True


def _deepest_interior_point(loop_pts):
    """Coarse grid search for the point deepest inside the polygon."""
    pts = np.asarray(loop_pts, dtype=float)
    a = pts
    b = np.roll(pts, -1, axis=0)
    lengths = np.hypot(*(b - a).T)

    def min_depth(cands):
        # signed distance of candidates to each boundary segment's line
        cross = (b[None, :, 0] - a[None, :, 0]) * (cands[:, None, 1] - a[None, :, 1]) - (
            b[None, :, 1] - a[None, :, 1]
        ) * (cands[:, None, 0] - a[None, :, 0])
        return np.min(cross / lengths[None, :], axis=1)

    x0, y0 = pts.min(axis=0)
    x1, y1 = pts.max(axis=0)
    best = None
    lo = np.array([x0, y0])
    hi = np.array([x1, y1])
    for _ in range(3):
        gx = np.linspace(lo[0], hi[0], 33)
        gy = np.linspace(lo[1], hi[1], 33)
        xx, yy = np.meshgrid(gx, gy)
        cands = np.column_stack([xx.ravel(), yy.ravel()])
        depths = min_depth(cands)
        k = int(np.argmax(depths))
        best = cands[k], depths[k]
        span = (hi - lo) / 8.0
        lo = best[0] - span
        hi = best[0] + span
    center, depth = best
    if depth <= 1e-12 * max(x1 - x0, y1 - y0):
        return None
    return center


def _facet_clusters(loop_pts):
    """Group consecutive boundary segments into maximal collinear runs.

    Returns the cluster index of each segment (segment i joins loop vertex i
    to i+1).  Runs may wrap around the loop start.
    """
    n = len(loop_pts)
    seg = np.roll(loop_pts, -1, axis=0) - loop_pts
    t = seg / np.hypot(seg[:, 0], seg[:, 1])[:, None]
    # True where segment i starts a new cluster (turn at vertex i)
    prev = np.roll(t, 1, axis=0)
    turn = np.abs(prev[:, 0] * t[:, 1] - prev[:, 1] * t[:, 0]) >= _COLLINEAR_TOL
    if not np.any(turn):
        raise MeshError("degenerate element: boundary has no corners")
    start = int(np.argmax(turn))
    cluster_of_seg = np.empty(n, dtype=int)
    cid = -1
    for k in range(n):
        i = (start + k) % n
        if turn[i]:
            cid += 1
        cluster_of_seg[i] = cid
    return cluster_of_seg


def _classify_kind(loop_pts) -> str:
    n = len(loop_pts)
    if n == 3:
        return "simplex"
    if n == 4:
        x = loop_pts[:, 0]
        y = loop_pts[:, 1]
        tol = 1e-12 * max(np.ptp(x), np.ptp(y))
        axis_aligned = all(
            abs(x[i] - x[(i + 1) % 4]) <= tol or abs(y[i] - y[(i + 1) % 4]) <= tol
            for i in range(4)
        )
        if axis_aligned:
            return "box"
    return "polygon"


def mesh_from_loops(vertices, loops, strict=True, star_strict_centroid=False):
    """Assemble a Mesh from a vertex table and CCW element vertex loops.

    With ``strict`` the constructor raises on inverted loops or elements that
    are not star-shaped; otherwise it builds what it can so that
    :func:`validate` can report the defects.
    """
    vertices = np.asarray(vertices, dtype=float)
    elements = []
    for eid, loop in enumerate(loops):
        loop = list(loop)
        pts = vertices[loop]
        area = polygon_signed_area(pts)
        if strict and area <= 0:
            raise MeshError(f"element {eid}: vertex loop is not counter-clockwise")
        centroid = polygon_centroid(pts)
        center = centroid
        if area > 0 and not _is_star_shaped(pts, centroid):
            if star_strict_centroid:
                raise MeshError(f"element {eid}: not star-shaped w.r.t. its centroid")
            fallback = _deepest_interior_point(pts)
            if fallback is None:
                if strict:
                    raise MeshError(f"element {eid}: no star center found")
            else:
                center = fallback
                if strict and not _is_star_shaped(pts, center):
                    raise MeshError(f"element {eid}: no star center found")
        x0, y0 = pts.min(axis=0)
        x1, y1 = pts.max(axis=0)
        elements.append(
            Element(
                kind=_classify_kind(pts),
                vertex_ids=loop,
                area=abs(area) if area != 0 else 0.0,
                bbox=(float(x0), float(x1), float(y0), float(y1)),
                star_center=np.asarray(center, dtype=float),
            )
        )
        elements[-1].area = area  # keep the sign for the validator
    # pair directed edges into faces
    edge_owner = {}
    for eid, el in enumerate(elements):
        loop = el.vertex_ids
        for k in range(len(loop)):
            a, b = loop[k], loop[(k + 1) % len(loop)]
            edge_owner.setdefault((min(a, b), max(a, b)), []).append((eid, k, a, b))
    faces = []
    for eid, el in enumerate(elements):
        loop = el.vertex_ids
        cluster_of_seg = _facet_clusters(vertices[loop]) if el.area != 0 else None
        el._cluster_of_seg = cluster_of_seg
    for eid, el in enumerate(elements):
        loop = el.vertex_ids
        for k in range(len(loop)):
            a, b = loop[k], loop[(k + 1) % len(loop)]
            owners = edge_owner[(min(a, b), max(a, b))]
            if len(owners) > 2:
                raise MeshError(f"edge {(a, b)} shared by more than two elements")
            if len(owners) == 2:
                other = owners[0] if owners[0][0] != eid else owners[1]
                if other[0] < eid or (other[0] == eid and other[1] < k):
                    continue  # face emitted when visiting the lower (eid, side)
                minus = other[0]
            else:
                minus = BOUNDARY
            pa, pb = vertices[a], vertices[b]
            t = pb - pa
            length = float(np.hypot(t[0], t[1]))
            if length == 0:
                raise MeshError(f"zero-length edge in element {eid}")
            normal = np.array([t[1], -t[0]]) / length
            face = Face(v0=a, v1=b, measure=length, normal=normal, plus=eid, minus=minus)
            cos_plus = elements[eid]._cluster_of_seg
            face.plus_cluster = int(cos_plus[k]) if cos_plus is not None else 0
            face.plus_subarea = abs(_tri_signed_area(pa, pb, elements[eid].star_center))
            if minus != BOUNDARY:
                mel = elements[minus]
                kk = next(
                    j
                    for j in range(len(mel.vertex_ids))
                    if mel.vertex_ids[j] == b
                    and mel.vertex_ids[(j + 1) % len(mel.vertex_ids)] == a
                )
                cos_minus = mel._cluster_of_seg
                face.minus_cluster = int(cos_minus[kk]) if cos_minus is not None else 0
                face.minus_subarea = abs(_tri_signed_area(pa, pb, mel.star_center))
            fid = len(faces)
            faces.append(face)
            elements[eid].face_ids.append(fid)
            if minus != BOUNDARY:
                elements[minus].face_ids.append(fid)
    # per-element cluster tables
    for eid, el in enumerate(elements):
        loop = el.vertex_ids
        cos = el._cluster_of_seg
        del el._cluster_of_seg
        if cos is None:
            continue
        ncl = int(np.max(cos)) + 1
        measures = np.zeros(ncl)
        areas = np.zeros(ncl)
        for k in range(len(loop)):
            a, b = loop[k], loop[(k + 1) % len(loop)]
            pa, pb = vertices[a], vertices[b]
            measures[cos[k]] += float(np.hypot(*(pb - pa)))
            areas[cos[k]] += abs(_tri_signed_area(pa, pb, el.star_center))
        el.m = ncl
        if el.kind in ("simplex", "box"):
            areas = np.full(ncl, abs(el.area))
        el.cluster_measures = measures
        el.cluster_areas = areas
    x0, y0 = vertices.min(axis=0)
    x1, y1 = vertices.max(axis=0)
    return Mesh(vertices, elements, faces, (float(x0), float(x1), float(y0), float(y1)))


def _tensor_mesh(xs, ys):
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    nx, ny = len(xs) - 1, len(ys) - 1
    vid = lambda i, j: j * (nx + 1) + i
    vertices = np.array([[xs[i], ys[j]] for j in range(ny + 1) for i in range(nx + 1)])
    loops = [
        [vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]
        for j in range(ny)
        for i in range(nx)
    ]
    return mesh_from_loops(vertices, loops)


def build_uniform_squares(n: int, domain=(0.0, 1.0, 0.0, 1.0)) -> Mesh:
    """n x n axis-aligned square grid on the rectangle (x0, x1, y0, y1)."""
    if n < 1:
        raise MeshError(f"need n >= 1, got {n}")
    x0, x1, y0, y1 = map(float, domain)
    if not (x1 > x0 and y1 > y0):
        raise MeshError(f"degenerate domain {domain}")
    return _tensor_mesh(np.linspace(x0, x1, n + 1), np.linspace(y0, y1, n + 1))


def build_nine_element(l: float) -> Mesh:
    """Layer-adapted 3x3 tensor mesh on (-1,1)^2 with breakpoints at +-(1-l)."""
    if not 0.0 < l < 1.0:
        raise MeshError(f"layer width must lie in (0, 1), got {l}")
    bp = np.array([-1.0, -1.0 + l, 1.0 - l, 1.0])
    return _tensor_mesh(bp, bp)


def _wave_offsets(periods: int):
    # triangular wave: zero at both ends, peaks +-1 at odd quarter-periods,
    # zero mean (even number of alternating peaks)
    ts = (2 * np.arange(2 * periods) + 1) / (4.0 * periods)
    signs = np.where(np.arange(2 * periods) % 2 == 0, 1.0, -1.0)
    return ts, signs


# With peak offset l/6 and square l x l corner cells / l x (2-2l) strips,
# star-shapedness admits at most 1 wave period on the short (length-l) faces
# and 3 on the long faces, independent of l (sight lines down a valley are
# blocked by the neighbouring peaks beyond these counts).
_MAX_PERIODS_SHORT = 1
_MAX_PERIODS_LONG = 3


def build_zigzag_nine_element(l: float, teeth: int = 4) -> Mesh:
    """Nine-element mesh whose 12 interior faces are triangular waves.

    Waves have peak offset l/6 normal to the original face and zero mean, so
    element areas match the straight mesh.  ``teeth`` is the requested number
    of full periods on the longest face; shorter faces get a proportionally
    smaller count, and every count is clamped to the largest value for which
    the adjacent cells stay star-shaped (see _MAX_PERIODS_*).
    """
    if not 0.0 < l < 1.0:
        raise MeshError(f"layer width must lie in (0, 1), got {l}")
    if teeth < 1:
        raise MeshError(f"need teeth >= 1, got {teeth}")
    amplitude = l / 6.0
    if amplitude >= min(l, 2.0 - 2.0 * l):
        raise MeshError(f"zigzag amplitude {amplitude} exceeds an adjacent element width")
    bp = np.array([-1.0, -1.0 + l, 1.0 - l, 1.0])
    len_long = max(l, 2.0 - 2.0 * l)
    vid = lambda i, j: j * 4 + i

    def build_with_cap(cap_long):
        verts = [[bp[i], bp[j]] for j in range(4) for i in range(4)]
        wave = {}  # (corner_id_a, corner_id_b) -> interior vertex ids, a->b order

        def add_wave(a_id, b_id):
            pa = np.array(verts[a_id])
            pb = np.array(verts[b_id])
            length = float(np.hypot(*(pb - pa)))
            cap = cap_long if length > 0.5 * (l + len_long) else _MAX_PERIODS_SHORT
            periods = max(1, min(round(teeth * length / len_long), cap))
            ts, signs = _wave_offsets(periods)
            tangent = (pb - pa) / length
            nrm = np.array([-tangent[1], tangent[0]])
            ids = []
            for t, s in zip(ts, signs):
                verts.append(list(pa + t * (pb - pa) + s * amplitude * nrm))
                ids.append(len(verts) - 1)
            wave[(a_id, b_id)] = ids
            wave[(b_id, a_id)] = ids[::-1]

        for line in (1, 2):  # interior vertical lines x = bp[line]
            for j in range(3):
                add_wave(vid(line, j), vid(line, j + 1))
        for line in (1, 2):  # interior horizontal lines y = bp[line]
            for i in range(3):
                add_wave(vid(i, line), vid(i + 1, line))

        def side(a_id, b_id):
            return [a_id] + wave.get((a_id, b_id), [])

        loops = []
        for j in range(3):
            for i in range(3):
                c = [vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]
                loops.append(
                    side(c[0], c[1]) + side(c[1], c[2]) + side(c[2], c[3]) + side(c[3], c[0])
                )
        return mesh_from_loops(np.array(verts), loops)

    last = None
    for cap_long in range(_MAX_PERIODS_LONG, 0, -1):
        try:
            return build_with_cap(cap_long)
        except MeshError as exc:
            last = exc
    raise MeshError(f"zigzag mesh infeasible for l={l}: {last}")


def build_triangulated_squares(n: int, domain=(0.0, 1.0, 0.0, 1.0)) -> Mesh:
    """Structured conforming triangulation: n x n cells, two triangles each."""
    if n < 1:
        raise MeshError(f"need n >= 1, got {n}")
    x0, x1, y0, y1 = map(float, domain)
    xs = np.linspace(x0, x1, n + 1)
    ys = np.linspace(y0, y1, n + 1)
    vid = lambda i, j: j * (n + 1) + i
    vertices = np.array([[xs[i], ys[j]] for j in range(n + 1) for i in range(n + 1)])
    loops = []
    for j in range(n):
        for i in range(n):
            loops.append([vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)])
            loops.append([vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)])
    return mesh_from_loops(vertices, loops)


def _chain_boundary_loop(boundary_edges):
    """Chain directed boundary edges into one CCW loop; None if not a single
    simple loop (hole or pinch vertex)."""
    succ = {}
    for a, b in boundary_edges:
        if a in succ:
            return None  # pinch: two boundary edges leave the same vertex
        succ[a] = b
    start = next(iter(succ))
    loop = [start]
    cur = succ[start]
    while cur != start:
        loop.append(cur)
        if cur not in succ or len(loop) > len(succ):
            return None
        cur = succ[cur]
    if len(loop) != len(succ):
        return None  # leftover edges form a second loop (hole)
    return loop


def agglomerate(fine: Mesh, target_count: int, seed: int) -> Mesh:
    """Merge a triangulation into ``target_count`` connected polygonal elements.

    Deterministic seeded multi-source BFS over the triangle dual graph.  The
    polygon loops keep every fine vertex; collinear runs are merged only in
    the facet-cluster bookkeeping.
    """
    ntri = len(fine.elements)
    if not all(el.kind == "simplex" for el in fine.elements):
        raise MeshError("agglomerate expects a triangulation")
    if not 1 <= target_count <= ntri:
        raise MeshError(f"target_count must be in [1, {ntri}], got {target_count}")
    neighbors = [[] for _ in range(ntri)]
    for f in fine.faces:
        if not f.is_boundary:
            neighbors[f.plus].append(f.minus)
            neighbors[f.minus].append(f.plus)
    for lst in neighbors:
        lst.sort()

    last_error = None
    for attempt in range(20):
        rng = random.Random(seed + 9973 * attempt)
        seeds = sorted(rng.sample(range(ntri), target_count))
        region = np.full(ntri, -1, dtype=int)
        queue = []
        for rid, s in enumerate(seeds):
            region[s] = rid
            queue.append(s)
        head = 0
        while head < len(queue):
            tri = queue[head]
            head += 1
            for nb in neighbors[tri]:
                if region[nb] == -1:
                    region[nb] = region[tri]
                    queue.append(nb)
        loops = []
        ok = True
        for rid in range(target_count):
            tris = np.nonzero(region == rid)[0]
            edges = {}
            for t in tris:
                loop = fine.elements[t].vertex_ids
                for k in range(3):
                    a, b = loop[k], loop[(k + 1) % 3]
                    if (b, a) in edges:
                        del edges[(b, a)]
                    else:
                        edges[(a, b)] = True
            loop = _chain_boundary_loop(list(edges))
            if loop is None:
                ok = False
                last_error = f"region {rid} of seed {seed + 9973 * attempt} is not simply connected"
                break
            loops.append(loop)
        if not ok:
            continue
        used = sorted({v for loop in loops for v in loop})
        remap = {v: i for i, v in enumerate(used)}
        loops = [[remap[v] for v in loop] for loop in loops]
        try:
            return mesh_from_loops(fine.vertices[used], loops)
        except MeshError as exc:
            last_error = str(exc)
            continue
    raise MeshError(f"agglomeration failed after 20 attempts: {last_error}")


def validate(mesh: Mesh) -> list:
    """Check all mesh invariants; returns one diagnostic string per violation."""
    diags = []
    total = 0.0
    for eid, el in enumerate(mesh.elements):
        pts = mesh.vertices[el.vertex_ids]
        signed = polygon_signed_area(pts)
        if signed <= 0:
            diags.append(f"element {eid}: non-positive/clockwise orientation (area {signed:g})")
            continue
        total += signed
        if abs(signed - el.area) > 1e-12 * max(1.0, abs(signed)):
            diags.append(f"element {eid}: stored area {el.area:g} != shoelace {signed:g}")
        if not _is_star_shaped(pts, el.star_center):
            diags.append(f"element {eid}: not star-shaped w.r.t. its star center")
        if el.m < 3:
            diags.append(f"element {eid}: facet cluster count {el.m} < 3")
        if el.kind == "simplex" and el.m != 3:
            diags.append(f"element {eid}: simplex with m={el.m}")
        if el.kind == "box" and el.m != 4:
            diags.append(f"element {eid}: box with m={el.m}")
        fan = 0.0
        for fid in el.face_ids:
            f = mesh.faces[fid]
            fan += f.plus_subarea if f.plus == eid else f.minus_subarea
        if abs(fan - signed) > 1e-12 * max(1.0, abs(signed)):
            diags.append(f"element {eid}: star sub-triangles sum {fan:g} != area {signed:g}")
    x0, x1, y0, y1 = mesh.domain_bbox
    domain_area = (x1 - x0) * (y1 - y0)
    if abs(total - domain_area) > 1e-12 * max(1.0, domain_area):
        diags.append(f"element areas sum {total:g} != domain area {domain_area:g}")
    for fid, f in enumerate(mesh.faces):
        if f.measure <= 0:
            diags.append(f"face {fid}: non-positive measure")
        if abs(np.hypot(*f.normal) - 1.0) > 1e-14:
            diags.append(f"face {fid}: normal not unit")
        pa, pb = mesh.face_endpoints(f)
        t = pb - pa
        n_plus = np.array([t[1], -t[0]]) / np.hypot(*t)
        if abs(float(np.dot(n_plus, f.normal)) - 1.0) > 1e-12:
            diags.append(f"face {fid}: stored normal disagrees with plus traversal")
        if f.is_boundary:
            on_edge = all(
                min(abs(p[0] - x0), abs(p[0] - x1), abs(p[1] - y0), abs(p[1] - y1))
                <= 1e-12 * max(x1 - x0, y1 - y0)
                for p in (pa, pb)
            )
            if not on_edge:
                diags.append(f"face {fid}: boundary face not on the domain boundary")
    return diags


def save_mesh(mesh: Mesh, path) -> None:
    with open(path, "w") as fh:
        fh.write(mesh_to_text(mesh))


def mesh_to_text(mesh: Mesh) -> str:
    lines = ["DGMESH 1", f"V {len(mesh.vertices)}"]
    for x, y in mesh.vertices:
        lines.append(f"{x:.17g} {y:.17g}")
    lines.append(f"E {len(mesh.elements)}")
    for el in mesh.elements:
        lines.append(" ".join([str(len(el.vertex_ids))] + [str(v) for v in el.vertex_ids]))
    return "\n".join(lines) + "\n"


def load_mesh(path) -> Mesh:
    with open(path) as fh:
        return mesh_from_text(fh.read())


def mesh_from_text(text: str) -> Mesh:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "DGMESH 1":
        raise MeshError("not a DGMESH 1 file")
    pos = 1
    tag, n = lines[pos].split()
    if tag != "V":
        raise MeshError("expected vertex count line")
    nv = int(n)
    pos += 1
    vertices = np.array([[float(t) for t in lines[pos + i].split()] for i in range(nv)])
    pos += nv
    tag, n = lines[pos].split()
    if tag != "E":
        raise MeshError("expected element count line")
    ne = int(n)
    pos += 1
    loops = []
    for i in range(ne):
        parts = [int(t) for t in lines[pos + i].split()]
        if parts[0] != len(parts) - 1:
            raise MeshError(f"element line {i}: bad vertex count")
        loops.append(parts[1:])
    return mesh_from_loops(vertices, loops)

"""Agglomeration of a structured triangulation into polygonal elements via
seeded breadth-first growth of the dual graph, then a Poisson solve on the
resulting 16-polygon mesh for p = 1..4.
"""

from ripdg import agglomerate, build_triangulated_squares, validate
from ripdg.experiments import preset, run_config

fine = build_triangulated_squares(16)
coarse = agglomerate(fine, 16, seed=7)
print(f"{len(fine.elements)} triangles -> {len(coarse.elements)} polygons")
print("facet clusters per polygon:", sorted(el.m for el in coarse.elements))
print("areas sum:", sum(el.area for el in coarse.elements))
print("validation diagnostics:", validate(coarse))

reports, _ = run_config({**preset("ex3"), "output": {"error_quad_extra": 6}})
print(f"\n{'run':26} {'dG error':>10} {'max sigma':>10} {'cond2':>10}")
for r in reports:
    print(f"{r.run_id:26} {r.err_dg:10.3e} {r.max_sigma_interior:10.4g} {r.cond2:10.4g}")

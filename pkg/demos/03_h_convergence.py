"""Mesh refinement study for the Poisson problem with u = sin(pi x) sin(pi y).

Both methods converge at the optimal rates: p+1 in L2 and p in the energy
norm.
"""

from ripdg import DgSpace, IPDG, RIPDG, MethodConfig, assemble, build_uniform_squares
from ripdg import eoc, error_dg, error_l2, solve
from ripdg.experiments import PROBLEMS

make, domain, _ = PROBLEMS["poisson_sin"]
problem = make({})

for variant in (IPDG, RIPDG):
    print(f"--- {variant} ---")
    for p in (1, 2, 3):
        l2s, dgs, hs = [], [], []
        for n in (4, 8, 16):
            mesh = build_uniform_squares(n, domain)
            space = DgSpace(mesh, p)
            system = assemble(space, problem, MethodConfig(variant=variant))
            x, _ = solve(system.A, system.b)
            l2s.append(error_l2(space, x, problem.exact))
            dgs.append(error_dg(space, x, problem, system.face_weights))
            hs.append(1.0 / n)
        print(
            f"p={p}: L2 errors {[f'{e:.2e}' for e in l2s]} rates "
            f"{[f'{r:.2f}' for r in eoc(l2s, hs)]}, dG rates "
            f"{[f'{r:.2f}' for r in eoc(dgs, hs)]}"
        )

"""Degenerate diffusion a = diag(x^2, 1) whose normal component vanishes on
the line x = 0.

The inconsistent variant projects the flux sqrt(a) grad(u) before averaging;
on the faces where sqrt(a) n vanishes from both sides the weights and the
penalty drop to zero, and the symmetric system stays positive semidefinite.
"""

import numpy as np
import scipy.linalg as sla

from ripdg import DgSpace, MethodConfig, ProblemSpec, RIPDG_DEG, assemble
from ripdg import build_uniform_squares

a = lambda x, y: np.array([[x * x, 0.0], [0.0, 1.0]])
problem = ProblemSpec(diffusion=a, source=lambda x, y: 1.0)

mesh = build_uniform_squares(4, (-1, 1, -1, 1))
space = DgSpace(mesh, 2)
system = assemble(space, problem, MethodConfig(variant=RIPDG_DEG, theta=1.0))

print("faces on the degenerate line x = 0:")
for fw, f in zip(system.face_weights, mesh.faces):
    pa, pb = mesh.face_endpoints(f)
    if not f.is_boundary and abs(pa[0]) < 1e-14 and abs(pb[0]) < 1e-14:
        print(f"  y in [{min(pa[1], pb[1]):+.2f}, {max(pa[1], pb[1]):+.2f}]: "
              f"w = ({fw.w_plus:g}, {fw.w_minus:g}), sigma = {fw.sigma:g}")

A = system.A.toarray()
w = sla.eigvalsh(A)
print(f"symmetry defect: {np.max(np.abs(A - A.T)):.2e}")
print(f"eigenvalue range: [{w[0]:.3e}, {w[-1]:.3e}]  (positive semidefinite)")

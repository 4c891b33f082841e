"""Symmetric sparse solves and 2-norm condition numbers.

Dense LDL^t factorization handles systems up to DENSE_LIMIT unknowns;
larger symmetric positive definite systems fall back to diagonally
preconditioned conjugate gradients.  Condition numbers come from a dense
symmetric eigensolve below the same limit and from Lanczos extremes above
it.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

DENSE_LIMIT = 4000


class SolverError(RuntimeError):
    pass


@dataclass
class SolveInfo:
    iterations: int
    residual: float


def validate_sparse_symmetric(A: sp.csr_matrix, tol: float = 1e-12) -> None:
    """Raise if A is not CSR with sorted indices and symmetric structure/values."""
    if not sp.issparse(A):
        raise SolverError("expected a scipy sparse matrix")
    A = A.tocsr()
    if not A.has_sorted_indices:
        raise SolverError("CSR column indices are not sorted")
    scale = abs(A).max() or 1.0
    if abs(A - A.T).max() > tol * scale:
        raise SolverError("matrix is not symmetric")


def _as_dense(A):
    return A.toarray() if sp.issparse(A) else np.asarray(A)


def solve(A, b, tol: float = 1e-12, dense_limit: int = DENSE_LIMIT):
    """Solve the SPD system A x = b; returns (x, SolveInfo).

    Dense LDL^t for n <= dense_limit, else CG with diagonal scaling; either
    way the relative residual of the returned x is checked against tol.
    """
    b = np.asarray(b, dtype=float)
    n = len(b)
    bnorm = float(np.linalg.norm(b))
    if n <= dense_limit:
        dense = _as_dense(A)
        L, D, perm = sla.ldl(dense)
        d = np.diagonal(D)
        if np.any(d <= 0) or abs(D - np.diag(d)).max() > 1e-12 * max(abs(d).max(), 1.0):
            raise SolverError("LDL^t factorization found a non-SPD pivot")
        y = sla.solve_triangular(L[perm], b[perm], lower=True, unit_diagonal=True)
        z = y / d
        x = np.empty_like(b)
        x[perm] = sla.solve_triangular(L[perm].T, z, lower=False, unit_diagonal=True)
        info = SolveInfo(iterations=0, residual=0.0)
    else:
        A = A.tocsr()
        d = A.diagonal()
        if np.any(d <= 0):
            raise SolverError("non-positive diagonal; matrix is not SPD")
        M = sp.diags(1.0 / d)
        iters = 0

        def count(_):
            nonlocal iters
            iters += 1

        x, flag = spla.cg(A, b, rtol=tol, maxiter=50 * n, M=M, callback=count)
        if flag != 0:
            raise SolverError(f"CG did not converge (flag {flag} after {iters} iterations)")
        info = SolveInfo(iterations=iters, residual=0.0)
    res = float(np.linalg.norm(A @ x - b))
    info.residual = res / bnorm if bnorm > 0 else res
    if bnorm > 0 and info.residual > max(tol * 10, 1e-10):
        raise SolverError(f"solve residual {info.residual:.2e} exceeds tolerance")
    return x, info


def condition_number_2(A, method: str = "auto", dense_limit: int = DENSE_LIMIT,
                       lanczos_tol: float = 1e-6) -> float:
    """2-norm condition number |lambda|_max / |lambda|_min of a symmetric matrix."""
    n = A.shape[0]
    if method == "auto":
        method = "dense" if n <= dense_limit else "lanczos"
    if method == "dense":
        w = sla.eigvalsh(_as_dense(A))
        amax = float(np.max(np.abs(w)))
        amin = float(np.min(np.abs(w)))
    elif method == "lanczos":
        A = A.tocsc()
        amax = float(abs(spla.eigsh(A, k=1, which="LM", tol=lanczos_tol,
                                    return_eigenvectors=False)[0]))
        # smallest magnitude via shift-invert at zero
        amin = float(abs(spla.eigsh(A, k=1, sigma=0.0, which="LM", tol=lanczos_tol,
                                    return_eigenvectors=False)[0]))
    else:
        raise ValueError(f"unknown method {method!r}")
    if amin < 1e-300:
        raise SolverError("matrix is numerically singular")
    return amax / amin


def min_generalized_eig(A, B, null_tol: float = 1e-10) -> float:
    """Smallest finite generalized eigenvalue of (A, B) for symmetric A and
    positive semidefinite B: inf of v^T A v / v^T B v over v with v^T B v > 0
    (the Schur complement of A on the null space of B enters when B is
    singular)."""
    A = 0.5 * (_as_dense(A) + _as_dense(A).T)
    B = 0.5 * (_as_dense(B) + _as_dense(B).T)
    w, U = sla.eigh(B)
    null = w < null_tol * max(w.max(), 1.0)
    if not null.any():
        return float(sla.eigh(A, B, eigvals_only=True)[0])
    Z = U[:, null]
    R = U[:, ~null]
    wr = w[~null]
    A00 = Z.T @ A @ Z
    A0r = Z.T @ A @ R
    S = R.T @ A @ R - A0r.T @ sla.solve(A00, A0r, assume_a="pos")
    S = 0.5 * (S + S.T)
    return float(sla.eigh(S, np.diag(wr), eigvals_only=True)[0])

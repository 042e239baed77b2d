"""
Dense symmetric linear algebra.

Small problems only: every matrix handled here is either a per-agent Hessian
(dimension ~10) or a mixing matrix (one row per agent). Extreme eigenvalues
come from cyclic Jacobi rotations, SPD systems from a Cholesky factorization.
"""

import numpy as np

from ._validation import check_matrix, check_vector
from .exceptions import ConfigurationError, NumericError, SingularityError

#: Largest dimension handled by the Jacobi sweep; bigger matrices go to LAPACK.
JACOBI_MAX_DIM = 64
MAX_SWEEPS = 100


def as_symmetric(M):
    """Return the symmetric part ``(M + M.T) / 2`` as a read-only array."""
    M = check_matrix(M, square=True)
    S = 0.5 * (M + M.T)
    S.flags.writeable = False
    return S


def matvec(M, v):
    """Matrix-vector product with dimension checking."""
    M = check_matrix(M, square=True)
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] != M.shape[1]:
        raise ConfigurationError(
            f"dimension mismatch: matrix {M.shape} times vector {v.shape}")
    return M @ v


def jacobi_eigenvalues(M, tol=1e-15, max_sweeps=MAX_SWEEPS):
    """All eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    M : array_like, shape (n, n)
        Symmetric matrix. Only the symmetric part is used.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm falls below
        ``tol * ||M||_F``.
    max_sweeps : int
        Sweep cap. Exceeding it raises :class:`NumericError` carrying the
        remaining off-diagonal norm as ``residual``.

    Returns
    -------
    ndarray
        Eigenvalues in ascending order.
    """
    A = np.array(as_symmetric(M))
    n = A.shape[0]
    scale = np.linalg.norm(A)
    if n == 1 or scale == 0.0:
        return np.sort(np.diag(A))
    threshold = tol * scale

    def off_norm():
        return np.linalg.norm(A - np.diag(np.diag(A)))

    for _ in range(max_sweeps):
        if off_norm() <= threshold:
            return np.sort(np.diag(A))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                # A <- J^T A J with the (p, q) plane rotation J
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                A[p, q] = A[q, p] = 0.0
    residual = off_norm()
    if residual <= threshold:
        return np.sort(np.diag(A))
    raise NumericError(
        f"Jacobi eigensolver did not converge in {max_sweeps} sweeps",
        residual=residual)


def sym_eigvals(M):
    """Ascending eigenvalues of the symmetric part of ``M``."""
    S = as_symmetric(M)
    if S.shape[0] <= JACOBI_MAX_DIM:
        return jacobi_eigenvalues(S)
    return np.linalg.eigvalsh(S)


def sym_eig_bounds(M):
    """Return ``(lambda_min, lambda_max)`` of a symmetric matrix."""
    w = sym_eigvals(M)
    return float(w[0]), float(w[-1])


def cholesky(M):
    """Lower-triangular Cholesky factor of an SPD matrix.

    Raises :class:`SingularityError` as soon as a pivot is not positive.
    """
    A = np.array(as_symmetric(M))
    n = A.shape[0]
    Lf = np.zeros_like(A)
    for j in range(n):
        d = A[j, j] - Lf[j, :j] @ Lf[j, :j]
        if not d > 0.0:
            raise SingularityError(
                f"non-positive pivot {d!r} at column {j}",
                lambda_min=sym_eig_bounds(A)[0])
        Lf[j, j] = np.sqrt(d)
        Lf[j + 1:, j] = (A[j + 1:, j] - Lf[j + 1:, :j] @ Lf[j, :j]) / Lf[j, j]
    return Lf


def _forward(Lf, b):
    z = np.empty_like(b)
    for i in range(len(b)):
        z[i] = (b[i] - Lf[i, :i] @ z[:i]) / Lf[i, i]
    return z


def _backward(U, b):
    n = len(b)
    z = np.empty_like(b)
    for i in range(n - 1, -1, -1):
        z[i] = (b[i] - U[i, i + 1:] @ z[i + 1:]) / U[i, i]
    return z


def spd_solve(M, rhs):
    """Solve ``M z = rhs`` for symmetric positive definite ``M``.

    ``M`` is rejected with :class:`SingularityError` when its smallest
    eigenvalue is not above ``1e-12`` times its largest.
    """
    S = as_symmetric(M)
    rhs = check_vector(rhs, dim=S.shape[0], name="rhs")
    lo, hi = sym_eig_bounds(S)
    if not lo > 1e-12 * max(hi, 0.0) or hi <= 0.0:
        raise SingularityError(
            f"matrix is not positive definite (lambda_min={lo!r})",
            lambda_min=lo)
    Lf = cholesky(S)
    return _backward(Lf.T, _forward(Lf, rhs))

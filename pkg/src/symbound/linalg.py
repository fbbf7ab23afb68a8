"""Dense numerical kernels: cyclic Jacobi, triangular factorizations, pencils."""

import numpy as np

from .errors import NotPositiveDefinite, NotSymmetric

SYM_TOL = 1e-10
PIVOT_TOL = 1e-12


def symmetrize(a):
    a = np.asarray(a, dtype=float)
    return 0.5 * (a + a.T)


def check_symmetric(a, tol=SYM_TOL):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {a.shape}")
    scale = max(np.max(np.abs(a)), 1.0) if a.size else 1.0
    if np.max(np.abs(a - a.T), initial=0.0) > tol * scale:
        raise NotSymmetric("matrix is not symmetric within tolerance")


def cholesky_lower(a):
    """Lower-triangular ``L`` with ``a = L @ L.T``.

    Raises :class:`NotPositiveDefinite` unless every pivot ``L[i, i]**2``
    exceeds ``1e-12 * trace(a) / n``.
    """
    a = symmetrize(a)
    n = a.shape[0]
    threshold = PIVOT_TOL * max(np.trace(a), 0.0) / max(n, 1)
    try:
        low = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("triangular factorization failed") from None
    pivots = np.diag(low) ** 2
    if np.trace(a) <= 0 or np.any(pivots <= threshold):
        raise NotPositiveDefinite(f"pivot below threshold: min pivot {pivots.min():.3e}")
    return low


def upper_cholesky(a):
    """Upper-triangular ``U`` with ``a = U @ U.T`` (reverse-order Cholesky)."""
    flip = np.asarray(a, dtype=float)[::-1, ::-1]
    low = cholesky_lower(flip)
    return low[::-1, ::-1]


def off_norm(a):
    off = a - np.diag(np.diag(a))
    return np.sqrt(np.sum(off * off))


def jacobi_eigh(a, rel_tol=1e-12, max_sweeps=60):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps run over pairs ``(p, q)`` in row-major order until the
    off-diagonal Frobenius norm drops below ``rel_tol * ||a||_F``.  The
    result is sorted by non-increasing eigenvalue with a stable sort, so ties
    keep the order produced by the sweeps.

    Returns
    -------
    values : ndarray, shape (n,)
    vectors : ndarray, shape (n, n)
        Orthonormal eigenvectors as columns.
    """
    a = symmetrize(a).copy()
    n = a.shape[0]
    v = np.eye(n)
    total = np.sqrt(np.sum(a * a))
    if n > 1 and total > 0:
        for _ in range(max_sweeps):
            if off_norm(a) <= rel_tol * total:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    with np.errstate(over="ignore"):
                        theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                    # hypot keeps the tangent finite when apq is negligible
                    t = 1.0 if theta == 0.0 else np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0))
                    c = 1.0 / np.sqrt(t * t + 1.0)
                    s = t * c
                    rot_p = a[:, p].copy()
                    rot_q = a[:, q].copy()
                    a[:, p] = c * rot_p - s * rot_q
                    a[:, q] = s * rot_p + c * rot_q
                    rot_p = a[p, :].copy()
                    rot_q = a[q, :].copy()
                    a[p, :] = c * rot_p - s * rot_q
                    a[q, :] = s * rot_p + c * rot_q
                    a[p, q] = a[q, p] = 0.0
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = c * vp - s * vq
                    v[:, q] = s * vp + c * vq
    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    return values[order], v[:, order]


def pencil_eig(x, y):
    """Solve ``det(x - lam * y) = 0`` by reduction through ``y = L L^T``.

    Returns the roots in non-increasing order and a frame ``g`` with
    ``y = g g^T`` and ``x = g diag(lam) g^T``.
    """
    low = cholesky_lower(y)
    half = np.linalg.solve(low, symmetrize(x))
    reduced = np.linalg.solve(low, half.T)
    lam, u = jacobi_eigh(reduced)
    return lam, low @ u


def orthonormal_columns(m):
    """Orthonormal basis for the column span, preserving leading spans."""
    q, _ = np.linalg.qr(np.asarray(m, dtype=float))
    return q


def projector(cols):
    cols = np.asarray(cols, dtype=float)
    if cols.shape[1] == 0:
        return np.zeros((cols.shape[0], cols.shape[0]))
    return cols @ cols.T


def polar_orthogonal(m):
    """Orthogonal polar factor (nearest orthogonal matrix) of a square matrix."""
    u, _, vt = np.linalg.svd(m)
    return u @ vt

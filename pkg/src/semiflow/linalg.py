"""Small dense linear algebra kernels: Sturm bisection and power iteration."""

from __future__ import annotations

import numpy as np

_PIVOT_FLOOR = 1e-300


def sturm_count(diag, off_sq, x: float) -> int:
    """Number of eigenvalues strictly below ``x``.

    ``off_sq`` holds the squared off-diagonal entries, so the sign of each
    off-diagonal entry never matters.
    """
    count = 0
    q = diag[0] - x
    if q < 0:
        count += 1
    for i in range(1, len(diag)):
        if q == 0:
            q = _PIVOT_FLOOR
        q = diag[i] - x - off_sq[i - 1] / q
        if q < 0:
            count += 1
    return count


def gershgorin_interval(diag, off) -> tuple[float, float]:
    diag = np.asarray(diag, dtype=float)
    a = np.abs(np.asarray(off, dtype=float))
    radius = np.zeros_like(diag)
    radius[:-1] += a
    radius[1:] += a
    return float(np.min(diag - radius)), float(np.max(diag + radius))


def tridiagonal_eigenvalue(diag, off, k: int = -1, tol: float = 1e-13) -> float:
    """k-th smallest eigenvalue (``-1`` for the largest) of a real symmetric
    tridiagonal matrix, by bisection on Sturm counts to absolute ``tol``."""
    diag = [float(d) for d in diag]
    n = len(diag)
    if n == 0:
        raise ValueError("empty matrix")
    off = [float(e) for e in off]
    if len(off) != n - 1:
        raise ValueError("off-diagonal must have length n - 1")
    if k < 0:
        k += n
    if not 0 <= k < n:
        raise IndexError(k)
    off_sq = [e * e for e in off]
    lo, hi = gershgorin_interval(diag, off) if n > 1 else (diag[0], diag[0])
    pad = tol + 1e-15 * max(abs(lo), abs(hi), 1.0)
    lo, hi = lo - pad, hi + pad
    # invariant: count(lo) <= k < count(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sturm_count(diag, off_sq, mid) > k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def power_norm(M: np.ndarray, v0: np.ndarray, tol: float, maxiter: int):
    """Largest singular value of ``M`` by power iteration on ``M* M``.

    Returns ``(sigma, iterations, residual)`` where the residual is
    ``||M*M v - lambda v|| / lambda`` for the final unit vector ``v``.
    """
    gram = M.conj().T @ M
    v = np.asarray(v0, dtype=complex)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ValueError("zero start vector")
    v = v / nv
    lam, res = 0.0, np.inf
    it = 0
    for it in range(1, maxiter + 1):
        w = gram @ v
        lam = float(np.vdot(v, w).real)
        nw = np.linalg.norm(w)
        if nw == 0 or lam <= 0:
            return 0.0, it, 0.0
        res = float(np.linalg.norm(w - lam * v) / lam)
        v = w / nw
        if res <= tol:
            break
    # Rayleigh quotient of the final iterate is at least as good as lam
    Mv = M @ v
    lam = max(lam, float(np.vdot(Mv, Mv).real))
    return float(np.sqrt(lam)), it, res

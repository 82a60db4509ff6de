"""Dense linear algebra kernels: pivoted LU solves and the Perron eigenpair."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InputError, NoConvergence, SingularMatrix
from .graphs import is_connected

PIVOT_RTOL = 1e-13
SOLVE_RTOL = 1e-9
# iterative refinement steps, residuals accumulated in extended precision
REFINE_STEPS = 3

POWER_SHIFT = 1.0
POWER_MAXITER = 100_000
RAYLEIGH_TOL = 1e-13
# stop once ||A nu - lambda nu||_inf <= EIG_RTOL * lambda
EIG_RTOL = 1e-13
# the reported pair must satisfy this bound or NoConvergence is raised
EIG_ACCEPT_RTOL = 1e-10
# componentwise relative change of nu between iterations at which to stop
NU_RTOL = 4 * np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class PerronData:
    """Dominant eigenvalue ``lambda1`` and positive unit eigenvector ``nu``."""

    lambda1: float
    nu: np.ndarray
    iterations: int = 0
    residual: float = 0.0

    def to_dict(self) -> dict:
        return {
            "lambda1": self.lambda1,
            "nu": self.nu,
            "iterations": self.iterations,
            "residual": self.residual,
        }


class LU:
    """Partial-pivoting LU factorization of a square matrix.

    A pivot smaller than ``PIVOT_RTOL`` times the max-norm of the original row
    it came from is treated as an exact zero and raises ``SingularMatrix``.
    """

    def __init__(self, M):
        # an extended-precision matrix is kept as is for refinement residuals
        M = np.asarray(M)
        M = M if M.dtype == np.longdouble else M.astype(float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise InputError(f"expected a square matrix, got shape {M.shape}")
        if not np.all(np.isfinite(M)):
            raise InputError("matrix has non-finite entries")
        self.M = M
        self.n = M.shape[0]
        if self.n == 0:
            self.lu, self.piv = M.copy(), np.zeros(0, dtype=np.int32)
            return
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            self.lu, self.piv = scipy.linalg.lu_factor(M.astype(float), check_finite=False)
        perm = np.arange(self.n)
        for i, p in enumerate(self.piv):
            perm[i], perm[p] = perm[p], perm[i]
        row_scale = np.abs(M[perm]).max(axis=1).astype(float)
        pivots = np.abs(np.diag(self.lu))
        bad = np.flatnonzero(pivots <= PIVOT_RTOL * row_scale)
        if bad.size:
            k = int(bad[0])
            raise SingularMatrix(
                f"pivot {pivots[k]:.3e} at step {k} is below {PIVOT_RTOL:g} of its row scale"
            )

    def solve(self, b, trans: bool = False) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        if b.shape[0] != self.n:
            raise InputError(f"right-hand side has length {b.shape[0]}, expected {self.n}")
        if self.n == 0:
            return b.copy()
        t = 1 if trans else 0
        x = scipy.linalg.lu_solve((self.lu, self.piv), b, trans=t, check_finite=False)
        M = self.M.T if trans else self.M
        # Refinement recovers the accuracy that plain LU loses on systems such
        # as MERW hitting times near low-weight targets (values ~1e4 or more).
        Ml, bl = M.astype(np.longdouble), b.astype(np.longdouble)
        for _ in range(REFINE_STEPS):
            r = bl - Ml @ x.astype(np.longdouble)
            dx = scipy.linalg.lu_solve((self.lu, self.piv), r.astype(float), trans=t, check_finite=False)
            x = (x.astype(np.longdouble) + dx).astype(float)
            if np.abs(dx).max(initial=0.0) <= np.finfo(float).eps * np.abs(x).max(initial=0.0):
                break
        res = residual(M.astype(float), x, b)
        if res > SOLVE_RTOL * (1 + np.abs(b).max(initial=0.0)):
            raise SingularMatrix(f"solve residual {res:.3e} exceeds tolerance (ill-conditioned system)")
        return x


def residual(M, x, b) -> float:
    """Infinity norm of ``M x - b``."""
    return float(np.abs(np.asarray(M) @ x - b).max(initial=0.0))


def solve(M, b) -> np.ndarray:
    """Solve ``M x = b`` by LU with partial pivoting.

    Guarantees ``||M x - b||_inf <= 1e-9 * (1 + ||b||_inf)``; raises
    ``SingularMatrix`` otherwise or when a pivot underflows its row scale.
    """
    return LU(M).solve(b)


def perron(g_or_matrix) -> PerronData:
    """Perron eigenpair of a connected graph (or irreducible non-negative matrix).

    Power iteration on ``A + I``: the shift makes the dominant eigenvalue the
    unique one of maximal modulus, also for bipartite graphs whose spectrum
    contains ``-lambda1``. The start vector is ``1/sqrt(n)``. Iteration stops
    once successive Rayleigh quotients agree to 1e-13, the eigen-residual is at
    the floating-point floor and every entry of ``nu`` is stable to a few ulps
    relative to itself (or stops improving). Small entries matter: MERW hitting
    times scale like ``1/nu`` and inherit their relative error. ``NoConvergence``
    is raised if the residual is still above ``1e-10 * lambda1`` after
    ``POWER_MAXITER`` steps.

    Parameters
    ----------
    g_or_matrix : Graph or array_like
        Symmetric or non-symmetric non-negative square matrix. For a
        non-symmetric matrix the right eigenvector is returned.

    Returns
    -------
    PerronData
        ``lambda1`` is the Rayleigh quotient of the unshifted matrix and
        ``nu`` has unit Euclidean norm with positive entries.
    """
    A = np.asarray(getattr(g_or_matrix, "adj", g_or_matrix), dtype=float)
    n = A.shape[0]
    if A.ndim != 2 or n != A.shape[1] or n == 0:
        raise InputError("perron needs a non-empty square matrix")
    if np.any(A < 0):
        raise InputError("perron needs a non-negative matrix")
    if not is_connected(A):
        raise InputError("perron needs an irreducible matrix (connected graph)")
    S = A + POWER_SHIFT * np.eye(n)
    x = np.full(n, 1.0 / np.sqrt(n))
    lam_prev = np.inf
    best = np.inf
    stalled = 0
    res = np.inf
    lam = float(x @ A @ x)
    for it in range(1, POWER_MAXITER + 1):
        y = S @ x
        y /= np.linalg.norm(y)
        change = float(np.abs(y - x).max() / max(y.min(), np.finfo(float).tiny))
        x = y
        Ax = A @ x
        lam = float(x @ Ax)
        res = float(np.abs(Ax - lam * x).max())
        scale = max(abs(lam), np.finfo(float).tiny)
        if abs(lam - lam_prev) < RAYLEIGH_TOL * max(1.0, scale) and res <= EIG_ACCEPT_RTOL * scale:
            if res <= EIG_RTOL * scale and change <= NU_RTOL:
                break
            # rounding floor reached: nu no longer changes less per step
            if change < best * (1 - 1e-3):
                best, stalled = change, 0
            else:
                stalled += 1
                if stalled >= 50:
                    break
        lam_prev = lam
    else:
        if not res <= EIG_ACCEPT_RTOL * max(abs(lam), np.finfo(float).tiny):
            raise NoConvergence(f"power iteration residual {res:.3e} after {POWER_MAXITER} iterations")
    if np.any(x <= 0):
        raise NoConvergence("Perron vector has non-positive entries (matrix reducible?)")
    return PerronData(lambda1=lam, nu=x, iterations=it, residual=res)

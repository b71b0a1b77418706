"""Small dense numeric kernel: pivoted LU solve, damped Newton, principal log."""

from dataclasses import dataclass, field
import warnings

import numpy as np
import scipy.linalg as la

from .exceptions import DomainError, SingularMatrix, ValidationError

PIVOT_FLOOR = 1e-300


def lu_solve(A, b, rtol=0.0):
    """Solve ``A x = b`` by LU factorization with partial pivoting.

    Parameters
    ----------
    A : (n, n) array_like, real or complex
    b : (n,) or (n, k) array_like
    rtol : float, optional
        Pivots smaller than ``max(1e-300, rtol * ||A||_inf)`` are treated as
        zero. The default only rejects pivots that have underflowed.

    Raises
    ------
    SingularMatrix
        If a pivot falls below the threshold.
    """
    A = np.asarray(A)
    b = np.asarray(b)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A must be square, got shape {A.shape}")
    if b.shape[0] != A.shape[0]:
        raise ValueError(f"dimension mismatch: A is {A.shape}, b is {b.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise ValueError("A and b must be finite")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", la.LinAlgWarning)
        lu, piv = la.lu_factor(A, check_finite=False)
    pivots = np.abs(np.diag(lu))
    threshold = max(PIVOT_FLOOR, rtol * np.abs(A).sum(axis=1).max())
    if pivots.min() <= threshold:
        raise SingularMatrix(
            f"pivot {pivots.min():.3e} below threshold {threshold:.3e}"
        )
    return la.lu_solve((lu, piv), b, check_finite=False)


def gauss_solve(A, b, rtol=0.0):
    """Gaussian elimination with partial pivoting in the dtype of ``A``.

    Used with ``np.clongdouble`` where LAPACK has no routine: on x86 this
    carries about three more significant digits than double precision.
    Meant for the small systems of chain models.

    Raises
    ------
    SingularMatrix
        If a pivot is at most ``max(1e-300, rtol * ||A||_inf)``.
    """
    A = np.array(A)
    x = np.array(b, dtype=A.dtype)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n or x.shape != (n,):
        raise ValueError(f"incompatible shapes {A.shape} and {np.shape(b)}")
    threshold = max(PIVOT_FLOOR, rtol * float(np.abs(A).sum(axis=1).max()))
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if abs(A[p, k]) <= threshold:
            raise SingularMatrix(f"pivot {float(abs(A[p, k])):.3e} below threshold {threshold:.3e}")
        if p != k:
            A[[k, p]] = A[[p, k]]
            x[[k, p]] = x[[p, k]]
        f = A[k + 1:, k] / A[k, k]
        A[k + 1:, k:] -= np.outer(f, A[k, k:])
        x[k + 1:] -= f * x[k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - A[k, k + 1:] @ x[k + 1:]) / A[k, k]
    return x


def principal_log(z):
    """Complex logarithm with the imaginary part in (-pi, pi].

    Points on the negative real axis map to ``+i*pi`` whatever the sign of
    their zero imaginary part.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("logarithm of zero")
    out = np.log(z)
    # np.log sends -r - 0j to ln(r) - i*pi
    out = np.where(out.imag == -np.pi, out.real + 1j * np.pi, out)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class NewtonConfig:
    tol: float = 1e-12
    max_iter: int = 100
    fd_step: float = 1e-7
    backtrack: float = 0.5
    max_halvings: int = 40

    def __post_init__(self):
        if not self.tol > 0:
            raise ValidationError("tol must be positive", "tol")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be >= 1", "max_iter")
        if not self.fd_step > 0:
            raise ValidationError("fd_step must be positive", "fd_step")
        if not 0 < self.backtrack < 1:
            raise ValidationError("backtrack must lie in (0, 1)", "backtrack")


@dataclass
class NewtonResult:
    x: np.ndarray
    residual: float
    converged: bool
    n_iter: int
    history: list = field(default_factory=list)

    def __iter__(self):
        # allows ``x, residual, converged = newton_solve(...)``
        return iter((self.x, self.residual, self.converged))


def _norm(r):
    r = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(r)):
        return np.inf
    return float(np.abs(r).max()) if r.size else 0.0


def numeric_jacobian(fun, x, rel_step=1e-7, f0=None):
    """Central-difference Jacobian of ``fun`` at ``x``.

    The step for component i is ``rel_step * max(|x_i|, 1)``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if f0 is None:
        f0 = np.asarray(fun(x), dtype=float)
    J = np.empty((f0.size, n))
    for i in range(n):
        h = rel_step * max(abs(x[i]), 1.0)
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        J[:, i] = (np.asarray(fun(xp), dtype=float) - np.asarray(fun(xm), dtype=float)) / (2 * h)
    return J


def newton_solve(residual_fn, x0, config=None):
    """Damped Newton iteration with a finite-difference Jacobian.

    Each step solves ``J dx = -r`` and backtracks (factor ``config.backtrack``)
    until the infinity norm of the residual decreases. Iteration stops when
    that norm drops below ``config.tol``.

    Returns
    -------
    NewtonResult
        Best iterate found. ``converged`` is False when the tolerance was not
        reached; the caller decides whether that is fatal.
    """
    config = config or NewtonConfig()
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    r = np.asarray(residual_fn(x), dtype=float)
    norm = _norm(r)
    history = [norm]
    if not np.isfinite(norm):
        return NewtonResult(x, norm, False, 0, history)

    for it in range(1, config.max_iter + 1):
        if norm < config.tol:
            return NewtonResult(x, norm, True, it - 1, history)
        J = numeric_jacobian(residual_fn, x, config.fd_step, f0=r)
        try:
            dx = lu_solve(J, -r)
        except (SingularMatrix, ValueError):
            dx = np.linalg.lstsq(J, -r, rcond=None)[0]
            if not np.all(np.isfinite(dx)):
                break

        lam = 1.0
        for _ in range(config.max_halvings + 1):
            x_new = x + lam * dx
            r_new = np.asarray(residual_fn(x_new), dtype=float)
            norm_new = _norm(r_new)
            if norm_new < norm:
                break
            lam *= config.backtrack
        else:
            # no descent along the Newton direction
            return NewtonResult(x, norm, norm < config.tol, it, history)

        x, r, norm = x_new, r_new, norm_new
        history.append(norm)

    return NewtonResult(x, norm, norm < config.tol, config.max_iter, history)

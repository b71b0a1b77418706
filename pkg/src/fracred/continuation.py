"""Frequency continuation for per-frequency nonlinear solves."""

import numpy as np

from .numerics import NewtonResult


def descending_sweep(omegas, solve, x_top, max_depth=6, restart=True):
    """Solve at every grid frequency, highest first, seeding each point with
    the previous solution.

    ``solve(omega, x0)`` must return a :class:`NewtonResult`. When a step
    fails, the log-frequency gap to the last converged point is bisected (at
    most ``max_depth`` levels) so the branch is followed in smaller steps.
    ``solve`` must then accept frequencies off the grid; pass ``max_depth=0``
    when it cannot. With ``restart`` a point that still fails is retried
    from ``x_top``.

    Returns the per-frequency results in the original (ascending) order.
    """
    omegas = np.asarray(omegas, dtype=float)
    results = [None] * omegas.size
    last_w, last_x = None, np.asarray(x_top, dtype=float)

    for i in range(omegas.size - 1, -1, -1):
        w = omegas[i]
        res = solve(w, last_x)
        if not res.converged and last_w is not None:
            res = _bisect(solve, last_w, last_x, w, max_depth) or res
        if not res.converged and restart and last_w is not None:
            again = solve(w, np.asarray(x_top, dtype=float))
            res = again if again.converged else res
        results[i] = res
        if res.converged:
            last_w, last_x = w, res.x
    return results


def _bisect(solve, w_from, x_from, w_to, depth):
    if depth == 0:
        return None
    w_mid = np.sqrt(w_from * w_to)
    mid = solve(w_mid, x_from)
    if not mid.converged:
        mid = _bisect(solve, w_from, x_from, w_mid, depth - 1)
        if mid is None:
            return None
    end = solve(w_to, mid.x)
    if end.converged:
        return end
    return _bisect(solve, w_mid, mid.x, w_to, depth - 1)


def independent_sweep(omegas, solve, x_top, n_jobs=None):
    """Solve every frequency from the same seed; optionally in parallel."""
    omegas = np.asarray(omegas, dtype=float)
    if n_jobs in (None, 1):
        return [solve(w, x_top) for w in omegas]
    from joblib import Parallel, delayed

    return Parallel(n_jobs=n_jobs)(delayed(solve)(w, x_top) for w in omegas)


def failed(n):
    return NewtonResult(np.full(n, np.nan), np.inf, False, 0, [])

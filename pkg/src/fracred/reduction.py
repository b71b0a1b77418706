"""Exact reduction of integer chains to fractional models.

The fractional order ``alpha(omega)`` (and, for multi-DOF targets, the
coupling parameters ``beta_j(omega)``) is chosen per frequency so that the
fractional transfer functions coincide with the integer ones at the active
DOFs.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from ._validation import check_dof, check_grid, log_grid
from .chain import frequency_response
from .continuation import descending_sweep, failed
from .exceptions import (
    Antiresonance,
    DegenerateArgument,
    PartitionMismatch,
    SingularMatrix,
    ValidationError,
)
from .fractional import dynamic_stiffness, fsdof_tf
from .numerics import NewtonConfig, lu_solve, newton_solve, principal_log


@dataclass(frozen=True)
class LumpedParameters:
    m_bar: float
    k_bar: float


@dataclass
class ReductionResult:
    """Per-frequency schedules produced by a reduction or identification.

    ``betas`` has shape ``(n_omega, N - 1)`` and is empty for SDOF targets.
    ``residuals`` holds the infinity norm of the relative matching equations.
    """

    omegas: np.ndarray
    alphas: np.ndarray
    betas: np.ndarray
    residuals: np.ndarray
    converged: np.ndarray
    masses: tuple = ()
    k_bar: float = float("nan")
    forced_dof: int = 1
    meta: dict = field(default_factory=dict)

    @property
    def n_beta(self):
        return self.betas.shape[1]

    def model_at(self, i):
        """Fractional model at the ``i``-th grid point."""
        from .fractional import FractionalNDOF, FractionalSDOF

        if self.n_beta == 0 and len(self.masses) == 1:
            return FractionalSDOF(self.masses[0], self.k_bar, self.alphas[i])
        return FractionalNDOF(self.masses, self.k_bar, tuple(self.betas[i]), self.alphas[i])

    def branch_jumps(self, threshold=0.5):
        """Points whose schedule moved by more than ``threshold`` from the
        previous converged point (a likely branch jump).

        The largest component change over ``alpha`` and all ``betas`` is
        compared. Unconverged points are never flagged.
        """
        params = np.column_stack([self.alphas, self.betas])
        flags = np.zeros(self.omegas.size, dtype=bool)
        prev = None
        for i in np.flatnonzero(self.converged):
            if prev is not None and np.max(np.abs(params[i] - params[prev])) > threshold:
                flags[i] = True
            prev = i
        return flags

    def response(self):
        """Fractional transfer functions at every grid point, shape ``(n_omega, N)``.

        Unconverged points give NaN rows.
        """
        n = len(self.masses)
        out = np.full((self.omegas.size, n), np.nan, dtype=complex)
        for i, w in enumerate(self.omegas):
            if np.isfinite(self.alphas[i]):
                out[i] = _fndof_response(w, self.masses, self.k_bar, self.betas[i],
                                         self.alphas[i], self.forced_dof - 1)
        return out


def alpha_isdof(m, c, k, omega):
    """Order that turns a damped oscillator ``(m, c, k)`` into an undamped
    fractional one with the same mass and stiffness.

    ``alpha = 1 + Ln(i omega + c/m) / Ln(i omega)``; undamped input gives
    exactly 2. ``k`` does not enter but is kept for a uniform signature.
    """
    if not omega > 0:
        raise ValidationError("omega must be positive", "omega")
    if c == 0:
        return 2 + 0j
    s = 1j * omega
    return complex(1 + principal_log(s + c / m) / principal_log(s))


def lump_parameters(model):
    """Total mass and series-equivalent stiffness of a chain."""
    return LumpedParameters(
        m_bar=math.fsum(model.masses),
        k_bar=1.0 / math.fsum(1.0 / k for k in model.stiffnesses),
    )


def alpha_imdof_to_fsdof(H, lumped, omega):
    """Order of the F-SDOF ``(m_bar, k_bar)`` whose response equals ``H`` at ``omega``.

    ``alpha = Ln(1/(m_bar H) - k_bar/m_bar) / Ln(i omega)``. ``H`` may come
    from any source, measured or computed. An ``np.clongdouble`` value keeps
    its precision through the subtraction, which cancels digits when
    ``m_bar omega^2`` is small against ``k_bar``.
    """
    H = np.clongdouble(H) if isinstance(H, np.clongdouble) else complex(H)
    if H == 0:
        raise Antiresonance(f"H vanishes at omega={omega}")
    m_bar, k_bar = (np.longdouble(lumped.m_bar), np.longdouble(lumped.k_bar)) \
        if isinstance(H, np.clongdouble) else (lumped.m_bar, lumped.k_bar)
    z = complex(1 / (m_bar * H) - k_bar / m_bar)
    if z == 0:
        raise DegenerateArgument(f"log argument vanishes at omega={omega}")
    return complex(principal_log(z) / principal_log(1j * omega))


def sweep_fsdof(model, force_dof, active_dof, grid=None, tol=1e-10, lumped=None):
    """F-SDOF order schedule matching one active DOF over a grid.

    Points where the order is undefined (antiresonance, singular integer
    response) are flagged with ``converged=False`` and NaN entries.
    """
    grid = log_grid() if grid is None else check_grid(grid)
    lumped = lumped or lump_parameters(model)
    H_ext = frequency_response(model, force_dof, grid, [active_dof], on_singular="nan",
                               extended=True)[:, 0]
    H = H_ext.astype(complex)
    alphas = np.full(grid.size, np.nan, dtype=complex)
    for i, (w, h) in enumerate(zip(grid, H_ext)):
        if not np.isfinite(h):
            continue
        try:
            alphas[i] = alpha_imdof_to_fsdof(h, lumped, w)
        except (Antiresonance, DegenerateArgument):
            pass
    with np.errstate(invalid="ignore"):
        G = fsdof_tf(grid, alphas, lumped.m_bar, lumped.k_bar)
    residuals = _relative_mismatch(G, H)
    converged = np.isfinite(residuals) & (residuals <= tol)
    return ReductionResult(
        omegas=grid,
        alphas=alphas,
        betas=np.empty((grid.size, 0), dtype=complex),
        residuals=residuals,
        converged=converged,
        masses=(lumped.m_bar,),
        k_bar=lumped.k_bar,
        forced_dof=1,
        meta={"force_dof": force_dof, "active_dofs": [active_dof]},
    )


def _relative_mismatch(G, H):
    with np.errstate(invalid="ignore", divide="ignore"):
        d = (G - H) / np.abs(H)
        r = np.maximum(np.abs(d.real), np.abs(d.imag))
    return np.where(np.isfinite(r), r, np.inf)


def default_partition(active_dofs, n_dof):
    """Contiguous blocks that each start at an active DOF (the first at DOF 1)."""
    starts = [1] + list(active_dofs[1:])
    ends = [s - 1 for s in starts[1:]] + [n_dof]
    return [list(range(s, e + 1)) for s, e in zip(starts, ends)]


def check_partition(partition, n_dof, n_blocks):
    """Validate ``partition`` (N lists of 1-based DOFs) and return it as lists."""
    blocks = [[int(d) for d in block] for block in partition]
    if len(blocks) != n_blocks:
        raise PartitionMismatch(f"expected {n_blocks} blocks, got {len(blocks)}", "mass_partition")
    flat = [d for block in blocks for d in block]
    if any(not block for block in blocks) or flat != list(range(1, n_dof + 1)):
        raise PartitionMismatch(
            f"blocks must be non-empty, contiguous and cover DOFs 1..{n_dof} in order",
            "mass_partition",
        )
    return blocks


def _fndof_response(omega, masses, k_bar, betas, alpha, forced):
    Z = dynamic_stiffness(omega, masses, k_bar, betas, alpha)
    rhs = np.zeros(len(masses), dtype=complex)
    rhs[forced] = 1.0
    return lu_solve(Z, rhs)


def _unpack(x):
    alpha = complex(x[0], x[1])
    betas = x[2::2] + 1j * x[3::2]
    return alpha, betas


def _pack(alpha, betas):
    x = [alpha.real, alpha.imag]
    for b in betas:
        x += [b.real, b.imag]
    return np.array(x, dtype=float)


def complex_matching_residual(masses, k_bar, forced, H):
    """Residual for matching complex responses ``H`` (one per fractional DOF).

    Entries are the real and imaginary parts of ``(G_j - H_j)/|H_j|``.
    """
    H = np.asarray(H, dtype=complex)
    scale = np.abs(H)

    def residual(omega, x):
        alpha, betas = _unpack(x)
        try:
            G = _fndof_response(omega, masses, k_bar, betas, alpha, forced)
        except (SingularMatrix, ValueError, FloatingPointError):
            return np.full(2 * len(masses), np.inf)
        d = (G - H) / scale
        return np.column_stack([d.real, d.imag]).ravel()

    return residual


def reduce_to_fndof(model, force_dof, active_dofs, mass_partition=None, grid=None,
                    config=None, seed=None):
    """Reduce a chain to an N-DOF fractional chain matching ``active_dofs``.

    Unknowns per frequency are ``alpha`` and the ``N - 1`` coupling
    parameters, found by Newton iteration on the N complex matching
    equations. The sweep runs from the highest frequency down, each point
    seeded with the solution at the previous one.

    Parameters
    ----------
    model : ChainModel
    force_dof : int
        Forced integer DOF (1-based). It drives the fractional DOF whose
        mass block contains it.
    active_dofs : sequence of int
        Strictly increasing integer DOFs to reproduce; their count is N.
    mass_partition : sequence of sequences of int, optional
        N contiguous blocks of integer DOFs lumped into each fractional
        mass. Defaults to blocks starting at each active DOF.
    grid : array_like, optional
        Frequencies; 100 log-spaced points on [0.01, 100] by default.
    config : NewtonConfig, optional
    seed : complex sequence, optional
        ``(alpha, beta_1, ...)`` at the top frequency. Defaults to
        ``alpha = 2`` and the uniform split ``beta_j = 1/N``.

    Returns
    -------
    ReductionResult
    """
    n_dof = model.n_dof
    active = [int(d) for d in active_dofs]
    for d in active:
        check_dof(d, n_dof, "active_dofs")
    if not active or any(b <= a for a, b in zip(active, active[1:])):
        raise ValidationError("active_dofs must be non-empty and strictly increasing", "active_dofs")
    n = len(active)
    check_dof(force_dof, n_dof, "force_dof")
    blocks = check_partition(
        default_partition(active, n_dof) if mass_partition is None else mass_partition, n_dof, n
    )
    grid = log_grid() if grid is None else check_grid(grid)
    config = config or NewtonConfig()

    masses = tuple(math.fsum(model.masses[d - 1] for d in block) for block in blocks)
    k_bar = lump_parameters(model).k_bar
    forced = next(j for j, block in enumerate(blocks) if force_dof in block)

    H = frequency_response(model, force_dof, grid, active, on_singular="nan")
    if seed is None:
        x_top = _pack(2 + 0j, [1.0 / n] * (n - 1))
    else:
        seed = [complex(v) for v in seed]
        x_top = _pack(seed[0], seed[1:])

    h_at = {w: h for w, h in zip(grid, H)}

    def solve(w, x0):
        h = h_at.get(w)
        if h is None:
            # intermediate continuation frequency
            h = frequency_response(model, force_dof, [w], active, on_singular="nan")[0]
        if not np.all(np.isfinite(h)) or np.any(h == 0):
            return failed(2 * n)
        fun = complex_matching_residual(masses, k_bar, forced, h)
        return newton_solve(lambda x: fun(w, x), x0, config)

    results = descending_sweep(grid, solve, x_top)
    return _collect(grid, results, masses, k_bar, forced + 1,
                    {"force_dof": force_dof, "active_dofs": active, "mass_partition": blocks})


def _collect(grid, results, masses, k_bar, forced_dof, meta):
    n = len(masses)
    alphas = np.full(grid.size, np.nan, dtype=complex)
    betas = np.full((grid.size, n - 1), np.nan, dtype=complex)
    residuals = np.full(grid.size, np.inf)
    converged = np.zeros(grid.size, dtype=bool)
    for i, res in enumerate(results):
        residuals[i] = res.residual
        converged[i] = res.converged
        if res.converged:
            alphas[i], betas[i] = _unpack(res.x)
    return ReductionResult(grid, alphas, betas, residuals, converged,
                           masses=tuple(masses), k_bar=k_bar, forced_dof=forced_dof, meta=meta)

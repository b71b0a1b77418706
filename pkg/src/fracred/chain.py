"""Integer-order mass-spring-damper chains.

Topology: spring/damper pair ``i`` joins mass ``i`` to mass ``i + 1`` and
pair ``M`` ties the last mass to ground. A single external force acts on one
DOF. All DOF indices in the public API are 1-based.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from ._validation import check_dof, check_grid
from .exceptions import (
    LengthMismatch,
    NonPositiveParameter,
    SingularMatrix,
    SingularSystem,
    ValidationError,
)
from .numerics import gauss_solve, lu_solve

_SINGULAR_RTOL = 16 * np.finfo(float).eps


@dataclass(frozen=True)
class ChainModel:
    masses: tuple
    stiffnesses: tuple
    dampers: tuple

    def __post_init__(self):
        for name in ("masses", "stiffnesses", "dampers"):
            try:
                values = tuple(float(v) for v in getattr(self, name))
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"{name} must be a list of numbers", name) from exc
            if not all(np.isfinite(values)):
                raise ValidationError(f"{name} must be finite", name)
            object.__setattr__(self, name, values)

        n = len(self.masses)
        if n == 0:
            raise ValidationError("chain needs at least one mass", "masses")
        if len(self.stiffnesses) != n or len(self.dampers) != n:
            raise LengthMismatch(
                f"masses/stiffnesses/dampers lengths differ: "
                f"{n}/{len(self.stiffnesses)}/{len(self.dampers)}"
            )
        if min(self.masses) <= 0:
            raise NonPositiveParameter("masses must be > 0", "masses")
        if min(self.stiffnesses) <= 0:
            raise NonPositiveParameter("stiffnesses must be > 0", "stiffnesses")
        if min(self.dampers) < 0:
            raise NonPositiveParameter("dampers must be >= 0", "dampers")

    @property
    def n_dof(self):
        return len(self.masses)

    def mass_matrix(self):
        return np.diag(self.masses)

    def stiffness_matrix(self):
        return _chain_matrix(self.stiffnesses)

    def damping_matrix(self):
        return _chain_matrix(self.dampers)


def build_chain(masses, stiffnesses, dampers):
    """Validated :class:`ChainModel` from raw lists."""
    return ChainModel(tuple(masses), tuple(stiffnesses), tuple(dampers))


def _chain_matrix(links):
    n = len(links)
    K = np.zeros((n, n))
    for i, k in enumerate(links):
        K[i, i] += k
        if i + 1 < n:
            K[i + 1, i + 1] += k
            K[i, i + 1] -= k
            K[i + 1, i] -= k
    return K


@dataclass(frozen=True)
class StateSpace:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: float = 0.0

    def transfer_function(self, s):
        """``C (sI - A)^-1 B + D`` at the complex point ``s``."""
        n = self.A.shape[0]
        try:
            x = lu_solve(s * np.eye(n) - self.A, self.B.astype(complex), rtol=_SINGULAR_RTOL)
        except SingularMatrix as exc:
            raise SingularSystem(f"sI - A is singular at s={s}") from exc
        return complex(self.C @ x + self.D)


def assemble_state_space(model, force_dof, output_dof=1, dtype=float):
    """First-order form with state ``[x1, v1, x2, v2, ...]``.

    Odd rows (1-based) carry the velocity definitions and even rows the
    force balance of each mass. ``B`` is ``1/m`` on the velocity row of the
    forced DOF and ``C`` picks the displacement of ``output_dof``. Entries
    are computed in ``dtype`` (e.g. ``np.longdouble``).
    """
    n = model.n_dof
    f = check_dof(force_dof, n, "force_dof")
    o = check_dof(output_dof, n, "output_dof")
    m = np.asarray(model.masses, dtype=dtype)
    K = model.stiffness_matrix().astype(dtype)
    Cd = model.damping_matrix().astype(dtype)

    A = np.zeros((2 * n, 2 * n), dtype=dtype)
    for i in range(n):
        A[2 * i, 2 * i + 1] = 1.0
        A[2 * i + 1, 0::2] = -K[i] / m[i]
        A[2 * i + 1, 1::2] = -Cd[i] / m[i]
    B = np.zeros(2 * n, dtype=dtype)
    B[2 * f + 1] = 1 / m[f]
    C = np.zeros(2 * n)
    C[2 * o] = 1.0
    return StateSpace(A, B, C, 0.0)


def transfer_function(model, s, force_dof, output_dof):
    """Displacement-over-force transfer function at a complex point ``s``."""
    return assemble_state_space(model, force_dof, output_dof).transfer_function(s)


def integer_tf(model, force_dof, output_dof, omega):
    """Frequency response ``H(i omega)`` of one output DOF.

    Raises SingularSystem when an undamped chain is driven exactly at one of
    its natural frequencies.
    """
    omega = float(omega)
    if not omega > 0:
        raise ValidationError("omega must be positive", "omega")
    return transfer_function(model, 1j * omega, force_dof, output_dof)


def frequency_response(model, force_dof, omegas, output_dofs=None, on_singular="raise",
                       extended=False):
    """``H`` for several outputs over a grid, shape ``(len(omegas), len(output_dofs))``.

    One linear solve per frequency serves all outputs. With
    ``on_singular="nan"`` a singular frequency yields a row of NaN instead of
    raising SingularSystem. ``extended=True`` solves and returns in
    ``np.clongdouble`` for callers that cancel digits afterwards.
    """
    if on_singular not in ("raise", "nan"):
        raise ValueError("on_singular must be 'raise' or 'nan'")
    omegas = check_grid(omegas)
    n = model.n_dof
    if output_dofs is None:
        output_dofs = range(1, n + 1)
    rows = [2 * check_dof(d, n, "output_dof") for d in output_dofs]
    real, cplx, solve = ((np.longdouble, np.clongdouble, gauss_solve) if extended
                         else (float, complex, lu_solve))
    ss = assemble_state_space(model, force_dof, dtype=real)
    eye = np.eye(2 * n, dtype=cplx)
    B = ss.B.astype(cplx)
    out = np.empty((omegas.size, len(rows)), dtype=cplx)
    for i, w in enumerate(omegas):
        try:
            x = solve(cplx(1j) * real(w) * eye - ss.A, B, rtol=_SINGULAR_RTOL)
        except SingularMatrix as exc:
            if on_singular == "raise":
                raise SingularSystem(f"i*omega*I - A is singular at omega={w}") from exc
            out[i] = np.nan
            continue
        out[i] = x[rows]
    return out


def natural_frequencies(model):
    """Undamped natural frequencies, the roots of ``det(K - w^2 M) = 0``, ascending."""
    lam = la.eigh(model.stiffness_matrix(), model.mass_matrix(), eigvals_only=True)
    return np.sqrt(np.sort(lam))


def pole_magnitudes(model):
    """Moduli of the eigenvalues of the state matrix ``A``, ascending.

    For a damped chain these differ from :func:`natural_frequencies`; each
    underdamped mode contributes two equal entries.
    """
    A = assemble_state_space(model, 1).A
    return np.sort(np.abs(np.linalg.eigvals(A)))

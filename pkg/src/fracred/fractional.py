"""Undamped fractional-order oscillators with a complex derivative order.

The inertia term of each mass carries ``d^alpha/dt^alpha`` with complex
``alpha = a + ib``. Everything is evaluated in the frequency domain with zero
initial conditions, where the operator becomes multiplication by
``(i omega)^alpha`` on the principal branch.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_dof, check_positive, wrap_phase
from .exceptions import (
    PoleHit,
    SingularDynamicStiffness,
    SingularMatrix,
    ValidationError,
)
from .numerics import lu_solve

_SINGULAR_RTOL = 16 * np.finfo(float).eps


@dataclass(frozen=True)
class PolarResponse:
    magnitude: float
    phase: float


@dataclass(frozen=True)
class FractionalSDOF:
    m_bar: float
    k_bar: float
    alpha: complex

    def __post_init__(self):
        object.__setattr__(self, "m_bar", check_positive(self.m_bar, "m_bar"))
        object.__setattr__(self, "k_bar", check_positive(self.k_bar, "k_bar"))
        object.__setattr__(self, "alpha", complex(self.alpha))


@dataclass(frozen=True)
class FractionalNDOF:
    """Fractional chain with the integer-chain topology and no dampers.

    Link ``j < N`` (joining masses j and j+1) has stiffness ``betas[j-1] * k_total``;
    the grounding link N takes ``(1 - sum(betas)) * k_total``, so the link
    stiffnesses always add up to ``k_total``.
    """

    masses: tuple
    k_total: float
    betas: tuple
    alpha: complex

    def __post_init__(self):
        masses = tuple(check_positive(m, "masses") for m in self.masses)
        if not masses:
            raise ValidationError("need at least one mass", "masses")
        betas = tuple(complex(b) for b in self.betas)
        if len(betas) != len(masses) - 1:
            raise ValidationError(
                f"{len(masses)} masses need {len(masses) - 1} coupling parameters, got {len(betas)}",
                "betas",
            )
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "k_total", check_positive(self.k_total, "k_total"))
        object.__setattr__(self, "alpha", complex(self.alpha))

    @property
    def n_dof(self):
        return len(self.masses)

    def link_stiffnesses(self):
        betas = np.asarray(self.betas, dtype=complex)
        return self.k_total * np.append(betas, 1.0 - betas.sum())

    def dynamic_stiffness(self, omega):
        """``diag(m) (i omega)^alpha + K(beta)`` as a complex matrix."""
        return dynamic_stiffness(omega, self.masses, self.k_total, self.betas, self.alpha)


def dynamic_stiffness(omega, masses, k_total, betas, alpha):
    n = len(masses)
    betas = np.asarray(betas, dtype=complex)
    links = k_total * np.append(betas, 1.0 - betas.sum())
    Z = np.zeros((n, n), dtype=complex)
    for j, k in enumerate(links):
        Z[j, j] += k
        if j + 1 < n:
            Z[j + 1, j + 1] += k
            Z[j, j + 1] -= k
            Z[j + 1, j] -= k
    Z[np.diag_indices(n)] += np.asarray(masses, dtype=float) * gamma(omega, alpha)
    return Z


def gamma(omega, alpha):
    """``(i omega)^alpha`` on the principal branch, for ``omega > 0``.

    Evaluated in the expanded form
    ``omega^a e^(-b pi/2) [cos(a pi/2 + b ln omega) + i sin(a pi/2 + b ln omega)]``.
    Broadcasts over array arguments.
    """
    omega = np.asarray(omega, dtype=float)
    alpha = np.asarray(alpha, dtype=complex)
    if np.any(omega <= 0):
        raise ValidationError("omega must be positive", "omega")
    a, b = alpha.real, alpha.imag
    log_w = np.log(omega)
    radius = np.exp(a * log_w - b * np.pi / 2)
    angle = a * np.pi / 2 + b * log_w
    out = radius * (np.cos(angle) + 1j * np.sin(angle))
    return out[()] if out.ndim == 0 else out


def tau_xi(omega, alpha, m_bar, k_bar):
    """Real and imaginary parts of the normalized dynamic stiffness.

    ``tau = k_bar/m_bar + Re gamma`` and ``xi = Im gamma``, so that
    ``G = 1 / (m_bar (tau + i xi))``.
    """
    g = gamma(omega, alpha)
    return k_bar / m_bar + np.real(g), np.imag(g)


def fsdof_response(omega, model):
    """Transfer function of a fractional SDOF at one frequency.

    Returns
    -------
    G : complex
    polar : PolarResponse
        ``magnitude = 1/(m_bar sqrt(tau^2 + xi^2))`` and
        ``phase = -atan2(xi, tau)`` on (-pi, pi].

    Raises
    ------
    PoleHit
        If ``tau + i xi`` cancels to rounding level.
    """
    g = gamma(float(omega), model.alpha)
    ratio = model.k_bar / model.m_bar
    tau, xi = ratio + g.real, g.imag
    denom = np.hypot(tau, xi)
    # cancellation down to rounding level means we sit on a pole
    if denom <= _SINGULAR_RTOL * (ratio + abs(g)):
        raise PoleHit(f"fractional model has a pole at omega={omega}")
    G = 1.0 / (model.m_bar * complex(tau, xi))
    polar = PolarResponse(
        magnitude=float(1.0 / (model.m_bar * denom)),
        phase=float(wrap_phase(-np.arctan2(xi, tau))),
    )
    return G, polar


def fsdof_tf(omegas, alphas, m_bar, k_bar):
    """Vectorized complex F-SDOF response for per-frequency orders."""
    return 1.0 / (m_bar * gamma(omegas, alphas) + k_bar)


def fndof_tf(omega, model, forced_dof=1):
    """Displacements of every DOF per unit force on ``forced_dof`` (1-based).

    Solves ``(diag(m) (i omega)^alpha + K) X = e_forced`` by dense LU.
    """
    f = check_dof(forced_dof, model.n_dof, "forced_dof")
    Z = model.dynamic_stiffness(float(omega))
    rhs = np.zeros(model.n_dof, dtype=complex)
    rhs[f] = 1.0
    try:
        return lu_solve(Z, rhs, rtol=_SINGULAR_RTOL)
    except SingularMatrix as exc:
        raise SingularDynamicStiffness(f"dynamic stiffness singular at omega={omega}") from exc


def to_polar(G):
    """Magnitude and principal phase of a complex response."""
    return PolarResponse(float(abs(G)), float(wrap_phase(np.angle(G))))


def steady_state(t, omega, f0, polar):
    """Steady response ``f0 * M * sin(omega t + psi)`` to a force ``f0 sin(omega t)``."""
    t = np.asarray(t, dtype=float)
    return f0 * polar.magnitude * np.sin(omega * t + polar.phase)

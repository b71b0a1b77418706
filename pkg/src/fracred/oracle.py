"""Time-domain ground truth for integer chains.

Fixed-step RK4 on the first-order state equations, a least-squares sine fit
for the steady state, and the textbook damped-oscillator amplitude/phase.
None of this goes through the transfer-function code paths.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_dof, wrap_phase
from .exceptions import RankDeficient, StepTooLarge, UnboundedResponse, ValidationError


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n_t, 2M): [x1, v1, x2, v2, ...]

    @property
    def displacements(self):
        return self.states[:, 0::2]

    @property
    def velocities(self):
        return self.states[:, 1::2]

    def tail(self, duration):
        keep = self.times >= self.times[-1] - duration * (1 + 1e-12)
        return Trajectory(self.times[keep], self.states[keep])


def _first_order_system(model, force_dof):
    # assembled here from the physical matrices, not via chain.assemble_state_space
    n = model.n_dof
    m = np.asarray(model.masses)
    K = model.stiffness_matrix()
    C = model.damping_matrix()
    A = np.zeros((2 * n, 2 * n))
    A[0::2, 1::2] = np.eye(n)
    A[1::2, 0::2] = -K / m[:, None]
    A[1::2, 1::2] = -C / m[:, None]
    b = np.zeros(2 * n)
    f = check_dof(force_dof, n, "force_dof")
    b[2 * f + 1] = 1.0 / m[f]
    return A, b


def gershgorin_bound(A):
    """Upper bound on the spectral radius: the largest absolute row sum."""
    return float(np.abs(A).sum(axis=1).max())


def stable_steps(model, force_dof, omega, minimum=400):
    """Smallest steps-per-period (at least ``minimum``) passing the step guard."""
    A, _ = _first_order_system(model, force_dof)
    need = int(np.ceil(2 * np.pi / omega * gershgorin_bound(A) / 0.1 * (1 + 1e-9)))
    return max(minimum, need)


def integrate_chain(model, force_dof, f0, omega, periods=200, steps_per_period=400, x0=None):
    """Integrate the chain under ``f0 sin(omega t)`` from rest with classical RK4.

    Raises
    ------
    StepTooLarge
        If ``dt > 0.1 / g``, ``g`` being the Gershgorin bound on the
        eigenvalues of the state matrix. :func:`stable_steps` picks a
        resolution that passes.
    """
    if not omega > 0:
        raise ValidationError("omega must be positive", "omega")
    if periods < 1 or steps_per_period < 1:
        raise ValidationError("periods and steps_per_period must be >= 1")
    A, b = _first_order_system(model, force_dof)
    dt = 2 * np.pi / omega / steps_per_period
    g = gershgorin_bound(A)
    if dt * g > 0.1:
        raise StepTooLarge(
            f"dt={dt:.3g} exceeds 0.1/g={0.1 / g:.3g}; raise steps_per_period"
        )

    n_steps = periods * steps_per_period
    times = np.arange(n_steps + 1) * dt
    step, forcing = _rk4_step_maps(A, b, dt)
    # force samples at t, t + dt/2 and t + dt for every step
    s_start = f0 * np.sin(omega * times)
    s_mid = f0 * np.sin(omega * (times[:-1] + dt / 2))
    states = np.empty((n_steps + 1, A.shape[0]))
    x = np.zeros(A.shape[0]) if x0 is None else np.asarray(x0, dtype=float).copy()
    states[0] = x
    for i in range(n_steps):
        x = step @ x + forcing @ (s_start[i], s_mid[i], s_start[i + 1])
        states[i + 1] = x
    return Trajectory(times, states)


def _rk4_step_maps(A, b, dt):
    """One classical RK4 step of ``x' = A x + b s(t)`` as linear maps.

    Stages are composed on the augmented input ``[x, s(t), s(t+dt/2), s(t+dt)]``,
    so ``x_next = step @ x + forcing @ (s0, s_half, s1)`` reproduces
    the four-stage update exactly (up to rounding order).
    """
    n = A.shape[0]
    X = np.hstack([np.eye(n), np.zeros((n, 3))])
    E = [np.zeros((n, n + 3)) for _ in range(3)]
    for j in range(3):
        E[j][:, n + j] = b
    k1 = A @ X + E[0]
    k2 = A @ (X + dt / 2 * k1) + E[1]
    k3 = A @ (X + dt / 2 * k2) + E[1]
    k4 = A @ (X + dt * k3) + E[2]
    full = X + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return full[:, :n], full[:, n:]


def fit_sine(t, x, omega):
    """Least-squares fit of ``x ~ R sin(omega t + theta) + offset``.

    Returns ``(R, theta)`` with theta on (-pi, pi].
    """
    R, theta, _ = _fit_sine(t, x, omega)
    return R, theta


def _fit_sine(t, x, omega):
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    if t.size < 3 or t.max() - t.min() < 2 * np.pi / omega:
        raise RankDeficient("samples must span at least one forcing period")
    basis = np.column_stack([np.sin(omega * t), np.cos(omega * t), np.ones_like(t)])
    coef, *_ = np.linalg.lstsq(basis, x, rcond=None)
    a, b, _ = coef
    R = float(np.hypot(a, b))
    # RMS misfit relative to the amplitude: leftover transient shows up here
    rms = float(np.sqrt(np.mean((basis @ coef - x) ** 2)))
    return R, float(wrap_phase(np.arctan2(b, a))), rms / R if R > 0 else rms


def analytic_sdof_steady(m, c, k, f0, omega):
    """Steady state ``X sin(omega t - phi)`` of ``m x'' + c x' + k x = f0 sin(omega t)``."""
    if c == 0 and k - m * omega**2 == 0:
        raise UnboundedResponse("undamped oscillator driven at resonance")
    X = f0 / np.hypot(k - m * omega**2, c * omega)
    phi = np.arctan2(c * omega, k - m * omega**2)
    return float(X), float(phi)


def steady_response(model, force_dof, f0, omega, periods=200, steps_per_period=400, fit_periods=10):
    """Integrate and fit the last ``fit_periods`` periods of every DOF.

    Returns
    -------
    amplitudes, phases : (M,) arrays
    residuals : (M,) array
        RMS fit misfit relative to each amplitude; a remaining transient
        shows up here.
    tail : Trajectory
    """
    traj = integrate_chain(model, force_dof, f0, omega, periods, steps_per_period)
    tail = traj.tail(fit_periods * 2 * np.pi / omega)
    fits = [_fit_sine(tail.times, x, omega) for x in tail.displacements.T]
    amps, phases, residuals = map(np.array, zip(*fits))
    return amps, phases, residuals, tail

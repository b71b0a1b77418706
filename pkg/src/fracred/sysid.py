"""Fractional model synthesis from Bode data (magnitude and phase per frequency)."""

from dataclasses import dataclass

import numpy as np

from ._validation import check_dof, check_grid, check_positive, wrap_phase
from .continuation import descending_sweep, independent_sweep
from .exceptions import (
    DegenerateArgument,
    GridMismatch,
    IllConditionedFit,
    NoConvergence,
    SingularMatrix,
    ValidationError,
)
from .fractional import gamma
from .numerics import NewtonConfig, newton_solve, principal_log
from .reduction import ReductionResult, _fndof_response, _pack, _unpack


@dataclass(frozen=True)
class BodeDataset:
    omegas: np.ndarray
    magnitudes: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        w = check_grid(self.omegas)
        mag = np.asarray(self.magnitudes, dtype=float)
        ph = np.asarray(self.phases, dtype=float)
        if mag.shape != w.shape or ph.shape != w.shape:
            raise GridMismatch("omegas, magnitudes and phases must have equal length")
        if not (np.all(np.isfinite(mag)) and np.all(mag > 0)):
            raise ValidationError("magnitudes must be positive and finite", "magnitude")
        if not np.all(np.isfinite(ph)):
            raise ValidationError("phases must be finite", "phase")
        object.__setattr__(self, "omegas", w)
        object.__setattr__(self, "magnitudes", mag)
        object.__setattr__(self, "phases", wrap_phase(ph))

    @classmethod
    def from_complex(cls, omegas, H):
        H = np.asarray(H, dtype=complex)
        return cls(omegas, np.abs(H), np.angle(H))

    def to_complex(self):
        return self.magnitudes * np.exp(1j * self.phases)

    def __len__(self):
        return self.omegas.size


@dataclass
class IdentifiedModel(ReductionResult):
    """Identified schedules plus how well they reproduce the input data.

    ``reconstruction_errors`` is, per point, the larger of the relative
    magnitude error and the absolute phase error over all datasets.
    """

    reconstruction_errors: np.ndarray = None
    k_bar_estimated: bool = False

    @property
    def fit_residuals(self):
        return self.residuals

    @property
    def max_reconstruction_error(self):
        if self.reconstruction_errors is None:
            return float(self.meta.get("max_reconstruction_error", float("nan")))
        err = self.reconstruction_errors[self.converged]
        return float(err.max()) if err.size else float("inf")


def tau_xi_from_bode(M, psi, m_bar):
    """Normalized dynamic stiffness ``(tau, xi)`` from magnitude ``M`` and phase ``psi``.

    Positive root: ``tau = cos(-psi)/(m_bar M)``, ``xi = sin(-psi)/(m_bar M)``.
    """
    scale = 1.0 / (m_bar * M)
    return np.cos(-psi) * scale, np.sin(-psi) * scale


def _alpha_residual(omega, target):
    # the two real equations in polar form: log-modulus and wrapped phase
    log_mod, phase = np.log(abs(target)), np.angle(target)

    def residual(x):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            g = gamma(omega, complex(x[0], x[1]))
            r = np.array([np.log(abs(g)) - log_mod, wrap_phase(np.angle(g) - phase)])
        return r

    return residual


def to_principal_branch(alpha, omega, target):
    """Shift ``alpha`` by whole turns so that ``alpha Ln(i omega)`` is the principal
    log of ``target``; ``(i omega)^alpha`` is unchanged."""
    L = principal_log(1j * omega)
    turns = np.round(((alpha * L) - principal_log(target)).imag / (2 * np.pi))
    return complex(alpha - 2j * np.pi * turns / L)


def _solve_alpha_sdof(tau, xi, omega, guess, stiffness_ratio, config):
    target = complex(tau - stiffness_ratio, xi)
    if target == 0:
        raise DegenerateArgument(f"tau - k_bar/m_bar + i xi vanishes at omega={omega}")
    guess = complex(guess)
    res = newton_solve(_alpha_residual(omega, target), [guess.real, guess.imag], config)
    if res.converged:
        a = to_principal_branch(complex(res.x[0], res.x[1]), omega, target)
        res.x = np.array([a.real, a.imag])
    return res


def identify_alpha_sdof(tau, xi, omega, guess=2 + 0j, stiffness_ratio=0.0, config=None):
    """Solve ``(i omega)^alpha = tau - k_bar/m_bar + i xi`` for ``alpha`` by Newton.

    The real and imaginary equations are matched in polar form (log-modulus
    and wrapped phase), which keeps the iteration well scaled far from the
    root.

    ``stiffness_ratio`` is ``k_bar/m_bar``. The root is reported on the
    principal branch, where it equals
    ``Ln(tau - k_bar/m_bar + i xi) / Ln(i omega)``.

    Raises
    ------
    DegenerateArgument
        If the right-hand side is zero.
    NoConvergence
        If Newton fails from ``guess``.
    """
    res = _solve_alpha_sdof(tau, xi, omega, guess, stiffness_ratio, config or NewtonConfig())
    if not res.converged:
        raise NoConvergence(f"alpha did not converge at omega={omega} (residual {res.residual:.2e})")
    return complex(res.x[0], res.x[1])


def _reconstruction_errors(G, datasets):
    err = np.zeros(G.shape[0])
    for j, ds in enumerate(datasets):
        with np.errstate(invalid="ignore"):
            mag = np.abs(np.abs(G[:, j]) - ds.magnitudes) / ds.magnitudes
            ph = np.abs(wrap_phase(np.angle(G[:, j]) - ds.phases))
        err = np.maximum(err, np.where(np.isfinite(mag + ph), np.maximum(mag, ph), np.inf))
    return err


def identify_fsdof(dataset, m_bar, k_bar=None, config=None, continuation=True, n_jobs=None):
    """Per-frequency complex order of an F-SDOF reproducing ``dataset``.

    At each frequency the measured magnitude and phase give ``(tau, xi)``,
    then ``alpha`` follows from a Newton solve. With ``k_bar=None`` the
    stiffness is estimated from the quasi-static magnitude at the lowest
    frequency and ``k_bar_estimated`` is set on the result.
    """
    m_bar = check_positive(m_bar, "m_bar")
    estimated = k_bar is None
    k_bar = 1.0 / dataset.magnitudes[0] if estimated else check_positive(k_bar, "k_bar")
    config = config or NewtonConfig()
    tau, xi = tau_xi_from_bode(dataset.magnitudes, dataset.phases, m_bar)
    index = {w: i for i, w in enumerate(dataset.omegas)}

    def solve(w, x0):
        i = index[w]
        return _solve_alpha_sdof(tau[i], xi[i], w, complex(x0[0], x0[1]), k_bar / m_bar, config)

    x_top = np.array([2.0, 0.0])
    if continuation:
        results = descending_sweep(dataset.omegas, solve, x_top, max_depth=0)
    else:
        results = independent_sweep(dataset.omegas, solve, x_top, n_jobs)
    return _identified(dataset.omegas, results, (m_bar,), k_bar, 1, [dataset], estimated)


def _identified(omegas, results, masses, k_bar, forced_dof, datasets, estimated):
    n = len(masses)
    alphas = np.full(omegas.size, np.nan, dtype=complex)
    betas = np.full((omegas.size, n - 1), np.nan, dtype=complex)
    residuals = np.array([r.residual for r in results], dtype=float)
    converged = np.array([r.converged for r in results], dtype=bool)
    for i, r in enumerate(results):
        if r.converged:
            alphas[i], betas[i] = _unpack(r.x)
    out = IdentifiedModel(omegas, alphas, betas, residuals, converged,
                          masses=tuple(masses), k_bar=k_bar, forced_dof=forced_dof,
                          meta={"k_bar_estimated": estimated}, k_bar_estimated=estimated)
    out.reconstruction_errors = _reconstruction_errors(out.response(), datasets)
    return out


def _bode_residual(masses, k_bar, forced, log_mag, phase):
    n = len(masses)

    def residual(omega, x):
        alpha, betas = _unpack(x)
        try:
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                G = _fndof_response(omega, masses, k_bar, betas, alpha, forced)
                r_mag = np.log(np.abs(G)) - log_mag
        except (SingularMatrix, ValueError):
            return np.full(2 * n, np.inf)
        r_ph = wrap_phase(np.angle(G) - phase)
        return np.column_stack([r_mag, r_ph]).ravel()

    return residual


def identify_fndof(datasets, masses, k_bar, forced_dof=1, config=None, seed=None,
                   continuation=True, n_jobs=None):
    """Identify an N-DOF fractional chain from N Bode datasets.

    Dataset ``j`` is the response of fractional DOF ``j`` to a force on
    ``forced_dof``. At every frequency the 2N real equations (log-magnitude
    and phase of each response) are solved for ``alpha`` and the ``N - 1``
    coupling parameters.
    """
    datasets = list(datasets)
    masses = tuple(check_positive(m, "masses") for m in masses)
    n = len(masses)
    if n == 0 or len(datasets) != n:
        raise ValidationError(f"need one dataset per mass, got {len(datasets)} for {n}", "datasets")
    omegas = datasets[0].omegas
    for ds in datasets[1:]:
        if ds.omegas.shape != omegas.shape or not np.array_equal(ds.omegas, omegas):
            raise GridMismatch("datasets do not share a frequency grid")
    k_bar = check_positive(k_bar, "k_bar")
    forced = check_dof(forced_dof, n, "forced_dof")
    config = config or NewtonConfig()

    log_mag = np.log(np.column_stack([ds.magnitudes for ds in datasets]))
    phase = np.column_stack([ds.phases for ds in datasets])
    index = {w: i for i, w in enumerate(omegas)}

    def solve(w, x0):
        i = index[w]
        fun = _bode_residual(masses, k_bar, forced, log_mag[i], phase[i])
        return newton_solve(lambda x: fun(w, x), x0, config)

    if seed is None:
        x_top = _pack(2 + 0j, [1.0 / n] * (n - 1))
    else:
        seed = [complex(v) for v in seed]
        x_top = _pack(seed[0], seed[1:])
    if continuation:
        results = descending_sweep(omegas, solve, x_top, max_depth=0)
    else:
        results = independent_sweep(omegas, solve, x_top, n_jobs)
    return _identified(omegas, results, masses, k_bar, forced_dof, datasets, False)


def _sample(dataset, omega):
    """Complex response at ``omega``, interpolated in log-frequency between grid points."""
    w = dataset.omegas
    if not w[0] <= omega <= w[-1]:
        raise ValidationError(f"omega_fit={omega} outside data range [{w[0]}, {w[-1]}]", "omega_fit")
    lw = np.log(w)
    mag = np.exp(np.interp(np.log(omega), lw, np.log(dataset.magnitudes)))
    ph = np.interp(np.log(omega), lw, np.unwrap(dataset.phases))
    return mag * np.exp(1j * ph)


def fit_integer_peak(dataset, omega_fit):
    """Second-order ``(m, c, k)`` matching the data at ``omega_fit`` and the
    quasi-static magnitude at the lowest frequency.

    The classical single-resonance fit, used as a baseline for comparison.

    Raises
    ------
    IllConditionedFit
        When ``omega_fit`` sits on the static plateau (inertia is invisible
        in the data) or the constraints admit no positive parameters.
    """
    w0, m0 = dataset.omegas[0], dataset.magnitudes[0]
    if omega_fit <= w0:
        raise IllConditionedFit("omega_fit must lie above the lowest data frequency")
    inv = 1.0 / _sample(dataset, omega_fit)
    c = inv.imag / omega_fit
    static = 1.0 / m0**2 - (c * w0) ** 2
    if static <= 0:
        raise IllConditionedFit("quasi-static magnitude inconsistent with the damping at omega_fit")
    static = np.sqrt(static)
    inertia = static - inv.real
    if abs(inertia) <= 1e-6 * static:
        raise IllConditionedFit(f"omega_fit={omega_fit} lies on the static plateau")
    m = inertia / (omega_fit**2 - w0**2)
    k = inv.real + m * omega_fit**2
    if m <= 0 or k <= 0 or c < 0:
        raise IllConditionedFit(f"fit produced non-physical parameters m={m}, c={c}, k={k}")
    return float(m), float(c), float(k)


def integer_sdof_tf(omegas, m, c, k):
    omegas = np.asarray(omegas, dtype=float)
    return 1.0 / (k - m * omegas**2 + 1j * c * omegas)

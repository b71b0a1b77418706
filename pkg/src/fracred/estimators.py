"""Estimator-style wrappers around the identification routines.

The estimators follow the scikit-learn conventions: hyperparameters in
``__init__``, learned schedules in trailing-underscore attributes after
``fit``, and ``predict`` for the fitted transfer functions.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_complex_response, check_grid
from .exceptions import ValidationError
from .numerics import NewtonConfig
from .reduction import _fndof_response
from .sysid import BodeDataset, identify_fndof, identify_fsdof


def _interp_schedule(omega, grid, values, converged):
    """Linear interpolation in log-frequency over the converged points."""
    omega = check_grid(np.sort(np.atleast_1d(np.asarray(omega, dtype=float))), "omega")
    w = grid[converged]
    if w.size == 0:
        raise ValidationError("no converged points to interpolate", "omega")
    if omega[0] < w[0] or omega[-1] > w[-1]:
        raise ValidationError(f"omega outside fitted range [{w[0]}, {w[-1]}]", "omega")
    lw, lx = np.log(w), np.log(omega)
    v = values[converged]
    return omega, np.interp(lx, lw, v.real) + 1j * np.interp(lx, lw, v.imag)


class _FractionalIdentifier(BaseEstimator):
    def _config(self):
        return NewtonConfig(tol=self.tol, max_iter=self.max_iter)

    def _store(self, result):
        self.result_ = result
        self.omega_ = result.omegas
        self.alpha_ = result.alphas
        self.beta_ = result.betas
        self.residuals_ = result.residuals
        self.converged_ = result.converged
        self.k_bar_ = result.k_bar
        self.k_bar_estimated_ = result.k_bar_estimated
        self.reconstruction_error_ = result.max_reconstruction_error
        return self

    def schedule(self, omega):
        """Interpolated ``(alpha, betas)`` at ``omega`` (sorted ascending).

        Raises
        ------
        ValidationError
            If ``omega`` leaves the span of converged fit points.
        """
        check_is_fitted(self, "alpha_")
        w, alpha = _interp_schedule(omega, self.omega_, self.alpha_, self.converged_)
        betas = np.column_stack([
            _interp_schedule(w, self.omega_, b, self.converged_)[1] for b in self.beta_.T
        ]) if self.beta_.shape[1] else np.empty((w.size, 0), dtype=complex)
        return alpha, betas

    def predict(self, omega):
        """Fractional transfer function(s) at ``omega``, shape ``(n,)`` or ``(n, N)``."""
        check_is_fitted(self, "alpha_")
        w = np.sort(np.atleast_1d(np.asarray(omega, dtype=float)))
        alpha, betas = self.schedule(w)
        masses = self.result_.masses
        G = np.array([
            _fndof_response(wi, masses, self.k_bar_, b, a, self.result_.forced_dof - 1)
            for wi, a, b in zip(w, alpha, betas)
        ])
        return G[:, 0] if len(masses) == 1 else G


class FSDOFIdentifier(_FractionalIdentifier):
    """Fit a single-DOF fractional oscillator to a complex frequency response.

    Parameters
    ----------
    m_bar : float
        Total mass.
    k_bar : float, optional
        Series stiffness. Estimated from the lowest-frequency magnitude
        when omitted.
    tol, max_iter : Newton settings.
    continuation : bool
        Seed each frequency from its higher neighbour. Set False to solve
        points independently, which allows ``n_jobs``.
    n_jobs : int, optional
    """

    def __init__(self, m_bar=1.0, k_bar=None, tol=1e-12, max_iter=100, continuation=True,
                 n_jobs=None):
        self.m_bar = m_bar
        self.k_bar = k_bar
        self.tol = tol
        self.max_iter = max_iter
        self.continuation = continuation
        self.n_jobs = n_jobs

    def fit(self, omega, H):
        omega = check_grid(omega, "omega")
        H = check_complex_response(H, omega.size, "H")
        if H.shape[1] != 1:
            raise ValidationError("FSDOFIdentifier expects one response column", "H")
        data = BodeDataset.from_complex(omega, H[:, 0])
        result = identify_fsdof(data, self.m_bar, self.k_bar, config=self._config(),
                                continuation=self.continuation, n_jobs=self.n_jobs)
        return self._store(result)


class FNDOFIdentifier(_FractionalIdentifier):
    """Fit an N-DOF fractional chain to N complex responses (one per column).

    Parameters
    ----------
    masses : sequence of float
        Fractional masses, one per response column.
    k_bar : float
        Series stiffness shared by the links.
    forced_dof : int
        1-based fractional DOF carrying the force.
    seed : sequence of complex, optional
        ``(alpha, beta_1, ...)`` for the highest frequency.
    """

    def __init__(self, masses=(1.0, 1.0), k_bar=1.0, forced_dof=1, seed=None, tol=1e-12,
                 max_iter=100, continuation=True, n_jobs=None):
        self.masses = masses
        self.k_bar = k_bar
        self.forced_dof = forced_dof
        self.seed = seed
        self.tol = tol
        self.max_iter = max_iter
        self.continuation = continuation
        self.n_jobs = n_jobs

    def fit(self, omega, H):
        omega = check_grid(omega, "omega")
        H = check_complex_response(H, omega.size, "H")
        datasets = [BodeDataset.from_complex(omega, col) for col in H.T]
        result = identify_fndof(datasets, self.masses, self.k_bar, self.forced_dof,
                                config=self._config(), seed=self.seed,
                                continuation=self.continuation, n_jobs=self.n_jobs)
        return self._store(result)

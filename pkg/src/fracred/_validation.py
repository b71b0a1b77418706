"""Input validation helpers shared by the functional API and the estimators."""

import numbers

import numpy as np

from .exceptions import GridMismatch, IndexOutOfRange, ValidationError


def check_grid(omegas, name="omegas"):
    """Return ``omegas`` as a 1-d float array that is finite, positive and
    strictly increasing. A single frequency is allowed."""
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    if w.ndim == 2 and w.shape[1] == 1:
        w = w[:, 0]
    if w.ndim != 1 or w.size == 0:
        raise ValidationError(f"{name} must be a non-empty 1-d sequence", name)
    if not np.all(np.isfinite(w)):
        raise ValidationError(f"{name} must be finite", name)
    if np.any(w <= 0):
        raise ValidationError(f"{name} must be strictly positive", name)
    if np.any(np.diff(w) <= 0):
        raise ValidationError(f"{name} must be strictly increasing", name)
    return w


def log_grid(w_min=0.01, w_max=100.0, count=100):
    """Log-spaced frequency grid, endpoints included exactly."""
    if count == 1 and w_min == w_max:
        return check_grid([w_min])
    if not (0 < w_min < w_max) or count < 2:
        raise ValidationError("need 0 < w_min < w_max and count >= 2", "grid")
    w = np.logspace(np.log10(w_min), np.log10(w_max), int(count))
    w[0], w[-1] = w_min, w_max
    return check_grid(w)


def check_positive(value, name):
    v = float(value)
    if not (np.isfinite(v) and v > 0):
        raise ValidationError(f"{name} must be a positive finite number, got {value!r}", name)
    return v


def check_dof(index, n_dof, name="dof"):
    """Validate a 1-based DOF index and return the 0-based one."""
    if isinstance(index, bool) or not isinstance(index, numbers.Integral):
        raise IndexOutOfRange(f"{name} must be an integer, got {index!r}")
    if not 1 <= index <= n_dof:
        raise IndexOutOfRange(f"{name}={index} outside 1..{n_dof}")
    return int(index) - 1


def check_complex_response(y, n_rows, name="y"):
    """Complex response samples as an (n_rows, n_outputs) array."""
    y = np.asarray(y)
    if y.ndim == 1:
        y = y[:, None]
    if y.ndim != 2 or y.shape[0] != n_rows:
        raise GridMismatch(
            f"{name} has shape {y.shape}, expected ({n_rows},) or ({n_rows}, n_outputs)"
        )
    y = y.astype(complex)
    if not np.all(np.isfinite(y)):
        raise ValidationError(f"{name} must be finite", name)
    return y


def wrap_phase(phi):
    """Map angles onto (-pi, pi]."""
    phi = np.asarray(phi, dtype=float)
    out = np.pi - np.mod(np.pi - phi, 2 * np.pi)
    return out[()] if out.ndim == 0 else out

"""Maximum Lyapunov exponents.

``benettin_mle`` integrates one tangent vector along the model trajectory;
``rosenstein_mle`` works on sampled states only, fitting a line to the
mean log separation of nearest-neighbour pairs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .dynamics import SystemSpec, local_extrema
from .errors import Degenerate, InsufficientData, NonFinite

DEFAULT_KFIT = 20
MIN_THEILER = 10
SEPARATION_FLOOR = 1e-12


@dataclass(frozen=True)
class DivergenceCurve:
    step_indices: np.ndarray
    mean_log_divergence: np.ndarray
    n_pairs: int = 0


@dataclass(frozen=True)
class LyapunovEstimate:
    lam: float
    method: str
    curve: DivergenceCurve | None = None
    mse: float | None = None


def linear_fit(x, y):
    """Ordinary least squares; returns ``(slope, intercept, mse)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ValueError("need equal-length inputs with at least 2 points")
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise Degenerate("x has zero variance")
    slope = float(dx @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    return slope, intercept, float(np.mean(resid * resid))


def benettin_mle(spec: SystemSpec, eta: float, t_total: float | None = None,
                 t_transient: float | None = None, renorm_every: int = 1,
                 *, dt: float | None = None, initial_condition=None,
                 backend: str | None = None) -> LyapunovEstimate:
    """Largest Lyapunov exponent from the variational equation.

    State and tangent are advanced together with RK4; after the transient
    the tangent is renormalised every ``renorm_every`` steps and the log
    growth is averaged over the elapsed time.  Defaults: the system's
    simulation duration with a 10% transient.
    """
    dt = spec.sim.dt if dt is None else dt
    t_total = spec.sim.duration if t_total is None else t_total
    t_transient = 0.1 * t_total if t_transient is None else t_transient
    if not t_total > t_transient >= 0:
        raise ValueError("need t_total > t_transient >= 0")
    if renorm_every < 1:
        raise ValueError("renorm_every must be >= 1")
    n_steps = int(round(t_total / dt))
    n_transient = int(round(t_transient / dt))
    y0 = np.asarray(spec.sim.initial_condition if initial_condition is None
                    else initial_condition, dtype=np.float64)
    use_c = (spec.kernel_id is not None and _backend.compiled
             and backend != "python")
    if use_c:
        lam = _backend.kernels.benettin_system(
            spec.kernel_id, spec.param_vector(), float(eta), y0, dt,
            n_steps, n_transient, renorm_every)
    else:
        lam, _ = _backend.fallback.benettin_generic(
            spec.field_fn, spec.jacobian_fn, spec.fixed_params, float(eta), y0,
            dt, n_steps, n_transient, renorm_every)
    if not np.isfinite(lam):
        raise NonFinite(f"{spec.name}: tangent dynamics diverged at "
                        f"{spec.control_name}={eta}")
    return LyapunovEstimate(float(lam), "benettin")


def orbital_period_samples(series) -> int:
    """Mean gap between successive maxima of the first coordinate, floored
    at ``MIN_THEILER`` samples."""
    x = np.asarray(series, dtype=float)
    first = x[:, 0] if x.ndim == 2 else x
    if first.size < 3:
        return MIN_THEILER
    maxima, _ = local_extrema(first)
    if len(maxima) < 2:
        return MIN_THEILER
    gaps = np.diff([i for i, _ in maxima])
    return max(MIN_THEILER, int(round(gaps.mean())))


def divergence_curve(series, k_max: int = DEFAULT_KFIT, theiler: int | None = None,
                     *, backend: str | None = None) -> DivergenceCurve:
    """Mean log distance between nearest-neighbour pairs, ``k`` steps on.

    Neighbours are searched among the first ``N - k_max`` points, excluding
    ones within ``theiler`` samples in time.  Separations are floored at
    ``SEPARATION_FLOOR`` before taking logs.
    """
    x = np.ascontiguousarray(series, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    theiler = orbital_period_samples(x) if theiler is None else int(theiler)
    n = x.shape[0]
    if n <= theiler + k_max + 1:
        raise InsufficientData(
            f"{n} samples cannot support theiler={theiler} and k={k_max}")
    n_ref = n - k_max
    impl = _backend.fallback if (backend == "python" or not _backend.compiled) else _backend.kernels
    nn = np.ascontiguousarray(impl.nearest_neighbors(x, n_ref, theiler), dtype=np.intp)
    n_pairs = int((nn >= 0).sum())
    if n_pairs == 0:
        raise InsufficientData("no neighbour pairs outside the Theiler window")
    curve = impl.divergence(x, nn, k_max, SEPARATION_FLOOR)
    return DivergenceCurve(np.arange(k_max + 1), np.asarray(curve), n_pairs)


def rosenstein_mle(series, dt: float, k_fit: int = DEFAULT_KFIT,
                   theiler: int | None = None, *, backend: str | None = None) -> LyapunovEstimate:
    """Slope of the divergence curve over its first ``k_fit + 1`` values,
    per unit time."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if k_fit < 1:
        raise ValueError("k_fit must be >= 1")
    curve = divergence_curve(series, k_fit, theiler, backend=backend)
    slope, _, mse = linear_fit(curve.step_indices, curve.mean_log_divergence)
    return LyapunovEstimate(slope / dt, "rosenstein", curve, mse)

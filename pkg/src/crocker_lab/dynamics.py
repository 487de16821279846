"""ODE catalog, fixed-step RK4 simulation and parameter sweeps.

Every catalog system carries an analytic Jacobian and a kernel id so the
compiled backend can integrate it without calling back into Python.  User
defined systems (``kernel_id=None``) always go through the generic Python
integrator.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import _backend
from .errors import NonFinite

log = logging.getLogger(__name__)

Field = Callable[[np.ndarray, float, Mapping[str, float]], np.ndarray]


@dataclass(frozen=True)
class SimProtocol:
    sampling_rate: float
    duration: float
    keep_last: float
    initial_condition: tuple[float, ...]

    def __post_init__(self):
        if not self.sampling_rate > 0:
            raise ValueError("sampling_rate must be positive")
        if not 0 < self.keep_last <= self.duration:
            raise ValueError("need 0 < keep_last <= duration")

    @property
    def dt(self) -> float:
        return 1.0 / self.sampling_rate

    @property
    def n_steps(self) -> int:
        return int(round(self.duration * self.sampling_rate))


@dataclass(frozen=True)
class SystemSpec:
    """An autonomous ODE with one swept control parameter."""

    name: str
    dim: int
    field_fn: Field
    jacobian_fn: Field
    fixed_params: Mapping[str, float]
    control_name: str
    control_range: tuple[float, float]
    control_steps: int
    sim: SimProtocol
    kernel_id: int | None = None
    title: str = ""

    def __post_init__(self):
        if len(self.sim.initial_condition) != self.dim:
            raise ValueError(
                f"{self.name}: initial condition has length "
                f"{len(self.sim.initial_condition)}, expected {self.dim}")

    def vector_field(self, state, eta):
        return self.field_fn(np.asarray(state, dtype=float), eta, self.fixed_params)

    def jacobian(self, state, eta):
        return self.jacobian_fn(np.asarray(state, dtype=float), eta, self.fixed_params)

    def param_vector(self) -> np.ndarray:
        # Order matches the C kernels: dict insertion order of fixed_params.
        return np.array(list(self.fixed_params.values()), dtype=np.float64)

    def grid(self, steps: int | None = None,
             lo: float | None = None, hi: float | None = None) -> np.ndarray:
        lo = self.control_range[0] if lo is None else lo
        hi = self.control_range[1] if hi is None else hi
        return np.linspace(lo, hi, self.control_steps if steps is None else steps)

    def with_sim(self, **changes) -> "SystemSpec":
        from dataclasses import replace
        return replace(self, sim=replace(self.sim, **changes))


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0


# --------------------------------------------------------------------------
# Vector fields.  Each takes (state, eta, params) and returns a new array.

def _lorenz(s, rho, p):
    x, y, z = s
    return np.array([p["sigma"] * (y - x), x * (rho - z) - y, x * y - p["beta"] * z])


def _lorenz_jac(s, rho, p):
    x, y, z = s
    sg, b = p["sigma"], p["beta"]
    return np.array([[-sg, sg, 0.0],
                     [rho - z, -1.0, -x],
                     [y, x, -b]])


def _rossler(s, a, p):
    x, y, z = s
    return np.array([-y - z, x + a * y, p["b"] + z * (x - p["c"])])


def _rossler_jac(s, a, p):
    x, y, z = s
    return np.array([[0.0, -1.0, -1.0],
                     [1.0, a, 0.0],
                     [z, 0.0, x - p["c"]]])


def _coupled(s, a, p):
    x1, y1, z1, x2, y2, z2 = s
    k1, k2, k3 = p["k1"], p["k2"], p["k3"]
    return np.array([
        -y1 - z1 + k1 * (x2 - x1),
        x1 + a * y1 + k2 * (y2 - y1),
        p["b2"] + z1 * (x1 - p["c2"]) + k3 * (z2 - z1),
        p["sigma"] * (y2 - x2),
        p["gamma"] * x2 - y2 - x2 * z2,
        x2 * y2 - p["b1"] * z2,
    ])


def _coupled_jac(s, a, p):
    x1, y1, z1, x2, y2, z2 = s
    k1, k2, k3, sg = p["k1"], p["k2"], p["k3"], p["sigma"]
    return np.array([
        [-k1, -1.0, -1.0, k1, 0.0, 0.0],
        [1.0, a - k2, 0.0, 0.0, k2, 0.0],
        [z1, 0.0, x1 - p["c2"] - k3, 0.0, 0.0, k3],
        [0.0, 0.0, 0.0, -sg, sg, 0.0],
        [0.0, 0.0, 0.0, p["gamma"] - z2, -1.0, -x2],
        [0.0, 0.0, 0.0, y2, x2, -p["b1"]],
    ])


def _butterfly(s, a, p):
    x, y, z = s
    return np.array([a * (y - x), 2.0 * np.sign(x), abs(x) - 1.0])


def _butterfly_jac(s, a, p):
    x = s[0]
    return np.array([[-a, a, 0.0],
                     [0.0, 0.0, 0.0],
                     [np.sign(x), 0.0, 0.0]])


def _hadley(s, a, p):
    x, y, z = s
    b = p["b"]
    return np.array([-y * y - z * z - a * x + a * p["F"],
                     x * y - b * x * z - y + p["G"],
                     b * x * y + x * z - z])


def _hadley_jac(s, a, p):
    x, y, z = s
    b = p["b"]
    return np.array([[-a, -2.0 * y, -2.0 * z],
                     [y - b * z, x - 1.0, -b * x],
                     [b * y + z, b * x, x - 1.0]])


def _moore_spiegel(s, T, p):
    x, y, z = s
    R = p["R"]
    return np.array([y, z, -z - (T - R + R * x * x) * y - T * x])


def _moore_spiegel_jac(s, T, p):
    x, y, z = s
    R = p["R"]
    return np.array([[0.0, 1.0, 0.0],
                     [0.0, 0.0, 1.0],
                     [-2.0 * R * x * y - T, -(T - R + R * x * x), -1.0]])


def _halvorsen(s, a, p):
    x, y, z = s
    b, c = p["b"], p["c"]
    return np.array([-a * x - b * y - c * z - y * y,
                     -a * y - b * z - c * x - z * z,
                     -a * z - b * x - c * y - x * x])


def _halvorsen_jac(s, a, p):
    x, y, z = s
    b, c = p["b"], p["c"]
    return np.array([[-a, -b - 2.0 * y, -c],
                     [-c, -a, -b - 2.0 * z],
                     [-b - 2.0 * x, -c, -a]])


def _burke_shaw(s, sv, p):
    x, y, z = s
    return np.array([-sv * (x + y), -y - sv * x * z, sv * x * z + p["V"]])


def _burke_shaw_jac(s, sv, p):
    x, y, z = s
    return np.array([[-sv, -sv, 0.0],
                     [-sv * z, -1.0, -sv * x],
                     [sv * z, 0.0, sv * x]])


def _rucklidge(s, k, p):
    x, y, z = s
    return np.array([-k * x + p["lam"] * y - y * z, x, -z + y * y])


def _rucklidge_jac(s, k, p):
    x, y, z = s
    return np.array([[-k, p["lam"] - z, -y],
                     [1.0, 0.0, 0.0],
                     [0.0, 2.0 * y, -1.0]])


def _windmi(s, a, p):
    x, y, z = s
    return np.array([y, z, -a * z - y + p["b"] - np.exp(x)])


def _windmi_jac(s, a, p):
    x = s[0]
    return np.array([[0.0, 1.0, 0.0],
                     [0.0, 0.0, 1.0],
                     [-np.exp(x), -1.0, -a]])


def _build_catalog() -> dict[str, SystemSpec]:
    specs = [
        SystemSpec("lorenz", 3, _lorenz, _lorenz_jac,
                   {"sigma": 10.0, "beta": 8.0 / 3.0}, "rho", (90.0, 105.0), 600,
                   SimProtocol(100.0, 100.0, 20.0, (1e-10, 0.0, 1.0)), 0, "Lorenz"),
        SystemSpec("rossler", 3, _rossler, _rossler_jac,
                   {"b": 2.0, "c": 4.0}, "a", (0.37, 0.43), 600,
                   SimProtocol(15.0, 1000.0, 170.0, (-0.4, 0.6, 1.0)), 1, "Rossler"),
        SystemSpec("coupled_lorenz_rossler", 6, _coupled, _coupled_jac,
                   {"b1": 8.0 / 3.0, "b2": 0.2, "c2": 5.7, "k1": 0.1, "k2": 0.1,
                    "k3": 0.1, "gamma": 28.0, "sigma": 10.0},
                   "a", (0.3, 0.5), 600,
                   SimProtocol(50.0, 500.0, 30.0, (0.1, 0.1, 0.1, 0.0, 0.0, 0.0)), 2,
                   "Coupled Lorenz Rossler"),
        SystemSpec("complex_butterfly", 3, _butterfly, _butterfly_jac,
                   {}, "a", (0.10, 0.60), 600,
                   SimProtocol(10.0, 1000.0, 500.0, (0.2, 0.0, 0.0)), 3,
                   "Complex butterfly"),
        SystemSpec("hadley", 3, _hadley, _hadley_jac,
                   {"b": 4.0, "F": 8.0, "G": 1.0}, "a", (0.20, 0.25), 600,
                   SimProtocol(50.0, 500.0, 80.0, (-10.0, 0.0, 37.0)), 4,
                   "Hadley circulation"),
        SystemSpec("moore_spiegel", 3, _moore_spiegel, _moore_spiegel_jac,
                   {"R": 20.0}, "T", (7.0, 8.0), 600,
                   SimProtocol(100.0, 500.0, 10.0, (0.2, 0.2, 0.2)), 5, "Moore-Spiegel"),
        SystemSpec("halvorsen", 3, _halvorsen, _halvorsen_jac,
                   {"b": 4.0, "c": 4.0}, "a", (1.40, 1.85), 600,
                   SimProtocol(200.0, 200.0, 25.0, (-5.0, 0.0, 0.0)), 6, "Halvorsen"),
        SystemSpec("burke_shaw", 3, _burke_shaw, _burke_shaw_jac,
                   {"V": 10.0}, "s", (9.0, 13.0), 600,
                   SimProtocol(200.0, 500.0, 25.0, (0.6, 0.0, 0.0)), 7, "Burke-Shaw"),
        SystemSpec("rucklidge", 3, _rucklidge, _rucklidge_jac,
                   {"lam": 6.7}, "k", (1.0, 1.7), 600,
                   SimProtocol(50.0, 1000.0, 100.0, (1.0, 0.0, 4.5)), 8, "Rucklidge"),
        SystemSpec("windmi", 3, _windmi, _windmi_jac,
                   {"b": 2.5}, "a", (0.7, 1.0), 600,
                   SimProtocol(20.0, 1000.0, 250.0, (1.0, 0.0, 4.5)), 9, "WINDMI"),
    ]
    return {s.name: s for s in specs}


_CATALOG = _build_catalog()


def catalog() -> dict[str, SystemSpec]:
    """The ten built-in systems keyed by name (insertion ordered)."""
    return dict(_CATALOG)


def get_system(name: str) -> SystemSpec:
    try:
        return _CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown system {name!r}; choose from {sorted(_CATALOG)}") from None


# --------------------------------------------------------------------------

def integrate(spec: SystemSpec, eta: float, *, dt: float | None = None,
              n_steps: int | None = None, initial_condition=None) -> Trajectory:
    """Fixed-step RK4 from the protocol's initial condition.

    Returns ``n_steps + 1`` samples including the initial state.  Raises
    :class:`NonFinite` when the state overflows or becomes NaN.
    """
    if not np.isfinite(eta):
        raise ValueError("control value must be finite")
    dt = spec.sim.dt if dt is None else dt
    n_steps = spec.sim.n_steps if n_steps is None else n_steps
    y0 = np.asarray(spec.sim.initial_condition if initial_condition is None
                    else initial_condition, dtype=np.float64)
    if spec.kernel_id is not None and _backend.compiled:
        states = _backend.kernels.rk4_system(
            spec.kernel_id, spec.param_vector(), float(eta), y0, dt, n_steps)
    else:
        states = _backend.fallback.rk4_generic(
            spec.field_fn, spec.fixed_params, float(eta), y0, dt, n_steps)
    if not np.all(np.isfinite(states)):
        raise NonFinite(f"{spec.name}: trajectory diverged at {spec.control_name}={eta}")
    times = np.arange(n_steps + 1) * dt
    return Trajectory(times, states)


def drop_transient(traj: Trajectory, keep_last: float) -> np.ndarray:
    """Return the states sampled in the final ``keep_last`` seconds."""
    duration = traj.times[-1] - traj.times[0]
    if keep_last > duration + 1e-9:
        raise ValueError("keep_last exceeds trajectory duration")
    if traj.dt == 0.0:
        return traj.states.copy()
    n_keep = int(round(keep_last / traj.dt))
    if n_keep >= len(traj.states) - 1:
        return traj.states.copy()
    return traj.states[-n_keep:].copy()


def local_extrema(series):
    """Strict interior local maxima and minima as ``(index, value)`` lists."""
    v = np.asarray(series, dtype=float)
    if v.size < 3:
        raise ValueError("need at least 3 samples")
    mid, left, right = v[1:-1], v[:-2], v[2:]
    imax = np.flatnonzero((mid > left) & (mid > right)) + 1
    imin = np.flatnonzero((mid < left) & (mid < right)) + 1
    return ([(int(i), float(v[i])) for i in imax],
            [(int(i), float(v[i])) for i in imin])


@dataclass
class SweepItem:
    eta: float
    cloud: np.ndarray | None
    maxima: list = field(default_factory=list)
    minima: list = field(default_factory=list)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def simulate_item(spec: SystemSpec, eta: float) -> SweepItem:
    try:
        traj = integrate(spec, eta)
    except NonFinite as exc:
        log.warning("%s", exc)
        return SweepItem(float(eta), None, error=str(exc))
    cloud = drop_transient(traj, spec.sim.keep_last)
    mx, mn = local_extrema(cloud[:, 0])
    return SweepItem(float(eta), cloud, mx, mn)


def sweep(spec: SystemSpec, etas: Sequence[float]) -> list[SweepItem]:
    """Simulate every control value in order; divergent items are flagged."""
    if len(etas) == 0:
        raise ValueError("empty control grid")
    return [simulate_item(spec, float(eta)) for eta in etas]

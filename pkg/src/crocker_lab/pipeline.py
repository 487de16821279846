"""Two-phase sweep: per-control-value simulation, Lyapunov estimates and
persistence diagrams first, then the global partition and Betti vectors.

Every artifact written here is a plain CSV.  All stages are deterministic,
so identical configurations give byte-identical files (``timing.csv``
aside, which records wall-clock times).
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import crocker, dynamics, lyapunov, persistence, stats
from .errors import GridMismatch, MissingArtifacts, NonFinite, CrockerError
from .subsample import DEFAULT_TARGET, greedy_maxmin

log = logging.getLogger(__name__)


@dataclass
class SweepConfig:
    system: str = "lorenz"
    param_min: float | None = None
    param_max: float | None = None
    steps: int | None = None
    fs: float | None = None
    duration: float | None = None
    keep: float | None = None
    initial_condition: list[float] | None = None
    subsample: int = DEFAULT_TARGET
    bins: int = crocker.DEFAULT_BINS
    maxdim: int = 1
    kfit: int = lyapunov.DEFAULT_KFIT
    theiler: int | None = None
    renorm_every: int = 1
    out: str = "sweep_out"
    jobs: int = 1

    def __post_init__(self):
        if self.steps is not None and self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.bins < 1:
            raise ValueError("bins must be >= 1")
        if self.subsample < 2:
            raise ValueError("subsample target must be >= 2")
        if self.maxdim != 1:
            raise ValueError("maxdim is fixed at 1")
        if self.kfit < 1:
            raise ValueError("kfit must be >= 1")

    @classmethod
    def from_sources(cls, json_path=None, **flags) -> "SweepConfig":
        """Merge catalog defaults < JSON file < explicit flags (``None`` = unset)."""
        merged: dict = {}
        if json_path:
            with open(json_path) as fh:
                data = json.load(fh)
            unknown = set(data) - set(cls.__dataclass_fields__)
            if unknown:
                raise ValueError(f"unknown config keys: {sorted(unknown)}")
            merged.update(data)
        merged.update({k: v for k, v in flags.items() if v is not None})
        return cls(**merged)

    def spec(self) -> dynamics.SystemSpec:
        base = dynamics.get_system(self.system)
        changes = {}
        if self.fs is not None:
            changes["sampling_rate"] = float(self.fs)
        if self.duration is not None:
            changes["duration"] = float(self.duration)
        if self.keep is not None:
            changes["keep_last"] = float(self.keep)
        if self.initial_condition is not None:
            changes["initial_condition"] = tuple(float(v) for v in self.initial_condition)
        return base.with_sim(**changes) if changes else base

    def grid(self) -> np.ndarray:
        return self.spec().grid(self.steps, self.param_min, self.param_max)


@dataclass
class EtaResult:
    index: int
    eta: float
    ok: bool
    error: str | None = None
    maxima: list = field(default_factory=list)
    minima: list = field(default_factory=list)
    diagrams: tuple | None = None
    benettin: float = math.nan
    rosenstein: float = math.nan
    rosenstein_mse: float = math.nan
    t_benettin: float = math.nan
    t_rosenstein: float = math.nan
    t_persistence: float = math.nan


def process_eta(config: SweepConfig, index: int, eta: float) -> EtaResult:
    """Phase one for a single control value."""
    spec = config.spec()
    item = dynamics.simulate_item(spec, eta)
    res = EtaResult(index, float(eta), item.ok, item.error, item.maxima, item.minima)
    if not item.ok:
        return res
    try:
        t0 = time.perf_counter()
        res.benettin = lyapunov.benettin_mle(spec, eta, renorm_every=config.renorm_every).lam
        res.t_benettin = time.perf_counter() - t0
    except NonFinite as exc:
        log.warning("%s", exc)
    try:
        t0 = time.perf_counter()
        est = lyapunov.rosenstein_mle(item.cloud, spec.sim.dt, config.kfit, config.theiler)
        res.t_rosenstein = time.perf_counter() - t0
        res.rosenstein, res.rosenstein_mse = est.lam, est.mse
    except CrockerError as exc:
        log.warning("rosenstein failed at %s: %s", eta, exc)
    t0 = time.perf_counter()
    sub, _ = greedy_maxmin(item.cloud, config.subsample, 0)
    res.diagrams = persistence.cloud_persistence(sub)
    res.t_persistence = time.perf_counter() - t0
    return res


def _run_phase_one(config: SweepConfig, grid):
    args = [(config, i, float(e)) for i, e in enumerate(grid)]
    if config.jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            return list(pool.map(process_eta, *zip(*args)))
    return [process_eta(*a) for a in args]


@dataclass
class SweepOutput:
    config: SweepConfig
    results: list[EtaResult]
    matrices: dict[int, crocker.CrockerMatrix]
    l1: dict[int, np.ndarray]
    t_betti: dict[int, np.ndarray]

    @property
    def n_failed(self) -> int:
        return sum(not r.ok for r in self.results)


def run_sweep(config: SweepConfig, write: bool = True) -> SweepOutput:
    grid = config.grid()
    results = _run_phase_one(config, grid)
    good = [r for r in results if r.diagrams is not None]
    matrices, l1, t_betti = {}, {}, {}
    for dim in (0, 1):
        dgms = [r.diagrams[dim] for r in good]
        etas = np.array([r.eta for r in good])
        try:
            part = crocker.global_partition(dgms, config.bins)
        except CrockerError:
            # no finite bar at all: fall back to a unit interval
            part = crocker.uniform_partition(1.0, config.bins)
        cells = np.zeros((config.bins + 1, len(dgms)), dtype=np.int64)
        norms = np.full(len(results), np.nan)
        times = np.full(len(results), np.nan)
        for j, (r, dgm) in enumerate(zip(good, dgms)):
            t0 = time.perf_counter()
            cells[:, j] = crocker.betti_vector(dgm, part)
            norms[r.index] = crocker.l1_norm(cells[:, j])
            times[r.index] = time.perf_counter() - t0
        matrices[dim] = crocker.CrockerMatrix(dim, part, etas, cells)
        l1[dim] = norms
        t_betti[dim] = times
    output = SweepOutput(config, results, matrices, l1, t_betti)
    if write:
        write_outputs(output)
    return output


# ------------------------------------------------------------------ files

def _num(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "nan"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


def write_outputs(output: SweepOutput) -> Path:
    cfg = output.config
    out = Path(cfg.out)
    (out / "diagrams").mkdir(parents=True, exist_ok=True)
    spec = cfg.spec()
    run = asdict(cfg)
    run["resolved"] = {"control": spec.control_name,
                       "sampling_rate": spec.sim.sampling_rate,
                       "duration": spec.sim.duration,
                       "keep_last": spec.sim.keep_last,
                       "initial_condition": list(spec.sim.initial_condition)}
    run.pop("jobs")
    run.pop("out")
    (out / "run.json").write_text(json.dumps(run, indent=2, sort_keys=True) + "\n")

    for r in output.results:
        if r.diagrams is not None:
            (out / "diagrams" / f"eta_{r.index:04d}.csv").write_text(
                persistence.diagrams_to_csv(r.diagrams))

    bif = [["eta", "kind", "index", "value"]]
    for r in output.results:
        bif += [[_num(r.eta), "max", i, _num(v)] for i, v in r.maxima]
        bif += [[_num(r.eta), "min", i, _num(v)] for i, v in r.minima]
    (out / "bifurcation.csv").write_text(_csv(bif))

    for dim, mat in output.matrices.items():
        (out / f"crocker_h{dim}.csv").write_text(crocker.crocker_to_csv(mat))

    l1 = [["eta", "l1_h0", "l1_h1"]]
    lyap = [["eta", "benettin", "rosenstein", "rosenstein_mse"]]
    timing = [["eta", "benettin_s", "rosenstein_s", "l1_h0_s", "l1_h1_s"]]
    for r in output.results:
        n0, n1 = output.l1[0][r.index], output.l1[1][r.index]
        l1.append([_num(r.eta),
                   "nan" if np.isnan(n0) else str(int(n0)),
                   "nan" if np.isnan(n1) else str(int(n1))])
        lyap.append([_num(r.eta), _num(r.benettin), _num(r.rosenstein), _num(r.rosenstein_mse)])
        timing.append([_num(r.eta), _num(r.t_benettin), _num(r.t_rosenstein),
                       _num(r.t_persistence + output.t_betti[0][r.index]),
                       _num(r.t_persistence + output.t_betti[1][r.index])])
    (out / "l1.csv").write_text(_csv(l1))
    (out / "lyapunov.csv").write_text(_csv(lyap))
    (out / "timing.csv").write_text(_csv(timing))
    return out


def read_table(path) -> dict[str, np.ndarray]:
    """Read a numeric CSV with a header row into column arrays."""
    path = Path(path)
    if not path.exists():
        raise MissingArtifacts(f"missing {path}")
    rows = list(csv.reader(path.open()))
    head, body = rows[0], [r for r in rows[1:] if r]
    cols = {h: np.array([float(r[i]) for r in body]) for i, h in enumerate(head)}
    return cols


def timing_summary(path) -> dict[str, tuple[float, float]]:
    t = read_table(path)
    out = {}
    for k, v in t.items():
        if k == "eta":
            continue
        v = v[np.isfinite(v)]
        out[k] = (float(v.mean()), float(v.std())) if v.size else (math.nan, math.nan)
    return out


# ------------------------------------------------------------------ reports

def correlate(lyap_path, l1_path, system: str = "") -> list[dict]:
    """Pearson and Spearman between each Lyapunov column and each L1 column."""
    ly = read_table(lyap_path)
    l1 = read_table(l1_path)
    if ly["eta"].shape != l1["eta"].shape or not np.array_equal(ly["eta"], l1["eta"]):
        raise GridMismatch("lyapunov and L1 files use different control grids")
    rows = []
    for method in ("benettin", "rosenstein"):
        if method not in ly:
            continue
        for dim in (0, 1):
            x, y, dropped = stats.paired(ly[method], l1[f"l1_h{dim}"])
            try:
                r, rho = stats.pearson(x, y), stats.spearman(x, y)
            except (CrockerError, ValueError) as exc:
                log.warning("%s dim %d: %s", method, dim, exc)
                r = rho = math.nan
            rows.append({"system": system, "method_lyap": method, "dim": dim,
                         "pearson": r, "spearman": rho, "n_used": int(x.size),
                         "n_dropped": dropped})
    return rows


def correlation_csv(rows) -> str:
    table = [["system", "method_lyap", "dim", "pearson", "spearman", "n_used"]]
    for r in rows:
        table.append([r["system"], r["method_lyap"], r["dim"], _num(r["pearson"]),
                      _num(r["spearman"]), r["n_used"]])
    return _csv(table)


def load_run_config(sweep_dir) -> SweepConfig:
    path = Path(sweep_dir) / "run.json"
    if not path.exists():
        raise MissingArtifacts(f"{path} not found; run a sweep first")
    data = json.loads(path.read_text())
    data.pop("resolved", None)
    return SweepConfig(out=str(sweep_dir), **data)


def compare_lyapunov(sweep_dir, ks=(lyapunov.DEFAULT_KFIT,), curves: bool = True) -> dict:
    """Re-estimate Rosenstein exponents at several ``k`` against Benettin.

    Writes ``compare_lyapunov.csv`` (long format: eta, k, benettin,
    rosenstein), ``compare_fit.csv`` (per-k line fit of rosenstein against
    benettin) and, optionally, one divergence curve CSV per control value.
    """
    sweep_dir = Path(sweep_dir)
    cfg = load_run_config(sweep_dir)
    ly = read_table(sweep_dir / "lyapunov.csv")
    spec = cfg.spec()
    grid = cfg.grid()
    if not np.array_equal(grid, ly["eta"]):
        raise GridMismatch("lyapunov.csv does not match run.json grid")
    kmax = max(ks)
    scatter = [["eta", "k", "benettin", "rosenstein"]]
    per_k = {k: [] for k in ks}
    curve_dir = sweep_dir / "divergence"
    if curves:
        curve_dir.mkdir(exist_ok=True)
    for idx, (eta, ben) in enumerate(zip(grid, ly["benettin"])):
        item = dynamics.simulate_item(spec, float(eta))
        if not item.ok:
            continue
        try:
            full = lyapunov.divergence_curve(item.cloud, kmax, cfg.theiler)
        except CrockerError:
            full = None
        if curves and full is not None:
            rows = [["k", "mean_log_divergence"]]
            rows += [[int(k), _num(v)] for k, v in zip(full.step_indices, full.mean_log_divergence)]
            (curve_dir / f"eta_{idx:04d}.csv").write_text(_csv(rows))
        for k in ks:
            try:
                est = lyapunov.rosenstein_mle(item.cloud, spec.sim.dt, k, cfg.theiler)
                lam = est.lam
            except CrockerError:
                lam = math.nan
            scatter.append([_num(float(eta)), k, _num(ben), _num(lam)])
            per_k[k].append((ben, lam))
    (sweep_dir / "compare_lyapunov.csv").write_text(_csv(scatter))
    fits = [["k", "slope", "intercept", "mse", "pearson", "n_used"]]
    summary = {}
    for k, pairs in per_k.items():
        arr = np.array(pairs, dtype=float).reshape(-1, 2)
        x, y, _ = stats.paired(arr[:, 0], arr[:, 1])
        try:
            slope, icpt, mse = lyapunov.linear_fit(x, y)
            r = stats.pearson(x, y)
        except (CrockerError, ValueError):
            slope = icpt = mse = r = math.nan
        summary[k] = {"slope": slope, "intercept": icpt, "mse": mse, "pearson": r,
                      "n_used": int(x.size)}
        fits.append([k, _num(slope), _num(icpt), _num(mse), _num(r), int(x.size)])
    (sweep_dir / "compare_fit.csv").write_text(_csv(fits))
    return summary


# ------------------------------------------------------------------ heatmap

def heatmap_pgm(matrix: crocker.CrockerMatrix, cap: int = crocker.DISPLAY_CAP) -> str:
    """Plain PGM (P2): control value left to right, eps increasing upward,
    cells above ``cap`` white."""
    clipped = crocker.clip_for_display(matrix, cap)
    levels = np.where(clipped == crocker.BLANK, 255,
                      np.rint(clipped * (200.0 / cap)).astype(np.int64))
    img = levels[::-1, :]  # top image row = largest eps
    h, w = img.shape
    lines = ["P2", f"# crocker H{matrix.dim}, cap {cap}", f"{w} {h}", "255"]
    lines += [" ".join(str(int(v)) for v in row) for row in img]
    return "\n".join(lines) + "\n"


def read_pgm(text: str) -> np.ndarray:
    toks = [t for line in text.splitlines() if not line.startswith("#") for t in line.split()]
    if not toks or toks[0] != "P2":
        raise ValueError("not a plain PGM")
    w, h = int(toks[1]), int(toks[2])
    return np.array(toks[4:4 + w * h], dtype=np.int64).reshape(h, w)


"""Run configuration, orchestration, sweeps and persistence.

Configurations are flat ``key = value`` files; ``#`` starts a comment::

    delta = 0.5
    alpha = 0.5
    kappa = 1
    Dratio = 1
    mu = 1
    rho = 1
    h0 = 2
    profile.kind = cosine
    profile.amp_u = 0.5
    profile.amp_v = 0.5
    N = 200
    t_max = 150

A sweep file is a run configuration plus ``sweep.<key> = v1, v2, ...``
axes and optional ``sweep.workers`` / ``sweep.max_points``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import math
import numbers
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .dichotomy import (
    ClassificationReport,
    ClassifierConfig,
    EarlyExit,
    Verdict,
    classify,
    speed_estimate,
    thresholds,
)
from .errors import ConfigError, DomainError, IntegrationFault, PreconditionError
from .model import InitialProfile, Parameters, make_initial_profile, validate_initial_profile
from .solver import TRAJECTORY_COLUMNS, SolverConfig, Trajectory, run
from .waves import asymptotic_speed, minimal_wave_speed


def fmt(x) -> str:
    """Render a number with 17 significant digits (lossless for doubles)."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


# key -> (type, default); ``None`` default marks a required key
SCHEMA = {
    "delta": (float, None),
    "alpha": (float, None),
    "kappa": (float, None),
    "Dratio": (float, None),
    "mu": (float, None),
    "rho": (float, None),
    "h0": (float, None),
    "profile.kind": (str, None),
    "profile.amp_u": (float, 1.0),
    "profile.amp_v": (float, 1.0),
    "N": (int, None),
    "t_max": (float, None),
    "dt_policy": (str, "cfl"),
    "dt": (float, 1e-3),
    "dt_max": (float, 0.05),
    "output_dt": (float, 0.1),
    "snapshots": (int, 0),
    "flux_order": (int, 2),
    "theta": (float, -1.0),
    "early_exit": (bool, False),
    "classify.tol_v": (float, 1e-6),
    "classify.tol_m": (float, 1e-3),
    "classify.window": (int, 10),
    "speed.window_fraction": (float, 0.5),
    "speed.margin": (float, 0.05),
}
REQUIRED = tuple(k for k, (_, d) in SCHEMA.items() if d is None)
SWEEP_KEYS = {"sweep.workers": (int, 1), "sweep.max_points": (int, 400)}


def _convert(key, raw, typ, line=None):
    try:
        if typ is bool:
            low = raw.strip().lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if typ is int:
            val = float(raw)
            if val != int(val):
                raise ValueError(raw)
            return int(val)
        if typ is float:
            val = float(raw)
            if not math.isfinite(val):
                raise ValueError(raw)
            return val
        return raw.strip()
    except ValueError:
        raise ConfigError(f"cannot parse {raw!r} as {typ.__name__}", key=key, line=line) from None


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration; ``values`` holds the full flat mapping."""

    params: Parameters
    profile: InitialProfile
    solver: SolverConfig
    classifier: ClassifierConfig
    theta: float | None
    early_exit: bool
    window_fraction: float
    margin: float
    values: tuple = field(repr=False)

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def as_mapping(self) -> dict:
        return dict(self.values)

    def replace(self, **changes) -> "RunConfig":
        m = self.as_mapping()
        m.update(changes)
        return RunConfig.from_mapping(m)

    @property
    def run_id(self) -> str:
        return hashlib.sha256(serialize(self).encode()).hexdigest()[:16]

    @staticmethod
    def from_mapping(m: dict, lines: dict | None = None) -> "RunConfig":
        lines = lines or {}
        vals = {}
        for key in m:
            if key not in SCHEMA:
                raise ConfigError("unknown key", key=key, line=lines.get(key))
        for key, (typ, default) in SCHEMA.items():
            if key in m:
                v = m[key]
                vals[key] = _convert(key, v, typ, lines.get(key)) if isinstance(v, str) else typ(v)
            elif default is None:
                raise ConfigError("missing required key", key=key)
            else:
                vals[key] = default

        def guard(fn, *keys):
            try:
                return fn()
            except DomainError as exc:
                key = {"D": "Dratio", "amp_u": "profile.amp_u", "amp_v": "profile.amp_v",
                       "kind": "profile.kind"}.get(exc.field, exc.field)
                if key not in SCHEMA:
                    key = keys[0] if keys else None
                raise ConfigError(str(exc), key=key, line=lines.get(key)) from None

        params = guard(lambda: Parameters(delta=vals["delta"], alpha=vals["alpha"], kappa=vals["kappa"],
                                          D=vals["Dratio"], mu=vals["mu"], rho=vals["rho"]))
        profile = guard(lambda: make_initial_profile(vals["profile.kind"], vals["profile.amp_u"],
                                                     vals["profile.amp_v"], vals["h0"]), "h0")
        try:
            validate_initial_profile(profile)
        except PreconditionError as exc:
            raise ConfigError(str(exc), key="profile.kind") from None
        solver = guard(lambda: SolverConfig(N=vals["N"], t_max=vals["t_max"], dt_policy=vals["dt_policy"],
                                            dt=vals["dt"], dt_max=vals["dt_max"], output_dt=vals["output_dt"],
                                            snapshots=vals["snapshots"], flux_order=vals["flux_order"]))
        for key in ("classify.tol_v", "classify.tol_m", "classify.window", "speed.window_fraction"):
            if not vals[key] > 0:
                raise ConfigError("must be positive", key=key, line=lines.get(key))
        if vals["speed.margin"] < 0:
            raise ConfigError("must be non-negative", key="speed.margin", line=lines.get("speed.margin"))
        theta = vals["theta"]
        return RunConfig(
            params=params, profile=profile, solver=solver,
            classifier=ClassifierConfig(vals["classify.tol_v"], vals["classify.tol_m"], vals["classify.window"]),
            theta=None if theta < 0 else theta, early_exit=vals["early_exit"],
            window_fraction=vals["speed.window_fraction"], margin=vals["speed.margin"],
            values=tuple(vals.items()))


def _parse_lines(text: str):
    entries, lines = {}, {}
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=no)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key:
            raise ConfigError("empty key", line=no)
        if key in entries:
            raise ConfigError("duplicate key", key=key, line=no)
        entries[key] = value
        lines[key] = no
    return entries, lines


def parse_config(text: str) -> RunConfig:
    """Parse and validate a flat run configuration.

    Raises:
        ConfigError: unknown or missing key, unparseable value, or a value
            rejected by a model validator; the message names key and line.
    """
    entries, lines = _parse_lines(text)
    return RunConfig.from_mapping(entries, lines)


def serialize(cfg: RunConfig) -> str:
    return "".join(f"{k} = {fmt(v) if not isinstance(v, str) else v}\n" for k, v in cfg.values)


# ---------------------------------------------------------------------------
# Persistence


def trajectory_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRAJECTORY_COLUMNS)
    for row in traj.rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def snapshot_csv(y, u, v) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("y", "u", "v"))
    for row in zip(y, u, v):
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def read_trajectory_csv(path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {k: [float(r[k]) for r in rows] for k in TRAJECTORY_COLUMNS}


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, numbers.Integral):
        return int(x)
    if isinstance(x, numbers.Real):
        return float(x)
    return str(x)


@dataclass
class RunRecord:
    run_id: str
    config: dict
    thresholds: dict | None
    classification: dict
    trajectory_file: str | None
    snapshot_files: list
    duration: float
    error: str | None = None
    trajectory: Trajectory | None = field(default=None, repr=False, compare=False)

    @property
    def verdict(self) -> Verdict:
        return Verdict(self.classification["verdict"])

    def to_json(self) -> str:
        d = {k: v for k, v in self.__dict__.items() if k != "trajectory"}
        return json.dumps(_jsonable(d), sort_keys=True)


def run_single(cfg: RunConfig, out_dir=None, snapshots: int | None = None) -> RunRecord:
    """Simulate, classify and persist one configuration.

    Writes ``traj_<id>.csv`` (and ``snap_<id>_<k>.csv`` profile snapshots)
    to ``out_dir`` and appends the record to ``runs.jsonl``. Numerical
    faults are captured as a ``Failed`` verdict instead of propagating.
    """
    t0 = time.perf_counter()
    if snapshots is not None:
        cfg = cfg.replace(snapshots=snapshots)
    rid = cfg.run_id
    p, ip = cfg.params, cfg.profile
    th = thresholds(p, ip, cfg.theta)
    stop = EarlyExit(th, cfg.classifier) if cfg.early_exit else None
    error = None
    traj = None
    try:
        traj = run(p, ip, cfg.solver, stop=stop)
        rep = classify(traj, th, cfg.classifier)
        if rep.verdict is Verdict.SPREADING:
            if math.ceil(cfg.window_fraction * len(traj)) >= 10:
                s_lo, s_hi = asymptotic_speed(p), minimal_wave_speed(p)
                rep.speed = speed_estimate(traj, s_lo, s_hi, cfg.window_fraction, cfg.margin, rep.verdict)
            else:
                # an early exit at the crossing leaves too few rows for a slope
                rep.speed = {"slope": None, "bracket": None, "within_bracket": None,
                             "note": f"{len(traj)} rows are too few for a speed window"}
        rep.extra["h1_warning"] = traj.h1_warning
        rep.extra["steps"] = traj.steps
    except IntegrationFault as exc:
        error = f"{type(exc).__name__}: {exc} (t={exc.time})"
        rep = ClassificationReport(verdict=Verdict.FAILED, rule="fault", time=exc.time)
    tfile, sfiles = None, []
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        if traj is not None:
            tfile = os.path.join(out_dir, f"traj_{rid}.csv")
            with open(tfile, "w", newline="") as fh:
                fh.write(trajectory_csv(traj))
            for k, (t, h, y, u, v) in enumerate(traj.snapshots):
                path = os.path.join(out_dir, f"snap_{rid}_{k}.csv")
                with open(path, "w", newline="") as fh:
                    fh.write(snapshot_csv(y, u, v))
                sfiles.append(path)
    rec = RunRecord(run_id=rid, config=cfg.as_mapping(), thresholds=th.as_dict(), classification=rep.as_dict(),
                    trajectory_file=tfile, snapshot_files=sfiles, duration=time.perf_counter() - t0, error=error,
                    trajectory=traj)
    if out_dir is not None:
        with open(os.path.join(out_dir, "runs.jsonl"), "a") as fh:
            fh.write(rec.to_json() + "\n")
    return rec


# ---------------------------------------------------------------------------
# Sweeps


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple          # ((key, (v1, v2, ...)), ...)
    base: RunConfig
    workers: int = 1
    max_points: int = 400

    def __post_init__(self):
        if not self.axes:
            raise PreconditionError("sweep needs at least one axis")
        for key, values in self.axes:
            if key not in SCHEMA:
                raise ConfigError("unknown sweep axis", key=f"sweep.{key}")
            if len(values) == 0:
                raise PreconditionError(f"sweep axis {key!r} is empty")
        if self.size > self.max_points:
            raise PreconditionError(f"sweep has {self.size} points, limit is {self.max_points}")
        if self.workers < 1:
            raise PreconditionError("sweep.workers must be >= 1")

    @property
    def size(self) -> int:
        return math.prod(len(v) for _, v in self.axes)

    def points(self):
        """``(index, coordinates, config)`` in row-major coordinate order."""
        keys = [k for k, _ in self.axes]
        for i, coords in enumerate(itertools.product(*(v for _, v in self.axes))):
            yield i, coords, self.base.replace(**dict(zip(keys, coords)))


def parse_sweep(text: str) -> SweepSpec:
    entries, lines = _parse_lines(text)
    axes, base, extra = [], {}, {}
    for key, raw in entries.items():
        if key in SWEEP_KEYS:
            extra[key] = _convert(key, raw, SWEEP_KEYS[key][0], lines[key])
        elif key.startswith("sweep."):
            name = key[len("sweep."):]
            if name not in SCHEMA:
                raise ConfigError("unknown sweep axis", key=key, line=lines[key])
            typ = SCHEMA[name][0]
            items = [s for s in (x.strip() for x in raw.split(",")) if s]
            axes.append((name, tuple(_convert(key, s, typ, lines[key]) for s in items)))
        else:
            base[key] = raw
    base_cfg = RunConfig.from_mapping(base, lines)
    return SweepSpec(axes=tuple(axes), base=base_cfg,
                     workers=extra.get("sweep.workers", SWEEP_KEYS["sweep.workers"][1]),
                     max_points=extra.get("sweep.max_points", SWEEP_KEYS["sweep.max_points"][1]))


def _run_point(args):
    cfg, out_dir = args
    rec = run_single(cfg, out_dir=None)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        if rec.trajectory is not None:
            path = os.path.join(out_dir, f"traj_{rec.run_id}.csv")
            with open(path, "w", newline="") as fh:
                fh.write(trajectory_csv(rec.trajectory))
            rec.trajectory_file = path
    rec.trajectory = None
    return rec


def run_sweep(spec: SweepSpec, out_dir=None):
    """Run every grid point and write a summary in coordinate order.

    Returns ``(rows, records)``; each row holds the coordinates, run id,
    verdict, final front position, fitted slope and bracket flag.
    """
    pts = list(spec.points())
    jobs = [(cfg, out_dir) for _, _, cfg in pts]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as ex:
            records = list(ex.map(_run_point, jobs))
    else:
        records = [_run_point(j) for j in jobs]
    rows = []
    for (_, coords, _), rec in zip(pts, records):
        c = rec.classification
        speed = c.get("speed") or {}
        rows.append({**{k: v for (k, _), v in zip(spec.axes, coords)},
                     "run_id": rec.run_id, "verdict": c["verdict"], "h_final": c.get("h_final"),
                     "slope": speed.get("slope"), "within_bracket": speed.get("within_bracket")})
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "sweep_summary.csv"), "w", newline="") as fh:
            fh.write(summary_csv(spec, rows))
        with open(os.path.join(out_dir, "runs.jsonl"), "a") as fh:
            for rec in records:
                fh.write(rec.to_json() + "\n")
    return rows, records


def summary_csv(spec: SweepSpec, rows) -> str:
    cols = [k for k, _ in spec.axes] + ["run_id", "verdict", "h_final", "slope", "within_bracket"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        out = []
        for c in cols:
            v = r[c]
            out.append("" if v is None else v if isinstance(v, str) else fmt(v))
        w.writerow(out)
    return buf.getvalue()

"""Config-driven end-to-end runs over a grid of FIGARCH models.

Each (model, replicate) cell runs the stages in order

    simulate -> mutual information delay -> FNN dimension
             -> correlation-dimension scan -> Wolf, Kantz, direct map

and produces one :class:`CellRecord`.  A failing stage is recorded in the
cell's ``errors`` and only the stages that depend on it are skipped.  The
``stage_*`` functions are also what the command line calls, so a stage run
on a saved series gives exactly the in-pipeline result.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .corrdim import DimensionScan, dimension_scan
from .embedding import EmbeddingConfig, embed
from .errors import ConfigError, FigchaosError
from .fitting import FitPolicy
from .fnn import FnnCurve, fnn_fractions, min_embedding_dim
from .io import ingest_series, save_series, write_csv, write_json
from .lyapunov import (
    LyapunovEstimate,
    direct_map_lle,
    kantz_curve,
    kantz_curve_adaptive,
    kantz_mle,
    wolf_mle,
)
from .mutual_info import MiCurve, first_minimum, mi_curve
from .process import FigarchParams, SimConfig, TimeSeries, simulate

__all__ = [
    "D_GRID",
    "STAGES",
    "ModelSpec",
    "MiSettings",
    "FnnSettings",
    "CorrDimSettings",
    "WolfSettings",
    "KantzSettings",
    "MapSettings",
    "RunConfig",
    "CellRecord",
    "RunReport",
    "replicate_seed",
    "stage_mi",
    "stage_fnn",
    "stage_corrdim",
    "stage_wolf",
    "stage_kantz",
    "stage_map",
    "run_cell",
    "run_pipeline",
    "aggregate",
    "emit_tables",
]

D_GRID = (0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.80, 0.90)
STAGES = ("mi", "fnn", "corrdim", "wolf", "kantz", "direct_map")
ESTIMATORS = ("wolf", "kantz", "direct_map")


# -- configuration ------------------------------------------------------------


@dataclass(frozen=True)
class ModelSpec:
    """One grid entry: FIGARCH parameters, or an external CSV series."""

    id: str
    params: Optional[FigarchParams] = None
    path: Optional[str] = None
    column: Optional[Any] = None

    def __post_init__(self):
        if (self.params is None) == (self.path is None):
            raise ConfigError(f"model {self.id!r}: give either FIGARCH parameters or a path")

    @property
    def external(self) -> bool:
        return self.path is not None

    def to_dict(self) -> dict:
        if self.external:
            return {"id": self.id, "path": self.path, "column": self.column}
        return {"id": self.id, **self.params.to_dict()}


@dataclass(frozen=True)
class MiSettings:
    max_lag: int = 20
    bins: int = 64


@dataclass(frozen=True)
class FnnSettings:
    m_max: int = 10
    r_tol: float = 15.0
    a_tol: float = 2.0
    drop_threshold: float = 0.01
    exclusion: Optional[int] = None  # None: the delay


@dataclass(frozen=True)
class CorrDimSettings:
    dimensions: Tuple[int, ...] = tuple(range(1, 11))
    theiler: int = 0
    robust_theiler: bool = True  # also scan with w = delay
    n_radii: int = 32
    rel_tol: float = 0.10
    min_points: int = 5
    plateau_tol: float = 0.2
    min_plateau: int = 3

    def policy(self) -> FitPolicy:
        return FitPolicy(mode="stable", rel_tol=self.rel_tol, min_points=self.min_points)


@dataclass(frozen=True)
class WolfSettings:
    t_evolv: Optional[int] = None  # None: the delay
    scale_bounds: Tuple[float, float] = (0.001, 0.1)
    theta_max_deg: float = 30.0
    exclusion: Optional[int] = None
    min_replacements: int = 50


@dataclass(frozen=True)
class KantzSettings:
    eps_fraction: float = 0.05
    t_max: int = 15
    min_neighbors: int = 5
    exclusion: Optional[int] = None
    adaptive: bool = True
    min_references: int = 50
    max_fraction: float = 2.0
    fit_rel_tol: float = 0.10
    fit_min_points: int = 5
    fit_fallback: Tuple[float, float] = (1.0, 6.0)

    def policy(self) -> FitPolicy:
        return FitPolicy(
            mode="stable",
            rel_tol=self.fit_rel_tol,
            min_points=self.fit_min_points,
            fallback=tuple(self.fit_fallback),
        )


@dataclass(frozen=True)
class MapSettings:
    d0: float = 1e-8
    n_iter: int = 5000


_SECTIONS = {
    "mi": MiSettings,
    "fnn": FnnSettings,
    "corrdim": CorrDimSettings,
    "wolf": WolfSettings,
    "kantz": KantzSettings,
    "direct_map": MapSettings,
}


def _default_models() -> Tuple[ModelSpec, ...]:
    return tuple(ModelSpec(f"d={d:.2f}", FigarchParams.figarch11(d)) for d in D_GRID)


@dataclass(frozen=True)
class RunConfig:
    """Everything a suite run depends on.

    ``workers`` only controls parallelism and never changes the results.
    """

    models: Tuple[ModelSpec, ...] = field(default_factory=_default_models)
    replicates: int = 5
    seed: int = 0
    n_points: int = 4096
    burn_in: int = 2000
    truncation: int = 1000
    stages: Tuple[str, ...] = STAGES
    mi: MiSettings = MiSettings()
    fnn: FnnSettings = FnnSettings()
    corrdim: CorrDimSettings = CorrDimSettings()
    wolf: WolfSettings = WolfSettings()
    kantz: KantzSettings = KantzSettings()
    direct_map: MapSettings = MapSettings()
    save_series: bool = False
    out_dir: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        if not self.models:
            raise ConfigError("model grid is empty")
        ids = [m.id for m in self.models]
        if len(set(ids)) != len(ids):
            raise ConfigError(f"duplicate model ids in {ids}")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        bad = [s for s in self.stages if s not in STAGES]
        if bad:
            raise ConfigError(f"unknown stages {bad}; choose from {list(STAGES)}")
        try:
            SimConfig(self.n_points, self.burn_in, self.truncation, self.seed)
        except ValueError as exc:
            raise ConfigError(f"simulation settings: {exc}") from exc
        self._check_ranges()

    def _check_ranges(self):
        checks = [
            (self.mi.max_lag >= 2, "mi.max_lag must be >= 2"),
            (self.mi.bins >= 2, "mi.bins must be >= 2"),
            (self.fnn.m_max >= 1, "fnn.m_max must be >= 1"),
            (self.fnn.r_tol > 0 and self.fnn.a_tol > 0, "fnn tolerances must be positive"),
            (0 <= self.fnn.drop_threshold < 1, "fnn.drop_threshold must be in [0, 1)"),
            (len(self.corrdim.dimensions) > 0, "corrdim.dimensions is empty"),
            (all(m >= 1 for m in self.corrdim.dimensions), "corrdim.dimensions must be >= 1"),
            (self.corrdim.theiler >= 0, "corrdim.theiler must be >= 0"),
            (self.corrdim.n_radii >= 3, "corrdim.n_radii must be >= 3"),
            (len(self.wolf.scale_bounds) == 2, "wolf.scale_bounds needs two values"),
            (0 <= self.wolf.scale_bounds[0] < self.wolf.scale_bounds[1], "wolf.scale_bounds must be increasing"),
            (0 < self.wolf.theta_max_deg <= 180, "wolf.theta_max_deg must be in (0, 180]"),
            (self.kantz.eps_fraction > 0, "kantz.eps_fraction must be positive"),
            (self.kantz.t_max >= 1, "kantz.t_max must be >= 1"),
            (self.kantz.min_neighbors >= 1, "kantz.min_neighbors must be >= 1"),
            (self.direct_map.d0 > 0, "direct_map.d0 must be positive"),
            (self.direct_map.n_iter >= 1, "direct_map.n_iter must be >= 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    def sim_config(self, seed: int) -> SimConfig:
        return SimConfig(self.n_points, self.burn_in, self.truncation, seed)

    def to_dict(self) -> dict:
        out = {
            "models": [m.to_dict() for m in self.models],
            "replicates": self.replicates,
            "seed": self.seed,
            "n_points": self.n_points,
            "burn_in": self.burn_in,
            "truncation": self.truncation,
            "stages": list(self.stages),
            "save_series": self.save_series,
            "out_dir": self.out_dir,
        }
        for name in _SECTIONS:
            out[name] = dataclasses.asdict(getattr(self, name))
        return json.loads(json.dumps(out))  # tuples -> lists

    def config_hash(self) -> str:
        """SHA-256 of the materialised config (``workers`` excluded)."""
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config fields {unknown}")
        kw: Dict[str, Any] = {}
        for key, value in raw.items():
            if key == "models":
                kw["models"] = tuple(_parse_model(m, k) for k, m in enumerate(value))
            elif key in _SECTIONS:
                kw[key] = _parse_section(key, value)
            elif key == "stages":
                kw[key] = tuple(value)
            else:
                kw[key] = value
        try:
            return cls(**kw)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str, source: str = "<config>") -> "RunConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
        try:
            return cls.from_dict(raw)
        except ConfigError as exc:
            raise ConfigError(f"{source}: {exc}") from exc

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_json(Path(path).read_text(encoding="utf-8"), str(path))


def _parse_section(name: str, raw) -> Any:
    typ = _SECTIONS[name]
    if not isinstance(raw, dict):
        raise ConfigError(f"{name}: expected an object")
    known = {f.name: f for f in dataclasses.fields(typ)}
    unknown = sorted(set(raw) - set(known))
    if unknown:
        raise ConfigError(f"{name}: unknown fields {unknown}")
    kw = {k: tuple(v) if isinstance(v, list) else v for k, v in raw.items()}
    return typ(**kw)


def _parse_model(raw, k: int) -> ModelSpec:
    where = f"models[{k}]"
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected an object")
    raw = dict(raw)
    mid = raw.pop("id", None)
    if "path" in raw:
        unknown = sorted(set(raw) - {"path", "column"})
        if unknown:
            raise ConfigError(f"{where}: unknown fields {unknown}")
        return ModelSpec(mid or Path(raw["path"]).stem, path=str(raw["path"]), column=raw.get("column"))
    unknown = sorted(set(raw) - {"d", "omega", "phi", "beta"})
    if unknown:
        raise ConfigError(f"{where}: unknown fields {unknown}")
    if "d" not in raw:
        raise ConfigError(f"{where}: missing field 'd'")
    try:
        params = FigarchParams(
            d=float(raw["d"]),
            omega=float(raw.get("omega", 0.01)),
            phi=tuple(raw.get("phi", (0.01,))),
            beta=tuple(raw.get("beta", (0.01,))),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    return ModelSpec(mid or f"d={params.d:.2f}", params)


def replicate_seed(base_seed: int, model_index: int, replicate: int) -> int:
    """64-bit seed for one cell, derived without any global RNG state."""
    ss = np.random.SeedSequence(base_seed, spawn_key=(model_index, replicate))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# -- stages -------------------------------------------------------------------


def stage_mi(x: np.ndarray, s: MiSettings = MiSettings()) -> Tuple[MiCurve, int, bool]:
    curve = mi_curve(x, s.max_lag, s.bins)
    fm = first_minimum(curve)
    return curve, fm.lag, fm.clear


def stage_fnn(x: np.ndarray, delay: int, s: FnnSettings = FnnSettings()) -> Tuple[FnnCurve, int, bool]:
    curve = fnn_fractions(x, delay, s.m_max, s.r_tol, s.a_tol, s.exclusion)
    dim = min_embedding_dim(curve, s.drop_threshold)
    return curve, dim.dimension, dim.unfolded


def stage_corrdim(x: np.ndarray, delay: int, s: CorrDimSettings = CorrDimSettings(), theiler=None) -> DimensionScan:
    return dimension_scan(
        x,
        [delay],
        s.dimensions,
        theiler=s.theiler if theiler is None else theiler,
        policy=s.policy(),
        plateau_tol=s.plateau_tol,
        min_plateau=s.min_plateau,
        n_radii=s.n_radii,
    )


def stage_wolf(x: np.ndarray, delay: int, dimension: int, s: WolfSettings = WolfSettings()) -> LyapunovEstimate:
    vec = embed(x, EmbeddingConfig(delay, dimension))
    return wolf_mle(
        vec,
        s.t_evolv,
        tuple(s.scale_bounds),
        s.exclusion,
        math.radians(s.theta_max_deg),
        s.min_replacements,
    )


def stage_kantz(x: np.ndarray, delay: int, dimension: int, s: KantzSettings = KantzSettings()):
    """Returns the S(t) curve and the fitted estimate."""
    vec = embed(x, EmbeddingConfig(delay, dimension))
    kw = dict(t_max=s.t_max, exclusion=s.exclusion, min_neighbors=s.min_neighbors)
    if s.adaptive:
        curve = kantz_curve_adaptive(
            vec, s.eps_fraction, max_fraction=s.max_fraction, min_references=s.min_references, **kw
        )
    else:
        curve = kantz_curve(vec, eps_fraction=s.eps_fraction, **kw)
    return curve, kantz_mle(curve, policy=s.policy())


def stage_map(params: FigarchParams, sim: SimConfig, s: MapSettings = MapSettings()) -> LyapunovEstimate:
    return direct_map_lle(params, sim, s.d0, s.n_iter)


# -- records ------------------------------------------------------------------


@dataclass
class CellRecord:
    """Results for one (model, replicate) cell.  Missing values are None."""

    model_id: str
    model_index: int
    replicate: int
    seed: Optional[int]
    n_points: int = 0
    delay: Optional[int] = None
    delay_clear: Optional[bool] = None
    dimension: Optional[int] = None
    dimension_unfolded: Optional[bool] = None
    corrdim: Optional[List[Optional[float]]] = None
    corrdim_converged: Optional[bool] = None
    corrdim_robust: Optional[List[Optional[float]]] = None
    corrdim_robust_converged: Optional[bool] = None
    wolf: Optional[float] = None
    kantz: Optional[float] = None
    direct_map: Optional[float] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    curves: Dict[str, Any] = field(default_factory=dict)
    errors: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "CellRecord":
        return cls(**raw)


def _scan_values(scan: DimensionScan) -> List[Optional[float]]:
    return [None if e is None else float(e.value) for e in scan.estimates[0]]


def run_cell(config: RunConfig, model_index: int, replicate: int) -> CellRecord:
    """Run every configured stage for one cell; never raises for stage failures."""
    spec = config.models[model_index]
    stages = set(config.stages)
    seed = None if spec.external else replicate_seed(config.seed, model_index, replicate)
    rec = CellRecord(spec.id, model_index, replicate, seed)

    def fail(stage, exc):
        rec.errors[stage] = f"{type(exc).__name__}: {exc}"

    def skip(stage, cause):
        if stage in stages:
            rec.errors[stage] = f"skipped: {cause} failed"

    try:
        if spec.external:
            series = ingest_series(spec.path, spec.column)
        else:
            series = simulate(spec.params, config.sim_config(seed))
    except FigchaosError as exc:
        fail("simulate", exc)
        for s in config.stages:
            skip(s, "simulate")
        return rec
    x = np.asarray(series.values)
    rec.n_points = len(x)
    if config.save_series and config.out_dir and not spec.external:
        save_series(Path(config.out_dir) / "series" / f"{_slug(spec.id)}_r{replicate}.csv", series)

    needs_delay = stages & {"fnn", "corrdim", "wolf", "kantz"}
    if "mi" in stages or needs_delay:
        try:
            curve, rec.delay, rec.delay_clear = stage_mi(x, config.mi)
            rec.curves["mi"] = curve.values.tolist()
        except FigchaosError as exc:
            fail("mi", exc)
            for s in ("fnn", "corrdim", "wolf", "kantz"):
                skip(s, "mi")

    if rec.delay is not None and ({"fnn", "wolf", "kantz"} & stages):
        try:
            curve, rec.dimension, rec.dimension_unfolded = stage_fnn(x, rec.delay, config.fnn)
            rec.curves["fnn"] = curve.fractions.tolist()
        except FigchaosError as exc:
            fail("fnn", exc)
            for s in ("wolf", "kantz"):
                skip(s, "fnn")

    if rec.delay is not None and "corrdim" in stages:
        try:
            scan = stage_corrdim(x, rec.delay, config.corrdim)
            rec.corrdim = _scan_values(scan)
            rec.corrdim_converged = scan.converged[0]
            if scan.errors:
                rec.diagnostics["corrdim_cell_errors"] = {str(k[1]): v for k, v in scan.errors.items()}
            if config.corrdim.robust_theiler:
                scan = stage_corrdim(x, rec.delay, config.corrdim, theiler=rec.delay)
                rec.corrdim_robust = _scan_values(scan)
                rec.corrdim_robust_converged = scan.converged[0]
        except FigchaosError as exc:
            fail("corrdim", exc)

    if rec.dimension is not None:
        if "wolf" in stages:
            try:
                est = stage_wolf(x, rec.delay, rec.dimension, config.wolf)
                rec.wolf = est.value
                rec.diagnostics["wolf"] = est.diagnostics
            except FigchaosError as exc:
                fail("wolf", exc)
        if "kantz" in stages:
            try:
                curve, est = stage_kantz(x, rec.delay, rec.dimension, config.kantz)
                rec.kantz = est.value
                rec.diagnostics["kantz"] = est.diagnostics
                rec.curves["kantz"] = curve.y.tolist()
            except FigchaosError as exc:
                fail("kantz", exc)

    if "direct_map" in stages:
        if spec.external:
            rec.diagnostics["direct_map"] = {"skipped": "external series has no model equations"}
        else:
            try:
                est = stage_map(spec.params, config.sim_config(seed), config.direct_map)
                rec.direct_map = est.value
                rec.diagnostics["direct_map"] = est.diagnostics
            except FigchaosError as exc:
                fail("direct_map", exc)
    return rec


def _slug(text: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in text)


# -- aggregation and report ---------------------------------------------------


def _mode(values) -> Optional[int]:
    """Most frequent value; ties go to the smallest."""
    vals = [v for v in values if v is not None]
    if not vals:
        return None
    counts = Counter(vals)
    top = max(counts.values())
    return min(v for v, c in counts.items() if c == top)


def _signs(values) -> Dict[str, int]:
    out = {"positive": 0, "negative": 0, "zero": 0, "missing": 0}
    for v in values:
        if v is None:
            out["missing"] += 1
        elif v > 0:
            out["positive"] += 1
        elif v < 0:
            out["negative"] += 1
        else:
            out["zero"] += 1
    return out


def _median(values) -> Optional[float]:
    vals = [v for v in values if v is not None]
    return float(np.median(vals)) if vals else None


def aggregate(records: Sequence[CellRecord], model_ids: Sequence[str]) -> Dict[str, dict]:
    """Per-model summary, recomputable from the records alone."""
    out: Dict[str, dict] = {}
    for mid in model_ids:
        rs = [r for r in records if r.model_id == mid]
        delays = [r.delay for r in rs]
        dims = [r.dimension for r in rs]
        agg = {
            "replicates": len(rs),
            "modal_delay": _mode(delays),
            "delay_counts": {str(k): v for k, v in sorted(Counter(d for d in delays if d is not None).items())},
            "modal_dimension": _mode(dims),
            "dimension_counts": {str(k): v for k, v in sorted(Counter(d for d in dims if d is not None).items())},
            "corrdim_converged": sum(1 for r in rs if r.corrdim_converged),
            "cells_with_errors": sum(1 for r in rs if r.errors),
        }
        for est in ESTIMATORS:
            vals = [getattr(r, est) for r in rs]
            agg[f"{est}_signs"] = _signs(vals)
            agg[f"{est}_median"] = _median(vals)
        out[mid] = agg
    return out


@dataclass
class RunReport:
    config: dict
    records: List[CellRecord]
    aggregates: Dict[str, dict]
    provenance: Dict[str, Any]

    @property
    def model_ids(self) -> List[str]:
        return [m["id"] for m in self.config["models"]]

    @property
    def errors(self) -> Dict[Tuple[str, int], Dict[str, str]]:
        return {(r.model_id, r.replicate): r.errors for r in self.records if r.errors}

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "records": [r.to_dict() for r in self.records],
            "aggregates": self.aggregates,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "RunReport":
        recs = [CellRecord.from_dict(r) for r in raw["records"]]
        return cls(raw["config"], recs, raw["aggregates"], raw["provenance"])


def _run_one(args):
    config, mi, rep = args
    return run_cell(config, mi, rep)


def run_pipeline(config: RunConfig, write: bool = True) -> RunReport:
    """Run the whole grid; writes the tables and report when ``out_dir`` is set."""
    cells = []
    for k, spec in enumerate(config.models):
        reps = 1 if spec.external else config.replicates
        cells.extend((config, k, r) for r in range(reps))
    if config.workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(_run_one, cells))
    else:
        records = [_run_one(c) for c in cells]
    ids = [m.id for m in config.models]
    report = RunReport(
        config.to_dict(),
        records,
        aggregate(records, ids),
        {
            "config_hash": config.config_hash(),
            "seed": config.seed,
            "version": __version__,
            "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        },
    )
    if write and config.out_dir:
        emit_tables(report, config.out_dir)
    return report


def _fmt_list(values) -> str:
    if values is None:
        return ""
    return ";".join("" if v is None else repr(float(v)) for v in values)


RECORD_COLUMNS = [
    "model", "replicate", "seed", "n_points", "delay", "delay_clear", "dimension",
    "dimension_unfolded", "corrdim_converged", "corrdim_robust_converged", "wolf",
    "kantz", "direct_map", "corrdim", "errors",
]


def emit_tables(report: RunReport, out_dir) -> List[Path]:
    """Write table analogues, per-replicate records, plot data and ``report.json``.

    Model-level exponents in the tables are medians over replicates; delay
    and dimension are modes.
    """
    out = Path(out_dir)
    agg = report.aggregates
    ids = report.model_ids
    a = {mid: agg.get(mid, {}) for mid in ids}
    paths = [
        write_csv(out / "table1_delay.csv", ["model", "delay"],
                  [[m, a[m].get("modal_delay")] for m in ids]),
        write_csv(out / "table2_dimension.csv", ["model", "delay", "dimension"],
                  [[m, a[m].get("modal_delay"), a[m].get("modal_dimension")] for m in ids]),
        write_csv(out / "table3_wolf.csv", ["model", "delay", "dimension", "wolf"],
                  [[m, a[m].get("modal_delay"), a[m].get("modal_dimension"), a[m].get("wolf_median")] for m in ids]),
        write_csv(out / "table4_kantz.csv", ["model", "delay", "dimension", "kantz"],
                  [[m, a[m].get("modal_delay"), a[m].get("modal_dimension"), a[m].get("kantz_median")] for m in ids]),
        write_csv(out / "table5_exponents.csv", ["model", "wolf", "kantz", "direct_map"],
                  [[m, a[m].get("wolf_median"), a[m].get("kantz_median"), a[m].get("direct_map_median")] for m in ids]),
    ]
    rows = []
    for r in report.records:
        errs = "; ".join(f"{k}: {v}" for k, v in sorted(r.errors.items()))
        rows.append([
            r.model_id, r.replicate, r.seed, r.n_points, r.delay, r.delay_clear, r.dimension,
            r.dimension_unfolded, r.corrdim_converged, r.corrdim_robust_converged, r.wolf,
            r.kantz, r.direct_map, _fmt_list(r.corrdim), errs,
        ])
    paths.append(write_csv(out / "records.csv", RECORD_COLUMNS, rows))

    for name, xlabel, ylabel in (("mi", "lag", "mutual_information_bits"),
                                 ("fnn", "dimension", "fnn_fraction"),
                                 ("kantz", "t", "S")):
        start = 1 if name == "fnn" else 0
        rows = [
            [r.model_id, r.replicate, start + k, v]
            for r in report.records
            for k, v in enumerate(r.curves.get(name, []))
        ]
        paths.append(write_csv(out / f"curve_{name}.csv", ["model", "replicate", xlabel, ylabel], rows))
    paths.append(write_json(out / "report.json", report.to_dict()))
    return paths

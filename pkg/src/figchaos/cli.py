"""Command line entry point: ``figchaos <subcommand> ...``.

Stage subcommands read a series CSV and write CSV/JSON results, so stages can
be chained through files.  Stage settings come from the same JSON config the
``pipeline`` subcommand uses (``--config``), with command-line options taking
precedence; a stage run on a series saved by the pipeline therefore
reproduces the in-pipeline numbers exactly.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .errors import FigchaosError
from .io import ingest_series, save_series, write_csv, write_json
from .pipeline import (
    ModelSpec,
    RunConfig,
    run_pipeline,
    stage_corrdim,
    stage_fnn,
    stage_kantz,
    stage_map,
    stage_mi,
    stage_wolf,
)
from .process import FigarchParams, simulate

__all__ = ["main", "build_parser"]


def _dims(text: str) -> List[int]:
    """``"1-10"`` or ``"2,4,6"``."""
    try:
        if "-" in text:
            lo, hi = text.split("-", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad dimension list {text!r}") from exc


def _floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run config supplying stage settings")
    common.add_argument("--seed", type=int, help="random seed (base seed for pipeline)")
    common.add_argument("--out-dir", help="directory for output files")

    series_in = argparse.ArgumentParser(add_help=False)
    series_in.add_argument("input", help="series CSV with a header line")
    series_in.add_argument("--column", help="column name or 0-based index (default: first)")

    embedding = argparse.ArgumentParser(add_help=False)
    embedding.add_argument("--delay", type=int, required=True)
    embedding.add_argument("--dimension", type=int, required=True)

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--d", type=float, help="fractional order (default: first config model)")
    model.add_argument("--omega", type=float, default=0.01)
    model.add_argument("--phi", type=_floats, default=[0.01], help="comma-separated phi_1..phi_p")
    model.add_argument("--beta", type=_floats, default=[0.01], help="comma-separated beta_1..beta_q")
    model.add_argument("--n-points", type=int)
    model.add_argument("--burn-in", type=int)
    model.add_argument("--truncation", type=int)

    p = argparse.ArgumentParser(prog="figchaos", description="Chaos diagnostics for FIGARCH volatility.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common, model], help="simulate a FIGARCH path")
    s.add_argument("--output", help="CSV path (default: <out-dir>/series.csv)")

    s = sub.add_parser("mi", parents=[common, series_in], help="mutual information and delay")
    s.add_argument("--max-lag", type=int)
    s.add_argument("--bins", type=int)

    s = sub.add_parser("fnn", parents=[common, series_in], help="false nearest neighbors")
    s.add_argument("--delay", type=int, required=True)
    s.add_argument("--m-max", type=int)
    s.add_argument("--r-tol", type=float)
    s.add_argument("--a-tol", type=float)
    s.add_argument("--drop-threshold", type=float)
    s.add_argument("--exclusion", type=int)

    s = sub.add_parser("corrdim", parents=[common, series_in], help="correlation dimension scan")
    s.add_argument("--delay", type=int, required=True)
    s.add_argument("--dimensions", type=_dims, help="e.g. 1-10 or 2,4,6")
    s.add_argument("--theiler", type=int)
    s.add_argument("--n-radii", type=int)

    s = sub.add_parser("lyap-wolf", parents=[common, series_in, embedding], help="Wolf exponent")
    s.add_argument("--t-evolv", type=int)
    s.add_argument("--scale-bounds", type=_floats, help="min,max as fractions of attractor size")
    s.add_argument("--theta-max", type=float, help="degrees")
    s.add_argument("--exclusion", type=int)

    s = sub.add_parser("lyap-kantz", parents=[common, series_in, embedding], help="Kantz exponent")
    s.add_argument("--eps-fraction", type=float)
    s.add_argument("--t-max", type=int)
    s.add_argument("--min-neighbors", type=int)
    s.add_argument("--exclusion", type=int)
    s.add_argument("--fixed-eps", action="store_true", help="do not grow eps adaptively")

    s = sub.add_parser("lyap-map", parents=[common, model], help="direct-map local exponent")
    s.add_argument("--d0", type=float)
    s.add_argument("--n-iter", type=int)

    s = sub.add_parser("pipeline", parents=[common], help="run the full suite")
    s.add_argument("--replicates", type=int)
    s.add_argument("--workers", type=int)
    s.add_argument("--save-series", action="store_true")
    return p


def _override(section, **values):
    changes = {k: v for k, v in values.items() if v is not None}
    return dataclasses.replace(section, **changes) if changes else section


def _config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    top = {}
    if args.seed is not None:
        top["seed"] = args.seed
    if args.out_dir is not None:
        top["out_dir"] = args.out_dir
    for name in ("n_points", "burn_in", "truncation", "replicates", "workers"):
        v = getattr(args, name, None)
        if v is not None:
            top[name] = v
    if getattr(args, "save_series", False):
        top["save_series"] = True
    return dataclasses.replace(cfg, **top) if top else cfg


def _params(args, cfg: RunConfig) -> FigarchParams:
    if args.d is not None:
        return FigarchParams(args.d, args.omega, tuple(args.phi), tuple(args.beta))
    first = next((m for m in cfg.models if not m.external), None)
    if first is None:
        raise FigchaosError("no FIGARCH model given: pass --d or a config with one")
    return first.params


def _series(args):
    col = args.column
    if col is not None and col.isdigit():
        col = int(col)
    return ingest_series(args.input, col).values


def _emit(args, name: str, summary: dict, curve=None):
    out = Path(args.out_dir) if args.out_dir else None
    if out is not None:
        if curve is not None:
            header, rows = curve
            write_csv(out / f"{name}.csv", header, rows)
        write_json(out / f"{name}.json", summary)
    print(json.dumps(summary, sort_keys=True, default=float))


def _cmd_simulate(args, cfg):
    params = _params(args, cfg)
    series = simulate(params, cfg.sim_config(cfg.seed))
    path = Path(args.output) if args.output else Path(args.out_dir or ".") / "series.csv"
    save_series(path, series)
    print(json.dumps({"output": str(path), "n_points": len(series), "seed": cfg.seed, **params.to_dict()}))


def _cmd_mi(args, cfg):
    s = _override(cfg.mi, max_lag=args.max_lag, bins=args.bins)
    curve, lag, clear = stage_mi(_series(args), s)
    rows = list(zip(curve.lags.tolist(), curve.values.tolist()))
    _emit(args, "mi", {"delay": lag, "clear_minimum": clear, "bins": s.bins, "max_lag": s.max_lag},
          (["lag", "mutual_information_bits"], rows))


def _cmd_fnn(args, cfg):
    s = _override(cfg.fnn, m_max=args.m_max, r_tol=args.r_tol, a_tol=args.a_tol,
                  drop_threshold=args.drop_threshold, exclusion=args.exclusion)
    curve, dim, unfolded = stage_fnn(_series(args), args.delay, s)
    rows = list(zip(curve.dimensions.tolist(), curve.fractions.tolist()))
    _emit(args, "fnn", {"delay": args.delay, "dimension": dim, "unfolded": unfolded,
                        "attractor_size": curve.attractor_size, "exclusion": curve.exclusion},
          (["dimension", "fnn_fraction"], rows))


def _cmd_corrdim(args, cfg):
    s = _override(cfg.corrdim, dimensions=tuple(args.dimensions) if args.dimensions else None,
                  theiler=args.theiler, n_radii=args.n_radii)
    scan = stage_corrdim(_series(args), args.delay, s)
    rows = []
    for m, e in zip(scan.dimensions, scan.estimates[0]):
        rows.append([m, None if e is None else e.value, None if e is None else e.r_squared,
                     None if e is None else e.fit_lo, None if e is None else e.fit_hi])
    _emit(args, "corrdim",
          {"delay": args.delay, "theiler": s.theiler, "converged": scan.converged[0],
           "values": [r[1] for r in rows],
           "errors": {str(k[1]): v for k, v in scan.errors.items()}},
          (["dimension", "correlation_dimension", "r_squared", "fit_lo", "fit_hi"], rows))


def _cmd_wolf(args, cfg):
    s = _override(cfg.wolf, t_evolv=args.t_evolv,
                  scale_bounds=tuple(args.scale_bounds) if args.scale_bounds else None,
                  theta_max_deg=args.theta_max, exclusion=args.exclusion)
    est = stage_wolf(_series(args), args.delay, args.dimension, s)
    _emit(args, "lyap_wolf", est.to_dict())


def _cmd_kantz(args, cfg):
    s = _override(cfg.kantz, eps_fraction=args.eps_fraction, t_max=args.t_max,
                  min_neighbors=args.min_neighbors, exclusion=args.exclusion,
                  adaptive=False if args.fixed_eps else None)
    curve, est = stage_kantz(_series(args), args.delay, args.dimension, s)
    rows = list(zip(curve.x.astype(int).tolist(), curve.y.tolist()))
    _emit(args, "lyap_kantz", est.to_dict(), (["t", "S"], rows))


def _cmd_map(args, cfg):
    s = _override(cfg.direct_map, d0=args.d0, n_iter=args.n_iter)
    est = stage_map(_params(args, cfg), cfg.sim_config(cfg.seed), s)
    _emit(args, "lyap_map", est.to_dict())


def _cmd_pipeline(args, cfg):
    report = run_pipeline(cfg)
    for mid, a in report.aggregates.items():
        print(
            f"{mid}: delay={a['modal_delay']} dimension={a['modal_dimension']} "
            f"wolf+={a['wolf_signs']['positive']} kantz-={a['kantz_signs']['negative']} "
            f"map-={a['direct_map_signs']['negative']} of {a['replicates']}"
        )
    errors = report.errors
    for (mid, rep), errs in sorted(errors.items()):
        for stage, msg in sorted(errs.items()):
            print(f"error {mid} replicate {rep} {stage}: {msg}", file=sys.stderr)
    return 1 if errors else 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "mi": _cmd_mi,
    "fnn": _cmd_fnn,
    "corrdim": _cmd_corrdim,
    "lyap-wolf": _cmd_wolf,
    "lyap-kantz": _cmd_kantz,
    "lyap-map": _cmd_map,
    "pipeline": _cmd_pipeline,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        code = _COMMANDS[args.command](args, cfg)
    except FigchaosError as exc:
        print(f"figchaos {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"figchaos {args.command}: {exc}", file=sys.stderr)
        return 1
    return code or 0


if __name__ == "__main__":
    sys.exit(main())

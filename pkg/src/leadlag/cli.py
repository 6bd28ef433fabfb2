"""Command-line front end.

Exit codes: 0 success, 2 config error, 3 data error, 4 numeric error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import PipelineConfig, config_from_dict, load_config
from .corr import significance_sweep
from .errors import ConfigError, DataError, LeadLagError, NumericError
from .granger import causality_sweep
from .ingest import (asset_from_filename, month_from_filename, parse_bar_file,
                     snap_to_grid, write_normalized_csv)
from .netrank import aggregate_months, build_network, pagerank
from .pipeline import (adf_table_rows, load_month, network_rows, run_pipeline,
                       sig_rows, sweep_for)
from .returns import log_returns
from .scenario import Scenario, sample_census
from .synth import SynthSpec, generate, write_bar_files
from .timegrid import Month, month_range

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _write_lines(path: str | None, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _config_for(args, months: list[Month]) -> PipelineConfig:
    """Resolve a config from --config plus command-line overrides."""
    raw = load_config(args.config).snapshot() if args.config else {}
    raw["months"] = [m.label for m in months]
    if getattr(args, "data", None):
        raw["data_dir"] = args.data
        raw.pop("synth", None)
    if getattr(args, "seed", None) is not None:
        raw["seed"] = args.seed
    if getattr(args, "jobs", None) is not None:
        raw["jobs"] = args.jobs
    if getattr(args, "tau", None) is not None:
        raw["tau"] = args.tau
    if raw.get("synth") is None and raw.get("data_dir") is None:
        raise ConfigError("no data source: pass --in or a config with data_dir/synth")
    return config_from_dict(raw)


def _load_series(cfg: PipelineConfig, month: Month, index: int = 0):
    return load_month(cfg, month, index)


def cmd_ingest(args) -> int:
    cfg = _config_for(args, month_range(args.month))
    month = cfg.months[0]
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    data_dir = Path(cfg.data_dir)
    count = 0
    for path in sorted(data_dir.iterdir()):
        if month_from_filename(path.name) != month:
            continue
        asset = asset_from_filename(path.name)
        if asset is None:
            continue
        series = snap_to_grid(parse_bar_file(path, cfg.bar_format, asset=asset), month)
        write_normalized_csv(series, out_dir / f"{asset.base}{asset.quote}_{month.label}.csv")
        count += 1
        report = series.report
        if report is not None and (report.malformed or report.dropped_outside_grid):
            print(f"{path.name}: {len(report.malformed)} malformed rows, "
                  f"{report.dropped_outside_grid} outside {month.label}", file=sys.stderr)
    if count == 0:
        raise DataError(f"no input files for {month.label} in {data_dir}")
    print(f"normalized {count} series into {out_dir}")
    return EXIT_OK


def cmd_adf(args) -> int:
    months = month_range(args.months)
    cfg = _config_for(args, months)
    raw = cfg.snapshot()
    raw["adf_window"] = args.window
    cfg = config_from_dict(raw)
    monthly = {}
    for k, month in enumerate(cfg.months):
        monthly[month.label] = _load_series(cfg, month, k)
    _write_lines(args.out, adf_table_rows(cfg, monthly))
    return EXIT_OK


def cmd_census(args) -> int:
    cfg = _config_for(args, month_range(args.month))
    series = _load_series(cfg, cfg.months[0])
    counts = sample_census(series, Scenario.parse(args.scenario), tau=cfg.tau)
    header = "leader\\lagger," + ",".join(str(s.asset) for s in series)
    rows = [header]
    for i, s in enumerate(series):
        rows.append(f"{s.asset}," + ",".join(str(c) for c in counts[i]))
    _write_lines(args.out, rows)
    return EXIT_OK


def _sweep_command(args, estimator: str) -> int:
    cfg = _config_for(args, month_range(args.month))
    raw = cfg.snapshot()
    if estimator == "granger":
        raw["granger_scenario"] = args.scenario
    elif estimator == "corr":
        raw["corr_scenario"] = args.scenario
    cfg = config_from_dict(raw)
    series = _load_series(cfg, cfg.months[0])
    sig = sweep_for(cfg, estimator, series)
    _write_lines(args.out, sig_rows(sig))
    return EXIT_OK


def cmd_rank(args) -> int:
    months = month_range(args.months)
    cfg = _config_for(args, months)
    net_dir = Path(args.out).parent if args.out not in (None, "-") else Path.cwd()
    ranks = []
    for k, month in enumerate(cfg.months):
        series = _load_series(cfg, month, k)
        sig = sweep_for(cfg, args.estimator, series)
        net = build_network(sig, weighted=not args.estimator.startswith("granger"))
        if args.emit_network:
            tag = args.estimator.replace(":", "_")
            _write_lines(str(net_dir / f"network_{tag}_{month.label}.csv"),
                         network_rows(net))
        ranks.append(pagerank(net, damping=cfg.damping, tol=cfg.pagerank_tol,
                              max_iter=cfg.pagerank_max_iter))
    table = aggregate_months(ranks, aggregate=args.aggregate)
    rows = ["rank,asset,mean_score"]
    for pos, (asset, score) in enumerate(table.top(args.top), start=1):
        rows.append(f"{pos},{asset},{score!r}")
    _write_lines(args.out, rows)
    return EXIT_OK


def cmd_persist(args) -> int:
    months = month_range(args.months)
    cfg = _config_for(args, months)
    from .netrank import persistence as run_persistence
    sigs = []
    for k, month in enumerate(cfg.months):
        series = _load_series(cfg, month, k)
        sigs.append(sweep_for(cfg, args.estimator, series))
    report = run_persistence(sigs, level=args.level)
    rows = ["leader,lagger,sign,mean_statistic"]
    for pair in report.pairs:
        rows.append(f"{pair.leader},{pair.lagger},{int(pair.sign)},"
                    f"{pair.mean_statistic!r}")
    _write_lines(args.out, rows)
    return EXIT_OK


def cmd_synth(args) -> int:
    spec_path = Path(args.spec)
    if spec_path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        raw = tomllib.loads(spec_path.read_text())
    else:
        raw = json.loads(spec_path.read_text())
    month_label = raw.pop("month", None)
    if args.month:
        month_label = args.month
    if not month_label:
        raise ConfigError("synth needs a month (spec file key or --month)")
    if args.seed is not None:
        raw["seed"] = args.seed
    spec = SynthSpec.from_dict(raw)
    month = Month.parse(str(month_label))
    universe = generate(spec, month=month)
    written = write_bar_files(universe, args.out, month)
    print(f"wrote {len(written)} bar files to {args.out}")
    return EXIT_OK


def cmd_run(args) -> int:
    if not args.config:
        raise ConfigError("run requires --config")
    cfg = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    if overrides:
        raw = cfg.snapshot()
        raw.update(overrides)
        cfg = config_from_dict(raw)
    manifest = run_pipeline(cfg, args.out)
    print(f"bundle written to {args.out} (digest {manifest['bundle_digest'][:16]})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leadlag",
        description="Lead-lag relationships between one-minute return series.",
    )
    parser.add_argument("--version", action="version", version=__version__)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or TOML config file")
    common.add_argument("--in", "--data", dest="data",
                        help="directory of bar files (overrides config)")
    common.add_argument("--jobs", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--tau", type=int, default=None, help="lag in minutes")
    common.add_argument("--out", default="-", help="output file ('-' = stdout)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="normalize bar files")
    p.add_argument("--month", required=True)
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("adf", parents=[common], help="unit-root test table")
    p.add_argument("--months", required=True, help="YYYY-MM or YYYY-MM..YYYY-MM")
    p.add_argument("--window", choices=("month", "year"), default="month")
    p.set_defaults(fn=cmd_adf)

    p = sub.add_parser("census", parents=[common], help="pair sample counts")
    p.add_argument("--scenario", choices=("s1", "s2", "s3", "s4"), required=True)
    p.add_argument("--month", required=True)
    p.set_defaults(fn=cmd_census)

    p = sub.add_parser("corr", parents=[common], help="lagged correlation sweep")
    p.add_argument("--scenario", choices=("s1", "s2", "s3"), default="s1")
    p.add_argument("--month", required=True)
    p.set_defaults(fn=lambda a: _sweep_command(a, "corr"))

    p = sub.add_parser("pcorr", parents=[common], help="partial correlation sweep")
    p.add_argument("--month", required=True)
    p.set_defaults(fn=lambda a: _sweep_command(a, "pcorr"))

    p = sub.add_parser("granger", parents=[common], help="causality sweep")
    p.add_argument("--scenario", choices=("s3", "s4"), default="s3")
    p.add_argument("--month", required=True)
    p.set_defaults(fn=lambda a: _sweep_command(a, "granger"))

    p = sub.add_parser("rank", parents=[common], help="PageRank leader ranking")
    p.add_argument("--estimator", required=True,
                   help="corr | pcorr | granger, optionally ':sN' qualified")
    p.add_argument("--months", required=True)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--aggregate", choices=("score", "position"), default="score")
    p.add_argument("--emit-network", action="store_true")
    p.set_defaults(fn=cmd_rank)

    p = sub.add_parser("persist", parents=[common], help="cross-month persistence")
    p.add_argument("--estimator", required=True,
                   help="corr | pcorr | granger, optionally ':sN' qualified")
    p.add_argument("--months", required=True)
    p.add_argument("--level", type=float, default=0.01)
    p.set_defaults(fn=cmd_persist)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic universe")
    p.add_argument("--spec", required=True, help="synth spec (JSON or TOML)")
    p.add_argument("--month", default=None,
                   help="calendar month for the emitted files (or a 'month' spec key)")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("run", parents=[common], help="full pipeline")
    p.set_defaults(fn=cmd_run)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        stage = getattr(exc, "stage", None)
        where = f" [stage {stage}]" if stage else ""
        print(f"data error{where}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        stage = getattr(exc, "stage", None)
        where = f" [stage {stage}]" if stage else ""
        print(f"numeric error{where}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except LeadLagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

"""End-to-end monthly pipeline with a reproducible run manifest.

Stage order: load (ingest or synthesize) -> returns -> stationarity table
-> estimator sweeps per month -> networks -> PageRank -> cross-month
aggregation -> persistence -> manifest.  Fixed config plus fixed inputs
produce byte-identical data outputs; wall-clock timings live only in the
manifest's ``timings`` section, which is excluded from the bundle digest.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .assets import AssetId
from .config import PipelineConfig, resolve_estimator
from .corr import SigMatrix, significance_sweep
from .errors import DataError, LeadLagError
from .granger import causality_sweep
from .ingest import (asset_from_filename, month_from_filename, parse_bar_file,
                     snap_to_grid)
from .netrank import (LeadLagNetwork, RankVector, aggregate_months, build_network,
                      pagerank, persistence)
from .returns import AdfInsufficient, ReturnSeries, adf_test, concat_months, log_returns
from .scenario import Scenario
from .synth import generate
from .timegrid import Month


def _fmt(x: float) -> str:
    """Shortest round-trip decimal; deterministic across runs."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if np.isnan(x):
        return "nan"
    return repr(float(x))


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _file_tag(estimator: str) -> str:
    return estimator.replace(":", "_")


def sig_rows(sig: SigMatrix) -> list[str]:
    """Pair rows for one significance matrix, leaders first."""
    if sig.estimator == "granger":
        header = ("leader,lagger,n,alpha_hat,beta_hat,gamma_hat,R2,F,p,"
                  "pass_bonf,pass_nominal,status")
    else:
        header = "leader,lagger,tau,n,rho,p,pass_bonf,pass_nominal,status"
    rows = [header]
    pb = sig.pass_bonferroni
    pn = sig.pass_nominal
    n_assets = sig.n_assets
    for i in range(n_assets):
        for j in range(n_assets):
            if i == j:
                continue
            common = (f"{sig.assets[i]},{sig.assets[j]}")
            status = int(sig.status[i, j])
            if sig.estimator == "granger":
                ex = sig.extra
                rows.append(
                    f"{common},{int(sig.n[i, j])},{_fmt(ex['alpha_hat'][i, j])},"
                    f"{_fmt(ex['beta_hat'][i, j])},{_fmt(ex['gamma_hat'][i, j])},"
                    f"{_fmt(ex['r_squared'][i, j])},{_fmt(sig.statistic[i, j])},"
                    f"{_fmt(sig.p_value[i, j])},{int(pb[i, j])},{int(pn[i, j])},{status}"
                )
            else:
                rows.append(
                    f"{common},{sig.tau},{int(sig.n[i, j])},{_fmt(sig.statistic[i, j])},"
                    f"{_fmt(sig.p_value[i, j])},{int(pb[i, j])},{int(pn[i, j])},{status}"
                )
    return rows


def network_rows(net: LeadLagNetwork) -> list[str]:
    rows = ["from,to,weight"]
    for e in sorted(net.edges, key=lambda e: (e.src.code, e.dst.code)):
        rows.append(f"{e.src},{e.dst},{_fmt(e.weight)}")
    return rows


@dataclass
class _StageClock:
    timings: dict

    def run(self, name: str, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            result = fn(*args, **kwargs)
        except LeadLagError as exc:
            if not hasattr(exc, "stage"):
                exc.stage = name
            raise
        self.timings[name] = round(time.perf_counter() - t0, 6)
        return result


def load_real_month(cfg: PipelineConfig, month: Month) -> list[ReturnSeries]:
    data_dir = Path(cfg.data_dir)
    if not data_dir.is_dir():
        raise DataError(f"data directory {data_dir} does not exist")
    series = []
    for path in sorted(data_dir.iterdir()):
        if month_from_filename(path.name) != month:
            continue
        asset = asset_from_filename(path.name)
        if asset is None:
            continue
        if cfg.strict_universe and not asset.in_default_universe():
            raise DataError(f"{path.name}: {asset} outside the default universe")
        bars = parse_bar_file(path, cfg.bar_format, asset=asset)
        snapped = snap_to_grid(bars, month)
        series.append(log_returns(snapped))
    if not series:
        raise DataError(f"no input files for {month.label} in {data_dir}")
    return series


def load_month(cfg: PipelineConfig, month: Month, index: int) -> list[ReturnSeries]:
    if cfg.synth is not None:
        universe = generate(cfg.synth, month=month, seed=cfg.seed + index,
                            include_bars=False)
        return universe.returns
    return load_real_month(cfg, month)


def adf_table_rows(cfg: PipelineConfig,
                   monthly: dict[str, list[ReturnSeries]]) -> list[str]:
    rows = ["asset,window,statistic,n_obs,reject"]
    results = []
    if cfg.adf_window == "month":
        for label in sorted(monthly):
            for rs in monthly[label]:
                results.append(adf_test(rs, cfg.adf_critical_value, cfg.adf_min_obs))
    else:
        by_asset: dict[AssetId, list[ReturnSeries]] = {}
        for label in sorted(monthly):
            for rs in monthly[label]:
                by_asset.setdefault(rs.asset, []).append(rs)
        years = sorted({m.year for m in cfg.months})
        for asset in sorted(by_asset, key=lambda a: a.code):
            for year in years:
                parts = [rs for rs in by_asset[asset]
                         if rs.grid.label.startswith(f"{year:04d}-")]
                if not parts:
                    continue
                joined = concat_months(asset, parts, label=str(year))
                results.append(adf_test(joined, cfg.adf_critical_value,
                                        cfg.adf_min_obs))
    for res in results:
        if isinstance(res, AdfInsufficient):
            rows.append(f"{res.asset},{res.window},nan,{res.n_obs},insufficient")
        else:
            rows.append(f"{res.asset},{res.window},{_fmt(res.statistic)},"
                        f"{res.n_obs},{int(res.reject_unit_root)}")
    return rows


def sweep_for(cfg: PipelineConfig, estimator: str,
              series: list[ReturnSeries]) -> SigMatrix:
    """Run one estimator entry ("corr", "granger:s4", ...) over a month."""
    base, scenario_name = resolve_estimator(estimator, cfg)
    scenario = Scenario.parse(scenario_name)
    if base == "granger":
        return causality_sweep(series, scenario, tau=cfg.tau, alpha=cfg.alpha,
                               bonferroni=cfg.bonferroni, min_n=cfg.min_sample)
    return significance_sweep(series, base, scenario, tau=cfg.tau,
                              alpha=cfg.alpha, bonferroni=cfg.bonferroni,
                              min_n=cfg.min_sample, sig_test=cfg.sig_test)


def run_pipeline(cfg: PipelineConfig, out_dir: str | Path) -> dict:
    """Execute every stage and write the report bundle; returns the manifest.

    Any stage failure removes files already written and re-raises with the
    stage name attached.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    clock = _StageClock(timings={})

    def emit(name: str, lines: list[str]) -> Path:
        path = out_dir / name
        path.write_text("\n".join(lines) + "\n")
        written.append(path)
        return path

    try:
        fingerprints: dict[str, str] = {}
        monthly: dict[str, list[ReturnSeries]] = {}

        def load_all():
            if cfg.data_dir is not None:
                data_dir = Path(cfg.data_dir)
                if not data_dir.is_dir():
                    raise DataError(f"data directory {data_dir} does not exist")
                files = sorted(p for p in data_dir.iterdir() if p.suffix == ".csv")
                if not files:
                    raise DataError(f"no input files in {data_dir}")
                fingerprints.update({p.name: sha256_file(p) for p in files})

            def one(args):
                k, month = args
                return month.label, load_month(cfg, month, k)
            if cfg.jobs > 1:
                with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
                    for label, series in pool.map(one, enumerate(cfg.months)):
                        monthly[label] = series
            else:
                for item in enumerate(cfg.months):
                    label, series = one(item)
                    monthly[label] = series

        clock.run("load", load_all)

        clock.run("adf", lambda: emit("adf.csv", adf_table_rows(cfg, monthly)))

        sweeps: dict[str, dict[str, SigMatrix]] = {e: {} for e in cfg.estimators}

        def sweep_all():
            tasks = [(est, label) for est in cfg.estimators
                     for label in sorted(monthly)]

            def one(task):
                est, label = task
                return est, label, sweep_for(cfg, est, monthly[label])
            if cfg.jobs > 1:
                with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
                    for est, label, sig in pool.map(one, tasks):
                        sweeps[est][label] = sig
            else:
                for task in tasks:
                    est, label, sig = one(task)
                    sweeps[est][label] = sig

        clock.run("estimators", sweep_all)

        def emit_sweeps():
            for est in cfg.estimators:
                for label, sig in sorted(sweeps[est].items()):
                    tag = est.partition(":")[0]
                    emit(f"{tag}_{sig.scenario.value}_{label}.csv", sig_rows(sig))

        clock.run("write_sweeps", emit_sweeps)

        ranks: dict[str, list[RankVector]] = {e: [] for e in cfg.estimators}

        def networks_and_ranks():
            for est in cfg.estimators:
                weighted = not est.startswith("granger")
                for label, sig in sorted(sweeps[est].items()):
                    net = build_network(sig, weighted=weighted)
                    if cfg.emit_networks:
                        emit(f"network_{_file_tag(est)}_{label}.csv", network_rows(net))
                    ranks[est].append(pagerank(net, damping=cfg.damping,
                                               tol=cfg.pagerank_tol,
                                               max_iter=cfg.pagerank_max_iter))

        clock.run("networks", networks_and_ranks)

        def emit_rankings():
            for est in cfg.estimators:
                table = aggregate_months(ranks[est], aggregate=cfg.aggregate)
                rows = ["rank,asset,mean_score"]
                for pos, (asset, score) in enumerate(table.top(cfg.top_k), start=1):
                    rows.append(f"{pos},{asset},{_fmt(score)}")
                emit(f"ranking_{_file_tag(est)}.csv", rows)

        clock.run("rank", emit_rankings)

        def emit_persistence():
            for est in cfg.estimators:
                sigs = [sweeps[est][label] for label in sorted(sweeps[est])]
                report = persistence(sigs, level=cfg.persistence_level,
                                     correction=cfg.persistence_correction)
                rows = ["leader,lagger,sign,mean_statistic"]
                for pair in report.pairs:
                    rows.append(f"{pair.leader},{pair.lagger},{int(pair.sign)},"
                                f"{_fmt(pair.mean_statistic)}")
                emit(f"persistence_{_file_tag(est)}.csv", rows)
                if report.sign_flips:
                    flip_rows = ["leader,lagger"]
                    flip_rows += [f"{a},{b}" for a, b in report.sign_flips]
                    emit(f"persistence_{_file_tag(est)}_sign_flips.csv", flip_rows)

        clock.run("persistence", emit_persistence)

        manifest = {
            "version": __version__,
            "config": cfg.snapshot(),
            "inputs": fingerprints,
            "outputs": {p.name: sha256_file(p) for p in sorted(written)},
            "timings": clock.timings,
        }
        manifest["bundle_digest"] = _digest_of(manifest["outputs"])
        (out_dir / "manifest.json").write_text(
            json.dumps(manifest, indent=1, sort_keys=True) + "\n")
        return manifest
    except Exception:
        for path in written:
            path.unlink(missing_ok=True)
        (out_dir / "manifest.json").unlink(missing_ok=True)
        raise


def _digest_of(file_digests: dict[str, str]) -> str:
    h = hashlib.sha256()
    for name in sorted(file_digests):
        h.update(name.encode())
        h.update(file_digests[name].encode())
    return h.hexdigest()


def bundle_digest(out_dir: str | Path) -> str:
    """Digest over every bundle file except the manifest itself."""
    out_dir = Path(out_dir)
    digests = {p.name: sha256_file(p) for p in sorted(out_dir.iterdir())
               if p.is_file() and p.name != "manifest.json"}
    return _digest_of(digests)

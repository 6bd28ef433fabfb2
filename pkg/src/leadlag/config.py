"""Run configuration: defaults, file loading, validation.

Configs are plain key-value files in JSON or TOML.  Every knob a run can
depend on lives here so the manifest can snapshot the fully resolved
state.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:                     # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .ingest import BarFormat
from .synth import SynthSpec
from .timegrid import Month, month_range


@dataclass(frozen=True)
class PipelineConfig:
    """Fully resolved settings for one pipeline run."""

    data_dir: str | None = None
    synth: SynthSpec | None = None
    months: tuple[Month, ...] = ()
    estimators: tuple[str, ...] = ("corr", "pcorr", "granger")
    corr_scenario: str = "s1"
    granger_scenario: str = "s3"
    tau: int = 1
    alpha: float = 0.01
    bonferroni: int | None = None            # None: N*N at sweep time
    min_sample: int = 100
    sig_test: str = "t"
    adf_window: str = "month"                # or "year"
    adf_critical_value: float = -3.96
    adf_min_obs: int = 30
    damping: float = 0.85
    pagerank_tol: float = 1e-12
    pagerank_max_iter: int = 200
    aggregate: str = "score"
    persistence_level: float = 0.01
    persistence_correction: str = "none"
    top_k: int = 10
    emit_networks: bool = True
    bar_format: BarFormat = field(default_factory=BarFormat)
    strict_universe: bool = False
    price_field: str = "close"
    jobs: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.data_dir is None and self.synth is None:
            raise ConfigError("config needs either data_dir or a synth spec")
        if self.data_dir is not None and self.synth is not None:
            raise ConfigError("config cannot have both data_dir and synth")
        if not self.months:
            raise ConfigError("config needs at least one month")
        resolved = [resolve_estimator(est, self) for est in self.estimators]
        if len(set(resolved)) != len(resolved):
            raise ConfigError(f"duplicate estimator entries: {self.estimators}")
        if self.corr_scenario not in ("s1", "s2", "s3"):
            raise ConfigError("corr_scenario must be s1, s2 or s3")
        if self.granger_scenario not in ("s3", "s4"):
            raise ConfigError("granger_scenario must be s3 or s4")
        if self.adf_window not in ("month", "year"):
            raise ConfigError("adf_window must be 'month' or 'year'")
        if self.tau < 1:
            raise ConfigError("tau must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must be in (0, 1)")
        if self.price_field != "close":
            raise ConfigError("only the close price field is supported")

    def snapshot(self) -> dict:
        """JSON-ready dict of every resolved knob."""
        d = asdict(self)
        d["months"] = [m.label for m in self.months]
        if self.synth is not None:
            d["synth"] = asdict(self.synth)
        return d


_SCENARIOS_BY_BASE = {"corr": ("s1", "s2", "s3"), "pcorr": ("s3",),
                      "granger": ("s3", "s4")}


def resolve_estimator(entry: str, cfg: "PipelineConfig | None" = None) -> tuple[str, str]:
    """Split an estimator entry like "corr" or "granger:s4" into
    (base, scenario), defaulting unqualified entries from the config."""
    base, _, scenario = entry.partition(":")
    if base not in _SCENARIOS_BY_BASE:
        raise ConfigError(f"unknown estimator {entry!r}")
    if not scenario:
        if base == "corr":
            scenario = cfg.corr_scenario if cfg else "s1"
        elif base == "granger":
            scenario = cfg.granger_scenario if cfg else "s3"
        else:
            scenario = "s3"
    if scenario not in _SCENARIOS_BY_BASE[base]:
        raise ConfigError(
            f"estimator {base!r} cannot run under scenario {scenario!r}"
        )
    return base, scenario


def _months_from_value(value) -> tuple[Month, ...]:
    if isinstance(value, str):
        return tuple(month_range(value))
    if isinstance(value, list):
        out: list[Month] = []
        for item in value:
            out.extend(month_range(str(item)))
        return tuple(out)
    raise ConfigError(f"months must be a range string or list, got {type(value)}")


def config_from_dict(raw: dict) -> PipelineConfig:
    kwargs = dict(raw)
    if "months" in kwargs and not isinstance(kwargs["months"], tuple):
        kwargs["months"] = _months_from_value(kwargs["months"])
    if isinstance(kwargs.get("synth"), dict):
        kwargs["synth"] = SynthSpec.from_dict(kwargs["synth"])
    if isinstance(kwargs.get("bar_format"), dict):
        kwargs["bar_format"] = BarFormat.from_dict(kwargs["bar_format"])
    if "estimators" in kwargs:
        kwargs["estimators"] = tuple(kwargs["estimators"])
    try:
        return PipelineConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad config: {exc}") from exc


def load_config(path: str | Path) -> PipelineConfig:
    """Read a JSON or TOML config file."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if path.suffix.lower() == ".toml":
        try:
            raw = tomllib.loads(data.decode())
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    else:
        try:
            raw = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a table/object")
    return config_from_dict(raw)

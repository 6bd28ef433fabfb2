"""Lead-lag analysis of one-minute exchange-rate returns.

Pipeline: minute-bar ingestion -> log returns -> scenario-conditioned
pairing -> lagged/partial correlation and Granger causality with
family-wise significance control -> directed networks -> PageRank leader
ranking -> cross-month persistence.
"""

__version__ = "0.1.0"

from .assets import AssetId, DEFAULT_RATES
from .corr import (LaggedCorr, PartialCorr, SigMatrix, lagged_autocorrelation,
                   lagged_correlation, partial_correlation_closed,
                   partial_correlation_residual, significance_sweep)
from .errors import (ConfigError, DataError, DegenerateSampleError,
                     InsufficientSampleError, LeadLagError, NonConvergenceError,
                     NumericError, RankDeficiencyError, SingularityError,
                     UnstableSystemError)
from .granger import GrangerResult, causality_sweep, f_test, fit_full, fit_restricted, granger_test
from .ingest import BarFormat, BarSeries, MinuteBar, parse_bar_file, snap_to_grid
from .netrank import (LeadLagNetwork, RankVector, aggregate_months, build_network,
                      pagerank, persistence, row_stochastic)
from .returns import AdfInsufficient, AdfResult, ReturnSeries, adf_test, log_returns
from .scenario import PairedSample, Scenario, extract, sample_census
from .synth import PlantedEdge, SynthSpec, generate, oracle_lagged_corr
from .timegrid import Grid, Month, month_range

__all__ = [
    "AssetId", "DEFAULT_RATES",
    "LaggedCorr", "PartialCorr", "SigMatrix", "lagged_autocorrelation",
    "lagged_correlation", "partial_correlation_closed",
    "partial_correlation_residual", "significance_sweep",
    "ConfigError", "DataError", "DegenerateSampleError",
    "InsufficientSampleError", "LeadLagError", "NonConvergenceError",
    "NumericError", "RankDeficiencyError", "SingularityError",
    "UnstableSystemError",
    "GrangerResult", "causality_sweep", "f_test", "fit_full", "fit_restricted",
    "granger_test",
    "BarFormat", "BarSeries", "MinuteBar", "parse_bar_file", "snap_to_grid",
    "LeadLagNetwork", "RankVector", "aggregate_months", "build_network",
    "pagerank", "persistence", "row_stochastic",
    "AdfInsufficient", "AdfResult", "ReturnSeries", "adf_test", "log_returns",
    "PairedSample", "Scenario", "extract", "sample_census",
    "PlantedEdge", "SynthSpec", "generate", "oracle_lagged_corr",
    "Grid", "Month", "month_range",
]

import numpy as np
import pytest

from leadlag import AssetId, Grid, ReturnSeries
from leadlag.returns import MISSING, VALUE, ZERO


def series_from(values, asset="S00/SIM", label="test", zero_mask=None):
    """ReturnSeries over a free grid from a value list (NaN = missing)."""
    values = np.asarray(values, dtype=np.float64)
    grid = Grid.synthetic(label, len(values) + 1)
    return ReturnSeries.from_values(AssetId(asset), grid, values, zero_mask=zero_mask)


def series_with_states(values, states, asset="S00/SIM", label="test"):
    values = np.asarray(values, dtype=np.float64)
    state = np.asarray(states, dtype=np.uint8)
    grid = Grid.synthetic(label, len(values) + 1)
    return ReturnSeries(AssetId(asset), grid, values, state)


def random_series(rng, n_cells, asset="S00/SIM", label="test",
                  zero_prob=0.0, gap_prob=0.0, scale=1.0):
    """Gaussian return series with independent zero and missing cells."""
    values = rng.normal(0.0, scale, n_cells)
    state = np.full(n_cells, VALUE, dtype=np.uint8)
    if zero_prob > 0:
        zm = rng.random(n_cells) < zero_prob
        values[zm] = 0.0
        state[zm] = ZERO
    if gap_prob > 0:
        mm = rng.random(n_cells) < gap_prob
        values[mm] = np.nan
        state[mm] = MISSING
    grid = Grid.synthetic(label, n_cells + 1)
    return ReturnSeries(AssetId(asset), grid, values, state)


@pytest.fixture
def rng():
    return np.random.default_rng(20160104)

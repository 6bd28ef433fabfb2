"""Rate symbols and the default asset universe.

A rate code is always ``XXX/YYY``: a three-letter base leg quoted against a
three-letter quote leg.  The default universe is the 66 bid-quoted rates the
bundled histdata-style ingest defaults target (19 currencies, 10 equity
indexes, 2 oils, gold and silver); synthetic universes may introduce their
own legs, so leg membership is only enforced when asked for.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DataError

_CODE_RE = re.compile(r"^([A-Z0-9]{3})/([A-Z0-9]{3})$")

CURRENCY_LEGS = frozenset({
    "AUD", "CAD", "CHF", "CZK", "DKK", "EUR", "GBP", "HKD", "HUF", "JPY",
    "MXN", "NOK", "NZD", "PLN", "SEK", "SGD", "TRY", "USD", "ZAR",
})
INDEX_LEGS = frozenset({
    "AUX", "ETX", "FRX", "GRX", "HKX", "JPX", "NSX", "SPX", "UDX", "UKX",
})
COMMODITY_LEGS = frozenset({"BCO", "WTI", "XAG", "XAU"})
DEFAULT_LEGS = CURRENCY_LEGS | INDEX_LEGS | COMMODITY_LEGS

DEFAULT_RATES = (
    "AUD/CAD", "AUD/CHF", "AUD/JPY", "AUD/NZD", "AUD/USD", "AUX/AUD",
    "BCO/USD", "CAD/CHF", "CAD/JPY", "CHF/JPY", "ETX/EUR", "EUR/AUD",
    "EUR/CAD", "EUR/CHF", "EUR/CZK", "EUR/DKK", "EUR/GBP", "EUR/HUF",
    "EUR/JPY", "EUR/NOK", "EUR/NZD", "EUR/PLN", "EUR/SEK", "EUR/TRY",
    "EUR/USD", "FRX/EUR", "GBP/AUD", "GBP/CAD", "GBP/CHF", "GBP/JPY",
    "GBP/NZD", "GBP/USD", "GRX/EUR", "HKX/HKD", "JPX/JPY", "NSX/USD",
    "NZD/CAD", "NZD/CHF", "NZD/JPY", "NZD/USD", "SGD/JPY", "SPX/USD",
    "UDX/USD", "UKX/GBP", "USD/CAD", "USD/CHF", "USD/CZK", "USD/DKK",
    "USD/HKD", "USD/HUF", "USD/JPY", "USD/MXN", "USD/NOK", "USD/PLN",
    "USD/SEK", "USD/SGD", "USD/TRY", "USD/ZAR", "WTI/USD", "XAG/USD",
    "XAU/AUD", "XAU/CHF", "XAU/EUR", "XAU/GBP", "XAU/USD", "ZAR/JPY",
)


@dataclass(frozen=True, order=True)
class AssetId:
    """A seven-character rate symbol such as ``EUR/USD``."""

    code: str

    def __post_init__(self):
        if _CODE_RE.match(self.code) is None:
            raise DataError(f"bad rate code {self.code!r}, expected XXX/YYY")

    @classmethod
    def parse(cls, code: str, strict: bool = False) -> "AssetId":
        """Parse a code; with ``strict`` both legs must be in DEFAULT_LEGS."""
        asset = cls(code.strip().upper())
        if strict and not asset.in_default_universe():
            raise DataError(f"rate {asset.code} has a leg outside the default universe")
        return asset

    @property
    def base(self) -> str:
        return self.code[:3]

    @property
    def quote(self) -> str:
        return self.code[4:]

    def in_default_universe(self) -> bool:
        return self.base in DEFAULT_LEGS and self.quote in DEFAULT_LEGS

    def __str__(self) -> str:
        return self.code

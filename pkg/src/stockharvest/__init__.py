"""Collect per-ticker historical OHLCV CSV datasets for whole stock indexes."""

__version__ = "0.1.0"

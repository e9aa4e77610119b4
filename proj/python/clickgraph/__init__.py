"""Clickstream walk decomposition into cycles and simple paths, with a
deduplicated component store and behavioural queries."""

from ._core import (
    ClickgraphError,
    Store,
    cycle_id,
    decompose,
    describe,
    oracle_max_cycles,
    path_id,
    roundtrip,
    simulate,
)

__all__ = [
    "ClickgraphError",
    "Store",
    "cycle_id",
    "decompose",
    "describe",
    "oracle_max_cycles",
    "path_id",
    "roundtrip",
    "simulate",
]

"""Pathway mechanism: noisy gate, top-k routing, output aggregation."""

from .aggregate import Aggregator, RouteCache, predict, route_and_aggregate
from .generator import TRUNK_WIDTHS, PathwayGenerator, generate
from .weights import PathwayWeights, topk_filter

__all__ = [
    "PathwayGenerator", "generate", "TRUNK_WIDTHS",
    "PathwayWeights", "topk_filter",
    "Aggregator", "RouteCache", "route_and_aggregate", "predict",
]

"""Bloom maps: approximate key/value maps with bounded error rates."""

from ._bloommap import (
    BloomMap,
    BloomMapError,
    FormatError,
    ValueDistribution,
    build_map,
    deserialize,
    garsia_wachs_depths,
    generate_pmap,
    lb_corollary3,
    lb_theorem1,
    lb_theorem2,
    measure,
    space_report,
)

__all__ = [
    "BloomMap",
    "BloomMapError",
    "FormatError",
    "ValueDistribution",
    "build_map",
    "deserialize",
    "garsia_wachs_depths",
    "generate_pmap",
    "lb_corollary3",
    "lb_theorem1",
    "lb_theorem2",
    "measure",
    "space_report",
]

"""Shared-mobility trip analysis toolkit.

Thin python layer over the C++ core: Voronoi station partitions, the
member/casual classifiers, evaluation metrics and the synthetic trip
generator. The command-line interface (`mobility`) exposes the full
file-driven pipeline; this module exposes the main operations in-process.
"""

from ._core import (
    CohortProfile,
    ConfigError,
    DataError,
    FeatureSchema,
    VoronoiPartition,
    build_partition,
    default_profiles,
    fixture_stations,
    generate_trips,
    haversine_m,
    metrics_from_counts,
    percentile,
    polygon_contains,
    run_end_to_end,
    time_bin,
)

__all__ = [
    "CohortProfile",
    "ConfigError",
    "DataError",
    "FeatureSchema",
    "VoronoiPartition",
    "build_partition",
    "default_profiles",
    "fixture_stations",
    "generate_trips",
    "haversine_m",
    "metrics_from_counts",
    "percentile",
    "polygon_contains",
    "run_end_to_end",
    "time_bin",
]

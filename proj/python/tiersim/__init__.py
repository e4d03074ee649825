"""Python bindings for the tiersim multi-tier queueing simulator."""

from ._tiersim import (
    AnalyticMetrics,
    BottleneckEntry,
    BottleneckReport,
    ClassMetrics,
    MetricsReport,
    ResourceMetrics,
    Scenario,
    TiersimError,
    load_scenario,
    mmck,
    oracle_check,
    parse_scenario,
    rank_bottlenecks,
    report_from_json,
    run,
    synthesize,
    validate,
)

__all__ = [
    "AnalyticMetrics",
    "BottleneckEntry",
    "BottleneckReport",
    "ClassMetrics",
    "MetricsReport",
    "ResourceMetrics",
    "Scenario",
    "TiersimError",
    "load_scenario",
    "mmck",
    "oracle_check",
    "parse_scenario",
    "rank_bottlenecks",
    "report_from_json",
    "run",
    "synthesize",
    "validate",
]

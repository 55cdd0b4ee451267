from .monitor import (
    Decision,
    ScalerConfig,
    ScalerState,
    publish_sample,
    aggregate,
    decide,
    ScalerMonitor,
)

__all__ = [
    "Decision",
    "ScalerConfig",
    "ScalerState",
    "publish_sample",
    "aggregate",
    "decide",
    "ScalerMonitor",
]

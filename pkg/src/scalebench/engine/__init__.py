"""Miniature keyed stream-processing runtime driven by a virtual clock."""

from .dataflow import SinkSpec, Stage, UseCase
from .profiles import (
    BUILTIN_PROFILES,
    ResourceConfig,
    ResourceKind,
    SutProfile,
    get_profile,
)
from .runtime import Deployment, assign_partitions, repartition
from .windows import (
    Aggregate,
    KeyedWindowState,
    WindowKind,
    WindowResult,
    WindowSpec,
    windows_for,
)

__all__ = [
    "Aggregate",
    "BUILTIN_PROFILES",
    "Deployment",
    "KeyedWindowState",
    "ResourceConfig",
    "ResourceKind",
    "SinkSpec",
    "Stage",
    "SutProfile",
    "UseCase",
    "WindowKind",
    "WindowResult",
    "WindowSpec",
    "assign_partitions",
    "get_profile",
    "repartition",
    "windows_for",
]
